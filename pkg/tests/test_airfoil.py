import os

import numpy as np
import pytest

from bocvs.benchmarks import (AIRFOIL_SETS, airfoil_data_path,
                              load_airfoil_table, make_airfoil_env,
                              preprocess_airfoil)


def synthetic_table(n=1503, seed=0):
    """Rows with the real table's layout: positive cols 1 and 5, smooth output."""
    rng = np.random.default_rng(seed)
    freq = np.exp(rng.uniform(np.log(200.0), np.log(20000.0), n))
    angle = rng.uniform(0.0, 22.0, n)
    chord = rng.uniform(0.025, 0.30, n)
    velocity = rng.uniform(31.0, 71.0, n)
    thickness = np.exp(rng.uniform(np.log(4e-4), np.log(5.8e-2), n))
    z = np.column_stack([np.log(freq), angle, chord, velocity,
                         np.log(thickness)])
    z = (z - z.mean(axis=0)) / z.std(axis=0)
    out = (120.0 - 4.0 * z[:, 0] + 2.0 * z[:, 1] * z[:, 2]
           + 1.5 * np.sin(z[:, 3]) - 2.5 * z[:, 4]
           + rng.normal(0.0, 0.1, n))
    return np.column_stack([freq, angle, chord, velocity, thickness, out])


def write_table(path, table, fmt="%.6f"):
    with open(path, "w") as fh:
        for row in table:
            fh.write("\t".join(fmt % v for v in row) + "\n")


@pytest.fixture()
def table_path(tmp_path):
    path = os.path.join(tmp_path, "airfoil_self_noise.dat")
    write_table(path, synthetic_table())
    return path


def test_load_parses_all_rows(table_path):
    table = load_airfoil_table(table_path)
    assert table.shape == (1503, 6)


def test_load_reports_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_airfoil_table(os.path.join(tmp_path, "nope.dat"))


def test_load_rejects_short_tables(tmp_path):
    path = os.path.join(tmp_path, "short.dat")
    write_table(path, synthetic_table(n=12))
    with pytest.raises(ValueError, match="12 rows"):
        load_airfoil_table(path)


def test_load_flags_bad_rows_with_line_numbers(tmp_path):
    path = os.path.join(tmp_path, "bad.dat")
    rows = ["1.0 2.0 3.0 4.0 5.0 6.0"] * 5 + ["1.0 2.0 3.0"]
    with open(path, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    with pytest.raises(ValueError, match=":6:"):
        load_airfoil_table(path)
    path2 = os.path.join(tmp_path, "nonnum.dat")
    with open(path2, "w") as fh:
        fh.write("1.0 2.0 3.0 4.0 5.0 oops\n")
    with pytest.raises(ValueError, match=":1:"):
        load_airfoil_table(path2)


def test_preprocessing_minmax_is_exact(table_path):
    X, y = preprocess_airfoil(load_airfoil_table(table_path))
    np.testing.assert_array_equal(X.min(axis=0), np.zeros(5))
    np.testing.assert_array_equal(X.max(axis=0), np.ones(5))


def test_preprocessing_standardizes_the_output(table_path):
    _, y = preprocess_airfoil(load_airfoil_table(table_path))
    assert abs(y.mean()) < 1e-9
    assert abs(y.std() - 1.0) < 1e-9


def test_preprocessing_rejects_nonpositive_log_columns():
    table = synthetic_table(n=1200)
    table[3, 0] = 0.0
    with pytest.raises(ValueError, match="log"):
        preprocess_airfoil(table)


def test_surrogate_environment_from_fixture(table_path):
    env = make_airfoil_env(table_path)
    assert env.dim == 5
    assert env.default_sets == AIRFOIL_SETS
    rng = np.random.default_rng(0)
    vals = env.value(rng.uniform(size=(512, 5)))
    assert np.all(vals >= 0.0)
    assert np.all(np.isfinite(vals))


def test_surrogate_fits_the_training_rows(table_path):
    table = load_airfoil_table(table_path)
    X, y = preprocess_airfoil(table)
    env = make_airfoil_env(table_path)
    pred = env.value(X) - env.shift
    rmse = float(np.sqrt(np.mean((pred - y) ** 2)))
    assert rmse < 0.5  # half of the (unit) output standard deviation


def test_data_path_resolution(monkeypatch, tmp_path):
    assert airfoil_data_path("/x/y.dat") == "/x/y.dat"
    monkeypatch.setenv("BOCVS_DATA_DIR", str(tmp_path))
    assert airfoil_data_path() == os.path.join(str(tmp_path),
                                               "airfoil_self_noise.dat")
    monkeypatch.delenv("BOCVS_DATA_DIR")
    assert airfoil_data_path() == os.path.join("data",
                                               "airfoil_self_noise.dat")

import os

import numpy as np
import pytest

from bocvs.algorithm import TraceRow
from bocvs.benchmarks import CostModel, OracleSolution
from bocvs.control import uniform_family
from bocvs.harness import (ExperimentConfig, PlayValueCache, build_cost_model,
                           build_environment, build_family, build_kernel,
                           build_ledger, cost_regret, default_grid,
                           eval_count_curve, ledger_from_csv, ledger_to_csv,
                           oracle_for_config, quality_regret, report,
                           run_experiment, simple_regret_curve, summarize,
                           summary_from_csv, trace_from_csv, trace_to_csv,
                           run_algorithm)

from helpers import make_toy_env


def toy_config(**overrides):
    base = dict(environment="hartmann12", cost_model="cheap",
                algorithm="proposed", budget=3.0, support_upper=1.0,
                explore_cap=3.0, tau=None, mc_samples=4, oracle_samples=64,
                candidates=16, refine_rounds=2, seeds="0,1",
                lengthscale="0.5", output_scale=4.0)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_round_trip_is_stable():
    cfg = toy_config(tau=3, max_incumbents=32, lazy_filter=True)
    text = cfg.to_text()
    parsed = ExperimentConfig.from_text(text)
    assert parsed == cfg
    assert parsed.to_text() == text


def test_config_rejects_unknown_keys_and_names():
    with pytest.raises(ValueError):
        ExperimentConfig.from_text("environment = hartmann12\nbogus = 1\n")
    with pytest.raises(ValueError):
        toy_config(environment="rosenbrock").validate()
    with pytest.raises(ValueError):
        toy_config(algorithm="random").validate()
    with pytest.raises(ValueError):
        toy_config(cost_model="expensive").validate()
    with pytest.raises(ValueError):
        toy_config(budget=-1.0).validate()
    with pytest.raises(ValueError):
        toy_config(seeds="").validate()
    with pytest.raises(ValueError):
        ExperimentConfig.from_text("environment hartmann12\n")


def test_config_custom_cost_means_and_sets():
    cfg = toy_config(cost_model="custom", cost_means="0.1,0.2",
                     control_sets="1,2|1,2,3,4,5,6,7,8,9,10,11,12")
    cfg.validate()
    env = build_environment(cfg)
    fam = build_family(cfg, env)
    assert fam.sets == [(1, 2), tuple(range(1, 13))]
    model = build_cost_model(cfg, fam)
    np.testing.assert_array_equal(model.means, [0.1, 0.2])


def test_build_kernel_broadcasts_lengthscale():
    cfg = toy_config(lengthscale="0.3")
    k = build_kernel(cfg, 12)
    np.testing.assert_array_equal(k.lengthscales, np.full(12, 0.3))
    cfg2 = toy_config(lengthscale=",".join(["0.2"] * 12))
    assert build_kernel(cfg2, 12).lengthscales.shape == (12,)
    with pytest.raises(ValueError):
        build_kernel(toy_config(lengthscale="0.2,0.3"), 12)


def test_trace_csv_round_trip(tmp_path):
    trace = run_algorithm(toy_config(seeds="0"), seed=0)
    path = os.path.join(tmp_path, "trace.csv")
    trace_to_csv(trace, path)
    rows = trace_from_csv(path)
    assert len(rows) == len(trace.rows)
    for a, b in zip(trace.rows, rows):
        assert (a.t, a.phase, a.set_index, a.s1) == (b.t, b.phase, b.set_index,
                                                     b.s1)
        np.testing.assert_array_equal(a.pq, b.pq)
        np.testing.assert_array_equal(a.complement, b.complement)
        assert a.y == b.y and a.cost_draw == b.cost_draw
        assert a.cum_cost == b.cum_cost and a.alpha == b.alpha


def _toy_oracle():
    # Two sets on the toy peak: the full set attains 1.0, the half set less.
    return OracleSolution(alpha=0.1, values=np.array([0.8, 1.0]),
                          queries=[np.array([0.5]), np.array([0.5, 0.5])],
                          v_plus=1.0, i_plus=2, tolerated=(2,),
                          cost_means=np.array([0.1, 0.5]), i_star=2)


def _toy_rows():
    mk = lambda t, i, pq, cum, alpha: TraceRow(
        t, "exploit", i, np.asarray(pq, dtype=float), np.empty(0), 0.0, 0.1,
        cum, alpha, (1, 2))
    return [mk(1, 2, [0.5, 0.5], 0.5, 0.1), mk(2, 1, [0.5], 0.6, 0.1),
            mk(3, 2, [0.1, 0.1], 1.1, 0.05)]


def test_quality_regret_zero_for_optimal_play_at_zero_alpha():
    env = make_toy_env(2)
    fam = uniform_family(2, [(1,), (1, 2)])
    oracle = _toy_oracle()
    oracle.alpha = 0.0
    rows = [TraceRow(1, "exploit", 2, np.array([0.5, 0.5]), np.empty(0), 0.0,
                     0.1, 0.1, 0.0, (2,))]
    q = quality_regret(oracle, rows, env, fam, n_samples=16)
    assert q["alpha0"][0] == pytest.approx(0.0, abs=1e-9)


def test_quality_regret_nonpositive_at_full_tolerance():
    env = make_toy_env(2)
    fam = uniform_family(2, [(1,), (1, 2)])
    oracle = _toy_oracle()
    oracle.alpha = 1.0
    rows = _toy_rows()
    q = quality_regret(oracle, rows, env, fam, n_samples=64)
    assert np.all(q["alpha0"] <= 0.0)
    np.testing.assert_allclose(q["alpha0"], -q["exp_value"], atol=1e-12)


def test_quality_regret_uses_recorded_alpha_per_step():
    env = make_toy_env(2)
    fam = uniform_family(2, [(1,), (1, 2)])
    oracle = _toy_oracle()
    rows = _toy_rows()
    q = quality_regret(oracle, rows, env, fam, n_samples=64)
    expected_t = np.array([(1 - 0.1), (1 - 0.1), (1 - 0.05)]) * oracle.v_plus
    np.testing.assert_allclose(q["alphat"], expected_t - q["exp_value"],
                               atol=1e-12)
    np.testing.assert_allclose(q["cum_alpha0"], np.cumsum(q["alpha0"]),
                               atol=1e-12)


def test_cost_regret_measures_overpay_in_means_only():
    model = CostModel([0.1, 0.5], noise_sd=0.0)
    oracle = _toy_oracle()
    rows = _toy_rows()  # plays sets 2, 1, 2; i_star = 2 with mean 0.5
    rc = cost_regret(model, oracle, rows)
    np.testing.assert_allclose(rc, [0.0, 0.0, 0.0])  # cheaper play clamps to 0
    oracle2 = _toy_oracle()
    oracle2.tolerated = (1, 2)
    oracle2.i_star = 1  # cheapest tolerated now costs 0.1
    rc2 = cost_regret(model, oracle2, rows)
    np.testing.assert_allclose(rc2, [0.4, 0.0, 0.4])


def test_cost_regret_recomputes_cheapest_for_other_cost_means():
    oracle = _toy_oracle()
    oracle.tolerated = (1, 2)
    model = CostModel([0.9, 0.2], noise_sd=0.0)  # different from oracle's
    rc = cost_regret(model, oracle, _toy_rows())
    np.testing.assert_allclose(rc, [0.0, 0.7, 0.0])


def test_simple_regret_curve_and_eval_counts():
    env = make_toy_env(2)
    fam = uniform_family(2, [(1,), (1, 2)])
    oracle = _toy_oracle()
    ledger = build_ledger(oracle, _toy_rows(), env, fam,
                          CostModel([0.1, 0.5], noise_sd=0.0), n_samples=64)
    grid = np.array([0.0, 0.5, 1.0, 1.5])
    sr = simple_regret_curve(ledger, oracle.v_plus, grid)
    assert np.isnan(sr[0])  # nothing played within zero spend
    assert sr[1] == pytest.approx(1.0 - ledger["exp_value"][0])
    assert sr[2] == pytest.approx(min(1.0 - ledger["exp_value"][:2].max(),
                                      sr[1]))
    valid = sr[~np.isnan(sr)]
    assert np.all(np.diff(valid) <= 1e-12)  # nonincreasing in budget
    ec = eval_count_curve(ledger, grid)
    np.testing.assert_array_equal(ec, [0, 1, 2, 3])


def test_ledger_csv_round_trip(tmp_path):
    env = make_toy_env(2)
    fam = uniform_family(2, [(1,), (1, 2)])
    ledger = build_ledger(_toy_oracle(), _toy_rows(), env, fam,
                          CostModel([0.1, 0.5], noise_sd=0.0), n_samples=32)
    path = os.path.join(tmp_path, "ledger.csv")
    ledger_to_csv(ledger, path)
    back = ledger_from_csv(path)
    for col in ledger:
        if col == "phase":
            assert back[col] == ledger[col]
        else:
            np.testing.assert_array_equal(back[col], ledger[col])


def test_summarize_standard_error_definition():
    grid = np.array([0.0, 1.0])
    curves = [np.array([np.nan, 1.0]), np.array([np.nan, 2.0]),
              np.array([np.nan, 3.0])]
    counts = [np.array([0, 5]), np.array([0, 6]), np.array([0, 7])]
    rows = summarize(curves, counts, grid)
    assert rows[1]["simple_regret_mean"] == pytest.approx(2.0)
    expected_se = np.std([1.0, 2.0, 3.0], ddof=1) / np.sqrt(3)
    assert rows[1]["simple_regret_se"] == pytest.approx(expected_se)
    assert rows[1]["n_seeds"] == 3
    single = summarize([np.array([np.nan, 1.0])], [np.array([0, 5])], grid)
    assert single[1]["simple_regret_se"] == 0.0


def test_run_experiment_writes_all_artifacts(tmp_path):
    cfg = toy_config(out_dir=str(tmp_path / "cell"))
    result = run_experiment(cfg)
    assert len(result["traces"]) == 2  # one per seed
    assert len(result["ledgers"]) == 2
    assert os.path.exists(result["summary"])
    assert not result["errors"]
    rows = summary_from_csv(result["summary"])
    assert len(rows) == len(default_grid(cfg.budget))
    assert all(r["n_seeds"] <= 2 for r in rows)


def test_run_experiment_reruns_byte_identical(tmp_path):
    cfg_a = toy_config(out_dir=str(tmp_path / "a"))
    cfg_b = toy_config(out_dir=str(tmp_path / "b"))
    ra = run_experiment(cfg_a)
    rb = run_experiment(cfg_b)
    for pa, pb in zip(ra["traces"] + [ra["summary"]],
                      rb["traces"] + [rb["summary"]]):
        with open(pa, "rb") as fa, open(pb, "rb") as fb:
            assert fa.read() == fb.read()


def test_report_aggregates_and_refuses_mismatched_cells(tmp_path):
    cfg1 = toy_config(out_dir=str(tmp_path / "proposed"))
    cfg2 = toy_config(algorithm="ucb-psq", out_dir=str(tmp_path / "ucb"))
    run_experiment(cfg1)
    run_experiment(cfg2)
    csv_text, table = report([cfg1.out_dir, cfg2.out_dir])
    assert "proposed" in csv_text and "ucb-psq" in csv_text
    assert len(csv_text.strip().splitlines()) == 1 + 2 * len(
        default_grid(cfg1.budget))
    assert "algorithm" in table
    cfg3 = toy_config(cost_model="moderate", out_dir=str(tmp_path / "other"))
    run_experiment(cfg3)
    with pytest.raises(ValueError):
        report([cfg1.out_dir, cfg3.out_dir])


def test_oracle_cache_round_trip(tmp_path):
    cfg = toy_config()
    cache = str(tmp_path / "oracle.txt")
    first = oracle_for_config(cfg, cache_path=cache)
    assert os.path.exists(cache)
    second = oracle_for_config(cfg, cache_path=cache)
    np.testing.assert_array_equal(first.values, second.values)
    assert first.tolerated == second.tolerated
    assert first.i_star == second.i_star
    # A different cell must not reuse the cached file silently.
    other = oracle_for_config(toy_config(distribution_variance=0.04),
                              cache_path=cache)
    assert other.alpha == 0.1


def test_trace_schema_is_identical_across_algorithms(tmp_path):
    paths = []
    for alg in ("proposed", "ucb-psq", "ts-psq", "etc-50"):
        cfg = toy_config(algorithm=alg, seeds="0", plays_per_group=2,
                         out_dir=str(tmp_path / alg))
        result = run_experiment(cfg)
        assert not result["errors"], result["errors"]
        paths.append(result["traces"][0])
    headers = set()
    for p in paths:
        with open(p) as fh:
            headers.add(fh.readline())
    assert len(headers) == 1

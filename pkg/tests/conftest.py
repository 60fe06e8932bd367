import numpy as np
import pytest

from bocvs.benchmarks import (compute_oracle, make_ackley_env,
                              make_hartmann_env, named_cost_model)
from bocvs.control import truncnorm_family


@pytest.fixture(scope="session")
def hartmann_oracle():
    """Full-default offline oracle for the Hartmann cell (alpha 0.1, var 0.02)."""
    env = make_hartmann_env()
    fam = truncnorm_family(env.dim, env.default_sets, 0.02)
    return compute_oracle(env, fam, alpha=0.1,
                          cost_means=named_cost_model("cheap").means)


@pytest.fixture(scope="session")
def ackley_oracle():
    env = make_ackley_env()
    fam = truncnorm_family(env.dim, env.default_sets, 0.02)
    return compute_oracle(env, fam, alpha=0.1,
                          cost_means=named_cost_model("cheap").means)

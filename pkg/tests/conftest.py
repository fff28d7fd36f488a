import numpy as np
import pytest

from randsplit import allen_cahn, numkit, sparse_flow
from randsplit.harness.fixtures import ladder_truth_1d
from randsplit.switching import SwitchConfig, sample_schedule


@pytest.fixture(scope="session")
def canonical():
    return sparse_flow.canonical_1d()


@pytest.fixture(scope="session")
def random_sparse_6d():
    rng = np.random.default_rng(42)
    return sparse_flow.SparseProblem.from_design(rng.standard_normal((10, 6)),
                                                 rng.standard_normal(10))


@pytest.fixture(scope="session")
def ac_small():
    """n=50 classification fixture with moderate epsilon."""
    n = 50
    truth = ladder_truth_1d(n)
    mask = allen_cahn.stride_mask(n, 5)
    problem = allen_cahn.ClassificationProblem.build(
        mask, truth[mask], alpha=1.0, epsilon=0.25, laplacian=numkit.laplacian_1d(n, 0.2),
    )
    return problem


def make_schedule(rate, horizon, seed, initial_regime=0):
    return sample_schedule(SwitchConfig(rate, initial_regime, seed=seed), horizon)


@pytest.fixture
def schedule_factory():
    return make_schedule

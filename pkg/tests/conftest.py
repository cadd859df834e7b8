import numpy as np
import pytest

from formsel.clustering import agglomerate, cut
from formsel.emd import distance_matrix, ground_costs
from formsel.field_grid import GridSpec, team_distributions
from formsel.fixture import CLUSTER_THRESHOLD, FORMATIONS, build_arms, build_snapshots
from formsel.learner import LearningConfig, cluster_environment, learn_all
from formsel.sim_env import EnvConfig, SyntheticEnv


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def costs(grid):
    return ground_costs(grid)


@pytest.fixture(scope="session")
def fixture_distributions(grid):
    return team_distributions(build_snapshots(), grid)


@pytest.fixture(scope="session")
def fixture_clusters(fixture_distributions, costs):
    dm = distance_matrix(fixture_distributions, costs)
    return cut(agglomerate(dm, "average"), CLUSTER_THRESHOLD)


@pytest.fixture(scope="session")
def fixture_db(fixture_clusters, fixture_distributions, grid):
    cfg = LearningConfig(games_per_round=60, max_games_per_formation=600, draws=20_000, seed=7)
    base = SyntheticEnv(build_arms(), EnvConfig((33, 41), 7))
    env = cluster_environment(base, fixture_clusters, FORMATIONS)
    return learn_all(fixture_clusters, env, FORMATIONS, cfg, fixture_distributions, {"grid": grid.to_dict()})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

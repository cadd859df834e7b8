"""Pick the best corner-kick formation against clusters of opponent teams.

Opponents are fingerprinted as block-count vectors over the attacking third,
grouped by Earth Mover's Distance, and each formation's success probability
is learnt sequentially with Beta-Binomial posteriors compared through the
HDI of their difference.
"""
__version__ = "0.1.0"

from .bayes import BetaPosterior, GameObservation, HdiInterval, hdi, update
from .clustering import ClusterSet, agglomerate, classify, cut
from .comparator import ComparisonOutcome, RopeInterval, decide, difference_hdi, rank, tie_break
from .emd import distance_matrix, emd, ground_costs
from .field_grid import GridSpec, PlayerSnapshot, TeamDistribution, assign_block, snapshot_to_distribution
from .learner import AssociationDB, LearningConfig, learn_all, learn_context, load_db, per_team_audit, save_db
from .selector import select
from .sim_env import ArmSpec, EnvConfig, SyntheticEnv, make_validation_env

__all__ = [
    "ArmSpec", "AssociationDB", "BetaPosterior", "ClusterSet", "ComparisonOutcome", "EnvConfig",
    "GameObservation", "GridSpec", "HdiInterval", "LearningConfig", "PlayerSnapshot", "RopeInterval",
    "SyntheticEnv", "TeamDistribution", "agglomerate", "assign_block", "classify", "cut", "decide",
    "difference_hdi", "distance_matrix", "emd", "ground_costs", "hdi", "learn_all", "learn_context",
    "load_db", "make_validation_env", "per_team_audit", "rank", "save_db", "select",
    "snapshot_to_distribution", "tie_break", "update",
]

"""Earth Mover's Distance between team distributions.

Both sides are normalised to unit mass and the exact transportation problem
is solved with Euclidean ground distances between block centroids.
"""
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, SolverError, ZeroMass
from .field_grid import GridSpec, TeamDistribution
from .kernels.transport import emd_full, pairwise_emd

MAX_PIVOTS = 100_000

MassLike = Union[TeamDistribution, Sequence[float], np.ndarray]


@dataclass
class TransportPlan:
    flow: np.ndarray
    objective: float


@dataclass
class DistanceMatrix:
    team_ids: List[str]
    D: np.ndarray

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("team_id," + ",".join(self.team_ids) + "\n")
            for tid, row in zip(self.team_ids, self.D):
                fh.write(tid + "," + ",".join(f"{v:.9g}" for v in row) + "\n")


def ground_costs(grid: GridSpec) -> np.ndarray:
    c = grid.centroids()
    return np.sqrt(((c[:, None, :] - c[None, :, :]) ** 2).sum(axis=-1))


def _as_mass(d: MassLike) -> np.ndarray:
    m = d.mass if isinstance(d, TeamDistribution) else d
    return np.ascontiguousarray(m, dtype=float)


def _check(a: np.ndarray, b: np.ndarray, costs: np.ndarray):
    if a.shape != b.shape or costs.shape != (a.shape[0], b.shape[0]):
        raise DimensionMismatch(
            f"distributions {a.shape} / {b.shape} do not fit cost matrix {costs.shape}"
        )
    if a.sum() <= 0 or b.sum() <= 0:
        raise ZeroMass("distribution has zero total mass")


def transport_plan(a: MassLike, b: MassLike, costs: np.ndarray) -> TransportPlan:
    a, b = _as_mass(a), _as_mass(b)
    costs = np.ascontiguousarray(costs, dtype=float)
    _check(a, b, costs)
    total, flow, iters = emd_full(a, b, costs, MAX_PIVOTS)
    if iters < 0:
        raise SolverError("transportation simplex hit its pivot limit")
    return TransportPlan(flow, float(total))


def emd(a: MassLike, b: MassLike, costs: np.ndarray) -> float:
    return transport_plan(a, b, costs).objective


def distance_matrix(ds: Sequence[TeamDistribution], costs: np.ndarray) -> DistanceMatrix:
    if len(ds) < 2:
        raise ValueError("need at least two distributions")
    rows = [_as_mass(d) for d in ds]
    costs = np.ascontiguousarray(costs, dtype=float)
    for m in rows:
        _check(m, rows[0], costs)
    masses = np.ascontiguousarray(rows)
    D = pairwise_emd(masses, costs, MAX_PIVOTS)
    if np.any(D < 0):
        raise SolverError("transportation simplex hit its pivot limit")
    return DistanceMatrix([d.team_id for d in ds], D)

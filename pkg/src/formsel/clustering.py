"""Agglomerative clustering of teams over an EMD distance matrix."""
import json
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .emd import DistanceMatrix, emd
from .errors import InvalidMatrix, SchemaError
from .field_grid import TeamDistribution

LINKAGES = ("single", "complete", "average")


@dataclass
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass
class Dendrogram:
    """Merges in order; leaves are 0..n-1 and merge k creates node n + k."""

    merges: List[Merge]
    dm: DistanceMatrix
    linkage: str

    @property
    def n(self) -> int:
        return len(self.dm.team_ids)


@dataclass
class Cluster:
    id: int
    members: List[int]
    medoid: int


@dataclass
class ClusterSet:
    clusters: List[Cluster]
    threshold: float
    linkage: str = "average"
    team_ids: List[str] = field(default_factory=list)

    def cluster_of(self, team_index: int) -> int:
        for c in self.clusters:
            if team_index in c.members:
                return c.id
        raise KeyError(team_index)

    def to_report(self) -> dict:
        ids = self.team_ids
        return {
            "threshold": self.threshold,
            "linkage": self.linkage,
            "clusters": [
                {"id": c.id, "members": [ids[m] for m in c.members], "medoid": ids[c.medoid]}
                for c in self.clusters
            ],
        }

    @classmethod
    def from_report(cls, doc: dict, team_ids: Sequence[str] = None) -> "ClusterSet":
        try:
            if team_ids is None:
                team_ids = [m for c in doc["clusters"] for m in c["members"]]
            team_ids = list(team_ids)
            index = {t: i for i, t in enumerate(team_ids)}
            clusters = [
                Cluster(int(c["id"]), [index[m] for m in c["members"]], index[c["medoid"]])
                for c in doc["clusters"]
            ]
            return cls(clusters, float(doc["threshold"]), str(doc.get("linkage", "average")), team_ids)
        except KeyError as exc:
            raise SchemaError(f"missing or unknown field {exc.args[0]!r}", "clusters") from exc


def _validate(D: np.ndarray):
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 2:
        raise InvalidMatrix("distance matrix must be square with at least two teams")
    if not np.all(np.isfinite(D)):
        raise InvalidMatrix("distance matrix has non-finite entries")
    if np.any(D < 0):
        raise InvalidMatrix("distance matrix has negative entries")
    if np.max(np.abs(D - D.T)) > 1e-9:
        raise InvalidMatrix("distance matrix is not symmetric")


def _linkage_distance(D, a: Sequence[int], b: Sequence[int], linkage: str) -> float:
    block = D[np.ix_(a, b)]
    if linkage == "single":
        return float(block.min())
    if linkage == "complete":
        return float(block.max())
    return float(block.mean())


def agglomerate(dm: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    D = np.asarray(dm.D, dtype=float)
    _validate(D)
    n = D.shape[0]
    active = {i: [i] for i in range(n)}
    merges = []
    for k in range(n - 1):
        best = None
        keys = sorted(active)
        for x, i in enumerate(keys):
            for j in keys[x + 1:]:
                h = _linkage_distance(D, active[i], active[j], linkage)
                if best is None or h < best[0]:
                    best = (h, i, j)
        h, i, j = best
        members = active.pop(i) + active.pop(j)
        active[n + k] = members
        merges.append(Merge(i, j, h, len(members)))
    return Dendrogram(merges, dm, linkage)


def _medoid(D, members: List[int]) -> int:
    sums = D[np.ix_(members, members)].sum(axis=1)
    return members[int(np.argmin(sums))]


def cut(dend: Dendrogram, threshold: float) -> ClusterSet:
    """Apply every merge strictly below ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    n = dend.n
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k, m in enumerate(dend.merges):
        if m.height < threshold:
            parent[find(m.left)] = n + k
            parent[find(m.right)] = n + k
    groups = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(leaf)
    D = np.asarray(dend.dm.D, dtype=float)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    clusters = [Cluster(cid, g, _medoid(D, g)) for cid, g in enumerate(ordered)]
    return ClusterSet(clusters, float(threshold), dend.linkage, list(dend.dm.team_ids))


def classify(
    d: TeamDistribution,
    cs: ClusterSet,
    ds: Sequence[TeamDistribution],
    costs: np.ndarray,
) -> Tuple[int, float]:
    """Nearest-medoid cluster id and its EMD; ties go to the smallest id."""
    if not cs.clusters:
        raise ValueError("empty cluster set")
    best = None
    for c in sorted(cs.clusters, key=lambda c: c.id):
        dist = emd(d, ds[c.medoid], costs)
        if best is None or dist < best[1]:
            best = (c.id, dist)
    return best


def save_report(path, cs: ClusterSet, extra: dict = None):
    doc = cs.to_report()
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

"""Opponent defensive layouts as block-count vectors over the attacking third.

Coordinates are metres with the origin at the centre spot; the attacking
third is ``x >= attack_third_min_x``. Cells are indexed row-major
(``row * cols + col``, rows by ascending y, columns by ascending x) and the
last index is the remainder of the field.
"""
import csv
import json
from dataclasses import asdict, dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .errors import (
    EmptyInput,
    MixedTeams,
    ParseError,
    PositionOutOfField,
    SchemaError,
    WrongPlayerCount,
)

PLAYERS = 11
FIELD_TOLERANCE_M = 1.0


@dataclass(frozen=True)
class FieldSpec:
    length_m: float = 105.0
    width_m: float = 68.0
    attack_third_min_x: float = 17.5

    def __post_init__(self):
        if self.length_m <= 0 or self.width_m <= 0:
            raise ValueError("field dimensions must be positive")
        half = self.length_m / 2
        if not -half < self.attack_third_min_x < half:
            raise ValueError("attack_third_min_x must lie strictly inside the field")


@dataclass(frozen=True)
class GridSpec:
    field: FieldSpec = field(default_factory=FieldSpec)
    cols: int = 3
    rows: int = 6

    def __post_init__(self):
        if self.cols < 1 or self.rows < 1:
            raise ValueError("grid needs at least one row and one column")

    @property
    def block_count(self) -> int:
        return self.cols * self.rows + 1

    @property
    def remainder(self) -> int:
        return self.cols * self.rows

    @property
    def cell_size(self) -> Tuple[float, float]:
        f = self.field
        return ((f.length_m / 2 - f.attack_third_min_x) / self.cols, f.width_m / self.rows)

    def centroids(self) -> np.ndarray:
        """(block_count, 2) array of block centroids; last row is the remainder."""
        f = self.field
        cw, ch = self.cell_size
        out = np.empty((self.block_count, 2))
        for r in range(self.rows):
            for c in range(self.cols):
                out[r * self.cols + c] = (
                    f.attack_third_min_x + (c + 0.5) * cw,
                    -f.width_m / 2 + (r + 0.5) * ch,
                )
        out[self.remainder] = ((-f.length_m / 2 + f.attack_third_min_x) / 2, 0.0)
        return out

    def to_dict(self) -> dict:
        return {**asdict(self.field), "cols": self.cols, "rows": self.rows}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        try:
            fs = FieldSpec(
                float(d.get("length_m", 105.0)),
                float(d.get("width_m", 68.0)),
                float(d.get("attack_third_min_x", 17.5)),
            )
            return cls(fs, int(d.get("cols", 3)), int(d.get("rows", 6)))
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), "grid") from exc


@dataclass(frozen=True)
class PlayerSnapshot:
    team_id: str
    event_id: str
    positions: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if len(self.positions) != PLAYERS:
            raise WrongPlayerCount(f"expected {PLAYERS} positions, got {len(self.positions)}")


@dataclass(eq=False)
class TeamDistribution:
    team_id: str
    mass: np.ndarray

    def __post_init__(self):
        self.mass = np.asarray(self.mass, dtype=float)
        if self.mass.ndim != 1:
            raise ValueError("mass must be a vector")
        if np.any(self.mass < 0) or not np.all(np.isfinite(self.mass)):
            raise ValueError("mass entries must be finite and non-negative")

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    @property
    def block_count(self) -> int:
        return self.mass.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TeamDistribution):
            return NotImplemented
        return self.team_id == other.team_id and np.array_equal(self.mass, other.mass)

    def to_dict(self) -> dict:
        return {"team_id": self.team_id, "mass": [float(v) for v in self.mass]}

    @classmethod
    def from_dict(cls, d: dict, where: str = "") -> "TeamDistribution":
        try:
            return cls(str(d["team_id"]), [float(v) for v in d["mass"]])
        except KeyError as exc:
            raise SchemaError(f"missing field {exc.args[0]!r}", where) from exc
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), where) from exc


def assign_block(pos: Sequence[float], grid: GridSpec) -> int:
    x, y = float(pos[0]), float(pos[1])
    f = grid.field
    if abs(x) > f.length_m / 2 + FIELD_TOLERANCE_M or abs(y) > f.width_m / 2 + FIELD_TOLERANCE_M:
        raise PositionOutOfField(f"position ({x}, {y}) is off the field")
    if x < f.attack_third_min_x:
        return grid.remainder
    cw, ch = grid.cell_size
    # interior edges belong to the larger index; the max edge closes the last cell
    xs = f.attack_third_min_x + cw * np.arange(1, grid.cols)
    ys = -f.width_m / 2 + ch * np.arange(1, grid.rows)
    col = int(np.searchsorted(xs, x, side="right"))
    row = int(np.searchsorted(ys, y, side="right"))
    return row * grid.cols + col


def snapshot_to_distribution(snap: PlayerSnapshot, grid: GridSpec) -> TeamDistribution:
    mass = np.zeros(grid.block_count)
    for pos in snap.positions:
        mass[assign_block(pos, grid)] += 1
    return TeamDistribution(snap.team_id, mass)


def aggregate_distributions(ds: Sequence[TeamDistribution]) -> TeamDistribution:
    """Element-wise mean of one team's distributions."""
    if not ds:
        raise EmptyInput("no distributions to aggregate")
    team = ds[0].team_id
    if any(d.team_id != team for d in ds):
        raise MixedTeams("distributions belong to more than one team")
    if len({d.block_count for d in ds}) != 1:
        raise MixedTeams("distributions have different block counts")
    return TeamDistribution(team, np.mean([d.mass for d in ds], axis=0))


def team_distributions(snaps: Sequence[PlayerSnapshot], grid: GridSpec) -> List[TeamDistribution]:
    """Aggregate snapshots per team, teams in order of first appearance."""
    groups = {}
    for s in snaps:
        groups.setdefault(s.team_id, []).append(snapshot_to_distribution(s, grid))
    return [aggregate_distributions(v) for v in groups.values()]


def parse_snapshots(path) -> List[PlayerSnapshot]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].lstrip().startswith("#"):
                continue
            if len(row) < 2:
                raise ParseError("expected team_id,event_id followed by coordinates", lineno)
            coords = row[2:]
            if len(coords) % 2:
                raise ParseError(f"odd number of coordinates ({len(coords)})", lineno)
            if len(coords) != 2 * PLAYERS:
                raise WrongPlayerCount(f"expected {PLAYERS} positions, got {len(coords) // 2}", lineno)
            try:
                vals = [float(c) for c in coords]
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from exc
            positions = tuple((vals[k], vals[k + 1]) for k in range(0, len(vals), 2))
            out.append(PlayerSnapshot(row[0].strip(), row[1].strip(), positions))
    return out


def write_snapshots(path, snaps: Sequence[PlayerSnapshot], header: bool = True):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            cols = ",".join(f"x{i},y{i}" for i in range(1, PLAYERS + 1))
            fh.write(f"# team_id,event_id,{cols}\n")
        for s in snaps:
            vals = ",".join(f"{float(x)!r},{float(y)!r}" for x, y in s.positions)
            fh.write(f"{s.team_id},{s.event_id},{vals}\n")


def save_distributions(path, ds: Sequence[TeamDistribution], grid: GridSpec, meta: dict = None):
    doc = {"grid": grid.to_dict(), "teams": [d.to_dict() for d in ds]}
    if meta:
        doc["meta"] = meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_distributions(path) -> Tuple[List[TeamDistribution], GridSpec]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
    if "teams" not in doc:
        raise SchemaError("missing field 'teams'")
    grid = GridSpec.from_dict(doc.get("grid", {}))
    ds = [TeamDistribution.from_dict(t, f"teams[{i}]") for i, t in enumerate(doc["teams"])]
    for i, d in enumerate(ds):
        if d.block_count != grid.block_count:
            raise SchemaError(f"expected {grid.block_count} blocks, got {d.block_count}", f"teams[{i}].mass")
    return ds, grid

"""Game environments producing (n, k) corner-kick observations.

An environment is any object with ``run(context, formation) -> GameObservation``.
The built-in synthetic world draws k ~ Binomial(n, theta) with a separate
random stream per (context, formation) arm, so the draws an arm sees depend
only on the seed and on how many games that arm has played.
"""
import json
import zlib
from dataclasses import dataclass
from typing import Dict, Iterable, List, Protocol, Sequence, Tuple, Union

import numpy as np

from .bayes import GameObservation
from .errors import SchemaError, UnknownArm

DEFAULT_KICKS = (33, 41)


class Environment(Protocol):
    def run(self, context: str, formation: str) -> GameObservation: ...


@dataclass(frozen=True)
class ArmSpec:
    context: str
    formation: str
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")


@dataclass(frozen=True)
class EnvConfig:
    corner_kicks: Union[int, Tuple[int, int]] = DEFAULT_KICKS
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.kick_range
        if lo < 1 or lo > hi:
            raise ValueError(f"invalid corner-kick range {self.corner_kicks}")

    @property
    def kick_range(self) -> Tuple[int, int]:
        if isinstance(self.corner_kicks, (int, np.integer)):
            return int(self.corner_kicks), int(self.corner_kicks)
        lo, hi = self.corner_kicks
        return int(lo), int(hi)


def _arm_key(context: str, formation: str) -> Tuple[int, int]:
    return zlib.crc32(context.encode("utf-8")), zlib.crc32(formation.encode("utf-8"))


class SyntheticEnv:
    """Binomial stand-in for simulated games."""

    def __init__(self, arms: Iterable[ArmSpec], config: EnvConfig = EnvConfig()):
        self.config = config
        self.arms: Dict[Tuple[str, str], ArmSpec] = {}
        for a in arms:
            self.arms[(a.context, a.formation)] = a
        self._streams: Dict[Tuple[str, str], np.random.Generator] = {}

    def has_arm(self, context: str, formation: str) -> bool:
        return (context, formation) in self.arms

    def contexts(self) -> List[str]:
        return sorted({c for c, _ in self.arms})

    def _stream(self, key):
        g = self._streams.get(key)
        if g is None:
            ss = np.random.SeedSequence(self.config.seed, spawn_key=_arm_key(*key))
            g = self._streams[key] = np.random.Generator(np.random.PCG64(ss))
        return g

    def run(self, context: str, formation: str) -> GameObservation:
        key = (context, formation)
        arm = self.arms.get(key)
        if arm is None:
            raise UnknownArm(f"no arm registered for context {context!r}, formation {formation!r}")
        g = self._stream(key)
        lo, hi = self.config.kick_range
        n = lo if lo == hi else int(g.integers(lo, hi + 1))
        return GameObservation(n, int(g.binomial(n, arm.theta)))


class RoundRobinEnv:
    """Cluster-level environment cycling through member-team contexts."""

    def __init__(self, base: Environment, members: Dict[str, Sequence[str]]):
        self.base = base
        self.members = {k: list(v) for k, v in members.items()}
        self._turn: Dict[Tuple[str, str], int] = {}

    def run(self, context: str, formation: str) -> GameObservation:
        teams = self.members.get(context)
        if not teams:
            raise UnknownArm(f"no member teams registered for context {context!r}")
        t = self._turn.get((context, formation), 0)
        self._turn[(context, formation)] = t + 1
        return self.base.run(teams[t % len(teams)], formation)


VALIDATION_CONTEXT = "validation"


def make_validation_env(theta: Union[float, Sequence[float]], block_size: int, seed: int = 0) -> SyntheticEnv:
    """Fixed-n environment; arms are formations "0", "1", ... for each theta."""
    thetas = [theta] if np.isscalar(theta) else list(theta)
    arms = [ArmSpec(VALIDATION_CONTEXT, str(i), float(t)) for i, t in enumerate(thetas)]
    return SyntheticEnv(arms, EnvConfig(int(block_size), seed))


def load_arms(path) -> List[ArmSpec]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
    records = doc.get("arms") if isinstance(doc, dict) else doc
    if not isinstance(records, list):
        raise SchemaError("expected a list of arm records", "arms")
    out = []
    for i, r in enumerate(records):
        try:
            out.append(ArmSpec(str(r["context"]), str(r["formation"]), float(r["theta"])))
        except KeyError as exc:
            raise SchemaError(f"missing field {exc.args[0]!r}", f"arms[{i}]") from exc
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), f"arms[{i}]") from exc
    return out


def save_arms(path, arms: Sequence[ArmSpec]):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"arms": [{"context": a.context, "formation": a.formation, "theta": a.theta} for a in arms]}, fh, indent=2)
        fh.write("\n")

"""Bundled synthetic fixture: 14 teams over three defensive archetypes.

Three "deep" teams pack the six-yard box, ten "zonal" teams hold two lines
across the penalty area and one "highline" team defends far from goal. Each
team contributes five jittered corner-kick snapshots. The per-team success
table makes two teams disagree with their cluster's best formation.
"""
import json
import os
from importlib import resources
from typing import Dict, List, Tuple

import numpy as np

from .field_grid import FieldSpec, PlayerSnapshot, write_snapshots
from .sim_env import ArmSpec, save_arms

ARCHETYPES: Dict[str, List[Tuple[float, float]]] = {
    "deep": [(52, 0), (50, -4), (50, 4), (49, -8), (49, 8), (47, 0),
             (46, -3), (46, 3), (44, -10), (44, 10), (5, 0)],
    "zonal": [(52, 0), (47, -8), (47, -3), (47, 3), (47, 8), (41, -12),
              (41, -5), (41, 5), (41, 12), (0, -10), (0, 10)],
    "highline": [(52, 0), (40, -20), (40, 20), (35, -28), (35, 28), (28, 0),
                 (10, -5), (10, 5), (-5, 0), (-10, -15), (-10, 15)],
}

TEAMS: List[Tuple[str, str]] = (
    [(f"deep-{i}", "deep") for i in range(1, 4)]
    + [(f"zonal-{i:02d}", "zonal") for i in range(1, 11)]
    + [("highline-1", "highline")]
)

FORMATIONS = ["F1", "F2", "F3"]

# success probabilities per archetype, best formation first in each row's story
THETAS: Dict[str, Dict[str, float]] = {
    "deep": {"F1": 0.12, "F2": 0.22, "F3": 0.09},
    "zonal": {"F1": 0.20, "F2": 0.265, "F3": 0.55},
    "highline": {"F1": 0.49, "F2": 0.225, "F3": 0.18},
}

# teams whose own best formation differs from their cluster's
OVERRIDES: Dict[str, Dict[str, float]] = {
    "deep-2": {"F1": 0.25, "F2": 0.145, "F3": 0.09},
    "zonal-07": {"F1": 0.15, "F2": 0.245, "F3": 0.08},
}

CLUSTER_THRESHOLD = 4.0
SNAPSHOTS_PER_TEAM = 5
JITTER_M = 1.0


def build_snapshots(seed: int = 2016) -> List[PlayerSnapshot]:
    rng = np.random.default_rng(seed)
    f = FieldSpec()
    hx, hy = f.length_m / 2, f.width_m / 2
    out = []
    for team, arch in TEAMS:
        base = np.asarray(ARCHETYPES[arch], dtype=float)
        for e in range(SNAPSHOTS_PER_TEAM):
            pts = base + rng.normal(0.0, JITTER_M, base.shape)
            pts[:, 0] = np.clip(pts[:, 0], -hx, hx)
            pts[:, 1] = np.clip(pts[:, 1], -hy, hy)
            pts = np.round(pts, 2)
            out.append(PlayerSnapshot(team, f"ck{e + 1}", tuple((float(x), float(y)) for x, y in pts)))
    return out


def build_arms() -> List[ArmSpec]:
    arms = []
    for team, arch in TEAMS:
        table = OVERRIDES.get(team, THETAS[arch])
        arms.extend(ArmSpec(team, fm, table[fm]) for fm in FORMATIONS)
    return arms


def learning_config() -> dict:
    return {"games_per_round": 60, "max_games_per_formation": 600, "seed": 7}


def write_fixture(out_dir) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "snapshots": os.path.join(out_dir, "fixture_snapshots.csv"),
        "arms": os.path.join(out_dir, "fixture_arms.json"),
        "config": os.path.join(out_dir, "fixture_config.json"),
    }
    write_snapshots(paths["snapshots"], build_snapshots())
    save_arms(paths["arms"], build_arms())
    with open(paths["config"], "w", encoding="utf-8") as fh:
        json.dump(learning_config(), fh, indent=2)
        fh.write("\n")
    return paths


def bundled(name: str) -> str:
    """Path of a bundled fixture file, e.g. ``bundled("fixture_arms.json")``."""
    return str(resources.files("formsel") / "data" / name)

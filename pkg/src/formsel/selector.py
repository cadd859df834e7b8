"""Online formation lookup: nearest cluster medoid by EMD, then its stored
formation. ``serve`` exposes the same lookup as newline-delimited JSON over TCP.
"""
import json
import logging
import socketserver
import threading
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .emd import emd, ground_costs
from .errors import DimensionMismatch, EmptyDb, PositionOutOfField, WrongPlayerCount, ZeroMass
from .field_grid import PLAYERS, GridSpec, PlayerSnapshot, TeamDistribution, snapshot_to_distribution
from .learner import AssociationDB

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Selection:
    cluster: int
    formation: str
    hdi: Tuple[float, float]
    distance: float

    def to_dict(self) -> dict:
        return {"cluster": self.cluster, "formation": self.formation, "hdi": list(self.hdi), "distance": self.distance}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def db_grid(db: AssociationDB) -> GridSpec:
    return GridSpec.from_dict(db.config.get("grid", {}))


def select(opponent: TeamDistribution, db: AssociationDB, costs: np.ndarray) -> Selection:
    if not db.records:
        raise EmptyDb("association database has no clusters")
    best = None
    for r in sorted(db.records, key=lambda r: r.cluster_id):
        if r.medoid.block_count != opponent.block_count:
            raise DimensionMismatch(
                f"opponent has {opponent.block_count} blocks, cluster {r.cluster_id} medoid has {r.medoid.block_count}"
            )
        d = emd(opponent, r.medoid, costs)
        if best is None or d < best[0]:
            best = (d, r)
    d, r = best
    return Selection(r.cluster_id, r.formation, (r.hdi.lo, r.hdi.hi), d)


def _error(code: str, message: str) -> str:
    return json.dumps({"error": code, "message": message}, separators=(",", ":"))


class Selector:
    """Immutable lookup state shared by all connections."""

    def __init__(self, db: AssociationDB):
        if not db.records:
            raise EmptyDb("association database has no clusters")
        self.db = db
        self.grid = db_grid(db)
        self.costs = ground_costs(self.grid)

    def select(self, opponent: TeamDistribution) -> Selection:
        return select(opponent, self.db, self.costs)

    def parse_request(self, req) -> TeamDistribution:
        if not isinstance(req, dict):
            raise ValueError("request must be a JSON object")
        if "mass" in req:
            mass = req["mass"]
            if not isinstance(mass, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in mass):
                raise ValueError("mass must be a list of numbers")
            if len(mass) != self.grid.block_count:
                raise DimensionMismatch(f"mass needs {self.grid.block_count} entries, got {len(mass)}")
            return TeamDistribution("query", mass)
        if "positions" in req:
            pos = req["positions"]
            if not isinstance(pos, list):
                raise ValueError("positions must be a list of [x, y] pairs")
            if len(pos) != PLAYERS:
                raise DimensionMismatch(f"positions needs {PLAYERS} entries, got {len(pos)}")
            pairs = []
            for p in pos:
                if not (isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
                    raise ValueError("each position must be [x, y]")
                pairs.append((float(p[0]), float(p[1])))
            return snapshot_to_distribution(PlayerSnapshot("query", "query", tuple(pairs)), self.grid)
        raise ValueError("request needs 'mass' or 'positions'")

    def handle_line(self, line: str) -> str:
        try:
            req = json.loads(line)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return _error("PARSE", f"invalid JSON: {exc}")
        try:
            return self.select(self.parse_request(req)).to_json()
        except (DimensionMismatch, WrongPlayerCount) as exc:
            return _error("DIMENSION", str(exc))
        except (ValueError, PositionOutOfField, ZeroMass) as exc:
            return _error("PARSE", str(exc))
        except Exception as exc:  # keep the connection alive
            log.exception("request failed")
            return _error("INTERNAL", str(exc))


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        selector: Selector = self.server.selector
        for raw in self.rfile:
            try:
                line = raw.decode("utf-8").strip()
            except UnicodeDecodeError as exc:
                reply = _error("PARSE", f"invalid UTF-8: {exc}")
            else:
                if not line:
                    continue
                reply = selector.handle_line(line)
            self.wfile.write(reply.encode("utf-8") + b"\n")
            self.wfile.flush()


class SelectorServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, selector: Selector):
        self.selector = selector
        super().__init__(address, _Handler)


def make_server(db: AssociationDB, host: str = "127.0.0.1", port: int = 0) -> SelectorServer:
    return SelectorServer((host, port), Selector(db))


def serve(db: AssociationDB, host: str = "127.0.0.1", port: int = 7654, ready: Optional[threading.Event] = None):
    with make_server(db, host, port) as server:
        log.info("selector listening on %s:%d", *server.server_address[:2])
        if ready is not None:
            ready.set()
        server.serve_forever()

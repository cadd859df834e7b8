"""Time the hot kernels with numba and with FORMSEL_DISABLE_NUMBA=1.

Each path runs in its own interpreter because the flag is read at import.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from formsel import _jit
from formsel.bayes import BetaPosterior
from formsel.comparator import difference_hdi
from formsel.emd import distance_matrix, emd, ground_costs
from formsel.field_grid import GridSpec, TeamDistribution

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
C = ground_costs(GridSpec())
a, b = (rng.multinomial(11, np.ones(19) / 19).astype(float) for _ in range(2))
teams = [TeamDistribution(str(i), rng.multinomial(11, np.ones(19) / 19)) for i in range(14)]
p, q = BetaPosterior(120, 290), BetaPosterior(150, 260)

cases = {
    "emd 19x19": (lambda: emd(a, b, C), 50),
    "distance matrix 14 teams": (lambda: distance_matrix(teams, C), 2),
    "beta HDI": (lambda: p.hdi(), 20),
    "difference HDI (2e5 draws)": (lambda: difference_hdi(p, q), 5),
}
out = {"numba": _jit.HAS_NUMBA, "times": {}}
for name, (fn, number) in cases.items():
    fn()  # compile / warm up
    best = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, FORMSEL_DISABLE_NUMBA="1" if disable else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    jit = run(False, args.repeat)
    py = run(True, args.repeat)
    if not jit["numba"]:
        print("numba unavailable; both columns use the Python path", file=sys.stderr)
    print(f"{'kernel':<28} {'numba':>12} {'python':>12} {'speedup':>9}")
    for name, t_jit in jit["times"].items():
        t_py = py["times"][name]
        print(f"{name:<28} {t_jit * 1e3:>10.3f}ms {t_py * 1e3:>10.3f}ms {t_py / t_jit:>8.1f}x")


if __name__ == "__main__":
    main()

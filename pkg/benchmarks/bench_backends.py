"""Time the same exact workload under the GMP and pure-Python rational backends.

Each backend runs in a fresh interpreter because the rational type is fixed
at import time. Usage: ``python benchmarks/bench_backends.py [--repeat K]``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
from orthobethe import BACKEND, ChainSpec, ModelParams, Q
from orthobethe.bethe import as_chain, bethe_vector, verify_action
from orthobethe.monodromy import build_monodromy, check_rtt

spec = ChainSpec(ModelParams(2, Q(1)), (Q(1, 3), Q(-2, 7)))
timings = {}
start = time.perf_counter()
check_rtt(spec, Q(3, 5), Q(-7, 11))
timings["rtt"] = time.perf_counter() - start
start = time.perf_counter()
build_monodromy(spec)
timings["symbolic-monodromy"] = time.perf_counter() - start
start = time.perf_counter()
t = ((Q(3, 11), Q(-5, 13)), (Q(2, 19),))
ok = all(verify_action(spec, i, j, Q(2, 17), t) for i in range(-2, 3) for j in range(-2, 3))
timings["action-all-pairs"] = time.perf_counter() - start
print(json.dumps({"backend": BACKEND, "ok": ok, "timings": timings}))
"""


def run(backend: str) -> dict:
    env = dict(os.environ, ORTHOBETHE_RATIONAL=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=1)
    args = parser.parse_args()
    best: dict[str, dict] = {}
    for _ in range(args.repeat):
        for backend in ("gmpy2", "fraction"):
            res = run(backend)
            if not res["ok"]:
                raise SystemExit(f"{backend}: workload check failed")
            cur = best.setdefault(backend, res["timings"])
            for k, v in res["timings"].items():
                cur[k] = min(cur[k], v)
    names = list(best["gmpy2"])
    print(f"{'stage':<22}{'gmpy2 [s]':>12}{'fraction [s]':>14}{'speedup':>10}")
    for k in names:
        g, f = best["gmpy2"][k], best["fraction"][k]
        print(f"{k:<22}{g:>12.3f}{f:>14.3f}{f / g:>9.1f}x")


if __name__ == "__main__":
    main()

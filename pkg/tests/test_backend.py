"""The pure-Python rational fallback gives the same exact results as the GMP backend."""

import json
import os
import subprocess
import sys

SCRIPT = r"""
import json
from orthobethe import BACKEND, ChainSpec, ModelParams, Q, build_bethe, verify_action
from orthobethe.scalarfield import format_rational
spec = ChainSpec(ModelParams(2), (Q(1, 3),), (Q(2), Q(3)))
t = [[Q(3, 11), Q(-5, 13)], [Q(2, 19)]]
vec = build_bethe(spec, t).vector
ok = all(verify_action(spec, i, j, Q(2, 17), t) for i in range(-2, 3) for j in range(-2, 3))
print(json.dumps({"backend": BACKEND, "ok": ok, "records": vec.to_records(),
                  "type": type(Q(1, 3)).__name__}))
"""


def run(choice):
    env = dict(os.environ, ORTHOBETHE_RATIONAL=choice)
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_fraction_fallback_matches_default():
    slow = run("fraction")
    assert slow["backend"] == "fraction" and slow["type"] == "Fraction"
    assert slow["ok"]
    fast = run("auto")
    assert fast["ok"]
    assert fast["records"] == slow["records"]


def test_bad_backend_name():
    env = dict(os.environ, ORTHOBETHE_RATIONAL="decimal")
    out = subprocess.run([sys.executable, "-c", "import orthobethe"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "ORTHOBETHE_RATIONAL" in out.stderr

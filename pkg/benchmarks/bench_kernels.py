"""Compare the compiled term kernels with the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]

Two workloads: raw unify/match calls on random deep terms, and an end-to-end
connection-prover run where the prover is reloaded under each backend.
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit

from tabipol._kernels import _pure, compiled_module
from tabipol.logic import Fn, Var


def random_term(rng: random.Random, depth: int, vars_: str = "XYZ") -> object:
    if depth == 0 or rng.random() < 0.2:
        return Var(rng.choice(vars_)) if rng.random() < 0.4 else Fn(rng.choice("abc"), ())
    f = rng.choice("fgh")
    return Fn(f, tuple(random_term(rng, depth - 1, vars_) for _ in range(2)))


def workload(seed: int = 0, n: int = 400):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        s = random_term(rng, 6)
        pairs.append((s, random_term(rng, 6, "UVW")))
        pairs.append((s, s))
    return pairs


def run_kernel(mod, pairs) -> int:
    hits = 0
    for s, t in pairs:
        b: dict = {}
        trail: list = []
        if mod.unify(s, t, b, trail):
            hits += 1
            mod.resolve(s, b)
        mod.undo(b, trail, 0)
        if mod.match(s, t, {}):
            hits += 1
    return hits


PROVER_SNIPPET = """
import time
from tabipol.syntax import parse_formula
from tabipol.clausify import clausify
from tabipol.provers import prove_connection
from tabipol._kernels import BACKEND
f = parse_formula('all X1. all X2. p(X1, h(f1(X1)), X2)')
g = parse_formula('ex X1. ex X2. (p(h(g2(X1)), X2, g1) & p(g1, X1, h(g2(X1))))')
from tabipol.logic import And, Not
cf = clausify(And((f, Not(g))))
t0 = time.perf_counter()
for _ in range({reps}):
    prove_connection(cf)
print(f'{{BACKEND:7s}} {{(time.perf_counter() - t0) * 1e3:8.2f}} ms')
"""


def prover_timing(pure: bool, reps: int) -> str:
    env = dict(os.environ)
    if pure:
        env["TABIPOL_PURE_PYTHON"] = "1"
    else:
        env.pop("TABIPOL_PURE_PYTHON", None)
    out = subprocess.run(
        [sys.executable, "-c", PROVER_SNIPPET.format(reps=reps)], env=env, capture_output=True, text=True, check=True
    )
    return out.stdout.strip()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--prover-reps", type=int, default=50)
    a = ap.parse_args(argv)

    pairs = workload()
    comp = compiled_module()
    backends = [("pure", _pure)] + ([("cython", comp)] if comp is not None else [])
    results = {}
    for name, mod in backends:
        expected = run_kernel(mod, pairs)
        best = min(timeit.repeat(lambda: run_kernel(mod, pairs), number=1, repeat=a.repeat))
        results[name] = (best, expected)
        print(f"kernels {name:7s} {best * 1e3:8.2f} ms  (successful calls: {expected})")
    if comp is None:
        print("compiled backend not built; only the fallback was timed")
    else:
        assert results["pure"][1] == results["cython"][1], "backends disagree"
        print(f"kernel speedup: {results['pure'][0] / results['cython'][0]:.2f}x")
    for pure in (True, False):
        print("prover", prover_timing(pure, a.prover_reps))
    return 0


if __name__ == "__main__":
    sys.exit(main())

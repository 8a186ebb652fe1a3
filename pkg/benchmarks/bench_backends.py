"""Compare the numba kernels with the pure-numpy fallback.

The backend is fixed at import time by ADIWAVE_DISABLE_NUMBA, so each
backend runs in its own interpreter. Usage:

    python benchmarks/bench_backends.py [--n 64,128,256] [--steps 10] [--scheme cfd]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys
from adiwave import backend_name
from adiwave.bench import run_benchmark
from adiwave.manufactured import ManufacturedCase
scheme, steps = sys.argv[1], int(sys.argv[2])
out = []
for N in map(int, sys.argv[3].split(",")):
    rec = run_benchmark(scheme, ManufacturedCase.standard(0), N, workers=1, steps=steps)
    out.append({"N": N, "wall": rec.wall_time, "norm": float((rec.final_U ** 2).sum() ** 0.5)})
print(json.dumps({"backend": backend_name(), "runs": out}))
"""


def run_backend(disable, scheme, steps, ns):
    env = dict(os.environ, ADIWAVE_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, scheme, str(steps), ",".join(map(str, ns))],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="64,128,256")
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--scheme", choices=("cfd", "mfd"), default="cfd")
    args = ap.parse_args(argv)
    ns = [int(x) for x in args.n.split(",")]

    fast = run_backend(False, args.scheme, args.steps, ns)
    slow = run_backend(True, args.scheme, args.steps, ns)
    print(f"scheme={args.scheme} steps={args.steps}")
    print(f"{'N':>6} {fast['backend']:>10} {slow['backend']:>10} {'ratio':>7} {'rel diff':>10}")
    for a, b in zip(fast["runs"], slow["runs"]):
        diff = abs(a["norm"] - b["norm"]) / b["norm"]
        print(f"{a['N']:>6} {a['wall']:>9.4f}s {b['wall']:>9.4f}s {b['wall'] / a['wall']:>7.2f} {diff:>10.2e}")


if __name__ == "__main__":
    main()

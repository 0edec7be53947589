"""Wall-time comparison of the compiled and pure-Python kernel paths.

The JIT flag is read once at import, so each path runs in its own
subprocess: once with SEIRS_DELAY_NUMBA=1 and once with =0. Every kernel is
called once before timing so compilation cost never pollutes the numbers.

Usage: python benchmarks/bench_kernels.py [--steps N] [--repeat K]
"""
import argparse
import json
import os
import subprocess
import sys

DRIVER = """\
import json
import sys
import time

from seirs_delay import (Params, Seed, integrate_dde, integrate_ode,
                         make_initial_condition, simulate_sde)
from seirs_delay._accel import NUMBA_ENABLED

n_steps = int(sys.argv[1])
repeat = int(sys.argv[2])
h = 0.001
t_end = n_steps * h
ic = make_initial_condition(e0=0.05, s0=0.9, i0=0.05, r0=0.0)

cases = {
    "ode_rk4": lambda: integrate_ode(Params(0.4, 0.2, 0.1, 2.0), ic.state0(),
                                     t_end, h),
    "dde_rk4_abm4": lambda: integrate_dde(Params(0.4, 0.2, 0.1, 2.0, r=0.5),
                                          ic, t_end, h),
    "euler_maruyama": lambda: simulate_sde(
        Params(0.1, 0.2, 0.3, 2.0, r=0.0, epsilon=0.1), ic, t_end, h,
        Seed(1)),
}

out = {"numba": NUMBA_ENABLED, "steps": n_steps}
for name, fn in cases.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run_path(flag: str, steps: int, repeat: int) -> dict:
    env = os.environ.copy()
    env["SEIRS_DELAY_NUMBA"] = flag
    proc = subprocess.run(
        [sys.executable, "-c", DRIVER, str(steps), str(repeat)],
        capture_output=True, text=True, env=env)
    if proc.returncode != 0:
        raise RuntimeError(f"driver failed with flag {flag}:\n{proc.stderr}")
    return json.loads(proc.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000,
                    help="time steps per integrator call (default 200000)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timed repetitions, best is kept (default 3)")
    args = ap.parse_args()

    pure = run_path("0", args.steps, args.repeat)
    jit = run_path("1", args.steps, args.repeat)
    assert pure["numba"] is False and jit["numba"] is True

    print(f"{args.steps} steps per call, best of {args.repeat}\n")
    print(f"{'kernel':<16} {'pure (s)':>10} {'numba (s)':>10} {'speedup':>9}")
    for name in ("ode_rk4", "dde_rk4_abm4", "euler_maruyama"):
        ratio = pure[name] / jit[name]
        print(f"{name:<16} {pure[name]:>10.4f} {jit[name]:>10.4f} "
              f"{ratio:>8.1f}x")


if __name__ == "__main__":
    main()

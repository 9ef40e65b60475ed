"""Timing comparison of the solution routes and kernel lanes.

Two axes are covered in one table:

* full-Liouvillian (second-quantized qubit space, dimension 2^n) versus the
  reduced propagator / direct master-equation routes (dimension n, n+1), the
  exponential-to-polynomial reduction this package is about;
* compiled versus pure-python RK4 kernels for the reduced routes.

Rows are (n, method, wall_time) with method strings like "propagator/cython"
or "liouvillian/numpy"; wall_time is the best of ``repeats`` runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from . import _kernels, oracle
from .dynamics import integrate_direct, propagate
from .integrators import StepPolicy
from .sampling import random_model, random_one_particle_state, rng_for

#: Liouvillian route is skipped above this mode count (2^n space, RK4 in D^2)
LIOUVILLIAN_CAP = 7


@dataclass(frozen=True)
class BenchRow:
    n: int
    method: str
    wall_time: float


def _best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_bench(
    sizes=(2, 3, 4, 5),
    t: float = 1.0,
    repeats: int = 2,
    seed: int = 7,
    steps_per_unit: int = 1000,
) -> list[BenchRow]:
    """Time every route at every size; returns rows in deterministic order."""
    rows: list[BenchRow] = []
    for n in sizes:
        rng = rng_for(seed, n)
        model = random_model(rng, n, min(3, n), time_dependent=True)
        s0 = random_one_particle_state(rng, n)

        for lane in sorted(_kernels.IMPLEMENTATIONS):
            policy = StepPolicy(steps_per_unit=steps_per_unit, implementation=lane)
            rows.append(
                BenchRow(
                    n,
                    f"propagator/{lane}",
                    _best_time(lambda: propagate(model, t, policy, method="ode"), repeats),
                )
            )
            rows.append(
                BenchRow(
                    n,
                    f"direct/{lane}",
                    _best_time(lambda: integrate_direct(s0, model, t, policy), repeats),
                )
            )

        if n <= LIOUVILLIAN_CAP:
            policy = StepPolicy(steps_per_unit=steps_per_unit)
            ops = oracle.build_operators("qubit", n)
            full0 = oracle.embed_density(s0)
            rows.append(
                BenchRow(
                    n,
                    "liouvillian/numpy",
                    _best_time(
                        lambda: oracle.integrate_second_quantized(full0, model, ops, t, policy),
                        repeats,
                    ),
                )
            )
    return rows

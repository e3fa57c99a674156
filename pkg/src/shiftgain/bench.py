"""Timing comparison of the explicit gain against the Gramian baseline."""
from __future__ import annotations

import csv
import time
import warnings
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from .controllability import is_controllable
from .errors import IllConditionedC, InvalidParams, ShiftGainError
from .generate import generate_system
from .gramian import gramian_gain
from .linalg import DEFAULT_TOL, Tolerances
from .synthesis import feedback_gain, select_gammas, verify_margin
from .system import ControlSystem

MAX_ATTEMPTS = 10


class BenchFailure(ShiftGainError):
    """An instance failed verification, so no timing is reported for it."""


@dataclass(frozen=True)
class BenchRecord:
    n: int
    m: int
    seed: int
    t_explicit_ns: int
    t_gramian_ns: int
    abscissa_explicit: float
    abscissa_gramian: float
    cond_C: float
    lyap_residual: float


HEADER = [f.name for f in fields(BenchRecord)]
TIMING_COLUMNS = ("t_explicit_ns", "t_gramian_ns")


def trial_seed(seed: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1)[0])


def controllable_instance(n: int, m: int, seed: int, tol: Tolerances = DEFAULT_TOL) -> ControlSystem:
    rng = np.random.default_rng(seed)
    for _ in range(MAX_ATTEMPTS):
        sys = generate_system("random", n, m, rng)
        if is_controllable(sys, tol).controllable:
            return sys
    raise BenchFailure(f"no controllable pair after {MAX_ATTEMPTS} draws (n={n}, seed={seed})")


def bench_one(n: int, m: int, seed: int, gamma1: float = 1.0, tol: Tolerances = DEFAULT_TOL) -> BenchRecord:
    sys = controllable_instance(n, m, seed, tol)
    grid = select_gammas(sys, gamma1, None, tol)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedC)
        t0 = time.perf_counter_ns()
        explicit = feedback_gain(sys, grid, tol)
        t1 = time.perf_counter_ns()
    baseline = gramian_gain(sys, tol)
    t2 = time.perf_counter_ns()

    if not verify_margin(explicit, grid.gamma1, tol):
        raise BenchFailure(
            f"explicit gain failed verification (n={n}, seed={seed}, "
            f"abscissa={explicit.spectral_abscissa:.3e})"
        )
    if not baseline.spectral_abscissa < 0:
        raise BenchFailure(f"Gramian gain does not stabilize (n={n}, seed={seed})")
    return BenchRecord(
        n=n,
        m=m,
        seed=seed,
        t_explicit_ns=t1 - t0,
        t_gramian_ns=t2 - t1,
        abscissa_explicit=explicit.spectral_abscissa,
        abscissa_gramian=baseline.spectral_abscissa,
        cond_C=explicit.cond_C,
        lyap_residual=baseline.lyapunov_residual,
    )


def run_bench(
    nmin: int,
    nmax: int,
    m: int,
    trials: int,
    seed: int,
    gamma1: float = 1.0,
    tol: Tolerances = DEFAULT_TOL,
) -> list[BenchRecord]:
    """One record per ``(n, trial)``, in that sort order."""
    if nmin < 1 or nmax < nmin or m < 1 or trials < 0:
        raise InvalidParams(f"bad bench range nmin={nmin} nmax={nmax} m={m} trials={trials}")
    records = []
    for n in range(nmin, nmax + 1):
        for trial in range(trials):
            records.append(bench_one(n, m, trial_seed(seed, n, trial), gamma1, tol))
    return records


def write_bench_csv(records: list[BenchRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for rec in records:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in astuple(rec)])

"""Closed-loop trajectories and the decay certificates checked on them.

States are advanced with the exact one-step propagator ``exp(Acl dt)``, so
``dt`` only controls sampling. When an accumulator ``C`` (or its triangular
factor) is supplied, the quadratic functional ``V(t) = <C^{-1} x, x>`` is
recorded alongside the state.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import EmptyTrace, InvalidParams, MissingLyapunovData
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, matrix_exponential

LYAPUNOV_STEP_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class SimulationTrace:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), N)
    norms: np.ndarray
    lyapunov_values: np.ndarray | None = None

    def __len__(self) -> int:
        return self.times.size

    def csv_header(self) -> list[str]:
        n = self.states.shape[1]
        cols = ["t"]
        for i in range(1, n + 1):
            cols += [f"re_{i}", f"im_{i}"]
        return cols + ["norm", "V"]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.csv_header())
            for i, t in enumerate(self.times):
                row = [repr(float(t))]
                for z in self.states[i]:
                    row += [repr(float(z.real)), repr(float(z.imag))]
                row.append(repr(float(self.norms[i])))
                row.append("" if self.lyapunov_values is None else repr(float(self.lyapunov_values[i])))
                writer.writerow(row)


def default_dt(gammas: Sequence[float]) -> float:
    return min(0.05, 1.0 / (2.0 * max(gammas)))


def _lyapunov_evaluator(C, C_factor):
    if C_factor is not None:
        R = as_matrix(C_factor, "C_factor")

        def value(x):
            y = sla.solve_triangular(R, x, trans="C", lower=False)
            return float(np.vdot(y, y).real)

        return value

    C = as_matrix(C, "C")
    try:
        cho = sla.cho_factor(C, lower=False)
    except np.linalg.LinAlgError:
        lu = sla.lu_factor(C)

        def value(x):
            return float(np.vdot(x, sla.lu_solve(lu, x)).real)

        return value

    def value(x):
        return float(np.vdot(x, sla.cho_solve(cho, x)).real)

    return value


def simulate(
    Acl,
    x0,
    T: float,
    dt: float,
    C=None,
    *,
    C_factor=None,
) -> SimulationTrace:
    """Sample ``x(t) = exp(Acl t) x0`` on ``0, dt, 2 dt, ..., T``.

    The last interval is shortened when ``T`` is not a multiple of ``dt``.
    ``C`` is factored once (Cholesky, LU if that fails); pass ``C_factor``
    instead, an upper-triangular ``R`` with ``C = R^H R``, to skip forming
    ``C`` at all.
    """
    Acl = as_matrix(Acl, "Acl")
    x = np.asarray(x0, dtype=complex).reshape(-1)
    n = Acl.shape[0]
    if Acl.shape != (n, n) or x.size != n:
        raise InvalidParams(f"x0 has {x.size} entries for a {Acl.shape} matrix")
    if not (T > 0):
        raise InvalidParams(f"T must be positive, got {T!r}")
    if not (0 < dt <= T):
        raise InvalidParams(f"dt must lie in (0, T], got {dt!r}")

    full = int(math.floor(T / dt * (1 + 1e-12)))
    times = [i * dt for i in range(full + 1)]
    if T - times[-1] > 1e-12 * T:
        times.append(T)

    P = matrix_exponential(Acl * dt)
    V_of = None if C is None and C_factor is None else _lyapunov_evaluator(C, C_factor)

    states = np.empty((len(times), n), dtype=complex)
    states[0] = x
    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        step = P if abs(h - dt) <= 1e-12 * dt else matrix_exponential(Acl * h)
        x = step @ x
        states[i] = x

    norms = np.linalg.norm(states, axis=1)
    V = None if V_of is None else np.array([V_of(s) for s in states])
    return SimulationTrace(np.array(times), states, norms, V)


def decay_certificate(trace: SimulationTrace, gamma1: float) -> tuple[bool, float]:
    """Check ``||x(t)|| <= const * exp(-gamma1 t) ||x0||`` on a trace.

    ``best_constant`` is ``max_i ||x_i|| e^{gamma1 t_i} / ||x_0||``. The
    bound is accepted as exponential when the running maximum of the scaled
    norm grows over the trailing half of the trace by at most half of what
    it grew over the leading half; a polynomial leak such as ``(1 + t)``
    grows by equal amounts in both halves.
    """
    if len(trace) == 0:
        raise EmptyTrace("trace has no samples")
    if trace.norms[0] == 0:
        raise InvalidParams("initial state is zero")
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = trace.norms * np.exp(gamma1 * trace.times) / trace.norms[0]
    if not np.all(np.isfinite(scaled)):
        return False, math.inf
    running = np.maximum.accumulate(scaled)
    best = float(running[-1])
    half = int(np.searchsorted(trace.times, trace.times[-1] / 2, side="right")) - 1
    lead = running[half] - running[0]
    trail = running[-1] - running[half]
    holds = trail <= 0.5 * lead + 1e-9 * best
    return bool(holds), best


def lyapunov_monotonicity_check(
    trace: SimulationTrace,
    gamma1: float,
    tol: Tolerances = DEFAULT_TOL,
) -> bool:
    """Per-step form ``V(t_{i+1}) <= exp(-2 gamma1 dt_i) V(t_i) (1 + 1e-8)``."""
    if trace.lyapunov_values is None:
        raise MissingLyapunovData("trace was simulated without C")
    V = trace.lyapunov_values
    if V.size < 2:
        return True
    decay = np.exp(-2.0 * gamma1 * np.diff(trace.times))
    return bool(np.all(V[1:] <= decay * V[:-1] * (1.0 + LYAPUNOV_STEP_SLACK)))


def worst_lyapunov_step(trace: SimulationTrace, gamma1: float) -> float:
    """Largest relative excess ``V_{i+1} / (e^{-2 g dt} V_i) - 1`` on the trace."""
    V = trace.lyapunov_values
    if V is None:
        raise MissingLyapunovData("trace was simulated without C")
    decay = np.exp(-2.0 * gamma1 * np.diff(trace.times))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = V[1:] / (decay * V[:-1])
    return float(np.nanmax(ratio) - 1.0) if ratio.size else -1.0

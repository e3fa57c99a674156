"""Explicit stabilizing feedback from shifted resolvents.

Given a controllable pair ``(A, B)`` and shifts ``0 < g_1 < ... < g_N``
with every ``A + g_k I`` invertible, put

    V_k = (A + g_k I)^{-1} B,      B_k = V_k V_k^H,      C = sum_k B_k

and

    K = -B^H [sum_k (A^H + g_k I)^{-1}] C^{-1}.

Then ``A + B K = -(sum_k g_k B_k) C^{-1}`` and every eigenvalue of the
closed loop has real part at most ``-g_1``.

Numerics
--------
``C`` is a sum of outer products and is typically far worse conditioned
than its factors: for single-input systems ``cond(C) = cond(V)^2`` with
``V`` a Cauchy-like matrix. The default ``method="factored"`` never solves
against ``C``. With ``W = [V_1 | ... | V_N]`` we have ``C = W W^H`` and
``B^H (A^H + g_k I)^{-1} = V_k^H``, so

    K = -E^T W^+,    E = [I_M; ...; I_M],

which is evaluated from a QR factorization ``W^H = Q R`` (so that
``C = R^H R``). ``method="direct"`` evaluates the formula as written, with
explicit resolvent sums and an LU solve against ``C``; it is kept as a
cross-check for well-conditioned problems.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .controllability import is_controllable, resolvent_blocks
from .errors import GridSelectionFailed, IllConditionedC, InvalidParams, NotControllable
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    ctranspose,
    eigenvalues,
    lu_solve,
    svd_rank,
)
from .system import ControlSystem

IDENTITY_RESIDUAL_TOL = 1e-8
ILL_CONDITIONED_C = 1e12
MAX_NUDGES = 20


@dataclass(frozen=True)
class GammaGrid:
    """Strictly increasing positive shifts with invertibility certificates.

    ``min_singular_values[k]`` is ``sigma_min(A + gammas[k] I)`` as measured
    when the grid was selected.
    """

    gammas: np.ndarray
    min_singular_values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        s = np.asarray(self.min_singular_values, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise InvalidParams("gammas must be a nonempty 1-D sequence")
        if s.shape != g.shape:
            raise InvalidParams("one certificate per shift is required")
        if g[0] <= 0 or np.any(np.diff(g) <= 0):
            raise InvalidParams(f"shifts must be positive and strictly increasing: {g}")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "min_singular_values", s)

    def __len__(self) -> int:
        return self.gammas.size

    @property
    def gamma1(self) -> float:
        return float(self.gammas[0])


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    """Gain, accumulator and closed-loop certificates for one synthesis.

    ``C_factor`` is an upper-triangular ``R`` with ``C = R^H R``; solves
    against it are much better conditioned than solves against ``C``.
    ``min_eig_C`` is ``sigma_min(R)^2``, the smallest eigenvalue of ``C``
    computed from the factor. ``pole_gap`` is the largest distance from a
    shift ``-g_k`` to the nearest closed-loop eigenvalue; it is reported,
    never checked.
    """

    K: np.ndarray
    C: np.ndarray
    components: list[np.ndarray]
    closed_loop: np.ndarray
    spectrum: np.ndarray
    spectral_abscissa: float
    identity_residual: float
    cond_C: float
    gammas: np.ndarray
    C_factor: np.ndarray
    min_eig_C: float
    pole_gap: float
    ill_conditioned: bool = False
    method: str = "factored"
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "K": complex_to_pairs(self.K),
            "gammas": self.gammas.tolist(),
            "spectrum": complex_to_pairs(self.spectrum),
            "spectral_abscissa": self.spectral_abscissa,
            "identity_residual": self.identity_residual,
            "cond_C": self.cond_C,
            "min_eig_C": self.min_eig_C,
            "pole_gap": self.pole_gap,
            "ill_conditioned": self.ill_conditioned,
            "method": self.method,
            "warnings": list(self.warnings),
        }


def complex_to_pairs(arr) -> list:
    """Nested ``[re, im]`` pairs for JSON output."""
    arr = np.asarray(arr, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [complex_to_pairs(a) for a in arr]


def _min_singular_value(M: np.ndarray) -> float:
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def invertibility_threshold(A: np.ndarray, gamma: float) -> float:
    return 1e-8 * (np.linalg.norm(A) + gamma)


def default_spacing(sys: ControlSystem) -> float:
    return max(1.0, float(np.linalg.norm(sys.A)) / sys.n)


def select_gammas(
    sys: ControlSystem,
    gamma1: float = 1.0,
    spacing: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> GammaGrid:
    """Pick ``g_k = gamma1 + (k-1) spacing`` and certify each ``A + g_k I``.

    A shift whose shifted matrix is numerically singular is pushed right by
    ``spacing / 7`` until it passes, at most ``MAX_NUDGES`` times. Later
    shifts are pushed along with it when needed to stay strictly increasing.
    """
    if spacing is None:
        spacing = default_spacing(sys)
    if not (np.isfinite(gamma1) and gamma1 > 0):
        raise InvalidParams(f"gamma1 must be positive, got {gamma1!r}")
    if not (np.isfinite(spacing) and spacing > 0):
        raise InvalidParams(f"spacing must be positive, got {spacing!r}")

    eye = np.eye(sys.n)
    gammas, certs = [], []
    for k in range(sys.n):
        g = gamma1 + k * spacing
        if gammas and g <= gammas[-1]:
            g = gammas[-1] + spacing
        for _ in range(MAX_NUDGES + 1):
            sigma = _min_singular_value(sys.A + g * eye)
            if sigma > invertibility_threshold(sys.A, g):
                break
            g += spacing / 7
        else:
            raise GridSelectionFailed(
                f"shift {k + 1} still collides with -spec(A) after {MAX_NUDGES} nudges"
            )
        gammas.append(g)
        certs.append(sigma)
    return GammaGrid(np.array(gammas), np.array(certs))


def component_matrices(sys: ControlSystem, grid, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """``B_k = V_k V_k^H`` with ``V_k = (A + g_k I)^{-1} B``.

    Formed as explicit outer products, so each ``B_k`` is Hermitian to the
    last bit.
    """
    return [_outer(V) for V in resolvent_blocks(sys, grid, tol)]


def _outer(V: np.ndarray) -> np.ndarray:
    P = V @ ctranspose(V)
    # the matmul kernel does not guarantee bitwise symmetry
    P = np.triu(P) + ctranspose(np.triu(P, 1))
    np.fill_diagonal(P, P.diagonal().real)
    return P


def gram_sum(components: Sequence[np.ndarray]) -> np.ndarray:
    """``C = sum_k B_k``, accumulated in index order."""
    C = np.zeros_like(components[0])
    for Bk in components:
        C = C + Bk
    return C


@dataclass(frozen=True)
class _Factorization:
    W: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    shifts_per_column: np.ndarray


def _factor(blocks: list[np.ndarray], gammas: np.ndarray) -> _Factorization:
    W = np.hstack(blocks)
    Q, R = np.linalg.qr(ctranspose(W))
    m = blocks[0].shape[1]
    return _Factorization(W, Q, R, np.repeat(gammas, m))


def _right_solve_RH(R: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """``Y R^{-H}``."""
    return ctranspose(sla.solve_triangular(R, ctranspose(Y), lower=False))


def gain_for_shifts(sys: ControlSystem, gammas, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Just the gain, for any set of positive distinct shifts in any order."""
    gammas = np.asarray(gammas, dtype=float)
    f = _factor(resolvent_blocks(sys, gammas, tol), gammas)
    E = np.vstack([np.eye(sys.m)] * gammas.size)
    return -_right_solve_RH(f.R, E.T @ f.Q)


def _direct_gain(sys: ControlSystem, gammas: np.ndarray, C: np.ndarray, tol: Tolerances) -> np.ndarray:
    eye = np.eye(sys.n)
    AH = ctranspose(sys.A)
    S = np.zeros((sys.n, sys.n), dtype=complex)
    for g in gammas:
        S = S + lu_solve(AH + g * eye, eye, tol)
    L = ctranspose(sys.B) @ S
    # K C = -L  <=>  C^T K^T = -L^T
    return -lu_solve(C.T, L.T, tol).T


def _pole_gap(spectrum: np.ndarray, gammas: np.ndarray) -> float:
    return float(max(np.min(np.abs(spectrum + g)) for g in gammas))


def feedback_gain(
    sys: ControlSystem,
    grid: GammaGrid,
    tol: Tolerances = DEFAULT_TOL,
    *,
    force: bool = False,
    method: str = "factored",
) -> SynthesisResult:
    """Compute the explicit stabilizing gain and certify the closed loop.

    Parameters
    ----------
    sys : ControlSystem
    grid : GammaGrid
        Shifts, usually from :func:`select_gammas`.
    tol : Tolerances
    force : bool
        Skip the Kalman gate. Numerical full rank of the accumulator factor
        is then the only gate.
    method : {"factored", "direct"}
        See the module docstring.

    Returns
    -------
    SynthesisResult
        When ``cond_C > 1e12`` the result carries ``ill_conditioned=True``
        and an :class:`IllConditionedC` warning is issued.

    Raises
    ------
    NotControllable
        If the Kalman gate (or, with ``force``, the accumulator gate) fails.
    """
    if method not in ("factored", "direct"):
        raise InvalidParams(f"unknown method {method!r}")
    if len(grid) != sys.n:
        raise InvalidParams(f"grid has {len(grid)} shifts, system has N={sys.n}")
    if not force:
        report = is_controllable(sys, tol)
        if not report.controllable:
            raise NotControllable(
                f"Kalman rank {report.kalman_rank} < N = {sys.n}"
            )

    gammas = grid.gammas
    blocks = resolvent_blocks(sys, gammas, tol)
    components = [_outer(V) for V in blocks]
    C = gram_sum(components)
    f = _factor(blocks, gammas)

    rank_W, sW = svd_rank(f.W, tol)
    if rank_W < sys.n:
        raise NotControllable(f"accumulator is singular: factor rank {rank_W} < N = {sys.n}")
    cond_C = float((sW[0] / sW[-1]) ** 2)
    min_eig_C = float(sW[-1] ** 2)

    if method == "factored":
        E = np.vstack([np.eye(sys.m)] * sys.n)
        K = -_right_solve_RH(f.R, E.T @ f.Q)
    else:
        K = _direct_gain(sys, gammas, C, tol)

    closed_loop = sys.A + sys.B @ K
    # second, independent route: (G W^+)^H = lstsq(W^H, G^H) via SVD
    G = f.W * f.shifts_per_column
    X, *_ = np.linalg.lstsq(ctranspose(f.W), ctranspose(G), rcond=None)
    identity_residual = float(
        np.linalg.norm(closed_loop + ctranspose(X)) / max(1.0, np.linalg.norm(closed_loop))
    )

    spectrum = eigenvalues(closed_loop)
    notes = []
    ill = cond_C > ILL_CONDITIONED_C
    if ill:
        msg = f"cond(C) = {cond_C:.3e} exceeds {ILL_CONDITIONED_C:.0e}"
        notes.append(msg)
        warnings.warn(msg, IllConditionedC, stacklevel=2)

    return SynthesisResult(
        K=K,
        C=C,
        components=components,
        closed_loop=closed_loop,
        spectrum=spectrum,
        spectral_abscissa=float(np.max(spectrum.real)),
        identity_residual=identity_residual,
        cond_C=cond_C,
        gammas=gammas,
        C_factor=f.R,
        min_eig_C=min_eig_C,
        pole_gap=_pole_gap(spectrum, gammas),
        ill_conditioned=ill,
        method=method,
        warnings=notes,
    )


def verify_margin(result: SynthesisResult, gamma1: float, tol: Tolerances = DEFAULT_TOL) -> bool:
    return bool(
        result.spectral_abscissa <= -gamma1 + tol.eig_margin_tol
        and result.identity_residual <= IDENTITY_RESIDUAL_TOL
    )


def synthesize(
    sys: ControlSystem,
    gamma1: float = 1.0,
    spacing: float | None = None,
    tol: Tolerances = DEFAULT_TOL,
    *,
    force: bool = False,
) -> SynthesisResult:
    """Controllability gate, shift selection and gain in one call."""
    grid = select_gammas(sys, gamma1, spacing, tol)
    return feedback_gain(sys, grid, tol, force=force)

"""Dense complex linear algebra used by every other module.

All matrices are carried as read-only, C-contiguous ``complex128`` numpy
arrays, even when the data is real. Factorizations are delegated to LAPACK
through numpy/scipy; this module adds the tolerance policy, the error types
and the post-condition checks.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import InvalidParams, NotHermitian, NumericalBreakdown, Overflow, SingularMatrix

EPS = np.finfo(float).eps

# scaling-and-squaring needs ~log2(cap) squarings; past this nothing useful survives
EXPM_NORM_CAP = 1e8


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack for rank, residual and spectral decisions.

    ``rank_rel_tol=None`` selects the shape-dependent default
    ``max(rows, cols) * eps * 64``.
    """

    rank_rel_tol: float | None = None
    residual_tol: float = 1e-9
    eig_margin_tol: float = 1e-6

    def __post_init__(self):
        for name in ("rank_rel_tol", "residual_tol", "eig_margin_tol"):
            value = getattr(self, name)
            if value is None:
                continue
            if not (0.0 < value < 1.0):
                raise InvalidParams(f"{name} must lie in (0, 1), got {value!r}")

    def rank_cutoff(self, shape: tuple[int, ...]) -> float:
        if self.rank_rel_tol is not None:
            return self.rank_rel_tol
        return max(shape) * EPS * 64


DEFAULT_TOL = Tolerances()


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """Convert ``data`` to a finite, read-only complex matrix.

    Scalars become 1x1 matrices. Anything that is not two-dimensional after
    that is rejected, as are empty and non-finite inputs.
    """
    arr = np.array(data, dtype=np.complex128, order="C", copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise InvalidParams(f"{name} must be two-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidParams(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InvalidParams(f"{name} contains NaN or Inf entries")
    arr.setflags(write=False)
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def _require_square(A: np.ndarray, name: str = "A") -> None:
    if A.shape[0] != A.shape[1]:
        raise InvalidParams(f"{name} must be square, got shape {A.shape}")


def ctranspose(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def lu_solve(A, rhs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve ``A X = rhs`` by LU with partial pivoting.

    Raises
    ------
    SingularMatrix
        If the smallest pivot is below ``n * eps`` relative to the largest
        entry of ``A``.
    NumericalBreakdown
        If the backward-error check ``||A X - rhs||_F <= residual_tol *
        ||A||_F * ||X||_F`` fails (it should not for a backward-stable LU).
    """
    A = as_matrix(A, "A")
    rhs = as_matrix(rhs, "rhs")
    _require_square(A)
    n = A.shape[0]
    if rhs.shape[0] != n:
        raise InvalidParams(f"rhs has {rhs.shape[0]} rows, expected {n}")

    scale = np.abs(A).max()
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= n * EPS * scale:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below threshold {n * EPS * scale:.3e}"
        )
    X = sla.lu_solve((lu, piv), rhs, check_finite=False)
    if not np.all(np.isfinite(X)):
        raise SingularMatrix("solution overflowed")

    resid = np.linalg.norm(A @ X - rhs)
    bound = tol.residual_tol * np.linalg.norm(A) * np.linalg.norm(X)
    if resid > bound and resid > EPS * np.linalg.norm(rhs):
        raise NumericalBreakdown(f"solve residual {resid:.3e} exceeds {bound:.3e}")
    return _frozen(X)


def inverse(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    A = as_matrix(A, "A")
    return lu_solve(A, np.eye(A.shape[0]), tol)


def svd_rank(A, tol: Tolerances = DEFAULT_TOL) -> tuple[int, np.ndarray]:
    """Numerical rank and the nonincreasing singular values of ``A``.

    The rank counts singular values strictly above ``cutoff * sigma_max``;
    the zero matrix has rank 0.
    """
    A = as_matrix(A, "A")
    try:
        s = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"SVD did not converge: {exc}") from exc
    if s[0] == 0.0:
        return 0, s
    cutoff = tol.rank_cutoff(A.shape) * s[0]
    return int(np.count_nonzero(s > cutoff)), s


def eigenvalues(A) -> np.ndarray:
    """All eigenvalues of a square matrix, with multiplicity.

    Uses the LAPACK Hessenberg-QR driver (``zgeev``), which is backward
    stable.
    """
    A = as_matrix(A, "A")
    _require_square(A)
    try:
        return sla.eigvals(A, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"QR iteration did not converge: {exc}") from exc


def spectral_abscissa(A) -> float:
    return float(np.max(eigenvalues(A).real))


def matrix_exponential(A) -> np.ndarray:
    """``exp(A)`` by scaling and squaring with a Pade approximant.

    Raises ``Overflow`` when ``||A||_1 > EXPM_NORM_CAP`` or the result is not
    finite.
    """
    A = as_matrix(A, "A")
    _require_square(A)
    norm = np.linalg.norm(A, 1)
    if norm > EXPM_NORM_CAP:
        raise Overflow(f"||A||_1 = {norm:.3e} exceeds cap {EXPM_NORM_CAP:.0e}")
    with np.errstate(over="ignore", invalid="ignore"):
        E = sla.expm(A)
    if not np.all(np.isfinite(E)):
        raise Overflow("matrix exponential overflowed")
    return _frozen(E)


def hermitian_min_eigenvalue(P, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of the Hermitian part of a near-Hermitian ``P``."""
    P = as_matrix(P, "P")
    _require_square(P, "P")
    skew = np.linalg.norm(P - ctranspose(P))
    if skew > tol.residual_tol * np.linalg.norm(P):
        raise NotHermitian(f"||P - P^H||_F = {skew:.3e} is not negligible")
    H = 0.5 * (P + ctranspose(P))
    return float(sla.eigvalsh(H, subset_by_index=[0, 0], check_finite=False)[0])

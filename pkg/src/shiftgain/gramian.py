"""Classical baseline: shifted controllability Gramian and Bass-type gain.

With ``rho`` large enough that ``As = -rho I - A`` is Hurwitz, the Gramian

    W = int_0^inf exp(As t) B B^H exp(As^H t) dt

is the solution of ``As W + W As^H = -B B^H``. Two gains are built from it:
``K_plus = +1/2 B^H W^{-1}`` and ``K_minus = -B^H W^{-1}``. Only the second
is guaranteed to stabilize, since ``(A - B B^H W^{-1}) W + W (...)^H =
-B B^H - 2 rho W``. Both are evaluated and the record says which one was
returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .controllability import is_controllable
from .errors import InvalidParams, NotControllable, NotHurwitz, SingularSystem
from .linalg import (
    DEFAULT_TOL,
    EPS,
    Tolerances,
    as_matrix,
    ctranspose,
    eigenvalues,
    lu_solve,
    matrix_exponential,
)
from .system import ControlSystem

LYAPUNOV_RESIDUAL_TOL = 1e-8

PLUS_HALF = "paper_plus_half"
CLASSICAL_MINUS = "classical_minus"


@dataclass(frozen=True, eq=False)
class GramianResult:
    rho: float
    W: np.ndarray
    K_gramian: np.ndarray
    lyapunov_residual: float
    closed_loop_spectrum: np.ndarray
    sign_convention_used: str
    K_plus: np.ndarray
    K_minus: np.ndarray
    abscissa_plus: float
    abscissa_minus: float

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(self.closed_loop_spectrum.real))


def select_rho(A) -> float:
    """``max(0, max_i -Re lambda_i(A)) + 1``."""
    lam = eigenvalues(A)
    return float(max(0.0, float(np.max(-lam.real)))) + 1.0


def lyapunov_residual(As, W, Q) -> float:
    """``||As W + W As^H + Q||_F / ||Q||_F``."""
    R = As @ W + W @ ctranspose(As) + Q
    qn = np.linalg.norm(Q)
    return float(np.linalg.norm(R) / (qn if qn > 0 else 1.0))


def _check_inputs(As, Q) -> tuple[np.ndarray, np.ndarray]:
    As = as_matrix(As, "As")
    Q = as_matrix(Q, "Q")
    n = As.shape[0]
    if As.shape != (n, n) or Q.shape != (n, n):
        raise InvalidParams(f"incompatible shapes {As.shape} and {Q.shape}")
    if np.max(eigenvalues(As).real) >= 0:
        raise NotHurwitz("As has an eigenvalue with nonnegative real part")
    return As, Q


def _solve_kronecker(As: np.ndarray, Q: np.ndarray, tol: Tolerances) -> np.ndarray:
    # row-major vec: vec(As W) = (As kron I) w,  vec(W As^H) = (I kron conj(As)) w
    n = As.shape[0]
    eye = np.eye(n)
    L = np.kron(As, eye) + np.kron(eye, As.conj())
    try:
        w = lu_solve(L, -Q.reshape(n * n, 1), tol)
    except Exception as exc:
        raise SingularSystem(f"Kronecker system is singular: {exc}") from exc
    return w.reshape(n, n)


def _solve_bartels_stewart(As: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Complex Schur form ``As = U T U^H``, then column-wise back substitution.

    With ``F = -U^H Q U`` the transformed equation ``T Y + Y T^H = F`` gives,
    for each column j from the last one down,
    ``(T + conj(T_jj) I) y_j = f_j - sum_{k>j} conj(T_jk) y_k``.
    """
    T, U = sla.schur(As, output="complex")
    F = -(ctranspose(U) @ Q @ U)
    n = As.shape[0]
    Y = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for j in range(n - 1, -1, -1):
        rhs = F[:, j] - Y[:, j + 1:] @ T[j, j + 1:].conj()
        diag = T + T[j, j].conj() * eye
        if np.min(np.abs(np.diag(diag))) <= n * EPS * np.abs(T).max():
            raise SingularSystem("spectra of As and -As^H intersect")
        Y[:, j] = sla.solve_triangular(diag, rhs, lower=False)
    return U @ Y @ ctranspose(U)


def solve_lyapunov(As, Q, tol: Tolerances = DEFAULT_TOL, method: str = "kronecker") -> np.ndarray:
    """Solve ``As W + W As^H = -Q`` for Hurwitz ``As``.

    ``method`` is ``"kronecker"`` (dense N^2 x N^2 solve, the default at
    desk scale) or ``"bartels-stewart"``. The Hermitian part of the solution
    is returned.
    """
    As, Q = _check_inputs(As, Q)
    if method == "kronecker":
        W = _solve_kronecker(As, Q, tol)
    elif method == "bartels-stewart":
        W = _solve_bartels_stewart(As, Q)
    else:
        raise InvalidParams(f"unknown Lyapunov method {method!r}")
    return 0.5 * (W + ctranspose(W))


def _gain_from_W(B: np.ndarray, W: np.ndarray, scale: float, tol: Tolerances) -> np.ndarray:
    # scale * B^H W^{-1} = scale * (W^{-1} B)^H since W is Hermitian
    return scale * ctranspose(lu_solve(W, B, tol))


def gramian_gain(
    sys: ControlSystem,
    tol: Tolerances = DEFAULT_TOL,
    *,
    method: str = "kronecker",
    rho: float | None = None,
) -> GramianResult:
    """Gramian-based stabilizing gain with both sign conventions evaluated.

    The ``+1/2`` form ``K_plus`` is preferred whenever it stabilizes;
    otherwise ``K_minus`` is returned.
    """
    if not is_controllable(sys, tol).controllable:
        raise NotControllable("Kalman rank test failed")
    if rho is None:
        rho = select_rho(sys.A)
    As = -rho * np.eye(sys.n) - sys.A
    Q = sys.B @ ctranspose(sys.B)
    W = solve_lyapunov(As, Q, tol, method)
    residual = lyapunov_residual(As, W, Q)

    K_plus = _gain_from_W(sys.B, W, 0.5, tol)
    K_minus = _gain_from_W(sys.B, W, -1.0, tol)
    spec_plus = eigenvalues(sys.A + sys.B @ K_plus)
    spec_minus = eigenvalues(sys.A + sys.B @ K_minus)
    a_plus = float(np.max(spec_plus.real))
    a_minus = float(np.max(spec_minus.real))

    if a_plus < 0:
        K, spectrum, used = K_plus, spec_plus, PLUS_HALF
    else:
        K, spectrum, used = K_minus, spec_minus, CLASSICAL_MINUS
    return GramianResult(
        rho=rho,
        W=W,
        K_gramian=K,
        lyapunov_residual=residual,
        closed_loop_spectrum=spectrum,
        sign_convention_used=used,
        K_plus=K_plus,
        K_minus=K_minus,
        abscissa_plus=a_plus,
        abscissa_minus=a_minus,
    )


def gramian_quadrature(sys: ControlSystem, rho: float, T: float, steps: int | None = None) -> np.ndarray:
    """Composite Simpson approximation of the Gramian integral on ``[0, T]``.

    The integrand ``X(t) X(t)^H`` with ``X(t) = exp(As t) B`` is sampled by
    repeated multiplication with the one-step propagator ``exp(As h)``.
    """
    if T < 0:
        raise InvalidParams("T must be nonnegative")
    As = -rho * np.eye(sys.n) - sys.A
    if T == 0:
        return np.zeros((sys.n, sys.n), dtype=complex)
    if steps is None:
        # Simpson error ~ (2 h ||As||)^4 / 180 relative; h ||As|| = 0.01 gives ~1e-9
        steps = int(math.ceil(T * max(1.0, np.linalg.norm(As, 2)) / 0.01))
    steps += steps % 2
    h = T / steps
    P = matrix_exponential(As * h)
    X = sys.B.copy()
    total = np.zeros((sys.n, sys.n), dtype=complex)
    for i in range(steps + 1):
        weight = 1 if i in (0, steps) else (4 if i % 2 else 2)
        total += weight * (X @ ctranspose(X))
        X = P @ X
    return total * (h / 3)


def gramian_quadrature_check(
    sys: ControlSystem,
    rho: float,
    T: float,
    tol: Tolerances = DEFAULT_TOL,
    steps: int | None = None,
) -> float:
    """Relative Frobenius gap between the quadrature and the Lyapunov solution."""
    As = -rho * np.eye(sys.n) - sys.A
    W = solve_lyapunov(As, sys.B @ ctranspose(sys.B), tol)
    Wq = gramian_quadrature(sys, rho, T, steps)
    return float(np.linalg.norm(Wq - W) / np.linalg.norm(W))

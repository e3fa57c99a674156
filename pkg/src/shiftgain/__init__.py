"""Explicit stabilizing state feedback for controllable pairs (A, B).

The gain is built from shifted resolvents ``(A + g_k I)^{-1} B`` and places
the whole closed-loop spectrum left of ``-g_1``. A Gramian/Lyapunov
baseline, trajectory checks and a small CLI are included.
"""
from .controllability import (
    RankReport,
    is_controllable,
    kalman_matrix,
    rank_equivalence_check,
    resolvent_block_matrix,
)
from .errors import (
    EmptyTrace,
    GridSelectionFailed,
    IllConditionedC,
    InvalidParams,
    MissingLyapunovData,
    NotControllable,
    NotHermitian,
    NotHurwitz,
    NumericalBreakdown,
    Overflow,
    ShiftGainError,
    SingularMatrix,
    SingularSystem,
)
from .generate import generate_system
from .gramian import (
    GramianResult,
    gramian_gain,
    gramian_quadrature_check,
    select_rho,
    solve_lyapunov,
)
from .linalg import (
    Tolerances,
    as_matrix,
    eigenvalues,
    hermitian_min_eigenvalue,
    inverse,
    lu_solve,
    matrix_exponential,
    svd_rank,
)
from .simulation import (
    SimulationTrace,
    decay_certificate,
    lyapunov_monotonicity_check,
    simulate,
)
from .synthesis import (
    GammaGrid,
    SynthesisResult,
    component_matrices,
    feedback_gain,
    gain_for_shifts,
    gram_sum,
    select_gammas,
    synthesize,
    verify_margin,
)
from .system import ControlSystem
from .sysfile import load_system, save_system

__version__ = "0.1.0"

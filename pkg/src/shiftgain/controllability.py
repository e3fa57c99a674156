"""Kalman rank test and the resolvent-block rank oracle.

For a controllable pair the Kalman matrix ``[B | AB | ... | A^{N-1} B]``
has full rank. Replacing the powers of ``A`` by the shifted resolvents
``(A + g_k I)^{-1} B`` for N distinct shifts gives a matrix of the same
rank, controllable or not. ``rank_equivalence_check`` computes both ranks
independently so the equality can be tested on arbitrary systems.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances, lu_solve, svd_rank
from .system import ControlSystem


@dataclass(frozen=True)
class RankReport:
    n: int
    kalman_rank: int
    singular_values_kalman: np.ndarray
    controllable: bool
    resolvent_rank: int | None = None
    singular_values_resolvent: np.ndarray | None = None

    @property
    def ranks_agree(self) -> bool:
        return self.resolvent_rank is None or self.resolvent_rank == self.kalman_rank

    def to_dict(self, tail: int = 3) -> dict:
        """JSON-ready summary; only the ``tail`` smallest singular values are kept."""
        out = {
            "n": self.n,
            "kalman_rank": self.kalman_rank,
            "resolvent_rank": self.resolvent_rank,
            "controllable": self.controllable,
            "singular_values_kalman_tail": self.singular_values_kalman[-tail:].tolist(),
        }
        if self.singular_values_resolvent is not None:
            out["singular_values_resolvent_tail"] = (
                self.singular_values_resolvent[-tail:].tolist()
            )
        return out


def _shifts(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "gammas", grid), dtype=float)


def kalman_matrix(sys: ControlSystem) -> np.ndarray:
    """``[B | AB | ... | A^{N-1} B]``, built by repeated multiplication."""
    blocks = [sys.B]
    for _ in range(sys.n - 1):
        blocks.append(sys.A @ blocks[-1])
    return np.hstack(blocks)


def is_controllable(sys: ControlSystem, tol: Tolerances = DEFAULT_TOL) -> RankReport:
    rank, s = svd_rank(kalman_matrix(sys), tol)
    return RankReport(
        n=sys.n,
        kalman_rank=rank,
        singular_values_kalman=s,
        controllable=rank == sys.n,
    )


def resolvent_blocks(sys: ControlSystem, grid, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """``[(A + g I)^{-1} B for g in grid]``."""
    eye = np.eye(sys.n)
    return [lu_solve(sys.A + g * eye, sys.B, tol) for g in _shifts(grid)]


def resolvent_block_matrix(sys: ControlSystem, grid, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return np.hstack(resolvent_blocks(sys, grid, tol))


def _equilibrate(blocks: list[np.ndarray]) -> np.ndarray:
    # blocks shrink like 1/g; rescaling each is a right multiplication by an
    # invertible diagonal and so leaves the rank unchanged
    scaled = []
    for block in blocks:
        norm = np.linalg.norm(block)
        scaled.append(block / norm if norm > 0 else block)
    return np.hstack(scaled)


def rank_equivalence_check(sys: ControlSystem, grid, tol: Tolerances = DEFAULT_TOL) -> RankReport:
    kalman = is_controllable(sys, tol)
    res_rank, res_s = svd_rank(_equilibrate(resolvent_blocks(sys, grid, tol)), tol)
    return RankReport(
        n=sys.n,
        kalman_rank=kalman.kalman_rank,
        singular_values_kalman=kalman.singular_values_kalman,
        controllable=kalman.controllable,
        resolvent_rank=res_rank,
        singular_values_resolvent=res_s,
    )

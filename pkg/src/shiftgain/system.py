"""The controlled linear system x' = A x + B u."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams
from .linalg import as_matrix


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """A pair ``(A, B)`` with ``A`` N-by-N and ``B`` N-by-M, both complex."""

    A: np.ndarray
    B: np.ndarray
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        if A.shape[0] != A.shape[1]:
            raise InvalidParams(f"A must be square, got shape {A.shape}")
        if B.shape[0] != A.shape[0]:
            raise InvalidParams(
                f"B has {B.shape[0]} rows but A is {A.shape[0]}x{A.shape[0]}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def transformed(self, S: np.ndarray) -> "ControlSystem":
        """The system in coordinates ``x = S^{-1} z``: ``(S A S^{-1}, S B)``."""
        S = as_matrix(S, "S")
        A_new = S @ np.linalg.solve(S.T, self.A.T).T
        return ControlSystem(A_new, S @ self.B, self.name)

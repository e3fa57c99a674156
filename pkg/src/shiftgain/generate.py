"""Seeded generators for test and benchmark systems."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParams
from .system import ControlSystem

KINDS = ("random", "companion", "jordan", "uncontrollable")


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circular complex Gaussian entries with ``E|z|^2 = 1``."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_normal(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _input_matrix(rng, n: int, m: int) -> np.ndarray:
    # e_N first, then arbitrary extra columns
    B = np.zeros((n, m), dtype=complex)
    B[-1, 0] = 1.0
    if m > 1:
        B[:, 1:] = complex_normal(rng, (n, m - 1))
    return B


def companion(coefficients, m: int = 1, rng=None) -> ControlSystem:
    """Companion form of ``s^n + c_{n-1} s^{n-1} + ... + c_0``, input ``e_N``.

    ``coefficients`` lists ``c_0, ..., c_{n-1}``.
    """
    c = np.asarray(coefficients, dtype=complex).reshape(-1)
    n = c.size
    A = np.zeros((n, n), dtype=complex)
    A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -c
    return ControlSystem(A, _input_matrix(np.random.default_rng(rng), n, m))


def generate_system(kind: str, n: int, m: int = 1, seed=None) -> ControlSystem:
    """Draw a system of the given ``kind``.

    ``random`` has complex Gaussian ``A`` and ``B``. ``companion`` and
    ``jordan`` are controllable through their first input column ``e_N``.
    ``uncontrollable`` is block diagonal with an unreachable block, under a
    random permutation of the coordinates (``n = 1`` gives ``B = 0``).
    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if kind not in KINDS:
        raise InvalidParams(f"kind must be one of {KINDS}, got {kind!r}")
    if int(n) < 1 or int(m) < 1:
        raise InvalidParams(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    n, m = int(n), int(m)
    rng = np.random.default_rng(seed)

    if kind == "random":
        return ControlSystem(complex_normal(rng, (n, n)), complex_normal(rng, (n, m)))
    if kind == "companion":
        return companion(complex_normal(rng, n), m, rng)
    if kind == "jordan":
        lam = complex_normal(rng, ())
        A = lam * np.eye(n) + np.diag(np.ones(n - 1), 1)
        return ControlSystem(A, _input_matrix(rng, n, m))

    if n == 1:
        return ControlSystem(complex_normal(rng, (1, 1)), np.zeros((1, m)))
    r = int(rng.integers(1, n))  # reachable dimension, 1 <= r < n
    A = np.zeros((n, n), dtype=complex)
    A[:r, :r] = complex_normal(rng, (r, r))
    A[r:, r:] = complex_normal(rng, (n - r, n - r))
    B = np.zeros((n, m), dtype=complex)
    B[:r] = complex_normal(rng, (r, m))
    # a permutation similarity is exact in floating point, a rotation is not
    p = rng.permutation(n)
    return ControlSystem(A[np.ix_(p, p)], B[p])

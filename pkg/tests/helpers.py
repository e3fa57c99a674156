"""Seeded system ensembles shared by the test modules."""
import numpy as np

from shiftgain import generate_system, is_controllable

ENSEMBLE_SEED = 2024


def controllable_ensemble(count=200, seed=ENSEMBLE_SEED, nmax=10, mmax=3):
    """``count`` random controllable systems with N in 1..nmax, M in 1..mmax."""
    rng = np.random.default_rng(seed)
    systems = []
    while len(systems) < count:
        n = int(rng.integers(1, nmax + 1))
        m = int(rng.integers(1, mmax + 1))
        sys = generate_system("random", n, m, rng)
        if is_controllable(sys).controllable:
            systems.append(sys)
    return systems


def uncontrollable_ensemble(count=50, seed=ENSEMBLE_SEED + 1, nmax=10, mmax=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, nmax + 1))
        m = int(rng.integers(1, mmax + 1))
        out.append(generate_system("uncontrollable", n, m, rng))
    return out

import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftgain import (
    ControlSystem,
    GammaGrid,
    GridSelectionFailed,
    IllConditionedC,
    InvalidParams,
    NotControllable,
    component_matrices,
    feedback_gain,
    generate_system,
    gram_sum,
    hermitian_min_eigenvalue,
    select_gammas,
    synthesize,
    gain_for_shifts,
    verify_margin,
)
from shiftgain.generate import random_unitary
from shiftgain.linalg import DEFAULT_TOL
from shiftgain.synthesis import default_spacing, invertibility_threshold


def grid_of(*gammas):
    return GammaGrid(np.array(gammas, dtype=float), np.ones(len(gammas)))


def _double_integrator_by_fractions():
    # (A + gI)^{-1} B = [-1/g^2, 1/g] for the double integrator
    C = [[Fraction(0)] * 2 for _ in range(2)]
    L = [Fraction(0), Fraction(0)]
    for g in (Fraction(1), Fraction(2)):
        v = [-1 / g**2, 1 / g]
        for i in range(2):
            for j in range(2):
                C[i][j] += v[i] * v[j]
        # B^T (A^T + gI)^{-1} = v^T
        L = [L[0] + v[0], L[1] + v[1]]
    det = C[0][0] * C[1][1] - C[0][1] * C[1][0]
    Cinv = [[C[1][1] / det, -C[0][1] / det], [-C[1][0] / det, C[0][0] / det]]
    K = [-(L[0] * Cinv[0][j] + L[1] * Cinv[1][j]) for j in range(2)]
    return C, Cinv, L, K


class TestWorkedExamples:
    def test_scalar(self, scalar_system):
        res = feedback_gain(scalar_system, grid_of(3.0))
        np.testing.assert_allclose(res.K, [[-5]], atol=1e-12)
        np.testing.assert_allclose(res.spectrum, [-3], atol=1e-12)
        np.testing.assert_allclose(res.C, [[1 / 25]], atol=1e-15)
        assert verify_margin(res, 3.0)

    def test_double_integrator_fractions(self):
        C, Cinv, L, K = _double_integrator_by_fractions()
        assert C == [[Fraction(17, 16), Fraction(-9, 8)], [Fraction(-9, 8), Fraction(5, 4)]]
        assert Cinv == [[20, 18], [18, 17]]
        assert L == [Fraction(-5, 4), Fraction(3, 2)]
        assert K == [-2, -3]

    @pytest.mark.parametrize("method", ["factored", "direct"])
    def test_double_integrator(self, double_integrator, method):
        res = feedback_gain(double_integrator, grid_of(1.0, 2.0), method=method)
        np.testing.assert_allclose(res.K, [[-2, -3]], atol=1e-9)
        np.testing.assert_allclose(np.sort(res.spectrum.real), [-2, -1], atol=1e-9)
        np.testing.assert_allclose(res.C, [[17 / 16, -9 / 8], [-9 / 8, 5 / 4]], atol=1e-15)
        assert np.linalg.det(res.C) == pytest.approx(1 / 16)
        assert res.identity_residual < 1e-14
        assert res.min_eig_C > 0
        assert verify_margin(res, 1.0)
        # C = R^H R
        R = res.C_factor
        np.testing.assert_allclose(R.conj().T @ R, res.C, atol=1e-14)

    def test_unreachable_mode_raises(self):
        sys = ControlSystem(np.diag([1.0, 2.0]), [[1.0], [0.0]])
        with pytest.raises(NotControllable):
            feedback_gain(sys, grid_of(1.0, 2.0))
        with pytest.raises(NotControllable):
            feedback_gain(sys, grid_of(1.0, 2.0), force=True)

    def test_zero_input_accumulator(self):
        sys = ControlSystem(np.eye(2), np.zeros((2, 1)))
        C = gram_sum(component_matrices(sys, [1.0, 2.0]))
        assert np.all(C == 0)

    def test_verify_margin_rejects_slow_closed_loop(self, scalar_system):
        res = feedback_gain(scalar_system, grid_of(3.0))
        from dataclasses import replace
        fake = replace(res, spectral_abscissa=-0.5)
        assert not verify_margin(fake, 1.0)
        assert not verify_margin(replace(res, identity_residual=1e-6), 3.0)


class TestGrid:
    def test_default_spacing(self):
        sys = ControlSystem(10 * np.eye(2), np.ones((2, 1)))
        assert default_spacing(sys) == pytest.approx(np.sqrt(200) / 2)
        assert default_spacing(ControlSystem([[0.1]], [[1]])) == 1.0

    def test_arithmetic_grid(self, double_integrator):
        grid = select_gammas(double_integrator, 0.5, 0.25)
        np.testing.assert_allclose(grid.gammas, [0.5, 0.75])
        assert grid.gamma1 == 0.5 and len(grid) == 2

    def test_nudge_past_eigenvalue(self):
        # A + 2I is singular, so the second shift moves right by spacing/7
        sys = ControlSystem(np.diag([-5.0, -2.0]), [[1.0], [1.0]])
        grid = select_gammas(sys, 1.0, 1.0)
        assert grid.gammas[0] == 1.0
        assert grid.gammas[1] == pytest.approx(2.0 + 1 / 7)
        assert np.all(grid.min_singular_values > 0)

    def test_grid_selection_failure(self):
        # one nudge per eigenvalue in a dense run of them
        lam = -(1.0 + np.arange(0, 30) / 7)
        sys = ControlSystem(np.diag(lam), np.ones((30, 1)))
        with pytest.raises(GridSelectionFailed):
            select_gammas(sys, 1.0, 1.0)

    @pytest.mark.parametrize("gamma1, spacing", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (np.nan, 1.0)])
    def test_invalid(self, double_integrator, gamma1, spacing):
        with pytest.raises(InvalidParams):
            select_gammas(double_integrator, gamma1, spacing)

    def test_grid_must_increase(self):
        with pytest.raises(InvalidParams):
            grid_of(1.0, 1.0)
        with pytest.raises(InvalidParams):
            grid_of(0.0, 1.0)

    def test_threshold_scales(self):
        A = np.eye(4)
        assert invertibility_threshold(A, 3.0) == pytest.approx(1e-8 * 5)

    def test_grid_length_must_match(self, double_integrator):
        with pytest.raises(InvalidParams):
            feedback_gain(double_integrator, grid_of(1.0))


def test_ill_conditioned_warning():
    # a tight grid makes the resolvent blocks nearly parallel
    sys = generate_system("random", 6, 1, 3)
    grid = select_gammas(sys, 1.0, 0.1)
    with pytest.warns(IllConditionedC):
        res = feedback_gain(sys, grid)
    assert res.ill_conditioned and res.warnings


def test_direct_and_factored_agree_when_well_conditioned(rng):
    for _ in range(10):
        sys = generate_system("random", 4, 2, rng)
        grid = select_gammas(sys)
        a = feedback_gain(sys, grid)
        b = feedback_gain(sys, grid, method="direct")
        np.testing.assert_allclose(a.K, b.K, rtol=1e-8, atol=1e-10 * np.linalg.norm(a.K))


def test_synthesize_matches_manual_steps(double_integrator):
    res = synthesize(double_integrator, 1.0, 1.0)
    np.testing.assert_allclose(res.K, [[-2, -3]], atol=1e-9)


def test_single_input_poles_sit_on_shifts(rng):
    # with M = 1 the closed loop is similar to -diag(g)
    sys = generate_system("random", 4, 1, rng)
    grid = select_gammas(sys)
    res = feedback_gain(sys, grid)
    assert res.pole_gap < 1e-6


def test_result_to_dict_is_json_ready(double_integrator):
    import json
    doc = feedback_gain(double_integrator, grid_of(1.0, 2.0)).to_dict()
    json.dumps(doc)
    assert doc["K"][0][0] == pytest.approx([-2.0, 0.0])


systems = st.tuples(st.integers(1, 6), st.integers(1, 3), st.integers(0, 2**32 - 1))


@settings(max_examples=80, deadline=None)
@given(systems)
def test_components_hermitian_and_accumulator_definite(params):
    n, m, seed = params
    sys = generate_system("random", n, m, seed)
    grid = select_gammas(sys)
    comps = component_matrices(sys, grid)
    for Bk in comps:
        assert np.array_equal(Bk, Bk.conj().T)
    C = gram_sum(comps)
    assert np.array_equal(C, C.conj().T)
    if sys_is_controllable(sys):
        assert hermitian_min_eigenvalue(C) > 0


def sys_is_controllable(sys):
    from shiftgain import is_controllable
    return is_controllable(sys).controllable


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_uncontrollable_accumulator_is_singular(n, seed):
    sys = generate_system("uncontrollable", n, 2, seed)
    grid = select_gammas(sys)
    C = gram_sum(component_matrices(sys, grid))
    lmax = np.linalg.eigvalsh(C).max()
    cutoff = DEFAULT_TOL.rank_cutoff((n, 2 * n))
    assert hermitian_min_eigenvalue(C) <= cutoff * max(lmax, 1.0)


@settings(max_examples=60, deadline=None)
@given(systems)
def test_unitary_equivariance(params):
    n, m, seed = params
    rng = np.random.default_rng(seed)
    sys = generate_system("random", n, m, rng)
    S = random_unitary(rng, n)
    grid = select_gammas(sys)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedC)
        a = feedback_gain(sys, grid)
        b = feedback_gain(sys.transformed(S), grid)
    if a.ill_conditioned:
        return
    expected = a.K @ S.conj().T
    assert np.linalg.norm(b.K - expected) <= 1e-8 * np.linalg.norm(expected)
    np.testing.assert_allclose(np.sort_complex(b.spectrum), np.sort_complex(a.spectrum),
                               atol=1e-7 * max(1, np.abs(a.spectrum).max()))


@settings(max_examples=60, deadline=None)
@given(systems, st.randoms(use_true_random=False))
def test_gain_depends_on_set_of_shifts(params, shuffler):
    n, m, seed = params
    sys = generate_system("random", n, m, seed)
    if not sys_is_controllable(sys):
        return
    grid = select_gammas(sys)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedC)
        if feedback_gain(sys, grid).ill_conditioned:
            return
    gammas = grid.gammas
    perm = list(range(n))
    shuffler.shuffle(perm)
    K1 = gain_for_shifts(sys, gammas)
    K2 = gain_for_shifts(sys, gammas[perm])
    assert np.linalg.norm(K1 - K2) <= 1e-10 * max(1.0, np.linalg.norm(K1))


@settings(max_examples=80, deadline=None)
@given(systems)
def test_margin_and_identity(params):
    n, m, seed = params
    sys = generate_system("random", n, m, seed)
    if not sys_is_controllable(sys):
        return
    grid = select_gammas(sys)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedC)
        res = feedback_gain(sys, grid)
    assert res.spectral_abscissa <= -grid.gamma1 + 1e-6
    assert res.identity_residual <= 1e-8

import numpy as np
import pytest

import oracles
from dslasso.norms import (
    EpsQ,
    conjugate_exponent,
    epsq_ball_boundary,
    epsq_decompose,
    epsq_dual_norm,
    epsq_norm,
    lq_norm,
    soft_threshold,
)


def random_epsq(rng):
    q_pool = [1.0, 2.0, np.inf, 1.0 + 3.0 * rng.random(), 1.0 + 9.0 * rng.random()]
    q = q_pool[rng.integers(len(q_pool))]
    eps = float(rng.uniform(0.05, 1.0))
    if rng.random() < 0.1:
        eps = 1.0
    return EpsQ(eps, q)


class TestLqNorm:
    def test_examples(self):
        assert lq_norm([3, 4], 2) == pytest.approx(5.0)
        assert lq_norm([1, -1], np.inf) == 1.0
        assert lq_norm([1, 1, 1], 1) == 3.0

    def test_large_q_no_overflow(self):
        assert lq_norm([1e200, 1e200], 50.0) == pytest.approx(1e200 * 2 ** 0.02)

    def test_invalid(self):
        with pytest.raises(ValueError):
            lq_norm([1.0], 0.5)
        with pytest.raises(ValueError):
            lq_norm([], 2)


class TestSoftThreshold:
    def test_examples(self):
        np.testing.assert_allclose(soft_threshold([2, -0.5], 1.0), [1.0, 0.0])
        x = np.array([0.3, -1.2, 4.0])
        np.testing.assert_array_equal(soft_threshold(x, 0.0), x)
        np.testing.assert_allclose(soft_threshold([-3.0], 1.0), [-2.0])

    def test_kink_maps_to_zero(self):
        assert soft_threshold([1.0, -1.0], 1.0).tolist() == [0.0, 0.0]

    def test_negative_threshold(self):
        with pytest.raises(ValueError):
            soft_threshold([1.0], -0.1)


class TestEpsQType:
    def test_epsilon_zero_rejected(self):
        with pytest.raises(ValueError, match="q = inf"):
            EpsQ(0.0, 2.0)

    @pytest.mark.parametrize("q", [0.0, 0.5, 0.99, -1.0, np.nan])
    def test_sub_one_q_rejected(self, q):
        with pytest.raises(ValueError):
            EpsQ(0.5, q)

    def test_valid_range(self):
        EpsQ(1.0, 1.0)
        EpsQ(1e-9, np.inf)


class TestEpsqNorm:
    def test_unit_vector_is_one(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            p = random_epsq(rng)
            dim = int(rng.integers(1, 9))
            e = np.zeros(dim)
            e[rng.integers(dim)] = 1.0
            assert epsq_norm(e, p) == pytest.approx(1.0, abs=1e-12)

    def test_all_ones_closed_form(self):
        rng = np.random.default_rng(1)
        for _ in range(40):
            p = random_epsq(rng)
            if np.isinf(p.q):
                continue
            dim = int(rng.integers(1, 30))
            proot = dim ** (1.0 / p.q)
            expect = proot / (proot * (1.0 - p.epsilon) + p.epsilon)
            got = epsq_norm(np.ones(dim), p)
            assert got == pytest.approx(expect, rel=1e-12)
            assert got == pytest.approx(oracles.epsq_bisect(np.ones(dim), p.epsilon, p.q), rel=1e-11)

    def test_ones_pair_half_eps(self):
        v = epsq_norm([1.0, 1.0], EpsQ(0.5, 2.0))
        assert v == pytest.approx(4.0 - 2.0 * np.sqrt(2.0), rel=1e-12)
        assert v == pytest.approx(oracles.epsq_bisect([1.0, 1.0], 0.5, 2.0), rel=1e-12)

    def test_eps_one_is_lq(self):
        rng = np.random.default_rng(2)
        for q in [1.0, 1.7, 2.0, 4.0]:
            x = rng.standard_normal(11)
            assert epsq_norm(x, EpsQ(1.0, q)) == pytest.approx(lq_norm(x, q), rel=1e-14)

    def test_q_inf_is_max(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(9)
        for eps in [0.2, 0.9, 1.0]:
            assert epsq_norm(x, EpsQ(eps, np.inf)) == np.max(np.abs(x))

    def test_zero_vector(self):
        assert epsq_norm(np.zeros(5), EpsQ(0.3, 2.0)) == 0.0

    def test_defining_residual_random(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            p = random_epsq(rng)
            x = rng.standard_normal(int(rng.integers(1, 51))) * 10 ** rng.uniform(-3, 3)
            v = epsq_norm(x, p)
            s = soft_threshold(x, (1.0 - p.epsilon) * v)
            res = abs(lq_norm(s, p.q) - p.epsilon * v) if np.any(s) else p.epsilon * v - 0.0
            assert abs(res) <= 1e-10 * max(1.0, lq_norm(x, p.q))

    def test_fast_paths_match_bisection(self):
        rng = np.random.default_rng(5)
        for q in (1.0, 2.0):
            for _ in range(150):
                eps = float(rng.uniform(0.02, 0.999))
                x = rng.standard_normal(int(rng.integers(1, 51)))
                fast = epsq_norm(x, EpsQ(eps, q))
                ref = oracles.epsq_bisect(x, eps, q)
                assert abs(fast - ref) <= 1e-11 * max(1.0, ref)


class TestNormAxioms:
    def test_scaling_triangle_definiteness(self):
        rng = np.random.default_rng(6)
        for _ in range(300):
            p = random_epsq(rng)
            dim = int(rng.integers(1, 25))
            x = rng.standard_normal(dim)
            y = rng.standard_normal(dim)
            a = float(rng.standard_normal())
            vx = epsq_norm(x, p)
            assert epsq_norm(a * x, p) == pytest.approx(abs(a) * vx, rel=1e-10, abs=1e-13)
            assert epsq_norm(x + y, p) <= vx + epsq_norm(y, p) + 1e-10
            if np.any(x):
                assert vx > 0.0
        assert epsq_norm(np.zeros(4), EpsQ(0.4, 3.0)) == 0.0


def bound_chain_checks(x, p, v):
    """All Lemma-style sandwich bounds for one evaluated norm value."""
    dim = x.size
    nq = lq_norm(x, p.q)
    n2 = lq_norm(x, 2.0)
    ninf = lq_norm(x, np.inf)
    if np.isinf(p.q):
        return  # norm coincides with the max norm
    eps, q = p.epsilon, p.q
    proot = dim ** (1.0 / q)
    denom = proot * (1.0 - eps) + eps
    tol = 1e-10 * max(1.0, nq)
    assert nq / denom <= v + tol
    assert v <= nq + tol
    assert ninf <= v + tol
    assert v <= proot * ninf / denom + tol
    lower2 = n2 / (dim ** max(0.5 - 1.0 / q, 0.0) * denom)
    upper2 = dim ** max(1.0 / q - 0.5, 0.0) * n2
    assert lower2 <= v + tol
    assert v <= upper2 + tol


def tightness_checks(p, dim):
    """Equality cases of the sandwich bounds at e_i and the all-ones vector."""
    if np.isinf(p.q):
        return
    eps, q = p.epsilon, p.q
    e1 = np.zeros(dim)
    e1[0] = 1.0
    ones = np.ones(dim)
    v_e = epsq_norm(e1, p)
    v_o = epsq_norm(ones, p)
    proot = dim ** (1.0 / q)
    denom = proot * (1.0 - eps) + eps
    # l_q chain: upper tight at e_i, lower tight at all-ones
    assert abs(v_e - lq_norm(e1, q)) <= 1e-9
    assert abs(v_o - lq_norm(ones, q) / denom) <= 1e-9
    # max-norm chain: lower tight at e_i, upper tight at all-ones
    assert abs(v_e - 1.0) <= 1e-9
    assert abs(v_o - proot * 1.0 / denom) <= 1e-9
    # l_2 chain is tight at these points for q >= 2, and for q < 2 when eps = 1
    if q >= 2.0:
        assert abs(v_o - lq_norm(ones, 2.0) / (dim ** (0.5 - 1.0 / q) * denom)) <= 1e-9
        assert abs(v_e - lq_norm(e1, 2.0)) <= 1e-9
    elif eps == 1.0:
        assert abs(v_e - lq_norm(e1, 2.0)) <= 1e-9
        assert abs(v_o - dim ** (1.0 / q - 0.5) * lq_norm(ones, 2.0)) <= 1e-9


class TestBoundChains:
    def test_random_vectors(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            p = random_epsq(rng)
            x = rng.standard_normal(int(rng.integers(1, 40)))
            bound_chain_checks(x, p, epsq_norm(x, p))

    def test_tightness(self):
        rng = np.random.default_rng(8)
        for _ in range(60):
            p = random_epsq(rng)
            tightness_checks(p, int(rng.integers(1, 30)))


class TestDecomposition:
    def test_zero_vector(self):
        dec = epsq_decompose(np.zeros(4), EpsQ(0.5, 2.0))
        assert dec.norm_value == 0.0
        assert not dec.spiky.any() and not dec.flat.any()

    def test_ones_pair_split(self):
        dec = epsq_decompose([1.0, 1.0], EpsQ(0.5, 2.0))
        assert dec.norm_value == pytest.approx(4.0 - 2.0 * np.sqrt(2.0), rel=1e-12)
        np.testing.assert_allclose(dec.flat, 2.0 - np.sqrt(2.0), rtol=1e-12)
        np.testing.assert_allclose(dec.spiky, np.sqrt(2.0) - 1.0, rtol=1e-12)

    def test_eps_one_all_spiky(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(7)
        dec = epsq_decompose(x, EpsQ(1.0, 3.0))
        np.testing.assert_array_equal(dec.spiky, x)
        assert not dec.flat.any()

    def test_invariants_random(self):
        rng = np.random.default_rng(10)
        for _ in range(300):
            p = random_epsq(rng)
            x = rng.standard_normal(int(rng.integers(1, 30)))
            dec = epsq_decompose(x, p)
            np.testing.assert_allclose(dec.spiky + dec.flat, x, atol=1e-12 * (1 + np.abs(x).max()))
            v = dec.norm_value
            scale = max(1.0, v)
            assert abs(lq_norm(dec.spiky, p.q) - p.epsilon * v) <= 1e-10 * scale
            assert abs(lq_norm(dec.flat, np.inf) - (1.0 - p.epsilon) * v) <= 1e-10 * scale

    def test_minkowski_membership(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p = random_epsq(rng)
            if np.isinf(p.q):
                continue
            dim = int(rng.integers(1, 15))
            nu = float(rng.uniform(0.1, 5.0))
            u = rng.standard_normal(dim)
            u *= rng.random() * p.epsilon * nu / max(lq_norm(u, p.q), 1e-12)
            vb = rng.uniform(-1, 1, dim) * (1.0 - p.epsilon) * nu
            assert epsq_norm(u + vb, p) <= nu + 1e-10


class TestDualNorm:
    def test_special_cases(self):
        rng = np.random.default_rng(12)
        y = rng.standard_normal(8)
        got = epsq_dual_norm(y, EpsQ(0.5, 2.0))
        assert got == pytest.approx(0.5 * lq_norm(y, 2) + 0.5 * lq_norm(y, 1), rel=1e-14)
        assert epsq_dual_norm(y, EpsQ(0.3, np.inf)) == pytest.approx(lq_norm(y, 1), rel=1e-14)
        got1 = epsq_dual_norm(y, EpsQ(0.4, 1.0))
        assert got1 == pytest.approx(0.4 * lq_norm(y, np.inf) + 0.6 * lq_norm(y, 1), rel=1e-14)
        e1 = np.array([1.0, 0.0, 0.0])
        for eps in [0.1, 0.6, 1.0]:
            assert epsq_dual_norm(e1, EpsQ(eps, 2.0)) == pytest.approx(1.0, rel=1e-14)

    def test_holder_inequality(self):
        rng = np.random.default_rng(13)
        for _ in range(400):
            p = random_epsq(rng)
            dim = int(rng.integers(1, 30))
            x = rng.standard_normal(dim)
            y = rng.standard_normal(dim)
            assert abs(x @ y) <= epsq_norm(x, p) * epsq_dual_norm(y, p) + 1e-10

    def test_holder_equality_on_boundary_2d(self):
        rng = np.random.default_rng(14)
        for _ in range(12):
            p = random_epsq(rng)
            y = rng.standard_normal(2)

            def score(th):
                d = np.array([np.cos(th), np.sin(th)])
                return float(d @ y) / epsq_norm(d, p)

            best = oracles.max_over_circle(score)
            assert best == pytest.approx(epsq_dual_norm(y, p), abs=1e-6)


class TestMonotoneLimits:
    def test_nonincreasing_toward_max_norm(self):
        rng = np.random.default_rng(15)
        for q in [1.0, 2.0, 3.5]:
            x = rng.standard_normal(12)
            eps_grid = [1.0, 0.7, 0.4, 0.1, 0.01, 1e-6]
            vals = [epsq_norm(x, EpsQ(e, q)) for e in eps_grid]
            for a, b in zip(vals, vals[1:]):
                assert b <= a + 1e-12
            assert vals[-1] == pytest.approx(np.max(np.abs(x)), rel=1e-4)


class TestBallBoundary:
    def test_axis_point(self):
        pts = epsq_ball_boundary(EpsQ(0.5, 2.0), 16)
        np.testing.assert_allclose(pts[0], [1.0, 0.0], atol=1e-12)

    def test_euclidean_ball(self):
        pts = epsq_ball_boundary(EpsQ(1.0, 2.0), 64)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)

    def test_diagonal_radius(self):
        pts = epsq_ball_boundary(EpsQ(0.5, 2.0), 8)
        diag = pts[1]  # theta = pi/4
        expect = (np.sqrt(2.0) / (4.0 - 2.0 * np.sqrt(2.0))) / np.sqrt(2.0)
        np.testing.assert_allclose(diag, [expect, expect], rtol=1e-12)

    def test_resolution_validated(self):
        with pytest.raises(ValueError):
            epsq_ball_boundary(EpsQ(0.5, 2.0), 7)


def test_conjugate_exponent():
    assert conjugate_exponent(1.0) == np.inf
    assert conjugate_exponent(np.inf) == 1.0
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(1.5) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        conjugate_exponent(0.9)

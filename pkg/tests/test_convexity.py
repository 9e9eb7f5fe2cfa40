import numpy as np
import pytest
import scipy.linalg

import crown
from crown import CovectorIA, ascend_critical, f_a, f_a_lambda, grad_f, separating_functional
from crown.convexity import (
    directional_derivative_triangular,
    metric_inner,
    normalizer_elements,
    random_k_direction,
    sample_covector,
    sample_regular_direction,
    weyl_k_representatives,
    weyl_values,
)
from crown.errors import InsideHull, NoConvergence
from crown.groups import Family, pair_ia
from crown.rng import substream
from crown.sampling import haar_k
from crown.weyl import FULL_OMEGA, OmegaSpec, apply_weyl, draw_omega_point, hull_contains

from oracles import lp_hull_membership, sl2_im_log_a, sl2_rotation


def _random_a_point(ctx, rng, with_real=True):
    x = draw_omega_point(ctx, OmegaSpec("scale", scale=0.9), rng)
    re = 0.3 * rng.standard_normal(ctx.n) if with_real else np.zeros(ctx.n)
    if ctx.family is Family.SPECIAL_LINEAR:
        re -= re.mean()
    return re + 1j * x


# ------------------------------------------------------------------ f_a basics

def test_f_a_at_identity(ctx):
    a_point = _random_a_point(ctx, substream(71, 0))
    np.testing.assert_allclose(
        f_a(ctx, a_point, np.eye(ctx.ambient_size)), a_point, atol=1e-12)


def test_f_a_at_weyl_representatives(ctx):
    # k_w exp(a) = exp(w.a) k_w, so the projection permutes coordinates
    a_point = _random_a_point(ctx, substream(71, 1))
    for element, kw in weyl_k_representatives(ctx):
        got = f_a(ctx, a_point, kw)
        want = apply_weyl(a_point, element)
        np.testing.assert_allclose(got, want, atol=1e-10)


def test_f_a_sl2_oracle(sl2):
    theta, t = np.pi / 3, 0.3
    got = f_a(sl2, 1j * np.array([t, -t]), sl2_rotation(theta))
    assert abs(got[0].imag - sl2_im_log_a(theta, t)) < 1e-13


def test_f_a_lambda_basics(ctx):
    rng = substream(71, 2)
    lam = sample_covector(ctx, rng)
    k = haar_k(ctx, rng)
    assert f_a_lambda(ctx, np.zeros(ctx.n, dtype=complex), k, lam) == pytest.approx(0.0, abs=1e-12)
    x = draw_omega_point(ctx, FULL_OMEGA, rng)
    want = pair_ia(ctx, 1j * x, lam.m_coords)
    assert f_a_lambda(ctx, 1j * x, np.eye(ctx.ambient_size), lam) == pytest.approx(want, rel=1e-12)


def test_f_a_lambda_linearity(ctx):
    rng = substream(71, 3)
    a_point = _random_a_point(ctx, rng)
    k = haar_k(ctx, rng)
    l1 = sample_covector(ctx, rng)
    l2 = sample_covector(ctx, rng)
    both = CovectorIA(m_coords=l1.m_coords + l2.m_coords)
    v = f_a_lambda(ctx, a_point, k, both)
    v1 = f_a_lambda(ctx, a_point, k, l1)
    v2 = f_a_lambda(ctx, a_point, k, l2)
    assert abs(v - (v1 + v2)) < 1e-10 * (1 + abs(v))


# ------------------------------------------------------------------- gradients

def test_grad_vanishes_at_normalizer(ctx):
    rng = substream(73, 0)
    x = sample_regular_direction(ctx, OmegaSpec("scale", scale=0.9), rng)
    lam = sample_covector(ctx, rng)
    for _, kw in weyl_k_representatives(ctx):
        grad = grad_f(ctx, 1j * x, kw, lam)
        assert np.sqrt(metric_inner(ctx, grad, grad)) < 1e-10


def test_grad_matches_finite_differences(ctx):
    rng = substream(73, 1)
    h = 1e-5
    rel_errs = []
    for _ in range(20):
        a_point = _random_a_point(ctx, rng)
        k = haar_k(ctx, rng)
        lam = sample_covector(ctx, rng)
        direction = random_k_direction(ctx, rng)
        grad = grad_f(ctx, a_point, k, lam)
        exact = metric_inner(ctx, direction, grad)
        fp = f_a_lambda(ctx, a_point, scipy.linalg.expm(h * direction) @ k, lam)
        fm = f_a_lambda(ctx, a_point, scipy.linalg.expm(-h * direction) @ k, lam)
        fd = (fp - fm) / (2 * h)
        rel_errs.append(abs(exact - fd) / (1 + abs(exact)))
    assert np.median(rel_errs) < 1e-7
    assert max(rel_errs) < 1e-5


def test_grad_triangular_route_agrees(ctx):
    rng = substream(73, 2)
    for _ in range(10):
        a_point = _random_a_point(ctx, rng)
        k = haar_k(ctx, rng)
        lam = sample_covector(ctx, rng)
        direction = random_k_direction(ctx, rng)
        exact = metric_inner(ctx, direction, grad_f(ctx, a_point, k, lam))
        other = directional_derivative_triangular(ctx, a_point, k, lam, direction)
        assert abs(exact - other) < 1e-10 * (1 + abs(exact))


# ---------------------------------------------------------------------- ascent

def test_ascent_zero_iterations_at_normalizer(sl3):
    rng = substream(79, 0)
    x = sample_regular_direction(sl3, OmegaSpec("scale", scale=0.9), rng)
    lam = sample_covector(sl3, rng)
    element, kw = weyl_k_representatives(sl3)[2]
    run = ascend_critical(sl3, 1j * x, kw, lam)
    assert run.converged and run.iterations == 0
    own_value = pair_ia(sl3, 1j * apply_weyl(x, element), lam.m_coords)
    assert abs(run.f_values[0] - own_value) < 1e-10


def test_ascent_sl2_reaches_best_vertex(sl2):
    rng = substream(79, 1)
    for i in range(5):
        x = sample_regular_direction(sl2, OmegaSpec("scale", scale=0.9), rng)
        lam = sample_covector(sl2, rng)
        k0 = haar_k(sl2, rng)
        run = ascend_critical(sl2, 1j * x, k0, lam)
        vals = weyl_values(sl2, x, lam)
        assert len(vals) == 2
        assert run.converged
        assert abs(run.f_values[-1] - max(vals)) < 1e-6


def test_ascent_monotone_and_matches_weyl_max(sl3):
    rng = substream(79, 2)
    x = sample_regular_direction(sl3, OmegaSpec("scale", scale=0.9), rng)
    lam = sample_covector(sl3, rng)
    run = ascend_critical(sl3, 1j * x, haar_k(sl3, rng), lam)
    assert np.all(np.diff(run.f_values) >= 0)
    assert run.converged and run.gap < 1e-6


def test_ascent_requires_regular_data(sl3):
    lam = CovectorIA(m_coords=np.zeros(3))
    with pytest.raises(ValueError):
        ascend_critical(sl3, 1j * np.array([0.2, 0.0, -0.2]), np.eye(3), lam)


def test_ascent_raise_on_failure_flag(sl2):
    rng = substream(79, 3)
    x = sample_regular_direction(sl2, OmegaSpec("scale", scale=0.9), rng)
    lam = sample_covector(sl2, rng)
    with pytest.raises(NoConvergence) as info:
        ascend_critical(sl2, 1j * x, haar_k(sl2, rng), lam,
                        max_iter=0, tol=1e-12, raise_on_failure=True)
    assert info.value.run is not None


# ------------------------------------------------------------------- verifiers

def test_verify_complex_convexity_clean(ctx):
    rep = crown.verify_complex_convexity(ctx, FULL_OMEGA, 300, seed=7)
    assert rep.violations == 0
    assert rep.samples_completed == 300
    assert rep.min_margin > -1e-9
    assert rep.extras["max_reconstruction_residual"] < 1e-10


def test_verify_complex_convexity_full_g(ctx):
    rep = crown.verify_complex_convexity(ctx, FULL_OMEGA, 200, seed=7, mode="full-g")
    assert rep.violations == 0


def test_convexity_sl2_margin_oracle(sl2):
    # worked point: k = rotation(pi/3), X = (0.3, -0.3)
    theta, t = np.pi / 3, 0.3
    y = f_a(sl2, 1j * np.array([t, -t]), sl2_rotation(theta)).imag
    inside, margin = hull_contains(sl2, np.array([t, -t]), y)
    assert inside
    oracle_margin = t - abs(sl2_im_log_a(theta, t))
    assert abs(margin - oracle_margin) < 1e-12
    assert abs(oracle_margin - 0.13520429504291718) < 1e-15  # frozen oracle value


def test_verify_kostant_real_clean(ctx):
    rep = crown.verify_kostant_real(ctx, 300, seed=11)
    assert rep.violations == 0
    assert rep.min_margin > -1e-9
    assert rep.extras["max_vertex_error"] < 1e-10


def test_separating_functional_rank_one(sl2):
    x = np.array([0.3, -0.3])
    y = np.array([0.4, -0.4])
    lam = separating_functional(sl2, x, y)
    gap = pair_ia(sl2, 1j * y, lam.m_coords) - np.max(weyl_values(sl2, x, lam))
    assert gap > 0
    assert crown.is_regular(sl2, lam.m_coords)


def test_separating_functional_type_a_outside_point(sl3):
    x = np.array([0.3, 0.0, -0.3])
    y = np.array([0.4, -0.1, -0.3])
    assert not lp_hull_membership(sl3, x, y)
    lam = separating_functional(sl3, x, y)
    value_at_y = pair_ia(sl3, 1j * y, lam.m_coords)
    assert value_at_y > np.max(weyl_values(sl3, x, lam))
    assert crown.is_regular(sl3, lam.m_coords)


def test_separating_functional_inside_raises(sl3):
    with pytest.raises(InsideHull):
        separating_functional(sl3, np.array([0.3, 0.0, -0.3]), np.zeros(3))


def test_normalizer_enumeration_counts(sl2, sl3, sp2):
    assert len(normalizer_elements(sl2)) == 4
    assert len(normalizer_elements(sl3)) == 24
    assert len(normalizer_elements(sp2)) == 32
    for mat in normalizer_elements(sp2)[:5]:
        np.testing.assert_allclose(mat @ mat.T, np.eye(4), atol=1e-12)


def test_lemma24_sl2_closed_form(sl2):
    # oracle: for theta = pi/4, M = z z^T has M11 = cos 2t and M21 = i sin 2t,
    # so the unipotent entry is n21 = M21 / M11 = i tan 2t, purely imaginary
    t = 0.3
    from crown import project_complex
    f = project_complex(sl2, sl2_rotation(np.pi / 4), np.array([t, -t]))
    assert abs(f.n_part[1, 0] - 1j * np.tan(2 * t)) < 1e-13


def test_lemma24_probe_report(sl2):
    rep = crown.lemma24_probe(sl2, np.array([0.3, -0.3]), 100, seed=2)
    assert rep.violations == 0
    assert rep.extras["min_im_n"] > 1e-10


def test_lemma24_probe_requires_regular(sl3):
    with pytest.raises(ValueError):
        crown.lemma24_probe(sl3, np.array([0.3, 0.3, -0.6]), 10, seed=1)


def test_gradient_check_report(sl2):
    rep = crown.gradient_check(sl2, 15, seed=3)
    assert rep.violations == 0
    assert rep.extras["median_rel_err"] < 1e-7
    assert rep.extras["max_route_gap"] < 1e-10


def test_critical_point_scan_report(sl2):
    rep = crown.critical_point_scan(sl2, 10, seed=5)
    assert rep.violations == 0
    assert rep.extras["convergence_rate"] >= 0.9

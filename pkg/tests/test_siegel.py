import numpy as np
import pytest

from crown import SiegelPoint, chi, cross_check_crown, sample_siegel, verify_siegel
from crown.rng import substream
from crown.sampling import sample_group_element
from crown.siegel import _sp_context, fractional_action


def test_point_validation():
    with pytest.raises(ValueError):
        SiegelPoint(np.array([[1j, 1.0], [0.0, 1j]]))
    with pytest.raises(ValueError):
        SiegelPoint(np.array([[-1j, 0.0], [0.0, 1j]]))
    SiegelPoint(1j * np.eye(3))


def test_chi_base_point_and_diagonal():
    np.testing.assert_allclose(chi(SiegelPoint(1j * np.eye(4))), 1j * np.ones(4))
    w = np.diag([0.3 + 0.2j, -1.0 + 1.5j, 2.0 + 0.7j])
    np.testing.assert_allclose(chi(SiegelPoint(w)), np.diagonal(w))


def test_chi_worked_point():
    ratios = chi(SiegelPoint(np.array([[1j, 0.5], [0.5, 1j]])))
    np.testing.assert_allclose(ratios, [1j, 1.25j], atol=1e-12)


def test_chi_shares_elimination_kernel():
    from crown.iwasawa import minor_ratios
    point = sample_siegel(3, 1, seed=4)[0]
    np.testing.assert_array_equal(chi(point), minor_ratios(point.z))


def test_fractional_action_identity_and_base(sp2):
    g = np.eye(4)
    np.testing.assert_allclose(fractional_action(g, 1j * np.eye(2)), 1j * np.eye(2))


def test_fractional_action_is_action():
    ctx = _sp_context(2)
    rng = substream(83, 0)
    w = 1j * np.eye(2)
    for _ in range(30):
        g1 = ctx.to_standard_frame(sample_group_element(ctx, rng, "full-g"))
        g2 = ctx.to_standard_frame(sample_group_element(ctx, rng, "full-g"))
        lhs = fractional_action(g1 @ g2, w)
        rhs = fractional_action(g1, fractional_action(g2, w))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10 * (1 + np.abs(lhs).max()))


def test_orbit_strategy_stays_in_upper_half_space():
    ctx = _sp_context(3)
    rng = substream(83, 1)
    w = 1j * np.eye(3)
    for _ in range(100):
        g = ctx.to_standard_frame(sample_group_element(ctx, rng, "full-g"))
        im = fractional_action(g, w).imag
        assert np.min(np.linalg.eigvalsh(im)) > 0


def test_sample_siegel_postconditions():
    points = sample_siegel(2, 32, seed=5)
    for p in points:
        assert np.min(np.linalg.eigvalsh(p.z.imag)) > 0
    again = sample_siegel(2, 32, seed=5)
    for p, q in zip(points, again):
        np.testing.assert_array_equal(p.z, q.z)


def test_verify_siegel_clean():
    for n in (2, 3):
        rep = verify_siegel(n, 400, seed=9)
        assert rep.violations == 0
        assert rep.extras["min_im_chi"] > 0
        assert rep.extras["min_normalized_minor"] > 1e-12
        assert rep.extras["pivot_breakdowns"] == 0


def test_verify_siegel_base_point_minimum():
    rep = verify_siegel(2, 1, seed=1)
    assert rep.samples_completed == 1
    assert rep.extras["min_im_chi"] > 0


def test_cross_check_crown_verdicts_agree(sp2):
    rep = cross_check_crown(sp2, 150, seed=9)
    assert rep.violations == 0
    assert rep.samples_indeterminate == 0


def test_cross_check_crown_diagonal_slice(sp2):
    # abelian case: both sides produce exactly the sampled coordinates
    from crown.weyl import FULL_OMEGA, draw_omega_point
    from crown.siegel import fractional_action
    from crown.iwasawa import minor_ratios, project_complex
    rng = substream(83, 2)
    for _ in range(20):
        x = draw_omega_point(sp2, FULL_OMEGA, rng)
        f = project_complex(sp2, np.eye(4), x)
        np.testing.assert_allclose(f.log_a.imag, x, atol=1e-12)
        ax_std = sp2.to_standard_frame(sp2.a_exp(1j * x))
        w = fractional_action(ax_std, 1j * np.eye(2))
        y_siegel = 0.5 * np.angle(minor_ratios(w) / 1j)
        np.testing.assert_allclose(np.sort(y_siegel), np.sort(x), atol=1e-10)


def test_cross_check_requires_symplectic(sl3):
    with pytest.raises(ValueError):
        cross_check_crown(sl3, 10, seed=1)

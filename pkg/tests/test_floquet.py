import math

import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b

from hillspec import floquet as fl
from hillspec.errors import InterlacingViolation


def test_free_discriminant_closed_form(zero):
    lams = np.array([-4.0, 0.5, 9.0, 30 + 5j, 200 - 12j])
    np.testing.assert_allclose(fl.lyapunov(zero, lams), fl.free_discriminant(lams), rtol=1e-9, atol=1e-9)


def test_negative_lambda_cosh(zero):
    # 2 cos(pi i) = 2 cosh(pi) = 23.1814..., not e^pi = 23.1407...
    assert fl.lyapunov(zero, -1.0).real == pytest.approx(2 * math.cosh(math.pi), rel=1e-10)


def test_one_sided_potential_keeps_free_discriminant(one_sided):
    lams = np.array([-3.0, 2.0, 17.5, 40 + 3j])
    np.testing.assert_allclose(fl.lyapunov(one_sided, lams), fl.free_discriminant(lams), rtol=1e-8, atol=1e-8)


def test_monodromy_free_entries(zero):
    lam = 6.25
    s = fl.integrate_fundamental(zero, lam, tol=1e-12)
    w = math.sqrt(lam)
    expected = [[math.cos(w * math.pi), math.sin(w * math.pi) / w],
                [-w * math.sin(w * math.pi), math.cos(w * math.pi)]]
    np.testing.assert_allclose(s.M, expected, atol=1e-10)


def test_derivative_matches_finite_difference(mat):
    lam, h = 7.3, 1e-5
    d = fl.integrate_fundamental(mat, lam, tol=1e-12, derivative=True).dM
    up, dn = fl.monodromy(mat, [lam + h, lam - h], tol=1e-12)
    np.testing.assert_allclose(d, (up.M - dn.M) / (2 * h), atol=1e-6)


@pytest.mark.parametrize("lam", [-10.0, 50.0, 400.0, 100 + 20j])
def test_magnus_extended_determinant(saw, lam):
    s = fl.monodromy(saw, [lam], tol=1e-10, method="magnus", extended=True)[0]
    assert s.wronskian_defect < 1e-10


def test_rk_and_magnus_agree(mat):
    rk = fl.monodromy(mat, [3.0, 25.0], tol=1e-11)
    mg = fl.monodromy(mat, [3.0, 25.0], tol=1e-11, method="magnus", extended=True)
    for a, b in zip(rk, mg):
        np.testing.assert_allclose(a.M, b.M, atol=1e-8)


def test_characteristic_roots_product():
    for delta in (0.3, 2.0, -7.5, 1 + 2j):
        r1, r2 = fl.characteristic_roots(delta)
        assert abs(r1 * r2 - 1) < 1e-14
        assert abs(r1 + r2 - delta) < 1e-12


def test_mathieu_against_scipy(mat):
    per = [mathieu_a(0, 1.0), mathieu_b(2, 1.0), mathieu_a(2, 1.0), mathieu_b(4, 1.0), mathieu_a(4, 1.0)]
    anti = [mathieu_b(1, 1.0), mathieu_a(1, 1.0), mathieu_b(3, 1.0), mathieu_a(3, 1.0)]
    dirichlet = [mathieu_b(m, 1.0) for m in range(1, 6)]
    np.testing.assert_allclose(np.real(fl.lowest_eigenvalues(mat, "per+", 5)), per, atol=1e-9)
    np.testing.assert_allclose(np.real(fl.lowest_eigenvalues(mat, "per-", 4)), anti, atol=1e-9)
    np.testing.assert_allclose(np.real(fl.lowest_eigenvalues(mat, "dir", 5)), dirichlet, atol=1e-9)


def test_theta_quarter_period_free(zero):
    vals = fl.theta_eigenvalues(zero, math.pi / 2, (-1.0, 30.0))
    expected = [(k + 0.5) ** 2 for k in range(5)]
    np.testing.assert_allclose(np.real(vals), expected, atol=1e-9)


def test_free_periodic_double_roots(zero):
    vals = np.real(fl.lowest_eigenvalues(zero, "per+", 5))
    np.testing.assert_allclose(vals, [0, 4, 4, 16, 16], atol=1e-10)


def test_one_sided_periodic_spectrum_is_free(one_sided):
    vals = fl.theta_eigenvalues(one_sided, 0.0, (-1 - 1j, 20 + 1j), seeds=[0.1, 3.9, 4.2, 15.8, 16.3])
    np.testing.assert_allclose(vals, [0, 4, 4, 16, 16], atol=1e-6)


def test_complex_dirichlet_polish_matches_galerkin(one_sided):
    # the Dirichlet spectrum of a one-sided potential is not the free one
    from hillspec.fourier_ops import DIR, converged_spectrum

    ref = converged_spectrum(one_sided, DIR, 5).eigenvalues
    seeds = ref + 0.05 * (1 + 1j)
    vals = fl.dirichlet_eigenvalues(one_sided, (-1 - 2j, 30 + 2j), seeds=list(seeds))
    np.testing.assert_allclose(sorted(vals, key=lambda z: z.real), ref, atol=1e-8)


def test_band_edges_interlace(saw):
    edges = fl.band_edges(saw, 6)
    seq = edges.ordered()
    assert all(b >= a - 1e-9 for a, b in zip(seq, seq[1:]))


def test_interlacing_violation_detected():
    bad = fl.BandEdges(0.0, {1: 2.0, 2: 3.0}, {1: 1.0, 2: 5.0})
    with pytest.raises(InterlacingViolation):
        fl.check_interlacing(bad)


def test_rejects_theta_out_of_range(zero):
    with pytest.raises(ValueError):
        fl.theta_eigenvalues(zero, 4.0, (0.0, 10.0))


def test_discriminant_is_analytic(saw):
    z = np.array([3.3 + 0.7j, 41.0 - 2.0j, 120.5 + 5.0j])
    h = 1e-4
    d_re = (fl.lyapunov(saw, z + h, 1e-12) - fl.lyapunov(saw, z - h, 1e-12)) / (2 * h)
    d_im = (fl.lyapunov(saw, z + 1j * h, 1e-12) - fl.lyapunov(saw, z - 1j * h, 1e-12)) / (2j * h)
    np.testing.assert_allclose(d_re, d_im, rtol=1e-6, atol=1e-6)


def test_conjugation_symmetry(mat):
    z = np.array([5 + 1j, 30 - 4j, -2 + 0.5j])
    np.testing.assert_allclose(fl.lyapunov(mat, z.conj()), np.conj(fl.lyapunov(mat, z)), atol=1e-9)


def test_constant_potential_shifts_spectrum():
    from hillspec.potential import make_potential

    vals = np.real(fl.lowest_eigenvalues(make_potential(1.5, {}), "per+", 5))
    np.testing.assert_allclose(vals, [1.5, 5.5, 5.5, 17.5, 17.5], atol=1e-10)


def test_first_mathieu_gap(mat):
    gamma1 = np.diff(np.real(fl.lowest_eigenvalues(mat, "per-", 2)))[0]
    assert gamma1 == pytest.approx(mathieu_a(1, 1.0) - mathieu_b(1, 1.0), abs=1e-4)


@pytest.mark.parametrize("name", ["mat", "saw"])
def test_real_interval_asymptotics(name, request):
    p = request.getfixturevalue(name)
    sups = []
    for n in (10, 20, 40, 80):
        lam = np.linspace(n * n - n / 4, n * n + n / 4, 33)
        sups.append(np.max(np.abs(fl.lyapunov(p, lam) - fl.free_discriminant(lam))))
    assert all(b < a for a, b in zip(sups, sups[1:]))

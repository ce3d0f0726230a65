import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hillspec import localization as loc
from hillspec.errors import DivergentEntry
from hillspec.fourier_ops import DIR, PER_MINUS, PER_PLUS


def brute_S(n, K=200_000):
    k = np.arange(-K, K + 1, dtype=float)
    d = np.abs(n * n - k * k)
    d = d[np.abs(k) != n]
    # both tails beyond K behave like 2/K and 2/(3 K^3)
    return float(np.sum(1 / d)) + 2 / K, float(np.sum(1 / d ** 2)) + 2 / (3 * K ** 3)


def test_regions():
    assert loc.Disk(4).contains(16 + 0.9j) and not loc.Disk(4).contains(17.1)
    assert loc.Rect(3).contains(11.9 + 2.9j) and not loc.Rect(3).contains(-3.1)
    assert loc.HalfPlane(3).contains(11.99) and not loc.HalfPlane(3).contains(12)
    assert loc.disks_pairwise_disjoint(200)
    assert loc.disks_pairwise_disjoint(200, loc.shrinking_radius)
    assert loc.shrinking_radius(10_000) / 10_000 == pytest.approx(0.1)


def test_rect_boundary_inside_half_plane():
    b = loc.Rect(8).boundary()
    assert np.all(b.real <= 72) and np.all(b.imag >= 0)
    assert np.all((np.isclose(b.real, -8)) | np.isclose(b.imag, 8))


def test_S1_at_one_is_exact():
    s = loc.harmonic_sums(1)
    assert s.S1_exact == Fraction(5, 2)
    assert s.bound1 == pytest.approx(2 * math.log(6))
    assert s.holds1 and s.holds2


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_harmonic_sums_against_brute_force(n):
    S1, S2 = brute_S(n)
    s = loc.harmonic_sums(n)
    assert s.S1 == pytest.approx(S1, rel=1e-9)
    assert s.S2 == pytest.approx(S2, rel=1e-12)


def test_exact_and_float_paths_agree():
    for n in (5, 150):
        assert loc.harmonic_sums(n, exact=True).S1 == pytest.approx(loc.harmonic_sums(n, exact=False).S1, rel=1e-13)


def test_harmonic_bound_at_1000():
    s = loc.harmonic_sums(1000)
    assert s.bound1 == pytest.approx(2 * math.log(6000) / 1000)
    assert s.holds1 and s.holds2


def test_T1_closed_form_n0():
    assert loc.shifted_sums(0, 4).T1 == pytest.approx(math.pi / 2 / math.tanh(2 * math.pi), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 30), st.integers(1, 200).map(lambda j: 2.0 * j))
def test_shifted_sums_against_brute_force(n, b):
    k = np.arange(-100_000, 100_001, dtype=float)
    d = np.abs(n * n - k * k)
    T1 = np.sum(1 / (d + b)) + 2 / 100_000
    mask = np.abs(k) != n
    T2 = np.sum(1 / (d[mask] ** 2 + b * b))
    s = loc.shifted_sums(n, b)
    assert s.T1 == pytest.approx(T1, rel=1e-8)
    assert s.T2 == pytest.approx(T2, rel=1e-10)


def test_spot_constants():
    assert loc.shifted_sums(5, 2).C1 <= 10
    assert loc.shifted_sums(10, 100).C2 <= 10


def test_branch():
    assert loc.branch_sqrt(-1) == pytest.approx(1j)
    assert loc.branch_sqrt(-2) == pytest.approx(1j * math.sqrt(2))
    assert loc.branch_sqrt(4) == pytest.approx(2)


def test_kvk_entry(mat):
    A = loc.kvk_matrix(mat, PER_PLUS, 2, K=2)
    # basis labels k = 0 and k = 2 sit at positions 1 and 2 of (-2, 0, 2)
    assert A[1, 2] == pytest.approx(-0.5j)


def test_kvk_zero(zero):
    assert not np.any(loc.kvk_matrix(zero, DIR, 3.3 + 1j, 16))
    assert loc.kvk_hs_norm(zero, PER_PLUS, 5.0) == 0


def test_kvk_divergent(mat):
    with pytest.raises(DivergentEntry):
        loc.kvk_matrix(mat, PER_PLUS, 16.0, 8)
    loc.kvk_matrix(mat, PER_MINUS, 16.0, 8)


@pytest.mark.parametrize("bc", [PER_PLUS, PER_MINUS, DIR])
@pytest.mark.parametrize("lam", [7.5 + 2j, -3.0, 150 + 0.5j])
def test_hs_norm_matches_dense_frobenius(saw, bc, lam):
    K = 96
    dense = np.linalg.norm(loc.kvk_matrix(saw, bc, lam, K))
    assert loc.kvk_hs_norm(saw, bc, lam, K=K) == pytest.approx(dense, rel=1e-12)


def test_hs_norm_majorizes_operator_norm(saw):
    A = loc.kvk_matrix(saw, DIR, 40 + 3j, 64)
    assert np.linalg.norm(A, 2) <= np.linalg.norm(A) + 1e-14


def test_rect_count_helpers():
    assert loc.formula_rect_count(PER_PLUS, 4) == 9
    assert loc.free_rect_count(PER_PLUS, 4) == 5
    assert loc.free_rect_count(DIR, 4) == 4


def test_localize_free_per_plus(zero):
    rep = loc.localize(zero, PER_PLUS, N=4)
    assert rep.passed
    assert rep.counts["R_4"] == 5 and rep.counts["D_6"] == 2
    assert any("closed-form" in note for note in rep.notes)
    assert rep.to_dict()["pass"] is True


def test_localize_mathieu_dir(mat):
    rep = loc.localize(mat, DIR, N=6)
    assert rep.passed
    assert all(v == 1 for k, v in rep.counts.items() if k.startswith("D_"))


def test_localize_sawtooth_per_minus(saw):
    rep = loc.localize(saw, PER_MINUS, N=11)
    assert rep.passed
    assert all(v == 2 for k, v in rep.counts.items() if k.startswith("D_"))
    assert rep.norms_csv().startswith("n,kvk_norm,bound\n")


def test_shrinking_mode(mat):
    rep = loc.localize(mat, PER_PLUS, N=4, shrinking=True)
    assert rep.radius_mode == "n^(3/4)" and rep.passed


def test_certify_flags_missing_eigenvalue(mat):
    from hillspec.fourier_ops import converged_spectrum

    computed = converged_spectrum(mat, DIR, 14)
    computed.eigenvalues = np.delete(computed.eigenvalues, 9)
    rep = loc.certify_localization(mat, DIR, 6, computed, n_hi=12)
    assert not rep.passed and rep.counts["D_10"] == 0

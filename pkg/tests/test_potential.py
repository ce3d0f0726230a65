import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hillspec.errors import OddIndex, PotentialFileError, ZeroIndexPresent
from hillspec.potential import (l2_norm, l2_norm_from_v, load_potential, make_potential, mathieu,
                                potential_from_dict, potential_to_dict, save_potential,
                                sine_coefficients, sine_v_coefficients, tail_energy,
                                truncated_sawtooth, v_coefficients)

coeff = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
even_key = st.integers(-10, 10).map(lambda j: 2 * j).filter(bool)


def quad_sine(p, m):
    f = lambda x, part: getattr(np.sqrt(2) * np.sin(m * x) * complex(np.sum(p.qs * np.exp(1j * p.ks * x))), part)
    re = quad(f, 0, math.pi, args=("real",), limit=200)[0]
    im = quad(f, 0, math.pi, args=("imag",), limit=200)[0]
    return complex(re, im) / math.pi


def test_rejects_bad_indices():
    with pytest.raises(OddIndex):
        make_potential(0, {3: 1})
    with pytest.raises(ZeroIndexPresent):
        make_potential(0, {0: 1})


def test_realness_detection():
    assert mathieu().is_real
    assert not make_potential(0, {2: 1j}).is_real
    assert not make_potential(1j, {}).is_real


def test_v_coefficients_mathieu():
    V = v_coefficients(mathieu())
    assert V == {-2: 1.0, 0: 0j, 2: 1.0}


@pytest.mark.parametrize("p", [mathieu(), truncated_sawtooth(8), make_potential(0.5, {2: 1 + 1j, -4: 0.25j})])
def test_sine_coefficients_match_quadrature(p):
    qt = sine_coefficients(p, 12)
    for m in range(1, 13):
        assert abs(qt[m - 1] - quad_sine(p, m)) < 1e-9


def test_odd_potential_has_exact_zero_odd_sine_coefficients():
    qt = sine_coefficients(truncated_sawtooth(), 101)
    assert np.all(qt[0::2] == 0)


def test_sine_v_is_k_times_q():
    p = truncated_sawtooth(10)
    Vt = sine_v_coefficients(p, 20)
    assert Vt[0] == 0
    np.testing.assert_allclose(Vt[1:], np.arange(1, 21) * sine_coefficients(p, 20))


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(even_key, coeff, max_size=6))
def test_parseval_two_ways(q):
    p = make_potential(0.0, q)
    assert math.isclose(l2_norm(p), l2_norm_from_v(p), rel_tol=1e-12, abs_tol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(even_key, coeff, max_size=6), st.floats(0, 12))
def test_tail_energy_monotone(q, m):
    assert tail_energy(q, m) >= tail_energy(q, m + 1) - 1e-15
    assert tail_energy(q, 0) == pytest.approx(math.sqrt(sum(abs(v) ** 2 for v in q.values())))


def test_lower_bound_is_below_spectrum(mat):
    assert mat.lower_bound() <= -0.455


def test_file_roundtrip(tmp_path):
    p = make_potential(0.25 - 0.5j, {2: 1 + 2j, -6: -0.125})
    path = tmp_path / "p.json"
    save_potential(p, path)
    assert load_potential(path) == p
    assert potential_from_dict(potential_to_dict(p)) == p


@pytest.mark.parametrize("data,key", [
    ({"coeffs": [{"k": 3, "re": 1}]}, 3),
    ({"coeffs": [{"k": 0, "re": 1}]}, 0),
    ({"coeffs": [{"k": 2, "re": 1}, {"k": 2, "re": 2}]}, 2),
    ({"coeffs": [{"k": 2.5, "re": 1}]}, 2.5),
])
def test_file_errors_name_the_index(data, key):
    with pytest.raises(PotentialFileError) as err:
        potential_from_dict(data)
    assert err.value.k == key


def test_unparseable_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(PotentialFileError):
        load_potential(path)


def test_q_evaluation_real(mat):
    x = np.linspace(0, math.pi, 7)
    np.testing.assert_allclose(mat.Q(x), np.sin(2 * x), atol=1e-15)
    assert json.dumps(potential_to_dict(mat))

"""Singular periodic potentials v = C + Q' with Q a trigonometric polynomial.

Q is stored through its exponential Fourier coefficients q(k), k even and
nonzero, normalised with the inner product (1/pi) * int_0^pi, so that
Q(x) = sum_k q(k) exp(ikx).  Everything downstream (matrix entries, the
quasi-derivative ODE, sine coefficients) is derived from ``C`` and ``q``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import OddIndex, PotentialFileError, ZeroIndexPresent

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PotentialFourier:
    """Validated potential; build it with :func:`make_potential`."""

    C: complex
    q: Mapping[int, complex]
    is_real: bool
    ks: np.ndarray = field(repr=False, compare=False)
    qs: np.ndarray = field(repr=False, compare=False)

    def Q(self, x):
        """Evaluate Q at ``x`` (scalar or array)."""
        x = np.asarray(x, dtype=float)
        if self.ks.size == 0:
            out = np.zeros(x.shape, dtype=complex)
        else:
            out = np.exp(1j * np.multiply.outer(x, self.ks)) @ self.qs
        return out.real if self.is_real else out

    @property
    def support(self) -> int:
        """Largest |k| with q(k) != 0 (0 for the constant potential)."""
        return int(np.max(np.abs(self.ks))) if self.ks.size else 0

    @property
    def sup_bound(self) -> float:
        """sum |q(k)|, an upper bound for sup |Q|."""
        return float(np.sum(np.abs(self.qs)))

    def lower_bound(self) -> float:
        """Lower bound for the real spectrum of L_Per+, L_Per-, L_Dir.

        From |2 Re int Q y y'| <= |y'|^2 + sup|Q|^2 |y|^2 the quadratic form is
        at least (Re C - sup|Q|^2) |y|^2.
        """
        return float(self.C.real) - self.sup_bound ** 2

    def shifted(self, c: complex) -> "PotentialFourier":
        return make_potential(self.C + c, dict(self.q))

    def scaled(self, tau: float) -> "PotentialFourier":
        return make_potential(self.C * tau, {k: tau * v for k, v in self.q.items()})


def make_potential(C: complex = 0.0, coeffs: Mapping[int, complex] | None = None) -> PotentialFourier:
    """Validate Fourier data and build a :class:`PotentialFourier`.

    Zero coefficients are dropped; odd keys raise :class:`OddIndex` and a
    key 0 raises :class:`ZeroIndexPresent`.
    """
    coeffs = {} if coeffs is None else coeffs
    clean: dict[int, complex] = {}
    for key, val in coeffs.items():
        k = int(key)
        if k != key:
            raise PotentialFileError("Fourier index must be an integer", k=key)
        if k == 0:
            raise ZeroIndexPresent()
        if k % 2:
            raise OddIndex(k)
        val = complex(val)
        if val != 0:
            clean[k] = val
    C = complex(C)
    is_real = C.imag == 0 and all(
        clean.get(-k, 0j) == v.conjugate() for k, v in clean.items()
    )
    ordered = dict(sorted(clean.items()))
    ks = np.array(list(ordered), dtype=float)
    qs = np.array(list(ordered.values()), dtype=complex)
    return PotentialFourier(C, MappingProxyType(ordered), is_real, ks, qs)


# ----------------------------------------------------------------------------
# coefficient sequences


@dataclass(frozen=True)
class CoefficientSequences:
    V: dict          # even m -> V(m); V(0) = C
    q_tilde: np.ndarray  # q_tilde[m-1] for m = 1..M
    V_tilde: np.ndarray  # V_tilde[k] for k = 0..M, V_tilde[0] = 0


def v_coefficients(p: PotentialFourier) -> dict[int, complex]:
    """Fourier coefficients of v: V(0) = C and V(m) = i m q(m)."""
    V = {0: p.C}
    for k, val in p.q.items():
        V[k] = 1j * k * val
    return dict(sorted(V.items()))


def sine_coefficients(p: PotentialFourier, M: int) -> np.ndarray:
    """Coefficients of Q in the basis sqrt(2) sin(mx), m = 1..M.

    Returns an array ``qt`` with ``qt[m-1]`` the m-th coefficient.  Even m pick
    up q(m) and q(-m) only; odd m see the whole support of q.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    m = np.arange(1, M + 1)
    out = np.zeros(M, dtype=complex)
    even = m % 2 == 0
    for k, val in p.q.items():
        if 1 <= abs(k) <= M and k > 0:
            out[k - 1] += 1j / SQRT2 * val
        elif 1 <= abs(k) <= M:
            out[-k - 1] -= 1j / SQRT2 * val
    if p.ks.size:
        # pair +k with -k so that odd Q (q(-k) = -q(k)) gives exact zeros
        kp = np.array(sorted({abs(int(k)) for k in p.q}), dtype=float)
        qsum = np.array([p.q.get(int(k), 0j) + p.q.get(-int(k), 0j) for k in kp])
        mo = m[~even].astype(float)
        out[~even] = (2 * SQRT2 / math.pi) * mo * (
            qsum[None, :] / (mo[:, None] ** 2 - kp[None, :] ** 2)
        ).sum(axis=1)
    return out


def sine_v_coefficients(p: PotentialFourier, M: int) -> np.ndarray:
    """V_tilde(k) = k q_tilde(k) for k = 0..M, with V_tilde(0) = 0."""
    out = np.zeros(M + 1, dtype=complex)
    out[1:] = np.arange(1, M + 1) * sine_coefficients(p, M)
    return out


def coefficient_sequences(p: PotentialFourier, M: int) -> CoefficientSequences:
    qt = sine_coefficients(p, M)
    Vt = np.concatenate([[0j], np.arange(1, M + 1) * qt])
    return CoefficientSequences(v_coefficients(p), qt, Vt)


def l2_norm(p: PotentialFourier) -> float:
    """||Q|| in L^2([0, pi]) with the (1/pi) normalisation."""
    return math.sqrt(float(np.sum(np.abs(p.qs) ** 2)))


def l2_norm_from_v(p: PotentialFourier) -> float:
    """Same norm computed as sum_{m != 0} |V(m)|^2 / m^2."""
    V = v_coefficients(p)
    return math.sqrt(sum(abs(val) ** 2 / m ** 2 for m, val in V.items() if m != 0))


def tail_energy(x: Mapping[int, complex], m: float) -> float:
    """sqrt(sum_{|j| >= m} |x(j)|^2) for a finitely supported sequence."""
    return math.sqrt(sum(abs(v) ** 2 for j, v in x.items() if abs(j) >= m))


# ----------------------------------------------------------------------------
# standard test potentials


def zero_potential() -> PotentialFourier:
    return make_potential(0.0, {})


def mathieu(amplitude: float = 1.0) -> PotentialFourier:
    """v = 2 a cos 2x, i.e. Q = a sin 2x."""
    return make_potential(0.0, {2: -0.5j * amplitude, -2: 0.5j * amplitude})


def truncated_sawtooth(kmax: int = 40) -> PotentialFourier:
    """q(k) = 1/(ik) for even 0 < |k| <= kmax; v is a smoothed periodic delta comb minus 1."""
    return make_potential(0.0, {k: 1 / (1j * k) for k in range(-kmax, kmax + 1, 2) if k})


# ----------------------------------------------------------------------------
# file format


def potential_from_dict(data: Mapping) -> PotentialFourier:
    if not isinstance(data, Mapping):
        raise PotentialFileError("potential file must contain a JSON object")
    try:
        C = complex(float(data.get("C_re", 0.0)), float(data.get("C_im", 0.0)))
    except (TypeError, ValueError) as exc:
        raise PotentialFileError(f"bad constant term: {exc}") from None
    records = data.get("coeffs", [])
    if not isinstance(records, list):
        raise PotentialFileError("'coeffs' must be a list of {k, re, im} records")
    coeffs: dict[int, complex] = {}
    for rec in records:
        if not isinstance(rec, Mapping) or "k" not in rec:
            raise PotentialFileError(f"malformed coefficient record {rec!r}")
        k = rec["k"]
        if isinstance(k, bool) or not isinstance(k, (int, float)) or int(k) != k:
            raise PotentialFileError("Fourier index must be an integer", k=k)
        k = int(k)
        if k in coeffs:
            raise PotentialFileError("duplicate Fourier index", k=k)
        if k == 0:
            raise PotentialFileError("index 0 is not allowed (Q has zero mean)", k=k)
        if k % 2:
            raise PotentialFileError("odd Fourier index (Q must be pi-periodic)", k=k)
        try:
            coeffs[k] = complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0)))
        except (TypeError, ValueError):
            raise PotentialFileError("non-numeric coefficient", k=k) from None
    return make_potential(C, coeffs)


def potential_to_dict(p: PotentialFourier) -> dict:
    return {
        "C_re": p.C.real,
        "C_im": p.C.imag,
        "coeffs": [{"k": k, "re": v.real, "im": v.imag} for k, v in p.q.items()],
    }


def load_potential(path) -> PotentialFourier:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PotentialFileError(f"cannot parse {path}: {exc}") from None
    return potential_from_dict(data)


def save_potential(p: PotentialFourier, path) -> None:
    with open(path, "w") as fh:
        json.dump(potential_to_dict(p), fh, indent=2)
        fh.write("\n")

"""Batched integrators for linear ODE systems on a fixed interval.

Both integrators advance a whole batch of states with one shared step size,
so that many spectral parameters are integrated in a single numpy pass.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate._ivp import dop853_coefficients as _dop

from .errors import StepFailure

_NS = _dop.N_STAGES
_A = _dop.A[:_NS, :_NS]
_B = _dop.B
_C = _dop.C[:_NS]
_E3 = _dop.E3
_E5 = _dop.E5

PI_LD = np.longdouble("3.14159265358979323846264338327950288")


def _error_norm(K, h, scale, batch):
    # DOP853 combined 5th/3rd order estimate, RMS over components of each batch element
    err5 = ((_E5 @ K) / scale).reshape(batch, -1)
    err3 = ((_E3 @ K) / scale).reshape(batch, -1)
    e5 = np.sum(err5.real ** 2 + err5.imag ** 2, axis=1)
    e3 = np.sum(err3.real ** 2 + err3.imag ** 2, axis=1)
    denom = e5 + 0.01 * e3
    with np.errstate(invalid="ignore", divide="ignore"):
        norm = np.where(denom > 0, abs(h) * e5 / np.sqrt(denom * err5.shape[1]), 0.0)
    return norm


def dop853(rhs, x0, x1, y0, rtol, atol, h0=None, max_steps=500_000):
    """Integrate ``y' = rhs(x, y)`` from ``x0`` to ``x1``.

    ``y0`` has shape (batch, ...); the step is accepted only when every batch
    element meets its tolerance.  Returns ``(y1, n_steps)``.
    """
    y0 = np.array(y0, dtype=complex)
    shape, batch = y0.shape, y0.shape[0]
    y = y0.ravel()

    def f_flat(x, v):
        return rhs(x, v.reshape(shape)).ravel()

    x = float(x0)
    span = float(x1) - x
    f = f_flat(x, y)
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean((np.abs(y) / scale) ** 2))
        d1 = np.sqrt(np.mean((np.abs(f) / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, span / 4)
    h = h0
    K = np.empty((_NS + 1, y.size), dtype=complex)
    n_steps = 0
    hmin = 1e-14 * abs(span)
    while x < x1:
        if n_steps >= max_steps:
            raise StepFailure(x, "maximum number of steps exceeded")
        last = x + h >= x1
        if last:
            h = x1 - x
        K[0] = f
        for s in range(1, _NS):
            K[s] = f_flat(x + _C[s] * h, y + h * (_A[s, :s] @ K[:s]))
        y_new = y + h * (_B @ K[:_NS])
        f_new = f_flat(x + h, y_new)
        K[_NS] = f_new
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.max(_error_norm(K, h, scale, batch)))
        if not np.isfinite(err):
            raise StepFailure(x, "non-finite solution")
        if err <= 1.0:
            x = x1 if last else x + h
            y, f = y_new, f_new
            n_steps += 1
            factor = 10.0 if err == 0 else min(10.0, 0.9 * err ** (-1 / 8))
            h *= max(factor, 0.2)
        else:
            h *= max(0.2, 0.9 * err ** (-1 / 8))
            if h < hmin:
                raise StepFailure(x)
    return y.reshape(shape), n_steps


# ----------------------------------------------------------------------------
# fourth-order Magnus integrator for traceless 2x2 systems


def _expm_traceless(O):
    # exp of a traceless 2x2 matrix: cosh(mu) I + sinh(mu)/mu * O, mu^2 = -det O
    a, b, c = O[..., 0, 0], O[..., 0, 1], O[..., 1, 0]
    mu2 = a * a + b * c
    mu = np.sqrt(mu2)
    small = np.abs(mu2) < 1e-6
    mu_safe = np.where(small, 1, mu)
    sinhc = np.where(small, 1 + mu2 / 6 + mu2 * mu2 / 120 + mu2 ** 3 / 5040, np.sinh(mu_safe) / mu_safe)
    ch = np.where(small, 1 + mu2 / 2 + mu2 * mu2 / 24 + mu2 ** 3 / 720, np.cosh(mu_safe))
    E = np.empty_like(O)
    E[..., 0, 0] = ch + sinhc * a
    E[..., 1, 1] = ch - sinhc * a
    E[..., 0, 1] = sinhc * b
    E[..., 1, 0] = sinhc * c
    return E


def magnus4(coef, x0, x1, Y0, tol, dtype=complex, max_steps=2_000_000):
    """Integrate ``Y' = A(x) Y`` for traceless 2x2 ``A`` (batched).

    ``coef(x)`` returns A at ``x`` with shape (batch, 2, 2).  Every step
    propagator has determinant one up to rounding, so det Y is conserved
    independently of ``tol``.  Step size is chosen by step doubling.
    """
    real = np.longdouble if dtype == np.clongdouble else float
    x0, x1 = real(x0), real(x1)
    r3 = np.sqrt(real(3))
    c1, c2 = real(0.5) - r3 / 6, real(0.5) + r3 / 6
    w = r3 / 12

    def step(x, h):
        A1, A2 = coef(x + c1 * h), coef(x + c2 * h)
        O = (h / 2) * (A1 + A2) + (w * h * h) * (A2 @ A1 - A1 @ A2)
        O[..., 1, 1] = -O[..., 0, 0]
        return _expm_traceless(O)

    Y = np.array(Y0, dtype=dtype)
    x = x0
    h = (x1 - x0) / 64
    n_steps = 0
    while x < x1:
        if n_steps >= max_steps:
            raise StepFailure(float(x), "maximum number of steps exceeded")
        last = x + h >= x1
        if last:
            h = x1 - x
        big = step(x, h) @ Y
        half = h / 2
        small = step(x + half, half) @ (step(x, half) @ Y)
        scale = 1 + np.abs(small)
        err = float(np.max(np.abs(big - small) / scale)) / (15 * tol)
        if err <= 1.0:
            x = x1 if last else x + h
            Y = small
            n_steps += 1
            h *= real(min(5.0, max(0.2, 0.9 * (err if err > 0 else 1e-10) ** -0.2)))
        else:
            h *= real(max(0.2, 0.9 * err ** -0.2))
            if h < 1e-16 * (x1 - x0):
                raise StepFailure(float(x))
    return Y, n_steps

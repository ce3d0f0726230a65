"""Floquet shooting for the quasi-derivative system.

With u = y' - Q y the equation -y'' + v y = lambda y becomes

    y' = Q y + u,    u' = (C - lambda - Q^2) y - Q u,

whose coefficients are smooth because Q is a trigonometric polynomial.  The
columns of the monodromy matrix are (y1, u1)(pi) and (y2, u2)(pi) for the
initial vectors (1, 0) and (0, 1); its trace is the Hill discriminant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from .errors import InterlacingViolation, NoConvergence
from .potential import PotentialFourier

DEFAULT_TOL = 1e-10
ROOT_TOL = 1e-9
# root searches integrate more tightly than single solves: simple roots inherit
# the integration error divided by the slope of the root function
SEARCH_TOL = 1e-12
GRID_STEP = 0.25
GRID_TOL = 1e-8


@dataclass(frozen=True)
class MonodromySolution:
    lam: complex
    M: np.ndarray
    delta: complex
    wronskian_defect: float
    dM: np.ndarray | None = None

    @property
    def y1(self):
        return self.M[0, 0]

    @property
    def u1(self):
        return self.M[1, 0]

    @property
    def y2(self):
        return self.M[0, 1]

    @property
    def u2(self):
        return self.M[1, 1]


def _check_tol(tol):
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"integration tolerance {tol!r} outside [1e-13, 1e-6]")


def _make_rhs(p: PotentialFourier, lams: np.ndarray, order: int):
    ks, qs = p.ks, p.qs
    real_Q = p.is_real
    shift = (p.C - lams)[:, None]

    def Q_at(x):
        if ks.size == 0:
            return 0.0
        val = np.exp(1j * ks * x) @ qs
        return val.real if real_Q else val

    def rhs(x, S):
        # S[:, 0, :] holds y-components, S[:, 1, :] u-components; column block j
        # (two columns each) is the j-th lambda-derivative of the fundamental matrix
        Q = Q_at(x)
        y, u = S[:, 0, :], S[:, 1, :]
        out = np.empty_like(S)
        out[:, 0, :] = Q * y + u
        du = (shift - Q * Q) * y - Q * u
        for j in range(1, order + 1):
            du[:, 2 * j:2 * j + 2] -= j * y[:, 2 * j - 2:2 * j]
        out[:, 1, :] = du
        return out

    return rhs


def monodromy_batch(p: PotentialFourier, lams, tol: float = DEFAULT_TOL, order: int = 0):
    """Monodromy matrices (and lambda-derivatives) for an array of lambdas.

    Returns an array of shape (n, order + 1, 2, 2): entry [:, j] is the j-th
    derivative of M with respect to lambda.
    """
    _check_tol(tol)
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    n = lams.size
    S0 = np.zeros((n, 2, 2 * (order + 1)), dtype=complex)
    S0[:, 0, 0] = 1.0
    S0[:, 1, 1] = 1.0
    if n == 0:
        return np.zeros((0, order + 1, 2, 2), dtype=complex)
    rhs = _make_rhs(p, lams, order)
    # step-size hint: resolve both sqrt|lambda| oscillation and the highest mode of Q
    freq = math.sqrt(float(np.max(np.abs(lams)))) + p.support + 1
    S, _ = _ode.dop853(rhs, 0.0, math.pi, S0, rtol=tol, atol=tol, h0=0.1 / freq)
    return S.reshape(n, 2, order + 1, 2).transpose(0, 2, 1, 3)


def _magnus_batch(p: PotentialFourier, lams, tol: float, extended: bool):
    dtype = np.clongdouble if extended else complex
    real = np.longdouble if extended else float
    lams = np.atleast_1d(np.asarray(lams, dtype=complex)).astype(dtype)
    ks = p.ks.astype(real)
    qr, qi = p.qs.real.astype(real), p.qs.imag.astype(real)
    C = np.asarray(p.C, dtype=dtype)

    def coef(x):
        if ks.size:
            kx = ks * x
            c, s = np.cos(kx), np.sin(kx)
            Q = (qr @ c - qi @ s) + 1j * (qr @ s + qi @ c)
            Q = Q.astype(dtype)
        else:
            Q = dtype(0)
        A = np.empty((lams.size, 2, 2), dtype=dtype)
        A[:, 0, 0] = Q
        A[:, 0, 1] = 1
        A[:, 1, 0] = C - lams - Q * Q
        A[:, 1, 1] = -Q
        return A

    Y0 = np.broadcast_to(np.eye(2, dtype=dtype), (lams.size, 2, 2))
    pi = _ode.PI_LD if extended else math.pi
    Y, _ = _ode.magnus4(coef, 0, pi, Y0, tol, dtype=dtype)
    return Y


def integrate_fundamental(p: PotentialFourier, lam: complex, tol: float = DEFAULT_TOL,
                          method: str = "rk", extended: bool = False,
                          derivative: bool = False) -> MonodromySolution:
    """Solve the quasi-derivative system on [0, pi] for one spectral parameter.

    ``method="rk"`` uses adaptive DOP853 in double precision.  ``method="magnus"``
    uses a determinant-preserving fourth-order Magnus scheme, optionally in
    extended (80-bit) precision, and is meant for Wronskian audits.
    """
    return monodromy(p, [lam], tol, method=method, extended=extended, derivative=derivative)[0]


def monodromy(p: PotentialFourier, lams, tol: float = DEFAULT_TOL, method: str = "rk",
              extended: bool = False, derivative: bool = False) -> list[MonodromySolution]:
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if method == "rk":
        if extended:
            raise ValueError("extended precision is only available with method='magnus'")
        out = monodromy_batch(p, lams, tol, order=1 if derivative else 0)
        Ms, dMs = out[:, 0], (out[:, 1] if derivative else None)
        dets = Ms[:, 0, 0] * Ms[:, 1, 1] - Ms[:, 0, 1] * Ms[:, 1, 0]
        defects = np.abs(dets - 1)
    elif method == "magnus":
        _check_tol(tol)
        if derivative:
            raise ValueError("derivatives are only available with method='rk'")
        Y = _magnus_batch(p, lams, tol, extended)
        dets = Y[:, 0, 0] * Y[:, 1, 1] - Y[:, 0, 1] * Y[:, 1, 0]
        defects = np.abs(dets - 1).astype(float)
        Ms, dMs = Y.astype(complex), None
    else:
        raise ValueError(f"unknown method {method!r}")
    return [
        MonodromySolution(complex(lam), Ms[i], complex(Ms[i, 0, 0] + Ms[i, 1, 1]),
                          float(defects[i]), None if dMs is None else dMs[i])
        for i, lam in enumerate(lams)
    ]


def lyapunov(p: PotentialFourier, lam, tol: float = DEFAULT_TOL):
    """Hill discriminant y1(pi) + u2(pi); vectorised over ``lam``."""
    M = monodromy_batch(p, lam, tol)[:, 0]
    delta = M[:, 0, 0] + M[:, 1, 1]
    return delta if np.ndim(lam) else complex(delta[0])


def free_discriminant(lam):
    """2 cos(pi sqrt(lambda)) with the principal square root."""
    return 2 * np.cos(np.pi * np.sqrt(np.asarray(lam, dtype=complex)))


def characteristic_roots(sol) -> tuple[complex, complex]:
    """Roots of rho^2 - Delta rho + 1 = 0, larger modulus first.

    Accepts a :class:`MonodromySolution` or the discriminant itself.  The
    second root is taken as the reciprocal of the first so rho+ rho- = 1.
    """
    delta = complex(sol.delta if isinstance(sol, MonodromySolution) else sol)
    s = complex(np.sqrt(delta * delta - 4))
    r = (delta + s) / 2 if abs(delta + s) >= abs(delta - s) else (delta - s) / 2
    return r, 1 / r


# ----------------------------------------------------------------------------
# root functions


def _root_function(kind: str, theta: float):
    """Return f(D) -> (f, f', f'') arrays built from derivative stacks D."""
    two_cos = 2 * math.cos(theta)

    def fun(D):
        M = D[:, 0]
        y1, u1, y2, u2 = M[:, 0, 0], M[:, 1, 0], M[:, 0, 1], M[:, 1, 1]
        if kind == "theta":
            parts = [D[:, j, 0, 0] + D[:, j, 1, 1] for j in range(D.shape[1])]
            parts[0] = parts[0] - two_cos
        elif kind == "dir":
            parts = [D[:, j, 0, 1] for j in range(D.shape[1])]
        else:  # "edges": (y1 - u2)^2 + 4 y2 u1 == Delta^2 - 4 without cancellation
            d = y1 - u2
            parts = [d * d + 4 * y2 * u1]
            if D.shape[1] > 1:
                d1 = D[:, 1, 0, 0] - D[:, 1, 1, 1]
                a1, b1 = D[:, 1, 0, 1], D[:, 1, 1, 0]
                parts.append(2 * d * d1 + 4 * (a1 * u1 + y2 * b1))
            if D.shape[1] > 2:
                d2 = D[:, 2, 0, 0] - D[:, 2, 1, 1]
                a2, b2 = D[:, 2, 0, 1], D[:, 2, 1, 0]
                parts.append(2 * (d1 * d1 + d * d2) + 4 * (a2 * u1 + 2 * a1 * b1 + y2 * b2))
        return parts

    return fun


def _safe_newton(evaluate, a, b, fa, xtol=1e-14, ntol=1e-12, maxiter=100, x0=None):
    """Vectorised bracketed Newton iteration (Newton step, bisection fallback).

    ``evaluate(x)`` returns (f, df) for an array of points.  ``fa`` is f(a);
    every bracket [a, b] must hold a sign change of f.  A point is accepted
    once the bracket is narrower than ``xtol`` or a raw Newton step inside the
    bracket is shorter than ``ntol`` (relative): below that, f is dominated by
    integration noise and further bisection gains nothing.
    """
    a, b = np.array(a, dtype=float), np.array(b, dtype=float)
    sa = np.sign(fa)
    x = (a + b) / 2
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        ok = np.isfinite(x0) & (x0 > np.minimum(a, b)) & (x0 < np.maximum(a, b))
        x = np.where(ok, x0, x)
    done = np.zeros(a.size, dtype=bool)
    last_step = np.abs(b - a)
    for _ in range(maxiter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        f, df = evaluate(x[act])
        zero = f == 0
        left = np.sign(f) == sa[act]
        a[act] = np.where(left, x[act], a[act])
        b[act] = np.where(left, b[act], x[act])
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x[act] - f / df
        lo, hi = np.minimum(a[act], b[act]), np.maximum(a[act], b[act])
        scale = ntol * (1 + np.abs(x[act]))
        inside = np.isfinite(xn) & (xn >= lo - scale) & (xn <= hi + scale)
        # Newton heading for an already evaluated endpoint is converged as well
        settled = inside & ((np.abs(xn - x[act]) <= scale)
                            | (np.minimum(np.abs(xn - lo), np.abs(xn - hi)) <= scale))
        bad = ~settled & (~inside | (xn <= lo) | (xn >= hi) | (np.abs(xn - x[act]) > 0.5 * last_step[act]))
        xn = np.where(settled, np.clip(xn, lo, hi), xn)
        xn = np.where(bad, (a[act] + b[act]) / 2, xn)
        step = np.abs(xn - x[act])
        last_step[act] = step
        tiny = step <= xtol * (1 + np.abs(xn))
        narrow = np.abs(b[act] - a[act]) <= xtol * (1 + np.abs(xn))
        x[act] = np.where(zero, x[act], xn)
        done[act] = zero | tiny | narrow | settled
    if not done.all():
        raise NoConvergence("bracketed Newton did not converge", best=x.copy())
    return x


def _merge(values, mults, max_mult, rel=1e-7):
    """Merge roots closer than rel*(1+|lambda|); multiplicities add up to ``max_mult``."""
    if len(values) == 0:
        return [], []
    order = np.lexsort((np.imag(values), np.real(values)))
    vals = [complex(values[i]) for i in order]
    mlt = [int(mults[i]) for i in order]
    out_v, out_m = [vals[0]], [mlt[0]]
    count = [1]
    for v, m in zip(vals[1:], mlt[1:]):
        if abs(v - out_v[-1]) <= rel * (1 + abs(v)):
            n = count[-1]
            out_v[-1] = (out_v[-1] * n + v) / (n + 1)
            count[-1] += 1
            out_m[-1] = min(max_mult, out_m[-1] + m)
        else:
            out_v.append(v)
            out_m.append(m)
            count.append(1)
    return out_v, out_m


def _secant(a, b, fa, fb):
    with np.errstate(divide="ignore", invalid="ignore"):
        return a - fa * (b - a) / (fb - fa)


def _real_line_roots(p, kind, theta, lo, hi, tol, double_tol=ROOT_TOL):
    """All real roots of the chosen root function in [lo, hi] (real potentials)."""
    fun = _root_function(kind, theta)
    # generic offset keeps grid points away from integer (free) eigenvalues
    start = lo - 0.1234567
    n = int(math.ceil((hi - start) / GRID_STEP)) + 2
    grid = start + np.arange(n) * ((hi + 0.0765432 - start) / (n - 1))
    # signs on the grid only need a coarse solve; cells that look interesting
    # (and their neighbours) are then re-evaluated at full accuracy
    D = monodromy_batch(p, grid, max(tol, GRID_TOL), order=1)
    F, dF = (part.real for part in fun(D))
    if tol < GRID_TOL:
        cells = (np.sign(F[:-1]) * np.sign(F[1:]) <= 0) | (np.sign(dF[:-1]) * np.sign(dF[1:]) <= 0)
        cells = np.flatnonzero(cells)
        pts = np.unique(np.concatenate([cells - 1, cells, cells + 1, cells + 2]))
        pts = pts[(pts >= 0) & (pts < n)]
        if pts.size:
            F[pts], dF[pts] = (part.real for part in fun(monodromy_batch(p, grid[pts], tol, order=1)))

    def eval1(x):
        f, df = fun(monodromy_batch(p, x, tol, order=1))
        return f.real, df.real

    def eval_d(x):
        _, df, d2f = fun(monodromy_batch(p, x, tol, order=2))
        return df.real, d2f.real

    roots, mults = list(grid[F == 0]), [1] * int(np.sum(F == 0))
    sgn = np.sign(F)
    brackets = [(grid[i], grid[i + 1], F[i], _secant(grid[i], grid[i + 1], F[i], F[i + 1]))
                for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0)]

    if kind != "dir":
        ext = np.flatnonzero((np.sign(dF[:-1]) * np.sign(dF[1:]) < 0) & (sgn[:-1] * sgn[1:] > 0))
        if ext.size:
            xs = _safe_newton(eval_d, grid[ext], grid[ext + 1], dF[ext],
                              x0=_secant(grid[ext], grid[ext + 1], dF[ext], dF[ext + 1]))
            Fx = eval1(xs)[0]
            for i, x, fx in zip(ext, xs, Fx):
                if np.sign(fx) != sgn[i]:
                    brackets.append((grid[i], x, F[i], np.nan))
                    brackets.append((x, grid[i + 1], fx, np.nan))
                elif abs(fx) <= double_tol:
                    roots.append(x)
                    mults.append(2)

    if brackets:
        a, b, fa, x0 = (np.array(c) for c in zip(*brackets))
        xs = _safe_newton(eval1, a, b, fa, x0=x0)
        roots.extend(xs)
        mults.extend([1] * xs.size)
    keep = [(r, m) for r, m in zip(roots, mults) if lo <= r <= hi]
    vals, mlt = _merge(np.array([r for r, _ in keep]), [m for _, m in keep],
                       max_mult=1 if kind == "dir" else 2)
    return [v.real for v in vals], mlt


def _polish_complex(p, kind, theta, seeds, tol, root_tol, maxiter=200):
    """Newton polish of complex seeds; returns merged roots with multiplicity."""
    two_cos = 2 * math.cos(theta)
    x = np.array(seeds, dtype=complex)
    done = np.zeros(x.size, dtype=bool)
    for _ in range(maxiter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        D = monodromy_batch(p, x[act], tol, order=1)
        if kind == "dir":
            f, df = D[:, 0, 0, 1], D[:, 1, 0, 1]
        else:
            f = D[:, 0, 0, 0] + D[:, 0, 1, 1] - two_cos
            df = D[:, 1, 0, 0] + D[:, 1, 1, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(df != 0, f / df, 0)
        x[act] -= step
        done[act] = (np.abs(step) <= 1e-14 * (1 + np.abs(x[act]))) | (f == 0)
    D = monodromy_batch(p, x, tol)
    if kind == "dir":
        res = np.abs(D[:, 0, 0, 1])
    else:
        res = np.abs(D[:, 0, 0, 0] + D[:, 0, 1, 1] - two_cos)
    if np.any(res > root_tol):
        raise NoConvergence("complex root polish stalled", best=x, residuals=res)
    return _merge(x, [1] * x.size, max_mult=2)


def _expand(vals, mults):
    out = []
    for v, m in zip(vals, mults):
        out.extend([v] * m)
    return out


def _window_bounds(window):
    lo, hi = window
    return complex(lo), complex(hi)


def _in_window(z, lo, hi, pad=0.0):
    return (lo.real - pad <= z.real <= hi.real + pad) and (lo.imag - pad <= z.imag <= hi.imag + pad)


def _seeds(p, bc, lo, hi):
    from .fourier_ops import converged_spectrum

    n = 8
    while True:
        rep = converged_spectrum(p, bc, n, tol=1e-9)
        vals = rep.eigenvalues
        if vals[-1].real > hi.real or n > 2048:
            break
        n *= 2
    return [z for z in vals if _in_window(z, lo, hi, pad=1e-6)]


def theta_eigenvalues(p: PotentialFourier, theta: float, window, tol: float = ROOT_TOL,
                      int_tol: float = SEARCH_TOL, seeds=None) -> list[complex]:
    """Roots of Delta(lambda) = 2 cos(theta) in ``window``, with multiplicity.

    For real potentials ``window`` is a real interval scanned directly.  For
    complex potentials it is a rectangle given by two opposite corners; the
    roots are then seeded from truncated-matrix eigenvalues (or ``seeds``)
    and polished by Newton's method.
    """
    if not 0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    lo, hi = _window_bounds(window)
    if p.is_real and lo.imag == 0 and hi.imag == 0 and seeds is None:
        if theta in (0.0, math.pi):
            vals, mult = _real_line_roots(p, "edges", 0.0, lo.real, hi.real, int_tol, tol)
            want = 1 if theta == 0 else -1
            deltas = lyapunov(p, np.array(vals, dtype=float), int_tol) if vals else []
            keep = [(v, m) for v, m, d in zip(vals, mult, deltas) if np.sign(d.real) == want]
            vals, mult = [v for v, _ in keep], [m for _, m in keep]
        else:
            vals, mult = _real_line_roots(p, "theta", theta, lo.real, hi.real, int_tol, tol)
        _check_residual(p, "theta", theta, vals, tol, int_tol)
        return [complex(v) for v in _expand(vals, mult)]
    from .fourier_ops import BCSpec

    if seeds is None:
        seeds = _seeds(p, BCSpec.theta_bc(theta), lo, hi)
    vals, mult = _polish_complex(p, "theta", theta, seeds, int_tol, tol)
    keep = [(v, m) for v, m in zip(vals, mult) if _in_window(v, lo, hi)]
    return _expand([v for v, _ in keep], [m for _, m in keep])


def dirichlet_eigenvalues(p: PotentialFourier, window, tol: float = ROOT_TOL,
                          int_tol: float = SEARCH_TOL, seeds=None) -> list[complex]:
    """Zeros of y2(pi, lambda) in ``window`` (same conventions as theta_eigenvalues)."""
    lo, hi = _window_bounds(window)
    if p.is_real and lo.imag == 0 and hi.imag == 0 and seeds is None:
        vals, mult = _real_line_roots(p, "dir", 0.0, lo.real, hi.real, int_tol, tol)
        _check_residual(p, "dir", 0.0, vals, tol, int_tol)
        return [complex(v) for v in _expand(vals, mult)]
    from .fourier_ops import DIR

    if seeds is None:
        seeds = _seeds(p, DIR, lo, hi)
    vals, mult = _polish_complex(p, "dir", 0.0, seeds, int_tol, tol)
    keep = [(v, m) for v, m in zip(vals, mult) if _in_window(v, lo, hi)]
    return _expand([v for v, _ in keep], [m for _, m in keep])


def _check_residual(p, kind, theta, vals, tol, int_tol):
    if not vals:
        return
    M = monodromy_batch(p, np.array(vals, dtype=float), int_tol)[:, 0]
    if kind == "dir":
        res = np.abs(M[:, 0, 1])
    else:
        res = np.abs(M[:, 0, 0] + M[:, 1, 1] - 2 * math.cos(theta))
    if np.any(res > tol):
        raise NoConvergence(f"root residual {res.max():.3g} exceeds {tol:g}",
                            best=np.array(vals), residuals=res)


# ----------------------------------------------------------------------------
# lowest eigenvalues and band edges


def _free_values(kind: str, count: int) -> list[float]:
    if kind == "per+":
        base = [0.0] + [float(k * k) for k in range(2, 4 * count + 4, 2) for _ in range(2)]
    elif kind == "per-":
        base = [float(k * k) for k in range(1, 4 * count + 4, 2) for _ in range(2)]
    else:
        base = [float(k * k) for k in range(1, count + 2)]
    return base[:count]


def lowest_eigenvalues(p: PotentialFourier, kind: str, count: int, tol: float = ROOT_TOL,
                       int_tol: float = SEARCH_TOL) -> list[complex]:
    """The ``count`` lowest Per+/Per-/Dir eigenvalues of a real potential.

    The scan window is bounded using quadratic-form estimates: with
    |2 Re int Q y y'| <= 2 s |y| |y'| (s = sup|Q|) the spectrum lies above
    Re C - s^2, and min-max over the first c free eigenfunctions puts the
    c-th eigenvalue below (sqrt(c-th free eigenvalue) + s)^2 + Re C.
    """
    if not p.is_real:
        raise ValueError("lowest_eigenvalues scans the real line; use theta_eigenvalues for complex potentials")
    lo = p.lower_bound() - 1.0
    hi = (math.sqrt(_free_values(kind, count)[-1]) + p.sup_bound) ** 2 + p.C.real + 1.0
    if kind == "dir":
        vals = dirichlet_eigenvalues(p, (lo, hi), tol, int_tol)
    else:
        vals = theta_eigenvalues(p, 0.0 if kind == "per+" else math.pi, (lo, hi), tol, int_tol)
    if len(vals) < count:
        raise NoConvergence(f"found {len(vals)} of {count} eigenvalues below the bound {hi:g}",
                            best=np.array(vals))
    return vals[:count]


@dataclass(frozen=True)
class BandEdges:
    lambda0: float
    minus: dict
    plus: dict

    def ordered(self) -> list[float]:
        out = [self.lambda0]
        for n in sorted(self.minus):
            out += [self.minus[n], self.plus[n]]
        return out


def band_edges(p: PotentialFourier, n_max: int, tol: float = ROOT_TOL,
               int_tol: float = SEARCH_TOL, interlace_tol: float = 1e-9) -> BandEdges:
    """lambda_0 and the pairs (lambda_n^-, lambda_n^+), n = 1..n_max."""
    if not p.is_real:
        raise ValueError("band edges are defined for real potentials")
    even = [z.real for z in lowest_eigenvalues(p, "per+", 1 + 2 * (n_max // 2), tol, int_tol)]
    odd = [z.real for z in lowest_eigenvalues(p, "per-", 2 * ((n_max + 1) // 2), tol, int_tol)] if n_max else []
    minus, plus = {}, {}
    for n in range(1, n_max + 1):
        src = even if n % 2 == 0 else odd
        minus[n], plus[n] = src[n - 1], src[n]
    edges = BandEdges(even[0], minus, plus)
    check_interlacing(edges, interlace_tol)
    return edges


def check_interlacing(edges: BandEdges, tol: float = 1e-9) -> None:
    """lambda0 < l1- <= l1+ < l2- <= ... (strict steps need a margin of -tol)."""
    prev = edges.lambda0
    for n in sorted(edges.minus):
        lm, lp = edges.minus[n], edges.plus[n]
        if not lm > prev - tol:
            raise InterlacingViolation(f"lambda_{n}^- = {lm!r} is not above {prev!r}")
        if not lp >= lm - tol:
            raise InterlacingViolation(f"lambda_{n}^+ = {lp!r} < lambda_{n}^- = {lm!r}")
        prev = lp

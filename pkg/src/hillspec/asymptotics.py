"""Gap sequences, Dirichlet deviations and weighted l^2 norms.

For each n the table holds lambda_n^-, lambda_n^+ (periodic for even n,
antiperiodic for odd n) and the Dirichlet eigenvalue mu_n, together with

    gamma_n = lambda_n^+ - lambda_n^-
    dev_n   = mu_n - (lambda_n^+ + lambda_n^-) / 2
    Delta_n = |lambda_n^+ - lambda_n^-| + |lambda_n^+ - mu_n|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import stats

from . import floquet
from .errors import InsufficientData, PairingAmbiguity
from .fourier_ops import DIR, PER_MINUS, PER_PLUS, BCSpec, converged_spectrum
from .potential import PotentialFourier
from .reports import csv_text, dumps

CSV_HEADER = ["n", "re_lambda_minus", "im_lambda_minus", "re_lambda_plus", "im_lambda_plus",
              "re_mu", "im_mu", "gamma", "dev", "Delta_n"]


@dataclass(frozen=True)
class GapRow:
    n: int
    lam_minus: complex
    lam_plus: complex
    mu: complex
    residual: float = 0.0

    @property
    def gamma(self) -> complex:
        return self.lam_plus - self.lam_minus

    @property
    def dev(self) -> complex:
        return self.mu - (self.lam_plus + self.lam_minus) / 2

    @property
    def Delta(self) -> float:
        return abs(self.lam_plus - self.lam_minus) + abs(self.lam_plus - self.mu)

    @property
    def Delta_minus(self) -> float:
        """Same combination measured from lambda_n^- instead of lambda_n^+."""
        return abs(self.lam_plus - self.lam_minus) + abs(self.lam_minus - self.mu)

    @property
    def Delta_max(self) -> float:
        return max(self.Delta, self.Delta_minus)


@dataclass
class GapTable:
    rows: list
    engine: str
    is_real: bool
    lambda0: complex | None = None
    tol: float = 0.0
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def row(self, n: int) -> GapRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def check_interlacing(self, tol: float = 1e-9) -> list[str]:
        """Violations of lambda_0 < l1- <= l1+ < l2- <= ... (real potentials)."""
        if not self.is_real:
            return []
        bad = []
        prev = self.lambda0.real if self.lambda0 is not None else -math.inf
        for r in sorted(self.rows, key=lambda r: r.n):
            lm, lp = r.lam_minus.real, r.lam_plus.real
            if not lm > prev - tol:
                bad.append(f"lambda_{r.n}^- = {lm!r} not above {prev!r}")
            if not lp >= lm - tol:
                bad.append(f"lambda_{r.n}^+ = {lp!r} below lambda_{r.n}^- = {lm!r}")
            prev = lp
        return bad

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "tol": self.tol,
            "lambda0": self.lambda0,
            "rows": [
                {"n": r.n, "lambda_minus": r.lam_minus, "lambda_plus": r.lam_plus, "mu": r.mu,
                 "gamma": r.gamma, "dev": r.dev, "Delta_n": r.Delta, "Delta_n_from_minus": r.Delta_minus,
                 "Delta_n_max": r.Delta_max, "residual": r.residual}
                for r in self.rows
            ],
            "notes": list(self.notes),
        }

    def to_csv(self) -> str:
        """gamma and dev are real for real potentials; for complex ones their moduli are written."""
        def real_or_abs(z):
            return float(z.real) if self.is_real else float(abs(z))

        rows = [(r.n, float(r.lam_minus.real), float(r.lam_minus.imag), float(r.lam_plus.real),
                 float(r.lam_plus.imag), float(r.mu.real), float(r.mu.imag), real_or_abs(r.gamma),
                 real_or_abs(r.dev), float(r.Delta)) for r in self.rows]
        return csv_text(CSV_HEADER, rows)


def _label_pair(a: complex, b: complex) -> tuple[complex, complex]:
    # minus/plus by real part, ties by imaginary part
    return (a, b) if (a.real, a.imag) <= (b.real, b.imag) else (b, a)


def _nearest(vals: np.ndarray, target: float, count: int, n: int, what: str):
    d = np.abs(vals - target)
    order = np.argsort(d, kind="stable")
    if order.size < count:
        raise PairingAmbiguity(f"only {order.size} {what} eigenvalue(s) available for n = {n}")
    if order.size > count:
        a, b = d[order[count - 1]], d[order[count]]
        if abs(a - b) <= 1e-12 * (1 + target):
            raise PairingAmbiguity(f"{what} eigenvalues {vals[order[count - 1]]} and {vals[order[count]]} "
                                   f"are equally close to {n}^2")
    return [complex(vals[i]) for i in order[:count]]


def _counts(n_max: int) -> dict:
    return {"per+": 1 + 2 * (n_max // 2), "per-": 2 * ((n_max + 1) // 2), "dir": n_max}


def _fourier_lists(p, n_max, tol, margin):
    out, res, Ks = {}, {}, {}
    for bc in (PER_PLUS, PER_MINUS, DIR):
        count = max(1, _counts(n_max)[bc.kind] + margin)
        rep = converged_spectrum(p, bc, count, tol=tol)
        out[bc.kind], res[bc.kind], Ks[bc.kind] = rep.eigenvalues, rep.residuals, rep.K
    return out, res, Ks


def _floquet_lists(p, n_max, tol, margin, seeds):
    out, res = {}, {}
    for bc in (PER_PLUS, PER_MINUS, DIR):
        count = max(1, _counts(n_max)[bc.kind] + margin)
        if p.is_real:
            vals = np.array(floquet.lowest_eigenvalues(p, bc.kind, count), dtype=complex)
        else:
            sd = seeds[bc.kind]
            lo = complex(np.min(sd.real) - 1, np.min(sd.imag) - 1)
            hi = complex(np.max(sd.real) + 1, np.max(sd.imag) + 1)
            if bc.kind == "dir":
                vals = floquet.dirichlet_eigenvalues(p, (lo, hi), seeds=sd)
            else:
                theta = 0.0 if bc.kind == "per+" else math.pi
                vals = floquet.theta_eigenvalues(p, theta, (lo, hi), seeds=sd)
            vals = np.array(sorted(vals, key=lambda z: (z.real, z.imag)), dtype=complex)
        out[bc.kind] = vals
        res[bc.kind] = _root_residuals(p, bc, vals)
    return out, res


def _root_residuals(p, bc: BCSpec, vals) -> np.ndarray:
    if len(vals) == 0:
        return np.zeros(0)
    M = floquet.monodromy_batch(p, np.asarray(vals), floquet.SEARCH_TOL)[:, 0]
    if bc.kind == "dir":
        return np.abs(M[:, 0, 1])
    two_cos = 2.0 if bc.kind == "per+" else -2.0
    return np.abs(M[:, 0, 0] + M[:, 1, 1] - two_cos)


def gap_table(p: PotentialFourier, n_max: int, engine: str = "fourier", tol: float = 1e-10) -> GapTable:
    """Gap table for n = 1..n_max.

    Real potentials use the enumeration order of the self-adjoint spectrum
    (lambda_n^- and lambda_n^+ are the (n)-th and (n+1)-th periodic or
    antiperiodic eigenvalues counted from the bottom, mu_n the n-th Dirichlet
    one).  For complex potentials the two Per+- eigenvalues and the one Dir
    eigenvalue nearest n^2 are taken; ties raise :class:`PairingAmbiguity`.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    margin = 0 if p.is_real else 4
    if engine == "fourier":
        lists, res, Ks = _fourier_lists(p, n_max, tol, margin)
        notes = [f"truncation K: per+ {Ks['per+']}, per- {Ks['per-']}, dir {Ks['dir']}"]
    elif engine == "floquet":
        seeds = None
        if not p.is_real:
            seeds, _, _ = _fourier_lists(p, n_max, tol, margin + 2)
        lists, res = _floquet_lists(p, n_max, tol, margin, seeds)
        notes = ["roots of Delta(lambda) -+ 2 and y2(pi, lambda)"]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    rows = []
    for n in range(1, n_max + 1):
        kind = "per+" if n % 2 == 0 else "per-"
        vals, r = lists[kind], res[kind]
        if p.is_real:
            # per+: lambda_0, l2-, l2+, l4-, ...; per-: l1-, l1+, l3-, ...
            pos = (n - 1, n)
            pair = [complex(vals[pos[0]]), complex(vals[pos[1]])]
            mu = complex(lists["dir"][n - 1])
            resid = max(float(r[pos[0]]), float(r[pos[1]]), float(res["dir"][n - 1]))
        else:
            pair = _nearest(vals, n * n, 2, n, kind)
            mu = _nearest(lists["dir"], n * n, 1, n, "dir")[0]
            resid = float(max(r.max(initial=0.0), res["dir"].max(initial=0.0)))
        lm, lp = _label_pair(*pair)
        rows.append(GapRow(n, lm, lp, mu, resid))
    lam0 = complex(lists["per+"][0]) if p.is_real else None
    return GapTable(rows, engine, p.is_real, lam0, tol, notes)


# ----------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Weight:
    """Sub-multiplicative weight omega(n) > 0, checked on |m|, |n| <= 64."""

    kind: str
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("power", "logpower", "exponential"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        n = np.arange(-64, 65)
        w = self(n)
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weight must be positive and finite")
        lhs = self(n[:, None] + n[None, :])
        if np.any(lhs > w[:, None] * w[None, :] * (1 + 1e-12)):
            raise ValueError(f"{self} is not sub-multiplicative on |m|, |n| <= 64")

    def __call__(self, n):
        n = np.abs(np.asarray(n, dtype=float))
        if self.kind == "power":
            return (1 + n) ** self.a
        if self.kind == "logpower":
            return (1 + n) ** self.a * (1 + np.log1p(n)) ** self.b
        return np.exp(self.a * n)

    def Omega(self, n):
        """omega(n) / n."""
        n = np.asarray(n, dtype=float)
        return self(n) / n


def Power(a: float) -> Weight:
    return Weight("power", a)


def LogPower(a: float, b: float) -> Weight:
    return Weight("logpower", a, b)


def Exponential(eps: float) -> Weight:
    return Weight("exponential", eps)


@dataclass(frozen=True)
class WeightedNorm:
    value: float
    partial_sums: np.ndarray
    trend: str          # "zero", "converging" or "diverging"
    slope: float        # log-log slope of the tail terms |x(n)|^2 Omega(n)^2
    excluded: int = 0   # terms under the noise floor left out of the trend fit

    @property
    def diverging(self) -> bool:
        return self.trend == "diverging"


def weighted_norm(seq: Mapping[int, complex], omega: Weight | Callable, noise_floor: float = 0.0) -> WeightedNorm:
    """sqrt(sum |seq(n)|^2 Omega(n)^2) over the available n >= 1.

    ``omega`` is a :class:`Weight` (then Omega(n) = omega(n)/n) or a callable
    giving Omega(n) directly.  The trend is read off the log-log slope of the
    second half of the nonzero terms: below -1 the series is taken to
    converge.  Terms with |seq(n)| <= ``noise_floor`` stay in the sum but not
    in the trend fit.
    """
    Om = omega.Omega if isinstance(omega, Weight) else omega
    ns = np.array(sorted(k for k in seq if k >= 1), dtype=int)
    if ns.size == 0:
        return WeightedNorm(0.0, np.zeros(0), "zero", float("nan"))
    x = np.abs(np.array([seq[int(k)] for k in ns], dtype=complex))
    terms = x ** 2 * np.asarray([Om(int(k)) for k in ns], dtype=float) ** 2
    partial = np.cumsum(terms)
    value = math.sqrt(float(partial[-1]))
    fit = (terms > 0) & (x > noise_floor)
    excluded = int(np.sum((terms > 0) & ~fit))
    if not np.any(terms > 0):
        return WeightedNorm(0.0, np.sqrt(partial), "zero", float("nan"))
    idx = np.flatnonzero(fit)
    tail = idx[idx.size // 2:]
    if tail.size < 2:
        return WeightedNorm(value, np.sqrt(partial), "converging", float("nan"), excluded)
    slope = float(np.polyfit(np.log(ns[tail]), np.log(terms[tail]), 1)[0])
    return WeightedNorm(value, np.sqrt(partial), "converging" if slope < -1 else "diverging", slope, excluded)


# ----------------------------------------------------------------------------
# decay fits


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


@dataclass
class DecayProfile:
    status: str                  # "identically zero", "fitted" or "noise-limited"
    preferred: str | None        # "power" or "exponential"
    power: FitResult | None      # log Delta_n = slope * log n + c
    exponential: FitResult | None  # log Delta_n = slope * n + c
    n_used: list
    noise_floor: float
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def fit(f):
            return None if f is None else {"slope": f.slope, "intercept": f.intercept, "r2": f.r2}

        return {"status": self.status, "preferred": self.preferred, "power": fit(self.power),
                "exponential": fit(self.exponential), "n_used": list(self.n_used),
                "noise_floor": self.noise_floor, "notes": list(self.notes)}


def _fit(x, y) -> FitResult:
    if np.ptp(y) == 0:
        return FitResult(0.0, float(y[0]), 1.0)
    r = stats.linregress(x, y)
    return FitResult(float(r.slope), float(r.intercept), float(r.rvalue ** 2))


def decay_profile(table: GapTable, noise_floor: float = 1e-9, residual_tol: float = 1e-6,
                  min_rows: int = 8) -> DecayProfile:
    """Least-squares fits of log Delta_n against log n (power law) and against n
    (exponential), over rows whose Delta_n exceeds ``noise_floor``.

    Needs at least ``min_rows`` rows with residual below ``residual_tol``.
    """
    good = [r for r in table.rows if r.residual <= residual_tol]
    if len(good) < min_rows:
        raise InsufficientData(f"{len(good)} usable rows, at least {min_rows} needed")
    D = np.array([r.Delta for r in good])
    ns = np.array([r.n for r in good], dtype=float)
    if np.all(D <= noise_floor):
        return DecayProfile("identically zero", None, None, None, [], noise_floor,
                            [f"all Delta_n <= {noise_floor:g}"])
    keep = D > noise_floor
    notes = []
    if not np.all(keep):
        notes.append(f"{int(np.sum(~keep))} row(s) at or below the noise floor {noise_floor:g} left out")
    if np.sum(keep) < 3:
        return DecayProfile("noise-limited", None, None, None, ns[keep].astype(int).tolist(),
                            noise_floor, notes + ["fewer than 3 rows above the noise floor"])
    x, y = ns[keep], np.log(D[keep])
    pw, ex = _fit(np.log(x), y), _fit(x, y)
    preferred = "exponential" if ex.r2 > pw.r2 else "power"
    return DecayProfile("fitted", preferred, pw, ex, x.astype(int).tolist(), noise_floor, notes)


def gaps_report(table: GapTable, profile: DecayProfile | None) -> str:
    return dumps({"gap_table": table.to_dict(), "decay_profile": None if profile is None else profile.to_dict()})

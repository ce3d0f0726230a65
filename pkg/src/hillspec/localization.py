"""Localization of Per+/Per-/Dir spectra in a rectangle and a chain of disks.

Counting uses matrix eigenvalues assigned to regions; the norm of
K V K (K = (lambda - L0)^{-1/2}) is estimated through its Hilbert-Schmidt
norm, which majorizes the operator norm.  A value below one at lambda
means lambda is in the resolvent set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import digamma, polygamma

from .errors import DivergentEntry
from .fourier_ops import BCSpec, converged_spectrum
from .potential import PotentialFourier, sine_v_coefficients, v_coefficients
from .reports import SpectrumReport, csv_text, dumps

# ----------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class StripH:
    """H_0 = {Re <= 1}, H_1 = {Re <= 4}, H_n = {(n-1)^2 <= Re <= (n+1)^2}."""

    n: int

    def contains(self, lam) -> bool:
        x = complex(lam).real
        if self.n == 0:
            return x <= 1
        if self.n == 1:
            return x <= 4
        return (self.n - 1) ** 2 <= x <= (self.n + 1) ** 2


@dataclass(frozen=True)
class StripG:
    """G_1 = {Re <= 2}, G_n = {(n-1)n <= Re <= n(n+1)}."""

    n: int

    def contains(self, lam) -> bool:
        x = complex(lam).real
        if self.n == 1:
            return x <= 2
        return (self.n - 1) * self.n <= x <= self.n * (self.n + 1)


def shrinking_radius(n: int) -> float:
    """r_n = n / n^(1/4); r_n / n -> 0."""
    return n / n ** 0.25


@dataclass(frozen=True)
class Disk:
    """Open disk |lambda - n^2| < r, default r = n/4."""

    n: int
    r: float | None = None

    @property
    def radius(self) -> float:
        return self.n / 4 if self.r is None else self.r

    def contains(self, lam) -> bool:
        return abs(complex(lam) - self.n ** 2) < self.radius

    def boundary(self, count: int = 16) -> np.ndarray:
        phi = 2 * np.pi * np.arange(count) / count
        return self.n ** 2 + self.radius * np.exp(1j * phi)

    @property
    def label(self) -> str:
        return f"D_{self.n}"


@dataclass(frozen=True)
class Rect:
    """R_N = {-N < Re < N^2 + N, |Im| < N}."""

    N: int

    def contains(self, lam) -> bool:
        z = complex(lam)
        return -self.N < z.real < self.N ** 2 + self.N and abs(z.imag) < self.N

    def boundary(self, count: int = 48) -> np.ndarray:
        """Samples of the part of the boundary inside the half-plane H^N (upper half).

        The Hilbert-Schmidt norms are symmetric under conjugation, so the
        lower half adds nothing.  The top edge is sampled uniformly and at
        every Re = k^2 below N^2 + N, where it comes closest to the poles.
        """
        N = self.N
        top = np.linspace(-N, N * N + N, count, endpoint=False)
        poles = np.arange(0, N + 1) ** 2.0
        top = np.unique(np.concatenate([top, poles]))
        left = -N + 1j * np.linspace(0, N, max(4, count // 4))
        return np.concatenate([left, top + 1j * N])

    @property
    def label(self) -> str:
        return f"R_{self.N}"


@dataclass(frozen=True)
class HalfPlane:
    """H^N = {Re lambda < N^2 + N}."""

    N: int

    def contains(self, lam) -> bool:
        return complex(lam).real < self.N ** 2 + self.N


def disks_pairwise_disjoint(n_max: int, radius=None) -> bool:
    """|n^2 - m^2| >= r_n + r_m for all 1 <= m < n <= n_max."""
    rad = (lambda n: n / 4) if radius is None else radius
    for n in range(2, n_max + 1):
        for m in range(1, n):
            if n * n - m * m < rad(n) + rad(m):
                return False
    return True


# ----------------------------------------------------------------------------
# elementary sums


def _harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


@dataclass(frozen=True)
class HarmonicSums:
    n: int
    S1: float
    S2: float
    S1_exact: Fraction | None
    bound1: float
    bound2: float

    @property
    def holds1(self) -> bool:
        return self.S1 < self.bound1

    @property
    def holds2(self) -> bool:
        return self.S2 < self.bound2


def _harmonic_float(n: int) -> float:
    return float(digamma(n + 1) + np.euler_gamma) if n else 0.0


def harmonic_sums(n: int, exact: bool | None = None) -> HarmonicSums:
    """S1 = sum_{k != +-n} 1/|n^2 - k^2| and S2 = sum 1/|n^2 - k^2|^2 (k in Z).

    Partial fractions telescope to
        S1 = 1/n^2 + (H_{n-1} + H_{2n-1} - H_n + H_{2n}) / n,
        S2 = pi^2 / (6 n^2) - 3 / (8 n^4).
    ``exact`` (default: n <= 200) also returns S1 as a Fraction.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    exact = n <= 200 if exact is None else exact
    S1_exact = None
    if exact:
        S1_exact = Fraction(1, n * n) + (_harmonic(n - 1) + _harmonic(2 * n - 1) - _harmonic(n)
                                         + _harmonic(2 * n)) / n
        S1 = float(S1_exact)
    else:
        H = _harmonic_float
        S1 = 1 / n ** 2 + (H(n - 1) + H(2 * n - 1) - H(n) + H(2 * n)) / n
    S2 = math.pi ** 2 / (6 * n * n) - 3 / (8 * n ** 4)
    return HarmonicSums(n, S1, S2, S1_exact, 2 * math.log(6 * n) / n, 4 / n ** 2)


def _tail_inverse_quadratic(K: int, c):
    """sum_{k > K} 1/(k^2 + c) via digamma (requires k^2 + c != 0 for k > K)."""
    a = np.sqrt(np.asarray(c, dtype=complex))
    small = np.abs(a) < 1e-8
    a_safe = np.where(small, 1.0, a)
    val = (digamma(K + 1 + 1j * a_safe) - digamma(K + 1 - 1j * a_safe)) / (2j * a_safe)
    # |c| tiny: first two terms of the expansion in c
    val0 = polygamma(1, K + 1) - np.asarray(c) * polygamma(3, K + 1) / 6
    return np.where(small, val0, val)


@dataclass(frozen=True)
class ShiftedSums:
    n: int
    b: float
    T1: float | None
    T2: float
    C1: float | None   # T1 * sqrt(b) / log b
    C2: float          # T2 * (n^2 + b^2)^(1/2) (n^4 + b^2)^(1/4)


def shifted_sums(n: int, b: float) -> ShiftedSums:
    """T1 = sum_k 1/(|n^2 - k^2| + b) and T2 = sum_{k != +-n} 1/(|n^2 - k^2|^2 + b^2).

    Terms with |k| <= K = 2n + 8 are summed directly; the remainder is the
    exact digamma series for sum 1/(k^2 + c).  Also returns the smallest
    constants making the two scaled bounds hold at this (n, b).
    """
    n = int(abs(n))
    if b <= 0:
        raise ValueError("b must be positive")
    K = 2 * n + 8
    k = np.arange(-K, K + 1)
    d = np.abs(n * n - k * k).astype(float)
    T1 = C1 = None
    if b >= 2:
        # k > K: |n^2 - k^2| + b = k^2 + (b - n^2); both signs of k
        T1 = float(np.sum(1 / (d + b)) + 2 * _tail_inverse_quadratic(K, b - n * n).real)
        C1 = T1 * math.sqrt(b) / math.log(b)
    mask = np.abs(k) != n
    # 1/(x^2 + b^2) = (1/(2ib)) (1/(x - ib) - 1/(x + ib)), x = k^2 - n^2
    tail = (_tail_inverse_quadratic(K, -n * n - 1j * b) - _tail_inverse_quadratic(K, -n * n + 1j * b)) / (2j * b)
    T2 = float(np.sum(1 / (d[mask] ** 2 + b * b)) + 2 * tail.real)
    C2 = T2 * math.sqrt(n * n + b * b) * (n ** 4 + b * b) ** 0.25
    return ShiftedSums(n, float(b), T1, T2, C1, C2)


def shifted_sums_constant(ns, bs) -> tuple[float, float]:
    """Largest C1, C2 over a grid of (n, b); a single C certifies both bounds there."""
    c1 = c2 = 0.0
    for n in ns:
        for b in bs:
            s = shifted_sums(n, b)
            if s.C1 is not None:
                c1 = max(c1, s.C1)
            c2 = max(c2, s.C2)
    return c1, c2


# ----------------------------------------------------------------------------
# the K V K operator


def branch_sqrt(z):
    """sqrt(r) exp(i phi / 2) with phi in [0, 2 pi)."""
    z = np.asarray(z, dtype=complex)
    phi = np.mod(np.angle(z), 2 * np.pi)
    return np.sqrt(np.abs(z)) * np.exp(0.5j * phi)


def _check_regular(bc: BCSpec, lam: complex) -> None:
    lam = complex(lam)
    if lam.imag != 0 or lam.real < 0:
        return
    k = round(math.sqrt(lam.real))
    if k * k != lam.real:
        return
    ok = {"per+": k % 2 == 0, "per-": k % 2 == 1, "dir": k >= 1}.get(bc.kind)
    if ok is None:
        raise ValueError("the K V K operator is defined for per+, per- and dir")
    if ok:
        raise DivergentEntry(f"lambda = {lam.real:g} is the unperturbed eigenvalue {k}^2 of {bc.label}")


def _kvk_indices(bc: BCSpec, K: int) -> np.ndarray:
    if bc.kind == "theta":
        raise ValueError("the K V K operator is defined for per+, per- and dir")
    return bc.indices(K).astype(int)


def kvk_matrix(p: PotentialFourier, bc: BCSpec, lam: complex, K: int) -> np.ndarray:
    """Dense truncation of K V K over the basis indices with |k| <= K.

    Per+-: V(j - m) / ((lam - j^2)^(1/2) (lam - m^2)^(1/2)), with V(0) = C.
    Dir: (V~(|j - m|) - V~(j + m)) / sqrt(2) over the same denominators,
    plus C on the diagonal.
    """
    _check_regular(bc, lam)
    idx = _kvk_indices(bc, K)
    s = 1 / branch_sqrt(complex(lam) - idx.astype(float) ** 2)
    if bc.kind == "dir":
        Vt = sine_v_coefficients(p, 2 * K)
        W = (Vt[np.abs(idx[:, None] - idx[None, :])] - Vt[idx[:, None] + idx[None, :]]) / math.sqrt(2)
        W = W + p.C * np.eye(idx.size)
    else:
        V = v_coefficients(p)
        diff = idx[:, None] - idx[None, :]
        W = np.zeros(diff.shape, dtype=complex)
        for m, val in V.items():
            W[diff == m] = val
    return s[:, None] * W * s[None, :]


def _diagonals(p: PotentialFourier, bc: BCSpec, K: int):
    """Squared moduli of the nonzero entries of V over |k| <= K, grouped by diagonal.

    Returns the index array and a list of (d, rows, c): entry (i, i - d) in
    index positions equals c[r] for row i = rows[r].  None means the Dir
    coefficients have unbounded support (dense fallback).
    """
    idx = _kvk_indices(bc, K)
    n = idx.size
    out = []
    if bc.kind == "dir":
        Vt = sine_v_coefficients(p, 2 * K)
        ts = np.flatnonzero(Vt)
        if ts.size > 4 * p.support + 8:
            return idx, None
        tmax = int(ts.max()) if ts.size else 0
        for d in range(-tmax, tmax + 1):
            i = np.arange(max(0, d), min(n, n + d))
            j, m = idx[i], idx[i - d]
            W = (Vt[np.abs(j - m)] - Vt[j + m]) / math.sqrt(2) + p.C * (d == 0)
            c = np.abs(W) ** 2
            keep = np.flatnonzero(c)
            if keep.size:
                last = keep[-1] + 1
                out.append((d, i[:last], c[:last]))
        return idx, out
    for s, val in v_coefficients(p).items():
        if val == 0:
            continue
        d = s // 2                                        # indices step by 2
        i = np.arange(max(0, d), min(n, n + d))
        out.append((d, i, np.full(i.size, abs(val) ** 2)))
    return idx, out


def _hs2_batch(p: PotentialFourier, bc: BCSpec, lams: np.ndarray, K: int, chunk: int = 64) -> np.ndarray:
    idx, diags = _diagonals(p, bc, K)
    res = np.zeros(lams.size)
    k2 = idx.astype(float) ** 2
    for start in range(0, lams.size, chunk):
        lam = lams[start:start + chunk]
        w = 1 / np.abs(lam[:, None] - k2[None, :])
        if diags is None:
            res[start:start + chunk] = [_dense_hs2(p, z, K) for z in lam]
            continue
        acc = np.zeros(lam.size)
        for d, rows, c in diags:
            acc += (w[:, rows] * w[:, rows - d]) @ c
        res[start:start + chunk] = acc
    return res


def _dense_hs2(p: PotentialFourier, lam: complex, K: int, chunk: int = 512) -> float:
    Vt = sine_v_coefficients(p, 2 * K)
    j = np.arange(1, K + 1)
    wj = 1 / np.abs(lam - j.astype(float) ** 2)
    total = 0.0
    for start in range(0, K, chunk):
        jj = j[start:start + chunk]
        W = (Vt[np.abs(jj[:, None] - j[None, :])] - Vt[jj[:, None] + j[None, :]]) / math.sqrt(2)
        W[np.arange(jj.size), jj - 1] += p.C
        total += float(np.sum((np.abs(W) ** 2) * wj[start:start + chunk, None] * wj[None, :]))
    return total


def kvk_hs_norms(p: PotentialFourier, bc: BCSpec, lams, K: int | None = None,
                 tol: float = 1e-10, K_max: int = 1 << 17) -> tuple[np.ndarray, int]:
    """Hilbert-Schmidt norms of the truncated K V K operator at many points.

    With ``K`` given, the truncation |k| <= K is used as is.  Otherwise K is
    doubled from a starting value above sqrt|lam| until no norm changes by
    ``tol`` or more.  Returns the norms and the final K.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    _kvk_indices(bc, 4)
    for z in lams:
        _check_regular(bc, z)
    if lams.size == 0:
        return np.zeros(0), K or 0
    if K is not None:
        return np.sqrt(_hs2_batch(p, bc, lams, K)), K
    K = 64
    while K < 2 * math.sqrt(float(np.max(np.abs(lams)))) + 2 * p.support:
        K *= 2
    val = np.sqrt(_hs2_batch(p, bc, lams, K))
    while 2 * K <= K_max:
        nxt = np.sqrt(_hs2_batch(p, bc, lams, 2 * K))
        K *= 2
        done = np.max(np.abs(nxt - val)) < tol
        val = nxt
        if done:
            break
    return val, K


def kvk_hs_norm(p: PotentialFourier, bc: BCSpec, lam: complex, K: int | None = None,
                tol: float = 1e-10, K_max: int = 1 << 17, return_K: bool = False):
    """Hilbert-Schmidt norm of the truncated K V K operator at one point.

    The norm is nondecreasing in K; without ``K`` it is reported at the
    first doubling where it moves by less than ``tol``.
    """
    vals, K = kvk_hs_norms(p, bc, [lam], K, tol, K_max)
    return (float(vals[0]), K) if return_K else float(vals[0])


def kvk_sup(p: PotentialFourier, bc: BCSpec, points, tol: float = 1e-10) -> tuple[float, complex]:
    """Largest HS norm over sample points, and where it is attained."""
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    vals, _ = kvk_hs_norms(p, bc, points, tol=tol)
    i = int(np.argmax(vals))
    return float(vals[i]), complex(points[i])


# ----------------------------------------------------------------------------
# eigenvalue counting


def disk_indices(bc: BCSpec, N: int, n_hi: int) -> list[int]:
    """Centres n > N of the disks used for ``bc``: even n (Per+), odd (Per-), all (Dir)."""
    if bc.kind == "per+":
        return [n for n in range(N + 1, n_hi + 1) if n % 2 == 0]
    if bc.kind == "per-":
        return [n for n in range(N + 1, n_hi + 1) if n % 2 == 1]
    return list(range(N + 1, n_hi + 1))


def _disk_capacity(bc: BCSpec) -> int:
    return 1 if bc.kind == "dir" else 2


def free_rect_count(bc: BCSpec, N: int) -> int:
    """Number of unperturbed eigenvalues k^2 (with multiplicity) inside R_N."""
    top = N * N + N
    if bc.kind == "dir":
        return sum(1 for k in range(1, N + 1) if k * k < top)
    ks = bc.indices(N + 1).astype(int)
    return int(sum(1 for k in ks if -N < k * k < top))


def formula_rect_count(bc: BCSpec, N: int) -> int:
    """Rectangle count as stated with the localization theorem: 2N+1, 2N, N+1."""
    return {"per+": 2 * N + 1, "per-": 2 * N, "dir": N + 1}[bc.kind]


def spectrum_count_for(bc: BCSpec, n_hi: int) -> int:
    """How many lowest eigenvalues cover every disk up to centre n_hi (plus margin)."""
    if bc.kind == "dir":
        return n_hi + 2
    return n_hi + 4


@dataclass
class LocalizationReport:
    N: int
    bc: str
    counts: dict
    kvk_norms: dict
    passed: bool
    notes: list = field(default_factory=list)
    escaped: list = field(default_factory=list)
    rect_count: int = 0
    free_rect_count: int = 0
    formula_rect_count: int = 0
    n_hi: int = 0
    radius_mode: str = "n/4"

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "bc": self.bc,
            "radius_mode": self.radius_mode,
            "disks_checked_up_to": self.n_hi,
            "counts": dict(self.counts),
            "rect_count": self.rect_count,
            "free_rect_count": self.free_rect_count,
            "formula_rect_count": self.formula_rect_count,
            "escaped": [complex(z) for z in self.escaped],
            "kvk_norms": dict(self.kvk_norms),
            "pass": self.passed,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def norms_csv(self) -> str:
        """Rows (n, kvk_norm, bound) for every disk sample stored in the report."""
        rows = []
        for key, val in sorted(self.kvk_norms.items()):
            if key.startswith("D_"):
                rows.append((int(key[2:]), float(val["norm"]), float(val["bound"])))
        rows.sort()
        return csv_text(["n", "kvk_norm", "bound"], rows)


def certify_localization(p: PotentialFourier, bc: BCSpec, N: int, spectrum: SpectrumReport,
                         n_hi: int | None = None, shrinking: bool = False,
                         kvk_norms: dict | None = None) -> LocalizationReport:
    """Assign eigenvalues to R_N or to a disk D_n (n > N) and check the counts.

    ``spectrum`` must contain every eigenvalue with real part below
    n_hi^2 + n_hi (default n_hi = 2N).  Eigenvalues further up are ignored.
    Passing means each disk up to n_hi holds exactly 2 (Per+-) or 1 (Dir)
    eigenvalues and none of the considered eigenvalues escapes.
    """
    if bc.kind == "theta":
        raise ValueError("localization is defined for per+, per- and dir")
    n_hi = 2 * N if n_hi is None else n_hi
    rect = Rect(N)
    disks = [Disk(n, shrinking_radius(n) if shrinking else None) for n in disk_indices(bc, N, n_hi)]
    cap = _disk_capacity(bc)
    ceiling = n_hi * n_hi + n_hi
    vals = [complex(z) for z in spectrum.eigenvalues if complex(z).real < ceiling]
    counts = {rect.label: 0}
    counts.update({d.label: 0 for d in disks})
    escaped = []
    for z in vals:
        homes = [d for d in disks if d.contains(z)]
        if rect.contains(z):
            counts[rect.label] += 1
        elif len(homes) == 1:
            counts[homes[0].label] += 1
        else:
            escaped.append(z)
    notes = []
    top = float(np.max(np.real(spectrum.eigenvalues))) if len(spectrum.eigenvalues) else -math.inf
    if top < n_hi ** 2:
        notes.append(f"spectrum ends at Re = {top:.6g}, below the last disk centre {n_hi}^2; "
                     "counts of the upper disks are incomplete")
    bad = {d.label: counts[d.label] for d in disks if counts[d.label] != cap}
    if bad:
        notes.append(f"disks without exactly {cap} eigenvalue(s): {bad}")
    if escaped:
        notes.append(f"{len(escaped)} eigenvalue(s) outside {rect.label} and the disks")
    free = free_rect_count(bc, N)
    formula = formula_rect_count(bc, N)
    if counts[rect.label] != formula:
        notes.append(f"{rect.label} holds {counts[rect.label]} eigenvalues (free operator: {free}); "
                     f"the closed-form count 2N+1 / 2N / N+1 gives {formula}")
    if shrinking and not disks_pairwise_disjoint(n_hi, shrinking_radius):
        notes.append("shrinking disks overlap; assignment may not be unique")
    passed = not bad and not escaped and (top >= n_hi ** 2)
    return LocalizationReport(
        N=N, bc=bc.label, counts=counts, kvk_norms=dict(kvk_norms or {}), passed=passed,
        notes=notes, escaped=escaped, rect_count=counts[rect.label], free_rect_count=free,
        formula_rect_count=formula, n_hi=n_hi, radius_mode="n^(3/4)" if shrinking else "n/4",
    )


# ----------------------------------------------------------------------------
# thresholds


def disk_norm_bound(p: PotentialFourier, bc: BCSpec, n: int) -> float:
    """Scale-free form E_sqrt(n)(q) + ||q||/sqrt(n) of the disk estimate (q~ for Dir)."""
    if bc.kind == "dir":
        M = max(4 * n, 2 * p.support + 2)
        qt = np.abs(sine_v_coefficients(p, M)[1:] / np.arange(1, M + 1))
        m = np.arange(1, M + 1)
        total = math.sqrt(float(np.sum(qt ** 2)))
        tail = math.sqrt(float(np.sum(qt[m >= math.sqrt(n)] ** 2)))
    else:
        total = math.sqrt(float(np.sum(np.abs(p.qs) ** 2)))
        tail = math.sqrt(float(np.sum(np.abs(p.qs[np.abs(p.ks) >= math.sqrt(n)]) ** 2)))
    return tail + total / math.sqrt(n)


def disk_norms(p: PotentialFourier, bc: BCSpec, ns, samples: int = 8,
               tol: float = 1e-10) -> dict[int, float]:
    """For each n: max HS norm over ``samples`` points of the circle |lam - n^2| = n/4
    and the real point midway to the next disk."""
    ns = [int(n) for n in ns]
    if not ns:
        return {}
    pts = np.concatenate([np.append(Disk(n).boundary(samples), _between_disks(bc, n)) for n in ns])
    vals, _ = kvk_hs_norms(p, bc, pts, tol=tol)
    vals = vals.reshape(len(ns), samples + 1)
    return {n: float(v.max()) for n, v in zip(ns, vals)}


def disk_boundary_norm(p: PotentialFourier, bc: BCSpec, n: int, samples: int = 8) -> float:
    """max HS norm over the boundary of D_n (samples on the circle |lam - n^2| = n/4)."""
    return kvk_sup(p, bc, Disk(n).boundary(samples))[0]


def _between_disks(bc: BCSpec, n: int) -> complex:
    step = 1 if bc.kind == "dir" else 2
    m = n + step
    return complex((n * n + n / 4 + m * m - m / 4) / 2)


@dataclass(frozen=True)
class Threshold:
    N: int
    rect_norm: float
    disk_norm: float
    n_hi: int
    norms: dict


# only the comparison with 1 matters here, so a looser stabilization suffices
THRESHOLD_TOL = 1e-6


def localization_threshold(p: PotentialFourier, bc: BCSpec, N_max: int = 64,
                           disk_samples: int = 8, rect_samples: int = 48,
                           tol: float = THRESHOLD_TOL) -> Threshold:
    """Smallest N (parity-matched for Per+-) with HS norm < 1 on the sampled
    boundary of R_N inside H^N, on the disk boundaries D_n with N < n <= 2 N_max,
    and midway between consecutive disks.

    Raises ValueError when no N <= N_max qualifies.
    """
    n_hi = 2 * N_max
    disk_vals = disk_norms(p, bc, disk_indices(bc, 0, n_hi), disk_samples, tol)
    parity = {"per+": 0, "per-": 1}.get(bc.kind)
    for N in range(1, N_max + 1):
        if parity is not None and N % 2 != parity:
            continue
        tail = [v for n, v in disk_vals.items() if n > N]
        disk_sup = max(tail) if tail else 0.0
        if disk_sup >= 1:
            continue
        rect_sup, _ = kvk_sup(p, bc, Rect(N).boundary(rect_samples), tol)
        if rect_sup < 1:
            norms = {f"D_{n}": {"norm": v, "bound": disk_norm_bound(p, bc, n)}
                     for n, v in disk_vals.items() if n > N}
            norms[f"R_{N}"] = {"norm": rect_sup, "bound": float("nan")}
            return Threshold(N, rect_sup, disk_sup, n_hi, norms)
    raise ValueError(f"no N <= {N_max} brings the K V K norm below 1 for {bc.label}")


def localize(p: PotentialFourier, bc: BCSpec, N: int | None = None, N_max: int = 64,
             tol: float = 1e-9, shrinking: bool = False, n_hi: int | None = None) -> LocalizationReport:
    """Threshold search (unless N is given), converged spectrum and certification
    of the disks up to centre ``n_hi`` (default 2N)."""
    notes = []
    if N is None:
        th = localization_threshold(p, bc, N_max)
        N, norms = th.N, th.norms
        notes.append(f"N = {N}: sup K V K norm {th.rect_norm:.4g} on the rectangle boundary, "
                     f"{th.disk_norm:.4g} on disks up to n = {th.n_hi}")
    else:
        rect_sup, _ = kvk_sup(p, bc, Rect(N).boundary(), THRESHOLD_TOL)
        norms = {f"D_{n}": {"norm": v, "bound": disk_norm_bound(p, bc, n)}
                 for n, v in disk_norms(p, bc, disk_indices(bc, N, 2 * N), tol=THRESHOLD_TOL).items()}
        norms[f"R_{N}"] = {"norm": rect_sup, "bound": float("nan")}
        worst = max(v["norm"] for v in norms.values())
        if worst >= 1:
            notes.append(f"K V K norm reaches {worst:.4g} >= 1 on the sampled boundaries; "
                         "localization is not guaranteed for this N")
    n_hi = 2 * N if n_hi is None else max(n_hi, N + 2)
    spec = converged_spectrum(p, bc, spectrum_count_for(bc, n_hi), tol=tol)
    rep = certify_localization(p, bc, N, spec, n_hi=n_hi, shrinking=shrinking, kvk_norms=norms)
    rep.notes = notes + rep.notes
    return rep

"""Truncated Fourier (Galerkin) matrices for L_Per+, L_Per-, L_Dir and L_theta.

Per+/Per-/theta use the exponentials exp(ikx), k in 2Z + theta/pi; Dir uses
sqrt(2) sin(kx), k >= 1.  In these bases the operator is k^2 + C on the
diagonal plus the potential coupling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CutoffTooSmall, EigensolverFailure, NotConverged
from .potential import PotentialFourier, sine_v_coefficients, v_coefficients
from .reports import SpectrumReport, eigenvalue_labels

K_MAX = 4096
K_MIN = 2


@dataclass(frozen=True)
class BCSpec:
    kind: str
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("per+", "per-", "dir", "theta"):
            raise ValueError(f"unknown boundary condition {self.kind!r}")
        if self.kind == "theta" and not 0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")

    @classmethod
    def parse(cls, text: str) -> "BCSpec":
        text = text.strip().lower()
        if text.startswith("theta="):
            return cls.theta_bc(float(text.split("=", 1)[1]))
        aliases = {"per+": "per+", "perplus": "per+", "per-": "per-", "perminus": "per-",
                   "dir": "dir", "dirichlet": "dir"}
        if text not in aliases:
            raise ValueError(f"unknown boundary condition {text!r}")
        return cls(aliases[text])

    @classmethod
    def theta_bc(cls, theta: float) -> "BCSpec":
        return cls("theta", float(theta))

    @property
    def label(self) -> str:
        return f"theta={self.theta!r}" if self.kind == "theta" else self.kind

    @property
    def shift(self) -> float:
        """Offset of the exponential index set from 2Z."""
        return {"per+": 0.0, "per-": 1.0, "theta": self.theta / math.pi}.get(self.kind, 0.0)

    def indices(self, K: int) -> np.ndarray:
        if self.kind == "dir":
            return np.arange(1, K + 1, dtype=float)
        if self.kind == "per+":
            return np.arange(-K + (K % 2), K + 1, 2, dtype=float)
        if self.kind == "per-":
            top = K if K % 2 else K - 1
            return np.arange(-top, top + 1, 2, dtype=float)
        s = self.shift
        j = np.arange(-(K // 2) - 1, K // 2 + 2)
        k = 2 * j + s
        return k[np.abs(k) <= K].astype(float)

    @property
    def eigen_multiplicity(self) -> int:
        """Unperturbed multiplicity of each level n^2 (2 for Per+-, 1 otherwise)."""
        return 2 if self.kind in ("per+", "per-") else 1


PER_PLUS = BCSpec("per+")
PER_MINUS = BCSpec("per-")
DIR = BCSpec("dir")


@dataclass(frozen=True)
class TruncatedOperator:
    bc: BCSpec
    K: int
    indices: np.ndarray
    A: np.ndarray
    is_real: bool


def _exp_coupling(p: PotentialFourier, idx: np.ndarray) -> np.ndarray:
    # V(k - m) off the diagonal; V(0) = C is carried by the diagonal term
    V = v_coefficients(p)
    diff = np.rint(idx[:, None] - idx[None, :]).astype(int)
    out = np.zeros(diff.shape, dtype=complex)
    for m, val in V.items():
        if m:
            out[diff == m] = val
    return out


def build_matrix(p: PotentialFourier, bc: BCSpec, K: int) -> TruncatedOperator:
    """Dense truncation of the operator over the basis indices |k| <= K."""
    if K < K_MIN:
        raise CutoffTooSmall(f"cutoff K={K} is below the minimum {K_MIN}")
    idx = bc.indices(K)
    if bc.kind == "dir":
        Vt = sine_v_coefficients(p, 2 * K)
        k = idx.astype(int)
        A = (Vt[np.abs(k[:, None] - k[None, :])] - Vt[k[:, None] + k[None, :]]) / math.sqrt(2)
    else:
        A = _exp_coupling(p, idx)
    A = A + np.diag(idx ** 2 + p.C)
    return TruncatedOperator(bc, K, idx, A, p.is_real)


def sort_spectrum(vals) -> np.ndarray:
    vals = np.asarray(vals, dtype=complex)
    return vals[np.lexsort((vals.imag, vals.real))]


def eigenvalues(op: TruncatedOperator) -> np.ndarray:
    """All eigenvalues of the truncated matrix, sorted by (Re, Im)."""
    try:
        if op.is_real:
            vals = scipy.linalg.eigvalsh(op.A).astype(complex)
        else:
            vals = scipy.linalg.eigvals(op.A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(f"eigensolver failed for {op.bc.label}, K={op.K}: {exc}") from None
    if not np.all(np.isfinite(vals)):
        raise EigensolverFailure(f"non-finite eigenvalues for {op.bc.label}, K={op.K}")
    return sort_spectrum(vals)


def hausdorff(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def converged_spectrum(p: PotentialFourier, bc: BCSpec, n_max: int, tol: float = 1e-10,
                       K0: int | None = None, K_max: int = K_MAX) -> SpectrumReport:
    """Lowest ``n_max`` eigenvalues, doubling K until they move by less than ``tol``.

    The movement between K and 2K is measured by the Hausdorff distance of the
    two eigenvalue sets; per-eigenvalue residuals are the distance to the
    nearest eigenvalue of the coarser truncation.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    K = K0 or max(32, 4 * n_max)
    prev = eigenvalues(build_matrix(p, bc, K))[:n_max]
    history = []
    while True:
        K2 = 2 * K
        if K2 > K_max:
            raise NotConverged(f"{bc.label}: lowest {n_max} eigenvalues still move by "
                               f"{history[-1] if history else float('nan'):.3g} at K={K}",
                               K=K, movement=history[-1] if history else None)
        cur = eigenvalues(build_matrix(p, bc, K2))[:n_max]
        move = hausdorff(prev, cur)
        history.append(move)
        K = K2
        if move < tol:
            res = np.abs(cur[:, None] - prev[None, :]).min(axis=1)
            return SpectrumReport(
                bc=bc.label, engine="fourier", eigenvalues=cur, residuals=res, K=K, tol=tol,
                labels=eigenvalue_labels(bc.kind, len(cur)),
                notes=[f"Hausdorff movement per doubling: {', '.join(f'{m:.3e}' for m in history)}"],
            )
        prev = cur

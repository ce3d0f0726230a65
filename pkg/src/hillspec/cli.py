"""Command-line front end.

    hillspec spectrum   both engines plus an agreement column
    hillspec monodromy  Delta(lambda) over a real lambda grid
    hillspec localize   disk/rectangle certification
    hillspec gaps       gap table and decay fit
    hillspec validate   property suites; exit 1 on any failure

Exit codes: 0 ok, 1 validation failure, 2 bad input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np
import scipy

from . import __version__, asymptotics, floquet, localization
from .errors import HillSpecError, InputError, InsufficientData, NumericalError
from .fourier_ops import DIR, PER_MINUS, PER_PLUS, BCSpec, build_matrix, converged_spectrum
from .potential import (PotentialFourier, load_potential, mathieu, potential_to_dict,
                        truncated_sawtooth, zero_potential)
from .reports import csv_text, dumps, eigenvalue_labels

COMMANDS = ("spectrum", "monodromy", "localize", "gaps", "validate")
TOL_RANGE = (1e-14, 1e-3)
AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    command: str
    potential: str | None = None
    bc: str = "per+"
    n_max: int = 10
    N: int | None = None
    K: int | None = None
    tol: float = 1e-10
    out: str | None = None
    format: str = "json"
    lam_min: float = -10.0
    lam_max: float = 100.0
    lam_count: int = 111

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if not TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]:
            raise InputError(f"--tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
        if self.n_max < 1:
            raise InputError("--n-max must be >= 1")
        if self.N is not None and self.N < 1:
            raise InputError("--N must be >= 1")
        if self.K is not None and self.K < 2:
            raise InputError("--K must be >= 2")
        if self.lam_count < 1 or not self.lam_min <= self.lam_max:
            raise InputError("lambda grid needs --lam-count >= 1 and --lam-min <= --lam-max")
        if self.format not in ("json", "csv"):
            raise InputError(f"unknown format {self.format!r}")

    def boundary(self) -> BCSpec:
        try:
            return BCSpec.parse(self.bc)
        except ValueError as exc:
            raise InputError(str(exc)) from None


class ValidationFailed(Exception):
    pass


def _provenance(cfg: RunConfig) -> dict:
    return {
        "hillspec": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "command": cfg.command,
        "tol": cfg.tol,
        "K_override": cfg.K,
    }


def _load(cfg: RunConfig) -> PotentialFourier:
    if cfg.potential is None:
        raise InputError(f"{cfg.command} needs --potential")
    try:
        return load_potential(cfg.potential)
    except OSError as exc:
        raise InputError(f"cannot read {cfg.potential}: {exc.strerror}") from None


def _count(bc: BCSpec, n_max: int) -> int:
    return {"per+": 2 * n_max + 1, "per-": 2 * n_max, "dir": n_max}.get(bc.kind, 2 * n_max + 1)


# ----------------------------------------------------------------------------
# spectrum


def _fourier_spectrum(p, bc, count, tol, K=None):
    if K is None:
        return converged_spectrum(p, bc, count, tol=tol)
    from .fourier_ops import eigenvalues
    from .reports import SpectrumReport

    vals = eigenvalues(build_matrix(p, bc, K))[:count]
    notes = [f"fixed truncation K={K}"]
    if count > K / 4:
        notes.append(f"{count} eigenvalues requested from K={K}; values above index K/4 "
                     "may carry truncation error")
    return SpectrumReport(bc.label, "fourier", vals, np.full(len(vals), np.nan), K, tol,
                          eigenvalue_labels(bc.kind, len(vals)), notes)


def floquet_spectrum(p: PotentialFourier, bc: BCSpec, count: int, seeds) -> np.ndarray:
    """Floquet eigenvalues matching ``count`` Galerkin seeds.

    Real potentials with Per+-/Dir scan the real line; otherwise the seeds
    are polished as roots of Delta = 2 cos theta or y2(pi) = 0.
    """
    if p.is_real and bc.kind != "theta":
        vals = floquet.lowest_eigenvalues(p, bc.kind, count)
    else:
        seeds = np.asarray(seeds, dtype=complex)
        pad = 1.0 + 0.1 * np.max(np.abs(seeds))
        lo = complex(seeds.real.min() - pad, seeds.imag.min() - pad)
        hi = complex(seeds.real.max() + pad, seeds.imag.max() + pad)
        if bc.kind == "dir":
            vals = floquet.dirichlet_eigenvalues(p, (lo, hi), seeds=list(seeds))
        else:
            theta = {"per+": 0.0, "per-": math.pi}.get(bc.kind, bc.theta)
            vals = floquet.theta_eigenvalues(p, theta, (lo, hi), seeds=list(seeds))
    vals = np.asarray(vals, dtype=complex)
    return vals[np.lexsort((vals.imag, vals.real))][:count]


def run_spectrum(cfg: RunConfig, p: PotentialFourier):
    bc = cfg.boundary()
    count = _count(bc, cfg.n_max)
    four = _fourier_spectrum(p, bc, count, cfg.tol, cfg.K)
    flo = floquet_spectrum(p, bc, count, four.eigenvalues)
    if len(flo) != len(four.eigenvalues):
        raise NumericalError(f"Floquet engine found {len(flo)} of {count} eigenvalues")
    agree = np.abs(flo - four.eigenvalues)
    labels = eigenvalue_labels(bc.kind, count)
    rows = [
        {"label": lab, "fourier": complex(a), "floquet": complex(b), "agreement": float(d),
         "fourier_residual": float(r)}
        for lab, a, b, d, r in zip(labels, four.eigenvalues, flo, agree, four.residuals)
    ]
    report = {
        "provenance": _provenance(cfg),
        "potential": potential_to_dict(p),
        "bc": bc.label,
        "count": count,
        "fourier": {"K": four.K, "tol": four.tol, "notes": four.notes},
        "floquet": {"root_tol": floquet.ROOT_TOL, "integration_tol": floquet.SEARCH_TOL},
        "eigenvalues": rows,
        "max_agreement": float(agree.max()),
    }
    header = ["label", "re_fourier", "im_fourier", "re_floquet", "im_floquet", "agreement"]
    table = [(r["label"], r["fourier"].real, r["fourier"].imag, r["floquet"].real, r["floquet"].imag,
              r["agreement"]) for r in rows]
    return report, csv_text(header, table)


# ----------------------------------------------------------------------------
# monodromy / localize / gaps


def run_monodromy(cfg: RunConfig, p: PotentialFourier):
    lams = np.linspace(cfg.lam_min, cfg.lam_max, cfg.lam_count)
    sols = floquet.monodromy(p, lams, cfg.tol)
    rows = [(float(s.lam.real), float(s.delta.real), float(s.delta.imag), float(s.wronskian_defect))
            for s in sols]
    report = {
        "provenance": _provenance(cfg),
        "potential": potential_to_dict(p),
        "samples": [{"lambda": r[0], "Delta": complex(r[1], r[2]), "det_defect": r[3]} for r in rows],
    }
    return report, csv_text(["lambda", "re_Delta", "im_Delta", "det_defect"], rows)


def run_localize(cfg: RunConfig, p: PotentialFourier):
    bc = cfg.boundary()
    if bc.kind == "theta":
        raise InputError("localize supports per+, per- and dir")
    rep = localization.localize(p, bc, N=cfg.N, tol=max(cfg.tol, 1e-9))
    report = {"provenance": _provenance(cfg), "potential": potential_to_dict(p), **rep.to_dict()}
    return report, rep.norms_csv()


def run_gaps(cfg: RunConfig, p: PotentialFourier):
    table = asymptotics.gap_table(p, cfg.n_max, tol=cfg.tol)
    try:
        profile = asymptotics.decay_profile(table)
    except InsufficientData as exc:
        profile = None
        table.notes.append(f"no decay fit: {exc}")
    report = {
        "provenance": _provenance(cfg),
        "potential": potential_to_dict(p),
        "gap_table": table.to_dict(),
        "decay_profile": None if profile is None else profile.to_dict(),
    }
    return report, table.to_csv()


# ----------------------------------------------------------------------------
# validate


def test_potentials() -> dict[str, PotentialFourier]:
    return {"zero": zero_potential(), "mathieu": mathieu(), "sawtooth": truncated_sawtooth()}


def _check(name, value, threshold, passed, **extra):
    return {"check": name, "value": value, "threshold": threshold, "pass": bool(passed), **extra}


def suite_lemma_sums() -> list[dict]:
    worst1 = worst2 = 0.0
    for n in range(1, 1001):
        s = localization.harmonic_sums(n)
        worst1 = max(worst1, s.S1 / s.bound1)
        worst2 = max(worst2, s.S2 / s.bound2)
    s1 = localization.harmonic_sums(1, exact=True).S1_exact
    c1, c2 = localization.shifted_sums_constant(range(0, 51), range(2, 1025, 2))
    return [
        _check("S1 / (2 log(6n) / n), n <= 1000", worst1, 1.0, worst1 < 1),
        _check("S2 / (4 / n^2), n <= 1000", worst2, 1.0, worst2 < 1),
        _check("S1(1) exact", str(s1), "5/2", str(s1) == "5/2"),
        _check("T1 constant over n <= 50, even b <= 1024", c1, 100.0, c1 <= 100),
        _check("T2 constant over n <= 50, even b <= 1024", c2, 100.0, c2 <= 100),
    ]


def suite_wronskian(pots) -> list[dict]:
    lams = np.linspace(-10.0, 400.0, 200)
    out = []
    for name, p in pots.items():
        sols = floquet.monodromy(p, lams, 1e-10, method="magnus", extended=True)
        worst = max(s.wronskian_defect for s in sols)
        out.append(_check(f"{name}: max |det M - 1| on [-10, 400]", worst, 1e-9, worst < 1e-9))
    return out


def suite_hermiticity(pots) -> list[dict]:
    out = []
    for name, p in pots.items():
        for bc in (PER_PLUS, PER_MINUS, DIR):
            A = build_matrix(p, bc, 64).A
            if p.is_real:
                err = float(np.max(np.abs(A - A.conj().T)))
                out.append(_check(f"{name} {bc.label}: max |A - A^H|", err, 1e-14, err <= 1e-14))
            else:
                out.append(_check(f"{name} {bc.label}: Hermiticity", None, None, True,
                                  note="complex potential, operator is not self-adjoint"))
    return out


def suite_cross_engine(pots, count: int = 10) -> list[dict]:
    out = []
    for name, p in pots.items():
        for bc in (PER_PLUS, PER_MINUS, DIR):
            four = converged_spectrum(p, bc, count, tol=1e-10).eigenvalues
            flo = floquet_spectrum(p, bc, count, four)
            gate = np.maximum(AGREEMENT_TOL, 1e-8 * np.abs(four))
            diff = np.abs(flo - four)
            out.append(_check(f"{name} {bc.label}: lowest {count}, max |floquet - fourier| / gate",
                              float(np.max(diff / gate)), 1.0, bool(np.all(diff <= gate))))
    return out


def suite_interlacing(pots, n_max: int = 10) -> list[dict]:
    out = []
    for name, p in pots.items():
        if not p.is_real:
            out.append(_check(f"{name}: interlacing", None, None, True, note="complex potential"))
            continue
        bad = asymptotics.gap_table(p, n_max).check_interlacing(1e-9)
        out.append(_check(f"{name}: interlacing for n <= {n_max}", len(bad), 0, not bad, violations=bad))
    return out


def suite_localization(pots) -> list[dict]:
    out = []
    for name, p in pots.items():
        for bc in (PER_PLUS, PER_MINUS, DIR):
            rep = localization.localize(p, bc)
            out.append(_check(f"{name} {bc.label}: localization", rep.N, None, rep.passed,
                              counts=rep.counts, notes=rep.notes))
    return out


SUITES = ("lemma_sums", "wronskian", "hermiticity", "cross_engine", "interlacing", "localization")


def run_validate(cfg: RunConfig, p: PotentialFourier | None):
    pots = test_potentials() if p is None else {"file": p}
    results = {
        "lemma_sums": suite_lemma_sums(),
        "wronskian": suite_wronskian(pots),
        "hermiticity": suite_hermiticity(pots),
        "cross_engine": suite_cross_engine(pots),
        "interlacing": suite_interlacing(pots),
        "localization": suite_localization(pots),
    }
    suites = {k: {"pass": all(c["pass"] for c in v), "checks": v} for k, v in results.items()}
    report = {
        "provenance": _provenance(cfg),
        "potentials": {k: potential_to_dict(v) for k, v in pots.items()},
        "suites": suites,
        "pass": all(s["pass"] for s in suites.values()),
    }
    rows = [(suite, c["check"], "" if c["value"] is None else c["value"],
             "" if c["threshold"] is None else c["threshold"], c["pass"])
            for suite, v in results.items() for c in v]
    return report, csv_text(["suite", "check", "value", "threshold", "pass"], rows)


# ----------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="potential JSON file (C_re, C_im, coeffs)")
    common.add_argument("--bc", default="per+", help="per+, per-, dir or theta=<value in [0, pi]>")
    common.add_argument("--n-max", type=int, default=10, dest="n_max",
                        help="number of levels (per+: 2n+1 eigenvalues, per-: 2n, dir: n)")
    common.add_argument("--N", type=int, default=None, help="rectangle index for localize")
    common.add_argument("--K", type=int, default=None, help="fixed Galerkin cutoff")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--lam-min", type=float, default=-10.0, dest="lam_min")
    common.add_argument("--lam-max", type=float, default=100.0, dest="lam_max")
    common.add_argument("--lam-count", type=int, default=111, dest="lam_count")

    parser = argparse.ArgumentParser(prog="hillspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hillspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


RUNNERS = {
    "spectrum": run_spectrum,
    "monodromy": run_monodromy,
    "localize": run_localize,
    "gaps": run_gaps,
    "validate": run_validate,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, report text)."""
    if cfg.command == "validate":
        p = None if cfg.potential is None else _load(cfg)
        report, table = run_validate(cfg, p)
        status = 0 if report["pass"] else 1
    else:
        report, table = RUNNERS[cfg.command](cfg, _load(cfg))
        status = 0
        if cfg.command == "localize" and not report["pass"]:
            status = 1
    return status, dumps(report) if cfg.format == "json" else table


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(**vars(args))
        status, text = run(cfg)
    except InputError as exc:
        print(f"hillspec {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"hillspec {args.command}: numerical failure in {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3
    except HillSpecError as exc:  # pragma: no cover - every subclass is one of the two above
        print(f"hillspec {args.command}: {exc}", file=sys.stderr)
        return 3
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status

"""Acceptance criteria 1-11, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated in the
terminal summary.
"""
import math
import time

import numpy as np
import pytest

from hillspec import asymptotics as asy
from hillspec import cli, floquet
from hillspec import localization as loc
from hillspec.fourier_ops import DIR, PER_MINUS, PER_PLUS, converged_spectrum
from hillspec.potential import mathieu, truncated_sawtooth, zero_potential

BCS = (PER_PLUS, PER_MINUS, DIR)
POTENTIALS = {"zero": zero_potential(), "mathieu": mathieu(), "sawtooth": truncated_sawtooth()}
NONZERO = {k: v for k, v in POTENTIALS.items() if k != "zero"}
FREE = {
    "per+": [0.0] + [float(k * k) for k in range(2, 12, 2) for _ in range(2)],
    "per-": [float(k * k) for k in range(1, 11, 2) for _ in range(2)],
    "dir": [float(k * k) for k in range(1, 11)],
}


def _gap_rows(lists):
    rows = []
    for n in range(1, 11):
        src = lists["per+" if n % 2 == 0 else "per-"]
        rows.append(asy.GapRow(n, complex(src[n - 1]), complex(src[n]), complex(lists["dir"][n - 1])))
    return rows


def test_criterion_01_free_operator_exact(criterion):
    p = POTENTIALS["zero"]
    t0 = time.perf_counter()
    # per+ needs an 11th value for the n = 10 pair
    counts = {"per+": 11, "per-": 10, "dir": 10}
    engines = {
        "fourier": {bc.kind: converged_spectrum(p, bc, counts[bc.kind]).eigenvalues for bc in BCS},
        "floquet": {bc.kind: np.array(floquet.lowest_eigenvalues(p, bc.kind, counts[bc.kind])) for bc in BCS},
    }
    elapsed = time.perf_counter() - t0
    err = max(np.max(np.abs(lists[k][:10] - FREE[k][:10])) for lists in engines.values() for k in FREE)
    gap = max(max(abs(r.gamma), abs(r.dev)) for lists in engines.values() for r in _gap_rows(lists))
    ok = err < 1e-10 and gap < 1e-10 and elapsed < 5
    criterion(1, ok, f"max |lambda - n^2| = {err:.2e}, max |gamma|,|dev| = {gap:.2e} (< 1e-10), "
                     f"runtime {elapsed:.2f} s (< 5 s)")
    assert ok


def test_criterion_02_cross_engine(criterion):
    t0 = time.perf_counter()
    worst, detail = 0.0, []
    for name, p in NONZERO.items():
        for bc in BCS:
            four = converged_spectrum(p, bc, 10).eigenvalues
            flo = np.sort(np.real(floquet.lowest_eigenvalues(p, bc.kind, 10)))
            assert len(flo) == len(four) == 10
            ratio = np.max(np.abs(flo - four) / np.maximum(1e-6, 1e-8 * np.abs(four)))
            worst = max(worst, ratio)
            detail.append(f"{name}/{bc.kind} {np.max(np.abs(flo - four)):.1e}")
    elapsed = time.perf_counter() - t0
    ok = worst <= 1 and elapsed < 60
    criterion(2, ok, f"max diff / max(1e-6, 1e-8|lambda|) = {worst:.3f} [{', '.join(detail)}], "
                     f"runtime {elapsed:.1f} s (< 60 s)")
    assert ok


def test_criterion_03_wronskian(criterion):
    lams = np.linspace(-10.0, 400.0, 200)
    worst = {name: max(s.wronskian_defect for s in
                       floquet.monodromy(p, lams, 1e-10, method="magnus", extended=True))
             for name, p in POTENTIALS.items()}
    ok = max(worst.values()) < 1e-9
    criterion(3, ok, "max |det M - 1| on 200 points of [-10, 400]: "
                     + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (< 1e-9)")
    assert ok


def test_criterion_04_discriminant_asymptotics(criterion):
    ns = (10, 20, 40, 80)
    parts, ok = [], True
    for name, p in POTENTIALS.items():
        sups = []
        for n in ns:
            z = loc.Disk(n).boundary(16)
            sups.append(float(np.max(np.abs(floquet.lyapunov(p, z, 1e-10) - floquet.free_discriminant(z)))))
        if name == "zero":
            # Delta is exactly 2 cos(pi sqrt(lambda)); only integration error remains
            good = max(sups) < 1e-8
        else:
            good = all(b < a for a, b in zip(sups, sups[1:]))
        ok &= good
        parts.append(f"{name} [{', '.join(f'{s:.2e}' for s in sups)}]")
    criterion(4, ok, "sup |Delta - 2cos(pi sqrt(lambda))| on disk boundaries, n = 10, 20, 40, 80: "
                     + "; ".join(parts))
    assert ok


def test_criterion_05_harmonic_sums(criterion):
    t0 = time.perf_counter()
    sums = [loc.harmonic_sums(n, exact=(n == 1)) for n in range(1, 1001)]
    elapsed = time.perf_counter() - t0
    s1_ok = all(s.holds1 for s in sums)
    s2_ok = all(s.holds2 for s in sums)
    exact = sums[0].S1_exact
    ok = s1_ok and s2_ok and exact == 5 / 2 and str(exact) == "5/2" and elapsed < 1
    criterion(5, ok, f"S1 bound {s1_ok}, S2 bound {s2_ok} for n <= 1000; S1(1) = {exact}; "
                     f"runtime {elapsed:.3f} s (< 1 s)")
    assert ok


def test_criterion_06_shifted_sums(criterion):
    c1, c2 = loc.shifted_sums_constant(range(0, 51), range(2, 1025, 2))
    C = max(c1, c2)
    ok = C <= 100
    criterion(6, ok, f"constants over n <= 50, even b <= 1024: T1 {c1:.3f}, T2 {c2:.3f}; C = {C:.3f} (<= 100)")
    assert ok


@pytest.fixture(scope="module")
def thresholds():
    return {(name, bc.kind): loc.localization_threshold(p, bc) for name, p in NONZERO.items() for bc in BCS}


def test_criterion_07_kvk_decay(criterion, thresholds):
    ns = (16, 32, 64, 128)
    ok, parts = True, []
    for name, p in NONZERO.items():
        for bc in BCS:
            vals, _ = loc.kvk_hs_norms(p, bc, [n * n + n / 4 for n in ns])
            rect, _ = loc.kvk_sup(p, bc, loc.Rect(64).boundary(), tol=1e-10)
            good = bool(np.all(np.diff(vals) < 0) and vals[-1] < 1 and rect < 1)
            ok &= good
            parts.append(f"{name}/{bc.kind} n=128 {vals[-1]:.3f} R_64 {rect:.3f} "
                         f"N* {thresholds[(name, bc.kind)].N}")
    criterion(7, ok, "strictly decreasing at n^2 + n/4 and < 1: " + "; ".join(parts))
    assert ok


def test_criterion_08_localization(criterion, thresholds):
    ok, parts = True, []
    for name, p in NONZERO.items():
        for bc in BCS:
            N = thresholds[(name, bc.kind)].N
            rep = loc.localize(p, bc, N=N, n_hi=max(2 * N, 32))
            cap = 1 if bc.kind == "dir" else 2
            disks = {k: v for k, v in rep.counts.items() if k.startswith("D_")}
            good = rep.passed and not rep.escaped and set(disks.values()) == {cap}
            ok &= good
            parts.append(f"{name}/{bc.kind} N={N} disks={len(disks)} x{cap}")
    criterion(8, ok, "every eigenvalue in R_N or one disk, exact disk counts: " + "; ".join(parts))
    assert ok


def test_criterion_09_interlacing(criterion):
    ok, parts = True, []
    for name, p in POTENTIALS.items():
        bad = asy.gap_table(p, 10).check_interlacing(1e-9)
        try:
            floquet.band_edges(p, 10, interlace_tol=1e-9)
            flo_ok = True
        except Exception:
            flo_ok = False
        ok &= not bad and flo_ok
        parts.append(f"{name} galerkin {len(bad)} violations, floquet {'ok' if flo_ok else 'VIOLATED'}")
    criterion(9, ok, "lambda_0 < l1- <= l1+ < ... for n <= 10 within 1e-9: " + "; ".join(parts))
    assert ok


def test_criterion_10_decay_contrast(criterion):
    m = asy.gap_table(NONZERO["mathieu"], 10)
    s = asy.gap_table(NONZERO["sawtooth"], 20)
    drop = m.row(2).Delta / m.row(10).Delta
    D = s.column("Delta")
    ratio = D.max() / D.min()
    ok = drop >= 100 and ratio < 100
    criterion(10, ok, f"mathieu Delta_2/Delta_10 = {drop:.2e} (>= 100); "
                      f"sawtooth max/min Delta_n (n <= 20) = {ratio:.2f} (< 100)")
    assert ok


def test_criterion_11_determinism(criterion, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"validate{i}.json"
        status = cli.main(["validate", "--out", str(path)])
        outs.append((status, path.read_bytes()))
    same = outs[0][1] == outs[1][1]
    ok = same and outs[0][0] == 0
    criterion(11, ok, f"two validate runs: byte-identical {same}, exit status {outs[0][0]}, "
                      f"{len(outs[0][1])} bytes")
    assert ok

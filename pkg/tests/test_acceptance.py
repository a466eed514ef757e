"""Acceptance gate: eleven criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import CASES, L3, R3, REGULAR, same_value  # noqa: E402
from pencilsys import signals  # noqa: E402
from pencilsys.continuous import (  # noqa: E402
    build_system,
    consistency_check,
    residual_check,
    solve_continuous,
    solve_via_fundamental,
)
from pencilsys.discretize import SampleSequence, compare_with_continuous, discrete_simulate, discretize  # noqa: E402
from pencilsys.nabla import (  # noqa: E402
    FractionalSystem,
    correspondence_diagnostic,
    direct_coefficient,
    direct_iteration,
    fractional_residual,
    nabla_coefficients,
    solve_fractional_system,
    telescope_recursion,
)
from pencilsys.pencil import (  # noqa: E402
    Pencil,
    PencilClass,
    classify_pencil,
    elementary_divisors,
    spectral_structure,
    verify_decomposition,
    weierstrass_decompose,
)

ROOT = Path(__file__).resolve().parent.parent
RESULTS = {}


def _report(k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    return ok


def _smooth_input(r, seed):
    rng = np.random.default_rng(seed)
    return signals.sinusoid(rng.uniform(-1, 1, r), rng.uniform(-1, 1, r), 1.3) + \
        signals.exponential_sum(rng.uniform(-1, 1, (r, 1)), [-0.7])


def _consistent(sys_, V, seed):
    guess = np.random.default_rng(seed).normal(size=sys_.m)
    return consistency_check(sys_, guess, V, 0.0).projected_Y0


# -- 1 --------------------------------------------------------------------------

def check_1():
    start = time.perf_counter()
    problems = []
    worst = 0.0
    for case in CASES:
        exact = Pencil(case.F, case.G, exact=True)
        want = PencilClass.Regular if case.regular else PencilClass.Singular
        if classify_pencil(Pencil(case.F, case.G)) is not want or classify_pencil(exact) is not want:
            problems.append(f"{case.name}: class")
        if not case.regular:
            continue
        st_ = spectral_structure(exact)
        if (st_.p, st_.q) != (case.p, case.q) or len(st_.finite_eigenvalues) != len(case.eigenvalues) or not all(
                same_value(a, b) and k == kk for (a, k), (b, kk) in zip(st_.finite_eigenvalues, case.eigenvalues)):
            problems.append(f"{case.name}: spectrum")
        ed = elementary_divisors(exact)
        if ed.infinite != case.infinite or len(ed.finite) != len(case.finite_divisors) or not all(
                same_value(a, b) and k == kk for (a, k), (b, kk) in zip(ed.finite, case.finite_divisors)):
            problems.append(f"{case.name}: divisors")
        pencil = Pencil(case.F, case.G)
        dec = weierstrass_decompose(pencil)
        worst = max(worst, *verify_decomposition(dec, pencil))
    elapsed = time.perf_counter() - start
    ok = len(CASES) >= 12 and not problems and worst <= 1e-9 and elapsed < 5
    return _report(1, ok, f"{len(CASES)} pencils, mismatches={problems}, max residual={worst:.1e}, "
                          f"time={elapsed:.2f}s")


# -- 2, 3: continuous solutions over the regular corpus ----------------------------

def _corpus_systems():
    for i, case in enumerate(REGULAR):
        sys_ = build_system(case.F, case.G, np.eye(case.F.shape[0]))
        V = _smooth_input(sys_.m, i)
        yield case.name, sys_, V, _consistent(sys_, V, 100 + i)
    mixed = build_system([[1, 0], [0, 0]], [[-1, 0], [0, 1]], np.eye(2))
    yield "mixed_example", mixed, signals.constant([0.0, 1.0]), np.array([3.0, -1.0])


def check_2():
    worst, names = 0.0, []
    for name, sys_, V, Y0 in _corpus_systems():
        t = np.linspace(0, 2, 100)
        a = solve_continuous(sys_, Y0, V, t)
        b = solve_via_fundamental(sys_, Y0, V, t)
        worst = max(worst, float(np.max(np.abs(a.states - b.states))))
        names.append(name)
    return _report(2, worst <= 1e-8, f"{len(names)} systems x 100 points, max difference={worst:.1e}")


def check_3():
    # A residual already at roundoff (pure fast, or states linear in t) has
    # nothing left to shrink; it passes when it stays at that floor.
    floor = 1e-11
    bad, shrinking, at_floor = [], 0, 0
    for name, sys_, V, Y0 in _corpus_systems():
        res = []
        for n in (21, 41, 81, 161):
            traj = solve_continuous(sys_, Y0, V, np.linspace(0, 1, n))
            res.append(residual_check(sys_, traj, V))
        if max(res) <= floor:
            at_floor += 1
            continue
        ratios = [res[i] / res[i + 1] for i in range(3)]
        if min(ratios) >= 3.5:
            shrinking += 1
        else:
            bad.append((name, [round(r, 2) for r in ratios]))
    return _report(3, not bad, f"{shrinking} trajectories shrink >= 3.5x over 3 halvings, "
                               f"{at_floor} at roundoff floor, failures={bad}")


# -- 4 --------------------------------------------------------------------------

def check_4():
    sys_ = build_system([[1, 0], [0, 0]], [[-1, 0], [0, 1]], np.eye(2))
    V = signals.constant([0.0, 1.0])
    good = consistency_check(sys_, [3, -1], V, 0.0)
    bad = consistency_check(sys_, [3, 0], V, 0.0)
    ok = (good.consistent and not bad.consistent and abs(bad.defect - 1.0) <= 1e-12
          and np.allclose(bad.projected_Y0, [3, -1], atol=1e-12))
    return _report(4, ok, f"(3,-1) accepted={good.consistent}, (3,0) rejected={not bad.consistent}, "
                          f"defect={bad.defect!r}, projection={bad.projected_Y0.tolist()}")


# -- 5 --------------------------------------------------------------------------

def check_5():
    T, K = 0.1, 50
    rng = np.random.default_rng(5)
    systems = [
        build_system([[1]], [[-1]], [[1]]),
        build_system([[2, 1], [0, 1]], [[-1, 0.5], [0.25, -2]], [[1], [0.5]]),
        build_system(np.eye(2), [[0, 1], [-1, 0]], np.eye(2)),
        build_system(L3 @ np.eye(3) @ R3, L3 @ np.diag([-1.0, 0.5, -2]) @ R3, L3[:, :2]),
    ]
    worst = 0.0
    for sys_ in systems:
        vals = rng.uniform(-2, 2, size=(K, sys_.r))
        Y0 = rng.normal(size=sys_.m)
        disc = discrete_simulate(discretize(sys_, T), Y0, SampleSequence(0, vals), K)
        cont = solve_continuous(sys_, Y0, signals.ZOHSignal(vals, T), T * np.arange(K + 1))
        worst = max(worst, float(np.max(np.abs(disc.vectors - cont.states))))
    return _report(5, worst <= 1e-8, f"{len(systems)} slow systems, {K} steps, max error={worst:.1e}")


# -- 6 --------------------------------------------------------------------------

def check_6():
    F0 = np.array([[1.0, 0, 0], [0, 0, 1], [0, 0, 0]])
    G0 = np.diag([-0.5, 1.0, 1.0])
    sys_ = build_system(L3 @ F0 @ R3, L3 @ G0 @ R3, L3)
    V = signals.polynomial([[1, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1]])
    Y0 = _consistent(sys_, V, 6)
    errs = [compare_with_continuous(sys_, discretize(sys_, T), Y0, V, round(1.0 / T))[0]
            for T in (0.1, 0.05, 0.025)]
    orders = [math.log2(errs[0] / errs[1]), math.log2(errs[1] / errs[2])]
    ok = sys_.dec.p > 0 and sys_.dec.q > 0 and min(orders) >= 0.9 and errs[0] > errs[1] > errs[2]
    return _report(6, ok, f"p={sys_.dec.p}, q={sys_.dec.q}, errors={[f'{e:.3e}' for e in errs]}, "
                          f"orders={[round(o, 3) for o in orders]}")


# -- 7 --------------------------------------------------------------------------

def check_7():
    c = [float(x) for x in nabla_coefficients(0.5, 64).c]
    worst = 0.0
    for n in (0.1, 0.5, 0.9, 1.3, 1.7):
        cn = nabla_coefficients(n, 64).c
        d = np.array([direct_coefficient(n, j) for j in range(65)])
        worst = max(worst, float(np.max(np.abs(cn - d) / np.abs(d))))
    ok = c[0] == 1.0 and abs(c[1] + 0.5) <= 1e-12 and abs(c[2] + 0.125) <= 1e-12 and worst <= 1e-10
    return _report(7, ok, f"c0={c[0]!r}, c1={c[1]!r}, c2={c[2]!r}, recurrence vs Gamma rel={worst:.1e}")


# -- 8 --------------------------------------------------------------------------

def check_8():
    fsys = FractionalSystem([[1.0]], [[0.0]], 0.5)
    Y = solve_fractional_system(fsys, np.zeros((3, 1)), [1.0], 2)
    y1, y2 = float(Y[1][0]), float(Y[2][0])
    hand = abs(y1 - 0.5) <= 1e-12 and abs(y2 - 0.375) <= 1e-12
    rng = np.random.default_rng(8)
    K, worst = 50, 0.0
    cases = [
        ([[1.0]], [[0.0]], 0.5),
        ([[1.0, 0], [0, 0]], [[-1.0, 0.5], [0.2, 2.0]], 0.3),
        ([[1.0, 0], [0, 0]], [[-0.5, 0.0], [1.0, 1.0]], 1.4),
        (np.eye(3), np.diag([-0.2, -0.5, 0.3]), 0.7),
    ]
    for F, G, n in cases:
        fsys = FractionalSystem(F, G, n)
        m = fsys.m
        V = rng.uniform(-1, 1, size=(K + 1, m))
        Y = solve_fractional_system(fsys, V, rng.normal(size=m), K)
        worst = max(worst, fractional_residual(fsys, Y, V, K) / max(1.0, float(np.abs(Y.vectors).max())))
    return _report(8, hand and worst <= 1e-9,
                   f"Y1={y1!r}, Y2={y2!r}, max residual via direct nabla (K=50)={worst:.1e}")


# -- 9 --------------------------------------------------------------------------

def check_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 5))
        A = rng.normal(size=(m, m)) / math.sqrt(m)
        U = rng.normal(size=(10, m))
        Y0 = rng.normal(size=m)
        a = telescope_recursion(A, U, Y0, 10).vectors
        b = direct_iteration(A, U, Y0, 10).vectors
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(9, worst <= 1e-12, f"20 instances, K=10, max difference={worst:.1e}")


# -- 10 -------------------------------------------------------------------------

def check_10():
    T = 0.1
    lag1 = discretize(build_system([[1.0]], [[math.log(2) / T]], [[1.0]]), T)
    rep1 = correspondence_diagnostic(lag1, [[1.0]], 0.5, 6)
    generic_sys = build_system([[1, 0], [0, 0]], [[-1, 0], [0, 1]], np.eye(2))
    rep2 = correspondence_diagnostic(discretize(generic_sys, T), generic_sys.F, 0.5, 6)
    ok = (len(rep1.deltas) == 6 and rep1.deltas[0] <= 1e-12
          and max(rep2.deltas) > 0.01 and rep2.verdict == "none" and not rep2.corresponds)
    return _report(10, ok, f"lag-1 case delta_1={rep1.deltas[0]:.1e}; generic max delta={max(rep2.deltas):.3f}, "
                           f"verdict={rep2.verdict}")


# -- 11 -------------------------------------------------------------------------

def check_11():
    files = sorted((ROOT / "systems").glob("*.json"))
    differing = []
    for path in files:
        outs = []
        for _ in range(2):
            proc = subprocess.run([sys.executable, "-m", "pencilsys", "compare", str(path)],
                                  capture_output=True, env={**os.environ, "PYTHONHASHSEED": "random"})
            if proc.returncode != 0:
                differing.append(f"{path.name}: exit {proc.returncode}")
            outs.append(proc.stdout)
        if outs[0] != outs[1] or not outs[0]:
            differing.append(path.name)
    return _report(11, bool(files) and not differing, f"{len(files)} shipped files, non-identical={differing}")


CHECKS = {k: globals()[f"check_{k}"] for k in range(1, 12)}


@pytest.mark.parametrize("k", sorted(CHECKS))
def test_criterion(k):
    assert CHECKS[k](), RESULTS[k]


if __name__ == "__main__":
    results = [CHECKS[k]() for k in sorted(CHECKS)]
    sys.exit(0 if all(results) else 1)

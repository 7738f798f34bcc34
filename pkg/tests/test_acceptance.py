"""Acceptance criteria, one test each, at the stated tolerances and budgets."""

import math
import time

import numpy as np
import pytest

from isosing.dilatation import dilatations_at, ki_lq_norm
from isosing.gallery import FoldingParams, RingMapParams, make_folding_map, make_inversion, make_ring_map, make_standard
from isosing.geometry import AnnulusSpec
from isosing.integrals import annulus_condition_lhs, constant_field, constant_weight, fmo_estimate, log_weight, radial_field
from isosing.modulus import analytic_modulus, cap_family, check_poletskii, discrete_modulus, is_admissible, rho_a_density, ring_family
from isosing.singularity import classify, lemma1_chain, verify_prop3_envelope
from isosing.verify import verify_theorem5


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def ring_ki(r, alpha, n):
    return ((1 + r**alpha) / (alpha * r**alpha)) ** (n - 1)


def test_01_ring_map_ki_closed_form(criterion):
    rng = np.random.default_rng(20240601)
    worst_an = worst_fd = 0.0
    with Clock() as clk:
        for _ in range(100):
            n = int(rng.integers(2, 4))
            alpha = float(rng.uniform(0.05, 0.95))
            r = float(np.exp(rng.uniform(np.log(1e-2), np.log(0.9))))
            u = rng.normal(size=n)
            x = r * u / np.linalg.norm(u)
            f = make_ring_map(RingMapParams(alpha, n))
            expect = ring_ki(r, alpha, n)
            worst_an = max(worst_an, abs(dilatations_at(f, x, "analytic").K_I / expect - 1))
            worst_fd = max(worst_fd, abs(dilatations_at(f, x, "fd").K_I / expect - 1))
    ok = worst_an < 1e-6 and worst_fd < 1e-4 and clk.seconds < 1
    criterion("1 K_I closed form", ok, f"analytic {worst_an:.1e} fd {worst_fd:.1e} {clk.seconds:.2f}s")
    assert ok


def test_02_lq_threshold(criterion):
    wrong = []
    with Clock() as clk:
        for n in (2, 3):
            for q in (1, 2, 5):
                for scale, finite in ((0.5, True), (0.9, True), (1.1, False), (2.0, False)):
                    alpha = scale * n / ((n - 1) * q)
                    r_in = min(1e-3, 10.0 ** (-3.0 / alpha))
                    res = ki_lq_norm(make_ring_map(RingMapParams(alpha, n)), AnnulusSpec(np.zeros(n), r_in, 0.5), q)
                    if res.converged is not finite:
                        wrong.append((n, q, scale))
    ok = not wrong and clk.seconds < 30
    criterion("2 L^q threshold", ok, f"24 cases, misflagged {wrong} {clk.seconds:.2f}s")
    assert ok


MODULUS_CASES = {
    "ring n=2": lambda: ring_family(1.0, math.e),
    "ring n=3": lambda: ring_family(1.0, math.e, n=3),
    "cap n=2": lambda: cap_family([0.0, 0.0], 0.1, 0.1 * math.e),
    "cap n=3": lambda: cap_family([0.0, 0.0, 0.0], 0.1, 0.1 * math.e),
}


@pytest.mark.parametrize("case", MODULUS_CASES)
def test_03_modulus_bracket(case, criterion):
    fam = MODULUS_CASES[case]()
    exact = analytic_modulus(fam)
    with Clock() as clk:
        res = discrete_modulus(fam)
    lo, hi = res.lower_bound / exact - 1, res.upper_bound / exact - 1
    ok = abs(lo) <= 0.05 and abs(hi) <= 0.05 and res.lower_bound <= res.upper_bound and clk.seconds < 60
    criterion(f"3 modulus bracket {case}", ok,
              f"[{res.lower_bound:.5f}, {res.upper_bound:.5f}] vs {exact:.5f} {clk.seconds:.2f}s")
    assert ok


def test_04_rho_a_margins(criterion):
    worst = 0.0
    with Clock() as clk:
        for psi in (log_weight(), constant_weight(1.0)):
            for a, d, n in ((1e-6, 0.1, 2), (1e-3, 0.2, 3), (0.01, 0.3, 2)):
                fam = ring_family(a, d, n=n, shape=(8,) if n == 2 else (3, 6))
                rep = is_admissible(rho_a_density(psi, a, d, np.zeros(n)), fam)
                worst = max(worst, float(np.max(np.abs(rep.margins - 1))))
    ok = worst <= 1e-9 and clk.seconds < 1
    criterion("4 rho_a margins", ok, f"max |margin - 1| {worst:.1e} {clk.seconds:.2f}s")
    assert ok


POLETSKII_CASES = [
    ("identity", 2), ("linear", 2), ("inversion", 2), ("identity", 3), ("inversion", 3),
]


def _map(name, n):
    if name == "inversion":
        return make_inversion(n)
    if name == "linear":
        return make_standard("linear", n, diag=[2, 1])
    return make_standard(name, n)


def test_05_poletskii(criterion):
    rows = []
    with Clock() as clk:
        for name, n in POLETSKII_CASES:
            for kind in ("ring", "cap"):
                if kind == "ring":
                    fam = ring_family(1.0, math.e, center=np.zeros(n), n=n)
                else:
                    y0 = np.zeros(n)
                    y0[0] = 1.0
                    fam = cap_family(y0, 0.2, 0.2 * math.e)
                rows.append((name, n, kind, check_poletskii(_map(name, n), fam).slack))
    worst = min(r[3] for r in rows)
    ok = worst >= -1e-2 and clk.seconds < 60
    criterion("5 Poletskii slack", ok, f"{len(rows)} cases, worst slack {worst:+.4f} {clk.seconds:.2f}s")
    assert ok


def test_06_fmo_fixtures(criterion):
    radii = 0.25 * 2.0 ** -np.arange(20)
    with Clock() as clk:
        const = fmo_estimate(constant_field(2.0), [0, 0], radii)
        logf = fmo_estimate(radial_field(lambda r: np.log(1 / r), [0, 0]), [0, 0], radii)
        inv = fmo_estimate(radial_field(lambda r: 1 / r, [0, 0]), [0, 0], radii)
    tail = logf.oscillations[-5:]
    spread = float((tail.max() - tail.min()) / tail.mean())
    ok = (const.verdict == "fmo" and np.all(const.oscillations == 0.0) and logf.verdict == "fmo"
          and spread < 0.02 and inv.verdict == "not_fmo" and clk.seconds < 10)
    criterion("6 FMO fixtures", ok,
              f"const {const.verdict} log {logf.verdict} (spread {spread:.1e}) 1/r {inv.verdict} {clk.seconds:.2f}s")
    assert ok


def test_07_condition_14_closed_form(criterion):
    with Clock() as clk:
        lhs = annulus_condition_lhs(constant_field(1.0), log_weight(), AnnulusSpec([0, 0], math.exp(-2), math.exp(-1)))
    err = abs(lhs - math.pi)
    ok = err < 1e-6 and clk.seconds < 1
    criterion("7 annulus LHS = pi", ok, f"error {err:.1e} {clk.seconds:.3f}s")
    assert ok


CLASSIFY_CASES = {
    "identity": (lambda n: make_standard("identity", n), "removable"),
    "inversion": (lambda n: make_inversion(n), "pole"),
    "ring": (lambda n: make_ring_map(RingMapParams(0.5, n)), "essential"),
    "folding": (lambda n: make_folding_map(FoldingParams(n)), "essential"),
}


def test_08_classifier_matrix(criterion):
    bad = []
    with Clock() as clk:
        for n in (2, 3):
            for name, (maker, expect) in CLASSIFY_CASES.items():
                f = maker(n)
                base = classify(f, np.zeros(n), 0.3)
                fine = classify(f, np.zeros(n), 0.3, levels=13, count=2 * base.sphere_count)
                if base.verdict != expect or fine.verdict != expect:
                    bad.append((name, n, base.verdict, fine.verdict))
    ok = not bad and clk.seconds < 30
    criterion("8 classifier matrix", ok, f"8 fixtures x 2 refinements, wrong {bad} {clk.seconds:.2f}s")
    assert ok


def test_09_lemma1_iff(criterion):
    bad = []
    with Clock() as clk:
        for A in (0.5, 1.0, 3.0):
            for p in (0.5, 1.0, 2.0):
                for n in (2, 3):
                    t = 4 * A * p ** (n - 1) / {2: 2 * math.pi, 3: 4 * math.pi}[n]
                    for k0 in sorted({max(1, math.floor(t)), math.floor(t) + 1, math.floor(t) + 5}):
                        rep = lemma1_chain(k0, A, p, n, 0.5, loglog_grid=np.linspace(2, 200, 25))
                        if rep.diverges_numerically != (k0 > t) or not rep.routes_agree:
                            bad.append((A, p, n, k0))
    ok = not bad and clk.seconds < 1
    criterion("9 Lemma-1 iff", ok, f"18 (A, p, n) cells, mismatches {bad} {clk.seconds:.3f}s")
    assert ok


@pytest.mark.parametrize("n", [2, 3])
def test_10_theorem5_suite(n, criterion):
    with Clock() as clk:
        rep = verify_theorem5(n)
    c = rep.checks
    ok = (c["ki_equals_one"] and c["bounded_by_1"] and c["not_open_at_fold"] and c["log_envelope"]
          and clk.seconds < 10)
    criterion(f"10 folding suite n={n}", ok,
              f"K_I err {rep.results['ki_max_error']:.1e} max|g| {rep.results['max_abs_on_ball']:.4f} {clk.seconds:.2f}s")
    assert ok


def test_11_prop3_exponent(criterion):
    errs = {}
    with Clock() as clk:
        for beta in (0.5, 1.0, 2.0):
            f = make_standard("log_decay", 2, beta=beta)
            rep = verify_prop3_envelope(f, [0, 0], 0.3, 1.0, 0.2 * 10.0 ** -np.arange(1, 10), f_b=[0, 0])
            errs[beta] = abs(rep.exponent / beta - 1)
    ok = max(errs.values()) < 0.05 and clk.seconds < 5
    criterion("11 decay exponent", ok, f"rel errors {max(errs.values()):.1e} {clk.seconds:.2f}s")
    assert ok

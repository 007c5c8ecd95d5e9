"""Acceptance suite: one test per criterion, each printing a single
``criterion N: PASS|FAIL ...`` line (shown even under output capture).

Run with ``pytest tests/test_acceptance.py -v``.
"""

import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest

import oracles
from exptwist.expsums import kl2_table, kloosterman_matrix
from exptwist.suites import GridConfig, run_suite, suite_cancellation

GRID = GridConfig()


@pytest.fixture
def say(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def _hard(report, *checks):
    cases = [c for c in report.cases if c["hard"] and c["check"] in checks]
    return cases, [c for c in cases if not c["pass"]]


def _value(case, key):
    return complex(case[f"{key}_re"], case[f"{key}_im"])


def test_criterion_1_factorization(say):
    t0 = time.perf_counter()
    rep = run_suite("charsum", replace(GRID, correlation=False, jobs=1))
    elapsed = time.perf_counter() - t0
    cases, bad = _hard(rep, "c1-factorization", "c2-factorization")
    # the brute-force side must itself answer to the loop definition
    rng = random.Random(1)
    oracle_worst = 0.0
    for case in rng.sample(cases, 150):
        i = case["inputs"]
        chi1 = oracles.character_values(i["M1"], i["chi1"][1])
        chi2 = oracles.character_values(i["M2"], i["chi2"][1])
        which = 1 if case["check"] == "c1-factorization" else 2
        ref = oracles.c_sum(which, i["n1"], i["sign_n2"] * i["n2"], i["sign_m"] * i["m"], i["q"], i["r"],
                            i["M1"], i["M2"], chi1, chi2)
        oracle_worst = max(oracle_worst, abs(_value(case, "brute") - ref) / (1 + abs(ref)))
    ok = not bad and cases and oracle_worst <= 1e-8 and elapsed < 60
    say(1, ok, f"{len(cases)} cases, {len(bad)} failed, max scaled diff "
               f"{max(c['diff'] for c in cases):.1e}, oracle spot-check {oracle_worst:.1e}, {elapsed:.1f} s")
    assert ok


def test_criterion_2_rearrangement(say):
    t0 = time.perf_counter()
    rep = run_suite("delta", replace(GRID, jobs=1))
    elapsed = time.perf_counter() - t0
    cases, bad = _hard(rep, "rearrangement")
    stubs = {c["inputs"]["stub"] for c in cases}
    lo, hi = GRID.n_range
    expected = (hi - lo + 1) * len(GRID.prime_pairs) * len(GRID.delta_Q) * len(GRID.stubs)
    ok = not bad and len(cases) == expected and stubs == {"one", "rational", "dfi"} and elapsed < 30
    say(2, ok, f"{len(cases)} cases over stubs {sorted(stubs)}, {len(bad)} failed, "
               f"max |lhs - rhs| {max(c['diff'] for c in cases):.1e}, {elapsed:.1f} s (includes criterion 3)")
    assert ok


def test_criterion_3_delta_symbol(say):
    rep = run_suite("delta", replace(GRID, delta_Q=(), jobs=1))
    cases, bad = _hard(rep, "delta-symbol")
    at_zero = [c for c in cases if c["inputs"]["n"] == 0]
    others = [c for c in cases if c["inputs"]["n"] != 0]
    ok = not bad and len(at_zero) == 1 and len(others) == 40 and all(c["inputs"]["Q"] == 40 for c in cases)
    say(3, ok, f"|delta(0) - 1| = {at_zero[0]['diff']:.1e}, max |delta(n)| over 1 <= |n| <= 20 = "
               f"{max(c['diff'] for c in others):.1e}")
    assert ok


@pytest.fixture(scope="module")
def cancellation():
    return suite_cancellation(replace(GRID, jobs=1))


def test_criterion_4_trace_identities(say, cancellation):
    rep, _ = cancellation
    cases, bad = _hard(rep, "lhat-closed-form", "z-closed-form", "shifted-plancherel")
    per_check = {}
    for c in cases:
        per_check.setdefault(c["check"], set()).add(c["inputs"]["M1"])
    moduli_ok = all(v == {3, 5, 7, 11, 13} for v in per_check.values()) and len(per_check) == 3
    # at least 20 tuples for each primitive character of each modulus
    counts = {}
    for c in cases:
        if c["check"] == "shifted-plancherel":
            key = (c["inputs"]["M1"], tuple(c["inputs"]["chi"]))
            counts[key] = counts.get(key, 0) + 1
    ok = not bad and moduli_ok and min(counts.values()) >= 20
    say(4, ok, f"{len(cases)} cases, {len(bad)} failed, max diff {max(c['diff'] for c in cases):.1e}, "
               f"{len(counts)} (modulus, character) pairs")
    assert ok


def test_criterion_5_cancellation_statistic(say, cancellation):
    rep, rows = cancellation
    generic = [c for c in rep.cases if c["check"] == "cancellation-ratio"]
    degenerate = [c for c in rep.cases if c["check"] == "degenerate-magnitude"]
    per_mod = {}
    for c in generic:
        per_mod[c["inputs"]["M1"]] = per_mod.get(c["inputs"]["M1"], 0) + 1
    expected = set(range(5, 98)) & {p for p in range(98) if oracles.is_prime(p)}
    coverage = set(per_mod) == expected and min(per_mod.values()) >= 50
    ratios = [c["ratio"] for c in generic]
    sizes = [c["abs_over_M1"] for c in degenerate]
    within3 = sum(1 / 3 <= s <= 3 for s in sizes)
    # the statistic itself is report-only; the criterion is that the scan ran and reported
    ok = coverage and len(rows) == len(generic) + len(degenerate) and all(math.isfinite(r) for r in ratios)
    say(5, ok, f"{len(generic)} generic tuples over {len(per_mod)} moduli, max ratio {max(ratios):.2f} "
               f"(soft threshold {GRID.soft_threshold:g}, {sum(r > GRID.soft_threshold for r in ratios)} above); "
               f"degenerate |sum|/M1 within a factor 3 in {within3}/{len(sizes)} tuples")
    assert ok


def test_criterion_6_correlation(say):
    rep = run_suite("charsum", replace(GRID, jobs=4))
    checks = ("C2-route-equivalence", "C1-trace-route", "C-crt-factorization", "D-crt-factorization", "periodicity")
    cases, bad = _hard(rep, *checks)
    zero_scan = [c for c in rep.cases if c["check"] in ("C2-zero-frequency", "C2-zero-bound")]
    q1s = {c["inputs"]["q1"] for c in cases}
    ok = not bad and q1s == {1, 2, 3} and zero_scan and rep.skipped
    worst = {k: max(c["diff"] for c in cases if c["check"] == k) for k in checks}
    say(6, ok, f"{len(cases)} cases, {len(bad)} failed, worst " +
        ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) +
        f"; zero-frequency scan {len(zero_scan)} rows, {sum(rep.skipped.values())} skipped tuples logged")
    assert ok


def test_criterion_7_voronoi(say):
    t0 = time.perf_counter()
    rep = run_suite("voronoi-gl2", replace(GRID, jobs=1))
    elapsed = time.perf_counter() - t0
    cases, bad = _hard(rep, "voronoi")
    expected = sum(len(oracles.units(c)) if c > 1 else 1 for c in range(1, 6)) * 4
    ok = not bad and len(cases) == expected and elapsed < 120
    say(7, ok, f"{len(cases)} (a, c, N) cases, {len(bad)} failed, max relative diff "
               f"{max(c['diff'] for c in cases):.1e}, {elapsed:.1f} s")
    assert ok


def test_criterion_8_weil(say):
    worst_s = worst_kl = 0.0
    primes = [p for p in range(2, 102) if oracles.is_prime(p)]
    for p in primes:
        S = kloosterman_matrix(p)[1:, 1:]
        worst_s = max(worst_s, float(np.max(np.abs(S))) / (2 * math.sqrt(p)))
        worst_kl = max(worst_kl, float(np.max(np.abs(kl2_table(p)[1:]))) / 2)
    # one loop evaluation per prime so the table is anchored to the definition
    anchor = max(abs(kloosterman_matrix(p)[3 % p, 5 % p] - oracles.kloosterman(3, 5, p)) for p in primes)
    ok = worst_s <= 1 + 1e-12 and worst_kl <= 1 + 1e-12 and anchor <= 1e-9
    say(8, ok, f"max |S(m,n;p)|/(2 sqrt p) = {worst_s:.6f}, max |Kl2|/2 = {worst_kl:.6f} over {len(primes)} primes")
    assert ok


def test_criterion_9_decay(say):
    rep = run_suite("decay", replace(GRID, jobs=4))
    tails, bad_tails = _hard(rep, "h-tail-ratio")
    loc, bad_loc = _hard(rep, "w-dagger-localization")
    psi, bad_psi = _hard(rep, "psi-minus-decay")
    ok = tails and loc and psi and not (bad_tails or bad_loc or bad_psi)
    say(9, ok, "tail ratios " + ", ".join(f"{c['inputs']['integral']} {c['diff']:.1e}" for c in tails) +
        f"; W-dagger off-window ratio {loc[0]['diff']:.1e} (mass in window {loc[0]['mass_in_window']:.4f}); "
        f"max |Psi-(x)| for x >= 25: {max(c['diff'] for c in psi):.1e}")
    assert ok

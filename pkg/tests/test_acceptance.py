"""Acceptance criteria, one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines as they
appear.  Heavy inputs (10^7-symbol prefixes) come from session fixtures,
so the whole module stays well inside its five-minute budget.
"""
import itertools
import math
import time

import numpy as np
import pytest

from normlab import contfrac, empirics, lab, measures, selectors, sources

MODULE_T0 = time.perf_counter()
N7 = 10_000_000
LAM_11 = math.log2(10 / 9)


def _verdict(num: int, ok: bool, detail: str):
    print(f"CRITERION {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_c01_gauss_digit_statistics(gauss_1e7):
    digits, gen_seconds = gauss_1e7
    t0 = time.perf_counter()
    table = empirics.block_frequencies(digits, 1, cap=100)
    worst = 0.0
    for k in range(1, 21):
        worst = max(worst, abs(table.frequency((k,)) - contfrac.digit_measure(k)))
    elapsed = gen_seconds + time.perf_counter() - t0
    _verdict(
        1, worst < 0.002 and elapsed < 60.0,
        f"digit frequencies off by {worst:.2e} (tol 2e-3), "
        f"{elapsed:.1f}s of 60s",
    )


def test_c02_exact_identity_restrictions():
    horizon = 100_000
    checks = []

    t0 = time.perf_counter()
    gh = sources.garcia_hedlund_stream()
    s3 = selectors.arithmetic_progression(3, 3)
    ok_gh = np.array_equal(selectors.restrict(gh, s3).prefix(horizon),
                           gh.prefix(horizon))
    checks.append(("toeplitz/3N", ok_gh, time.perf_counter() - t0))

    t0 = time.perf_counter()
    tm = sources.thue_morse_stream()
    odds = selectors.arithmetic_progression(1, 2)
    evens = selectors.arithmetic_progression(2, 2)
    ok_tm = np.array_equal(selectors.restrict(tm, odds).prefix(horizon),
                           tm.prefix(horizon)) and \
        np.array_equal(selectors.restrict(tm, evens).prefix(horizon),
                       1 - tm.prefix(horizon))
    checks.append(("morse/parities", ok_tm, time.perf_counter() - t0))

    t0 = time.perf_counter()
    per = sources.periodic_stream((0, 0, 1, 1))
    rule = selectors.AlternatingGaps(2, (4, 8), "random")
    S = selectors.gap_process_set(rule, seed=606)
    ok_alt = np.array_equal(selectors.restrict(per, S).prefix(horizon),
                            per.prefix(horizon))
    checks.append(("0011/alternating-gaps", ok_alt, time.perf_counter() - t0))

    ok = all(o for _, o, _ in checks) and all(dt < 1.0 for _, _, dt in checks)
    detail = "; ".join(f"{n} {'ok' if o else 'BROKEN'} {dt:.2f}s"
                       for n, o, dt in checks)
    _verdict(2, ok, detail)


# frozen by the truncated-sum oracle, cross-checked by quadrature and
# simulation while this module was built
V1_EXPECTED = 0.1785787


def test_c03_restricted_pair_frequency(gauss_1e7):
    digits, gen_seconds = gauss_1e7
    t0 = time.perf_counter()
    v1, bound = measures.gauss_spread_measure((1, 1), (1,), tol=1e-6)
    xs = digits[1::2]  # restriction to the even positions
    measured = empirics.pattern_frequency(
        xs, empirics.WildcardPattern.from_block((1, 1)))
    stat = lab.stat_tolerance(len(xs) - 1)
    gap = abs(LAM_11 - v1)
    elapsed = gen_seconds + time.perf_counter() - t0
    ok = (
        bound <= 1e-6
        and abs(v1 - V1_EXPECTED) < 2e-6
        and abs(measured - v1) <= 0.003
        and gap > 10 * stat
        and elapsed < 120.0
    )
    _verdict(
        3, ok,
        f"measured {measured:.6f} vs predicted {v1:.6f} (+-{bound:.1e}); "
        f"|gap to unrestricted| {gap:.4f} > {10 * stat:.4f}; "
        f"{elapsed:.1f}s of 120s",
    )


@pytest.mark.xfail(
    strict=True,
    reason="the one-gap pair value 0.178579 exceeds the adjacent-pair value "
    "0.152003 (truncated summation with rigorous tails, quadrature, and "
    "simulation all agree), so the signed difference is negative; the "
    "magnitude of the gap is covered by test_c03",
)
def test_c03_signed_gap_direction(gauss_1e7):
    digits, _ = gauss_1e7
    v1, _ = measures.gauss_spread_measure((1, 1), (1,), tol=1e-6)
    stat = lab.stat_tolerance(len(digits[1::2]) - 1)
    assert LAM_11 - v1 > 10 * stat


def test_c04_preservation_deterministic_sets(coin_1e7):
    spec = measures.Bernoulli((0.5, 0.5))
    results = []
    for name, S in (
        ("3N+1", selectors.arithmetic_progression(1, 3)),
        ("toeplitz-support", selectors.support_set(
            sources.garcia_hedlund_stream())),
    ):
        idx = S.indices_upto(N7)
        xs = coin_1e7[idx - 1]
        d = empirics.normality_defect(xs, spec, 3)
        results.append((name, d))
    ok = all(d < 0.005 for _, d in results)
    _verdict(4, ok, "; ".join(f"{n}: k=3 defect {d:.5f} (tol 5e-3)"
                              for n, d in results))


def test_c05_witness_certificate():
    t0 = time.perf_counter()
    mk = measures.Markov(((0.9, 0.1), (0.1, 0.9)))
    w = measures.find_witness(mk, k_max=4, box=20)
    cert_ok = all(
        abs(v - 0.5 * 0.5 * (1 + 0.8 ** (q + 1))) < 1e-12
        for (q,), v in w.certificate
    )
    elapsed = time.perf_counter() - t0
    ok = (
        w.k == 2 and w.block == (0, 0) and w.gaps == (0,)
        and abs(w.value - 0.45) < 1e-12
        and cert_ok and len(w.certificate) == 20 and elapsed < 1.0
    )
    _verdict(
        5, ok,
        f"witness k={w.k} block={w.block} gaps={w.gaps} value={w.value:.12f}; "
        f"certificate matches the eigendecomposition to 1e-12; "
        f"{elapsed:.2f}s of 1s",
    )


def test_c06_markov_destruction_scenario():
    cfg = lab.ExperimentConfig(
        scenario="markov_destruction", n=N7, seeds=1, tolerance=0.005,
        destruction_margin=0.01,
    )
    rep = lab.run_scenario(cfg)
    details = []
    ok = rep.passed
    for i, kind in enumerate(("even positions", "random {1,3} gaps")):
        f = rep.measurement(f"set{i}_restricted_pattern_freq_seed17")
        g = rep.measurement(f"set{i}_destruction_gap_seed17")
        ok &= abs(f.value - f.predicted) <= 0.005 and g.value > 0.01
        details.append(
            f"{kind}: {f.value:.4f} vs {f.predicted:.4f}, gap {g.value:.4f}")
    _verdict(6, ok, "; ".join(details))


def test_c07_simple_normality_contrast():
    cfg = lab.ExperimentConfig(
        scenario="simple_normality_preservation", n=N7, seeds=1, ks=(1,),
    )
    rep = lab.run_scenario(cfg)
    gauss_simple = rep.measurement("gauss_simple_defect_seed17")
    markov_simple = rep.measurement("markov_simple_defect_seed17")
    gauss_gap = rep.measurement("gauss_destruction_gap")
    markov_gap = rep.measurement("markov_destruction_gap_seed17")
    ok = (
        gauss_simple.value < 0.005 and markov_simple.value < 0.005
        and gauss_gap.passed and markov_gap.passed and rep.passed
    )
    _verdict(
        7, ok,
        f"single-symbol defects {gauss_simple.value:.5f} (digits), "
        f"{markov_simple.value:.5f} (chain) while the pair statistics sit "
        f"{gauss_gap.value:.4f} and {markov_gap.value:.4f} off their "
        f"unrestricted values, in one report",
    )


def test_c08_spreadability_exact():
    coin = measures.Bernoulli((0.5, 0.5))
    biased = measures.Bernoulli((0.3, 0.7))
    worst_cases = 0
    for spec in (coin, biased):
        for k in range(1, 5):
            for block in measures.block_space(spec, k):
                pi = measures.product_of_symbol_measures(spec, block)
                for gaps in itertools.product(range(6), repeat=k - 1):
                    v = measures.spread_cylinder_measure(
                        spec, measures.SpreadBlock(block, gaps))
                    if v != pi:
                        worst_cases += 1
    _verdict(8, worst_cases == 0,
             f"{worst_cases} spread values differ from the symbol product "
             f"(k <= 4, gaps <= 5); equality is exact")


def test_c09_constructions(coin_1e7):
    spec = measures.Bernoulli((0.5, 0.5))
    S = selectors.power_intervals(4, 2)
    dec = selectors.interval_decomposition(S, N7)
    z = sources.bernoulli_stream((0.5, 0.5), seed=505)
    x = sources.build_preserving_pair(z, dec)
    xp = x.prefix(N7)
    xs = selectors.restrict(x, S).prefix(S.count_upto(N7))
    d_built = empirics.normality_defect(xp, spec, 2)
    d_restricted = empirics.normality_defect(xs, spec, 2)

    runs = selectors.power_runs(4)
    xmod = sources.build_density_zero_spoiler(
        sources.bernoulli_stream((0.5, 0.5), seed=506), runs, 0)
    d_mod = empirics.normality_defect(xmod.prefix(N7), spec, 3)
    restricted = selectors.restrict(xmod, runs).prefix(runs.count_upto(N7))
    d_simple = empirics.simple_normality_defect(restricted, spec)

    ok = d_built < 0.01 and d_restricted < 0.01 and d_mod < 0.01 \
        and d_simple >= 0.15
    _verdict(
        9, ok,
        f"recycled point defects {d_built:.5f} / {d_restricted:.5f} "
        f"(tol 1e-2); overwritten point defect {d_mod:.5f} with restricted "
        f"single-symbol defect {d_simple:.3f} (>= 0.15)",
    )


def test_c10_exact_invariant_suites():
    failures = []

    # telescoping partial sums of the digit conditional law
    for y in (0.0, 0.3, 0.99):
        ks = np.arange(1, 1_000_001, dtype=np.float64)
        total = math.fsum(((1 + y) / ((ks + y) * (ks + 1 + y))).tolist())
        if abs(total - contfrac.digit_conditional_partial_sum(1_000_000, y)) > 1e-12:
            failures.append(f"telescoping at y={y}")

    # one-step consistency of every cylinder family
    specs = [
        measures.Bernoulli((0.5, 0.5)),
        measures.Bernoulli((0.2, 0.3, 0.5)),
        measures.Markov(((0.9, 0.1), (0.1, 0.9))),
        measures.Markov(((0.5, 0.5, 0.0), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0)),
                        labels=(1, 0, 0)),
        measures.Periodic((0, 0, 1, 1)),
    ]
    for spec in specs:
        for k in range(1, 5):
            for block in measures.block_space(spec, k):
                base = measures.cylinder_measure(spec, block)
                ext = sum(measures.cylinder_measure(spec, block + (a,))
                          for a in measures.symbol_space(spec))
                if abs(ext - base) > 1e-12:
                    failures.append(f"consistency {spec.__class__.__name__} {block}")
        total = sum(measures.cylinder_measure(spec, b)
                    for b in measures.block_space(spec, 3))
        if abs(total - 1.0) > 1e-12:
            failures.append(f"normalisation {spec.__class__.__name__}")

    # spreading by zero gaps changes nothing
    mk = specs[2]
    for block in measures.block_space(mk, 3):
        v = measures.spread_cylinder_measure(mk, measures.SpreadBlock(block, (0, 0)))
        if abs(v - measures.cylinder_measure(mk, block)) > 1e-15:
            failures.append(f"zero-gap spread {block}")

    elapsed = time.perf_counter() - MODULE_T0
    ok = not failures and elapsed < 300.0
    _verdict(
        10, ok,
        f"exact suites clean, acceptance module at {elapsed:.0f}s of 300s"
        + (f"; failures: {failures[:3]}" if failures else ""),
    )

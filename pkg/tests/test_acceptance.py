"""Acceptance suite: one test per headline criterion, each printing a
pass/fail line. Every tolerance is pinned here; nothing is calibrated later.

Criterion 2 asserts the published pooled-tail figure of 0.0038 at two
significant figures. The exact tail with the corrected shift counts is
0.004546 (verified independently by big-integer arithmetic and scipy), so
that row fails: the published figure matches the tail computed with the
uncorrected 59 suspect shifts. The assertion is kept as stated rather than
weakened; see the informational row in reproduce-paper.
"""

import math
from math import comb

import numpy as np
import pytest

from rosterstat import bayes, frequentist, poisson_model, risk_sim
from rosterstat.case import builtin_paper_case
from rosterstat.distributions import hypergeom_pmf, hypergeom_tail

RKZ = ["RKZ-41", "RKZ-42"]


def _report(number: int, label: str, ok: bool) -> None:
    print(f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {label}")


def test_criterion_1_jkz_posthoc_bound():
    bound = 27.0 * hypergeom_tail(1029, 142, 8, 8)
    ok = bound < 1.0 / 300_000
    _report(1, f"27 x JKZ tail = {bound:.6e} < 1/300,000", ok)
    assert ok


def test_criterion_2_pooled_rkz_rounds_to_paper_figure():
    p = hypergeom_tail(675, 61, 19, 6)
    ok = f"{p:.2g}" == "0.0038"
    _report(2, f"pooled RKZ tail = {p:.6f}, published figure 0.0038", ok)
    assert ok, (
        f"exact tail is {p:.6f} (rounds to {p:.2g}); the published 0.0038 "
        "matches the tail with the uncorrected 59 suspect shifts"
    )


def test_criterion_3_convolved_sum_rounds_to_paper_figure():
    result = frequentist.convolved_sum_test(builtin_paper_case("corrected"), RKZ)
    ok = f"{result.p_value:.2g}" == "0.022"
    _report(3, f"convolved RKZ sum tail = {result.p_value:.6f} ~ 0.022", ok)
    assert ok


def test_criterion_4_poisson_likelihood_ratios():
    case = builtin_paper_case("corrected")
    mu_l = poisson_model.observed_rate(6, 61)
    lr1 = poisson_model.lr_poisson(
        poisson_model.estimate_mu(case, "exclude_suspect", RKZ), mu_l, 61, 6)
    lr2 = poisson_model.lr_poisson(
        poisson_model.estimate_mu(case, "include_suspect", RKZ), mu_l, 61, 6)
    slight = "slightly more likely under H_p than under H_d"
    ok = (
        abs(lr1.value - 90.7) <= 0.05
        and 24.5 <= lr2.value <= 25.5
        and lr1.verbal == slight
        and lr2.verbal == slight
    )
    _report(4, f"LR = {lr1.value:.4f} (90.7 +/- 0.05) and {lr2.value:.4f} "
               f"(about 25), both '{slight}'", ok)
    assert ok


def test_criterion_5_bayes_chain():
    state = bayes.OddsState(prior_odds=1e-5)
    for lr in (0.5, 50.0, 7000.0, 5.0):
        state = bayes.update(state, bayes.EvidenceItem("e", lr))
    prob = bayes.posterior_probability(state)
    ok = abs(state.posterior_odds - 8.75) < 1e-12 and 0.897 <= prob <= 0.898
    _report(5, f"posterior odds = {state.posterior_odds!r} (8.75), "
               f"probability = {prob:.4f} (close to 90%)", ok)
    assert ok


def test_criterion_6_relative_risk():
    rr = risk_sim.relative_risk(6, 61, 13, 614)
    ok = 4.64 <= rr.value <= 4.66
    _report(6, f"relative risk = {rr.value:.4f} in [4.64, 4.66]", ok)
    assert ok


def test_criterion_7_simulation_table():
    case = builtin_paper_case("corrected")
    table = [
        ("whole RKZ", RKZ, "exclude_suspect", 0.121),
        ("whole RKZ", RKZ, "include_suspect", 0.042),
        ("RKZ-41", ["RKZ-41"], "exclude_suspect", 0.787),
        ("RKZ-41", ["RKZ-41"], "include_suspect", 0.681),
        ("RKZ-42", ["RKZ-42"], "exclude_suspect", 0.383),
        ("RKZ-42", ["RKZ-42"], "include_suspect", 0.286),
    ]
    computed = {}
    ok = True
    details = []
    for name, wards, basis, target in table:
        cfg = risk_sim.derive_sim_config(case, wards, basis,
                                         replicates=100_000, seed=0)
        threshold = risk_sim.observed_threshold(case, wards).value
        sim = risk_sim.simulate_max_rr(cfg, threshold, workers=4)
        computed[(name, basis)] = sim.p_value
        ok &= abs(sim.p_value - target) <= 0.05
        details.append(f"{name}/{basis}: {sim.p_value:.4f} vs {target}")
    ordering = (computed[("whole RKZ", "include_suspect")]
                < computed[("whole RKZ", "exclude_suspect")])
    ok &= ordering
    _report(7, "; ".join(details) + f"; ordering holds: {ordering}", ok)
    assert ok


def test_criterion_8_original_pipeline_order_of_magnitude():
    result = frequentist.elffers_pipeline(builtin_paper_case("original"),
                                          jkz_multiplier=27)
    ok = 1e-10 <= result.p_value <= 1e-7 and not result.is_p_value
    _report(8, f"original pipeline product = {result.p_value:.4e} "
               "(published: less than 1 in 342 million; no equality asserted)", ok)
    assert ok


def test_criterion_9a_hypergeometric_normalization():
    worst = 0.0
    for n in range(1, 31):
        for r in range(0, n + 1):
            for k in range(0, n + 1):
                total = math.fsum(
                    hypergeom_pmf(n, r, k, x) for x in range(0, min(r, k) + 1))
                worst = max(worst, abs(total - 1.0))
    ok = worst <= 1e-12
    _report(9, f"normalization sweep n<=30, worst deviation {worst:.2e}", ok)
    assert ok


def test_criterion_9b_p_cancellation():
    worst = 0.0
    for p in (0.1, 0.5, 0.9):
        for n in range(1, 31):
            for r in range(0, n + 1, 3):
                for k in range(0, n + 1, 3):
                    for x in range(max(0, k - (n - r)), min(r, k) + 1):
                        num = (comb(r, x) * p**x * (1 - p) ** (r - x)
                               * comb(n - r, k - x) * p ** (k - x)
                               * (1 - p) ** (n - r - k + x))
                        den = comb(n, k) * p**k * (1 - p) ** (n - k)
                        worst = max(worst, abs(hypergeom_pmf(n, r, k, x) - num / den))
    ok = worst <= 1e-10
    _report(9, f"p-cancellation identity, worst deviation {worst:.2e}", ok)
    assert ok


def test_criterion_9c_fisher_uniformity():
    rng = np.random.default_rng(2024)
    draws = rng.random((10_000, 3))
    combined = np.sort([frequentist.fisher_combine(list(row)).p_value
                        for row in draws])
    grid = np.arange(1, 10_001) / 10_000
    ks = float(np.max(np.maximum(np.abs(combined - grid),
                                 np.abs(combined - grid + 1 / 10_000))))
    ok = ks < 0.02
    _report(9, f"Fisher-combination uniformity, KS = {ks:.4f} < 0.02", ok)
    assert ok


def test_criterion_9d_fisher_single_passthrough():
    worst = max(abs(frequentist.fisher_combine([p]).p_value - p)
                for p in (1e-6, 0.01, 0.3, 0.5, 0.99, 1.0))
    ok = worst <= 1e-12
    _report(9, f"fisher_combine([p]) = p, worst deviation {worst:.2e}", ok)
    assert ok


def test_criterion_9e_simulation_matches_exact_oracle():
    ok = True
    details = []
    for I, mean in [(2, 0.5), (3, 1.0), (3, 2.0)]:
        cfg = risk_sim.SimulationConfig(nurse_count=I, shifts_per_nurse=1,
                                        mu=mean, replicates=100_000, seed=17)
        threshold = 1.8
        sim = risk_sim.simulate_max_rr(cfg, threshold)
        exact = risk_sim.exact_max_rr_tail(I, 1, mean, threshold, count_cap=40)
        se = max(sim.std_error, math.sqrt(exact * (1 - exact) / cfg.replicates))
        ok &= abs(sim.p_value - exact) <= 4 * se
        details.append(f"I={I}, mu*r={mean}: |{sim.p_value:.4f} - {exact:.4f}| "
                       f"<= 4 x {se:.5f}")
    _report(9, "simulation vs exact enumeration: " + "; ".join(details), ok)
    assert ok


def test_criterion_9f_worker_count_independence():
    cfg = risk_sim.SimulationConfig(nurse_count=11, shifts_per_nurse=61,
                                    mu=13 / 614, replicates=50_000, seed=0)
    reports = [risk_sim.simulate_max_rr(cfg, 4.65, workers=w) for w in (1, 2, 8)]
    ok = reports[0] == reports[1] == reports[2]
    _report(9, f"bit-identical output across workers 1/2/8: "
               f"p = {reports[0].p_value!r}", ok)
    assert ok


def test_criterion_10_conditional_binomial_near_pooled():
    case = builtin_paper_case("corrected")
    binom = poisson_model.conditional_binomial_test(case, RKZ).p_value
    pooled = frequentist.pooled_test(case, RKZ).p_value
    ratio = binom / pooled
    ok = 1 / 1.5 <= ratio <= 1.5
    _report(10, f"conditional binomial {binom:.6f} vs pooled {pooled:.6f}, "
                f"ratio {ratio:.3f} within factor 1.5", ok)
    assert ok

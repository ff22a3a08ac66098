import math

import pytest

from rosterstat.case import builtin_paper_case
from rosterstat.risk_sim import (
    SimulationConfig,
    derive_sim_config,
    equal_shift_rr,
    exact_max_rr_tail,
    observed_threshold,
    relative_risk,
    simulate_max_rr,
)

RKZ = ["RKZ-41", "RKZ-42"]


class TestRelativeRisk:
    def test_published_rkz_value(self):
        rr = relative_risk(6, 61, 13, 614)
        assert rr.value == pytest.approx(4.65, abs=0.01)

    def test_equal_rates(self):
        assert relative_risk(2, 10, 4, 20).value == pytest.approx(1.0)

    def test_rkz41_corrected_counts(self):
        assert relative_risk(1, 3, 4, 333).value == pytest.approx(27.75, rel=1e-12)

    def test_infinite_when_others_quiet(self):
        assert relative_risk(2, 10, 0, 50).value == math.inf

    def test_one_when_no_incidents_at_all(self):
        assert relative_risk(0, 10, 0, 50).value == 1.0

    def test_zero_shifts_rejected(self):
        with pytest.raises(ValueError):
            relative_risk(1, 0, 1, 10)
        with pytest.raises(ValueError):
            relative_risk(1, 10, 1, 0)


class TestEqualShiftRr:
    def test_closed_form(self):
        assert equal_shift_rr(2, [2, 1, 1], 3) == pytest.approx(2.0)

    def test_all_equal_counts(self):
        assert equal_shift_rr(3, [3, 3, 3, 3], 4) == pytest.approx(1.0)

    def test_infinite_when_alone(self):
        assert equal_shift_rr(3, [3, 0, 0], 3) == math.inf

    def test_all_zero(self):
        assert equal_shift_rr(0, [0, 0], 2) == 1.0

    def test_too_few_nurses_rejected(self):
        with pytest.raises(ValueError):
            equal_shift_rr(1, [1], 1)

    def test_membership_enforced(self):
        with pytest.raises(ValueError):
            equal_shift_rr(9, [1, 2, 3], 3)

    def test_agrees_with_relative_risk_for_equal_shifts(self):
        counts = [4, 1, 0, 2, 2]
        shifts = 17
        for j, k_j in enumerate(counts):
            others = sum(counts) - k_j
            if others == 0:
                continue
            direct = relative_risk(k_j, shifts, others, shifts * (len(counts) - 1))
            assert equal_shift_rr(k_j, counts, len(counts)) == pytest.approx(
                direct.value, rel=1e-12)


class TestDeriveSimConfig:
    def test_whole_rkz(self):
        cfg = derive_sim_config(builtin_paper_case("corrected"), RKZ,
                                "exclude_suspect")
        assert (cfg.nurse_count, cfg.shifts_per_nurse) == (11, 61)
        assert cfg.mu == pytest.approx(13 / 614)

    def test_rkz41(self):
        cfg = derive_sim_config(builtin_paper_case("corrected"), ["RKZ-41"],
                                "exclude_suspect")
        assert (cfg.nurse_count, cfg.shifts_per_nurse) == (112, 3)
        assert cfg.mu == pytest.approx(4 / 333)

    def test_rkz42(self):
        cfg = derive_sim_config(builtin_paper_case("corrected"), ["RKZ-42"],
                                "include_suspect")
        assert (cfg.nurse_count, cfg.shifts_per_nurse) == (6, 58)
        assert cfg.mu == pytest.approx(14 / 339)

    def test_zero_suspect_shifts_rejected(self):
        from rosterstat.case import CaseFile, WardRoster

        case = CaseFile("t", "s", (WardRoster("A", 30, 0, 3, 0),))
        with pytest.raises(ValueError):
            derive_sim_config(case, ["A"], "include_suspect")


class TestSimulateMaxRr:
    def test_threshold_zero_gives_one(self):
        cfg = SimulationConfig(nurse_count=5, shifts_per_nurse=10, mu=0.02,
                               replicates=2000, seed=1)
        report = simulate_max_rr(cfg, 0.0)
        assert report.p_value == 1.0

    def test_nonincreasing_in_threshold(self):
        cfg = SimulationConfig(nurse_count=7, shifts_per_nurse=20, mu=0.05,
                               replicates=20_000, seed=3)
        values = [simulate_max_rr(cfg, t).p_value for t in (0.0, 0.5, 1.0, 2.0, 5.0, 20.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_bit_identical_across_worker_counts(self):
        cfg = SimulationConfig(nurse_count=11, shifts_per_nurse=61, mu=13 / 614,
                               replicates=30_000, seed=99)
        reports = [simulate_max_rr(cfg, 4.65, workers=w) for w in (1, 2, 8)]
        assert reports[0] == reports[1] == reports[2]

    def test_deterministic_given_seed(self):
        cfg = SimulationConfig(nurse_count=6, shifts_per_nurse=58, mu=9 / 281,
                               replicates=10_000, seed=7)
        assert simulate_max_rr(cfg, 2.69) == simulate_max_rr(cfg, 2.69)
        other = SimulationConfig(nurse_count=6, shifts_per_nurse=58, mu=9 / 281,
                                 replicates=10_000, seed=8)
        assert simulate_max_rr(cfg, 2.69) != simulate_max_rr(other, 2.69)

    def test_degenerate_replicates_counted(self):
        # tiny intensity: most replicates have no incidents at all
        cfg = SimulationConfig(nurse_count=3, shifts_per_nurse=2, mu=0.001,
                               replicates=5000, seed=11)
        report = simulate_max_rr(cfg, 2.0)
        assert report.degenerate_count > 4000
        # degenerate replicates (all risks = 1) never exceed a threshold > 1
        assert report.exceed_count <= report.config.replicates - report.degenerate_count

    def test_degenerate_exceed_at_low_threshold(self):
        cfg = SimulationConfig(nurse_count=3, shifts_per_nurse=2, mu=0.001,
                               replicates=5000, seed=11)
        report = simulate_max_rr(cfg, 1.0)
        assert report.exceed_count >= report.degenerate_count

    def test_std_error_formula(self):
        cfg = SimulationConfig(nurse_count=5, shifts_per_nurse=10, mu=0.05,
                               replicates=4000, seed=5)
        report = simulate_max_rr(cfg, 2.0)
        p = report.p_value
        assert report.std_error == pytest.approx(math.sqrt(p * (1 - p) / 4000))

    def test_negative_threshold_rejected(self):
        cfg = SimulationConfig(nurse_count=5, shifts_per_nurse=10, mu=0.05,
                               replicates=100, seed=5)
        with pytest.raises(ValueError):
            simulate_max_rr(cfg, -1.0)


class TestExactOracle:
    def test_threshold_zero(self):
        assert exact_max_rr_tail(3, 5, 0.1, 0.0, count_cap=25) == 1.0

    def test_tiny_intensity_first_order(self):
        # with almost no incidents, exceedance above any large finite
        # threshold comes from the +infinity cases; to first order that is
        # 2 * P(X > 0) * P(X = 0) for two nurses
        mean = 0.005
        got = exact_max_rr_tail(2, 1, mean, 1e9, count_cap=20)
        first_order = 2 * (1 - math.exp(-mean)) * math.exp(-mean)
        assert got == pytest.approx(first_order, rel=1e-2)

    def test_enumeration_value_is_stable(self):
        value = exact_max_rr_tail(3, 1, 1.0, 1.0, count_cap=30)
        # threshold 1: exceed unless... every nonzero configuration has a
        # max with rr >= 1 or equals it; all-zero counts as rr = 1 >= 1
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_against_hand_summation_small(self):
        # I=2, threshold 3: max rr = max/(S-max); exceed iff max >= 3*(S-max),
        # plus the all-mine and all-zero(with thr>1: no) conventions
        mean = 0.7
        cap = 25

        def pois(k):
            return math.exp(-mean) * mean**k / math.factorial(k)

        brute = 0.0
        for a in range(cap + 1):
            for b in range(cap + 1):
                total, biggest = a + b, max(a, b)
                if total == 0:
                    hit = False  # rr = 1 < 3
                elif biggest == total:
                    hit = True
                else:
                    hit = biggest >= 3 * (total - biggest)
                if hit:
                    brute += pois(a) * pois(b)
        assert exact_max_rr_tail(2, 1, mean, 3.0, count_cap=cap) == pytest.approx(
            brute, rel=1e-12)

    def test_truncation_bound_enforced(self):
        with pytest.raises(ValueError, match="mass"):
            exact_max_rr_tail(3, 10, 0.5, 1.0, count_cap=3)

    def test_large_i_rejected(self):
        with pytest.raises(ValueError):
            exact_max_rr_tail(5, 1, 0.5, 1.0, count_cap=25)


class TestSimulationMatchesOracle:
    @pytest.mark.parametrize("I,mean_per_shift,threshold", [
        (2, 0.5, 2.0),
        (3, 1.0, 1.5),
        (3, 2.0, 3.0),
    ])
    def test_within_four_standard_errors(self, I, mean_per_shift, threshold):
        cfg = SimulationConfig(nurse_count=I, shifts_per_nurse=1,
                               mu=mean_per_shift, replicates=100_000, seed=13)
        sim = simulate_max_rr(cfg, threshold)
        exact = exact_max_rr_tail(I, 1, mean_per_shift, threshold, count_cap=40)
        se = max(sim.std_error, math.sqrt(exact * (1 - exact) / cfg.replicates))
        assert abs(sim.p_value - exact) <= 4 * se


class TestObservedThreshold:
    def test_whole_rkz(self):
        rr = observed_threshold(builtin_paper_case("corrected"), RKZ)
        assert rr.value == pytest.approx(4.6456, abs=1e-3)

    def test_rkz41(self):
        rr = observed_threshold(builtin_paper_case("corrected"), ["RKZ-41"])
        assert rr.value == pytest.approx(27.75, rel=1e-12)

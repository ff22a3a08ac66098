"""Report assembly and the built-in reproduction suite.

Every rendered result carries its method identifier, the data variant it
was computed on, and a caveat block stating the conditioning assumptions,
so no number can be quoted without its model scope. The reproduction suite
recomputes each published figure from the built-in case and marks a row
pass/fail against its stated tolerance.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, is_dataclass
from typing import Any

from rosterstat import bayes, frequentist, poisson_model, risk_sim
from rosterstat.case import RKZ_41, RKZ_42, CaseFile, builtin_paper_case
from rosterstat.distributions import hypergeom_tail

GENERAL_CAVEATS = (
    "All conditional tests are computed given the observed totals of shifts "
    "and incidents; they measure association, not causation. Their validity "
    "rests on auxiliary assumptions (constant incident probability across "
    "shift types and time, independence between shifts, random assignment "
    "of nurses to shifts) that the data cannot confirm."
)


@dataclass(frozen=True)
class AnalysisReport:
    """A case summary plus an ordered list of labelled results."""

    case_name: str
    suspect: str
    variant: str
    method: str
    results: tuple[dict, ...]
    caveats: str

    def to_dict(self) -> dict:
        return {
            "case_name": self.case_name,
            "suspect": self.suspect,
            "variant": self.variant,
            "method": self.method,
            "results": list(self.results),
            "caveats": self.caveats,
        }


def _plain(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        return {k: _plain(v) for k, v in asdict(value).items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def result_entry(label: str, result: Any, **extra: Any) -> dict:
    """Normalize any result object into a serializable dict."""
    entry: dict[str, Any] = {"label": label}
    if isinstance(result, frequentist.TestResult):
        entry.update(_plain(result))
        entry["is_p_value"] = result.is_p_value
    elif isinstance(result, (poisson_model.LikelihoodRatio, bayes.OddsState,
                             risk_sim.SimulationReport, risk_sim.RelativeRisk)):
        entry[type(result).__name__] = _plain(result)
    elif isinstance(result, dict):
        entry.update(result)
    else:
        entry["value"] = _plain(result)
    entry.update({k: _plain(v) for k, v in extra.items()})
    return entry


def build_report(case: CaseFile, method: str, results: list[dict],
                 extra_caveats: str = "") -> AnalysisReport:
    caveats = GENERAL_CAVEATS
    if extra_caveats:
        caveats += " " + extra_caveats
    return AnalysisReport(
        case_name=case.case_name,
        suspect=case.suspect,
        variant=case.variant,
        method=method,
        results=tuple(results),
        caveats=caveats,
    )


def render_text(report: AnalysisReport) -> str:
    lines = [
        f"case: {report.case_name} (suspect: {report.suspect}, "
        f"data variant: {report.variant})",
        f"method: {report.method}",
        "",
    ]
    for entry in report.results:
        lines.append(f"- {entry['label']}")
        for key, value in entry.items():
            if key == "label":
                continue
            lines.append(f"    {key}: {_fmt(value)}")
    lines += ["", "caveats: " + report.caveats]
    return "\n".join(lines)


def render_machine(report: AnalysisReport) -> str:
    return json.dumps(report.to_dict(), indent=2)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


# ---------------------------------------------------------------------------
# reproduction suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReproRow:
    label: str
    paper_value: str
    computed: float
    tolerance: str
    passed: bool


def _two_sig_figs(x: float) -> str:
    return f"{x:.2g}"


def reproduce_paper(seed: int = 0, replicates: int = 100_000) -> list[ReproRow]:
    """Recompute every published figure from the built-in case.

    Monte Carlo rows use the given seed (recorded in the row labels) and
    are deterministic. Returns one row per figure; the caller decides what
    a failed row means for the process exit status.
    """
    rows: list[ReproRow] = []
    corrected = builtin_paper_case("corrected")
    original = builtin_paper_case("original")
    rkz = [RKZ_41, RKZ_42]

    # JKZ tail with the 27-nurse post-hoc multiplier
    jkz = corrected.ward("JKZ")
    bound = 27.0 * frequentist.ward_tail_p(jkz).p_value
    rows.append(ReproRow(
        "JKZ post-hoc bound: 27 x per-ward tail", "< 1/300,000", bound,
        "strict inequality", bound < 1.0 / 300_000.0,
    ))

    # pooled RKZ tail
    pooled = frequentist.pooled_test(corrected, rkz).p_value
    rows.append(ReproRow(
        "pooled RKZ tail", "0.0038", pooled,
        "rounds to 0.0038 at 2 significant figures",
        _two_sig_figs(pooled) == "0.0038",
    ))

    # convolved per-ward sum
    convolved = frequentist.convolved_sum_test(corrected, rkz).p_value
    rows.append(ReproRow(
        "convolved RKZ sum tail", "0.022", convolved,
        "rounds to 0.022 at 2 significant figures",
        _two_sig_figs(convolved) == "0.022",
    ))

    # ordering of the two revised tests
    rows.append(ReproRow(
        "convolved > pooled ordering", "0.022 > 0.0038", convolved - pooled,
        "strict inequality", convolved > pooled,
    ))

    # Poisson likelihood ratios
    mu_excl = poisson_model.estimate_mu(corrected, "exclude_suspect", rkz)
    mu_incl = poisson_model.estimate_mu(corrected, "include_suspect", rkz)
    mu_l = poisson_model.observed_rate(6, 61)
    lr1 = poisson_model.lr_poisson(mu_excl, mu_l, 61, 6)
    lr2 = poisson_model.lr_poisson(mu_incl, mu_l, 61, 6)
    rows.append(ReproRow(
        "likelihood ratio, background from other nurses (13/614)", "90.7",
        lr1.value, "+/- 0.05", abs(lr1.value - 90.7) <= 0.05,
    ))
    rows.append(ReproRow(
        "likelihood ratio, background from all nurses (19/675)", "about 25",
        lr2.value, "in [24.5, 25.5]", 24.5 <= lr2.value <= 25.5,
    ))
    slight = "slightly more likely under H_p than under H_d"
    rows.append(ReproRow(
        "verbal band for both likelihood ratios", "slightly more likely under H_p",
        float(lr1.verbal == slight and lr2.verbal == slight),
        "exact band match", lr1.verbal == slight and lr2.verbal == slight,
    ))

    # Bayesian chain (prior probability used directly as prior odds,
    # reproducing the published shortcut; the strict odds form is also shown)
    state = bayes.OddsState(prior_odds=1e-5)
    for item in corrected.evidence:
        state = bayes.update(state, item)
    rows.append(ReproRow(
        "posterior odds (prior probability used as prior odds)", "8.75",
        state.posterior_odds, "exact product arithmetic (1e-12)",
        abs(state.posterior_odds - 8.75) < 1e-12,
    ))
    prob = bayes.posterior_probability(state)
    rows.append(ReproRow(
        "posterior probability of guilt", "close to 90%", prob,
        "in [0.897, 0.898]", 0.897 <= prob <= 0.898,
    ))
    strict_state = bayes.OddsState(prior_odds=bayes.odds_from_probability(1e-5))
    for item in corrected.evidence:
        strict_state = bayes.update(strict_state, item)
    rows.append(ReproRow(
        "posterior odds (strict odds p/(1-p) convention)", "roughly 8.75",
        strict_state.posterior_odds, "in [8.74, 8.76]",
        8.74 <= strict_state.posterior_odds <= 8.76,
    ))

    # relative risk
    rr = risk_sim.relative_risk(6, 61, 13, 614)
    rows.append(ReproRow(
        "suspect's relative risk over the RKZ", "about 4.65", rr.value,
        "in [4.64, 4.66]", 4.64 <= rr.value <= 4.66,
    ))

    # Monte Carlo table: max relative risk among equal-shift nurses
    table = [
        ("whole RKZ", rkz, "exclude_suspect", 0.121),
        ("whole RKZ", rkz, "include_suspect", 0.042),
        ("RKZ-41", [RKZ_41], "exclude_suspect", 0.787),
        ("RKZ-41", [RKZ_41], "include_suspect", 0.681),
        ("RKZ-42", [RKZ_42], "exclude_suspect", 0.383),
        ("RKZ-42", [RKZ_42], "include_suspect", 0.286),
    ]
    sim_values: dict[tuple[str, str], float] = {}
    for name, wards, basis, target in table:
        cfg = risk_sim.derive_sim_config(
            corrected, wards, basis, replicates=replicates, seed=seed,
        )
        threshold = risk_sim.observed_threshold(corrected, wards).value
        sim = risk_sim.simulate_max_rr(cfg, threshold)
        sim_values[(name, basis)] = sim.p_value
        rows.append(ReproRow(
            f"max-relative-risk p-value, {name}, mu basis {basis} "
            f"(seed {seed}, {replicates} replicates)",
            f"{target}", sim.p_value, "+/- 0.05",
            abs(sim.p_value - target) <= 0.05,
        ))
    rows.append(ReproRow(
        "whole-RKZ ordering: p(include_suspect) < p(exclude_suspect)",
        "0.042 < 0.121",
        sim_values[("whole RKZ", "exclude_suspect")]
        - sim_values[("whole RKZ", "include_suspect")],
        "strict inequality",
        sim_values[("whole RKZ", "include_suspect")]
        < sim_values[("whole RKZ", "exclude_suspect")],
    ))

    # the original pipeline product, on the original data variant
    pipeline = frequentist.elffers_pipeline(original, jkz_multiplier=27)
    rows.append(ReproRow(
        "original pipeline product (x27 at JKZ, original variant; NOT a p-value)",
        "reported as less than 1 in 342 million", pipeline.p_value,
        "order of magnitude: in [1e-10, 1e-7]; no equality asserted",
        1e-10 <= pipeline.p_value <= 1e-7,
    ))

    # conditional binomial vs pooled hypergeometric
    binom = poisson_model.conditional_binomial_test(corrected, rkz).p_value
    ratio = binom / pooled
    rows.append(ReproRow(
        "conditional binomial vs pooled hypergeometric",
        "almost the same", ratio, "ratio within a factor of 1.5",
        (1 / 1.5) <= ratio <= 1.5,
    ))

    rows.append(ReproRow(
        "pooled RKZ tail, exact value for reference (see notes)",
        "paper prints 0.0038; the exact >=6 tail with the corrected counts "
        "is 0.0045, while the tail with the uncorrected 59 shifts is 0.0038",
        hypergeom_tail(675, 61, 19, 6), "informational", True,
    ))
    return rows


def render_repro_table(rows: list[ReproRow]) -> str:
    lines = ["label | paper value | computed | tolerance | status"]
    lines.append("-" * 100)
    for row in rows:
        status = "pass" if row.passed else "FAIL"
        lines.append(
            f"{row.label} | {row.paper_value} | {row.computed!r} | "
            f"{row.tolerance} | {status}"
        )
    failed = sum(1 for r in rows if not r.passed)
    lines.append("-" * 100)
    lines.append(f"{len(rows) - failed}/{len(rows)} rows pass")
    return "\n".join(lines)

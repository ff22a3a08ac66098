"""Statistical evaluation of suspicious coincidences in roster data.

Given counts of shifts and incidents for one or more hospital wards, this
package computes the evidence against a single nurse under four paradigms:

* conditional (hypergeometric) tail tests and their combinations,
* Poisson likelihood ratios with a verbal reporting scale,
* Bayesian odds chaining over independent evidence items,
* Monte Carlo calibration of the maximum relative risk among nurses.

All kernels are exact log-space computations; the Monte Carlo engine is
counter-based and reproduces bit-identical results for any worker count.
"""

from rosterstat.bayes import (
    EvidenceItem,
    OddsState,
    fallacy_report,
    odds_from_probability,
    posterior_probability,
    update,
)
from rosterstat.case import (
    CaseFile,
    NormalRateData,
    WardRoster,
    builtin_paper_case,
    parse_case,
    pool_wards,
    serialize_case,
)
from rosterstat.distributions import (
    DiscreteDist,
    binomial_tail,
    chi2_survival_even,
    convolve_tail,
    hypergeom_dist,
    hypergeom_pmf,
    hypergeom_tail,
    log_binomial,
    poisson_pmf,
)
from rosterstat.frequentist import (
    TestResult,
    bonferroni_min,
    convolved_sum_test,
    elffers_pipeline,
    fisher_combine,
    pooled_test,
    posthoc_multiply,
    ward_tail_p,
)
from rosterstat.poisson_model import (
    IntensityEstimate,
    LikelihoodRatio,
    SuspectIntensity,
    conditional_binomial_test,
    estimate_mu,
    lr_poisson,
    observed_rate,
    verbal_scale,
)
from rosterstat.risk_sim import (
    RelativeRisk,
    SimulationConfig,
    SimulationReport,
    derive_sim_config,
    equal_shift_rr,
    exact_max_rr_tail,
    observed_threshold,
    relative_risk,
    simulate_max_rr,
)

__version__ = "0.1.0"

__all__ = [
    "CaseFile",
    "DiscreteDist",
    "EvidenceItem",
    "IntensityEstimate",
    "LikelihoodRatio",
    "NormalRateData",
    "OddsState",
    "RelativeRisk",
    "SimulationConfig",
    "SimulationReport",
    "SuspectIntensity",
    "TestResult",
    "WardRoster",
    "binomial_tail",
    "bonferroni_min",
    "builtin_paper_case",
    "chi2_survival_even",
    "conditional_binomial_test",
    "convolve_tail",
    "convolved_sum_test",
    "derive_sim_config",
    "elffers_pipeline",
    "equal_shift_rr",
    "estimate_mu",
    "exact_max_rr_tail",
    "fallacy_report",
    "fisher_combine",
    "hypergeom_dist",
    "hypergeom_pmf",
    "hypergeom_tail",
    "log_binomial",
    "lr_poisson",
    "observed_rate",
    "observed_threshold",
    "odds_from_probability",
    "parse_case",
    "poisson_pmf",
    "pool_wards",
    "pooled_test",
    "posterior_probability",
    "posthoc_multiply",
    "relative_risk",
    "serialize_case",
    "simulate_max_rr",
    "update",
    "verbal_scale",
    "ward_tail_p",
]

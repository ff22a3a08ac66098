"""Poisson intensity model: likelihood ratios and the conditional test.

Each nurse's incident count is modelled as Poisson(mu * shifts). The
prosecution and defence differ only in how they estimate the background
intensity mu; the suspect's own intensity mu_L is fitted so her expected
count equals her observed count. All intensities are kept as exact integer
ratios until the final floating-point evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from rosterstat.case import CaseFile, NormalRateData, RKZ_41, RKZ_42, pool_wards
from rosterstat.distributions import binomial_tail
from rosterstat.frequentist import TestResult

MU_BASES = ("exclude_suspect", "include_suspect", "fixed", "augmented")

FAVORS_PROSECUTION = "favors_prosecution"
FAVORS_DEFENCE = "favors_defence"
NEUTRAL = "neutral"

# Verbal reporting bands for a likelihood ratio >= 1. Boundaries are
# closed on the left: [100, 1000) reads "more likely", etc.
_BANDS = (
    (100.0, "slightly more likely"),
    (1000.0, "more likely"),
    (10000.0, "much more likely"),
    (math.inf, "very much more likely"),
)


@dataclass(frozen=True)
class IntensityEstimate:
    """Background incident intensity (incidents per shift) and its basis."""

    mu: float
    basis: str
    numerator: int = 0
    denominator: int = 0

    def __post_init__(self) -> None:
        if self.basis not in MU_BASES:
            raise ValueError(f"basis must be one of {MU_BASES}, got {self.basis!r}")
        if not self.mu > 0:
            raise ValueError(f"intensity must be positive, got {self.mu!r}")
        if self.basis != "fixed":
            if self.denominator <= 0 or self.numerator <= 0:
                raise ValueError("data-derived intensities need positive counts")
            exact = self.numerator / self.denominator
            if not math.isclose(self.mu, exact, rel_tol=1e-12):
                raise ValueError(
                    f"mu {self.mu!r} inconsistent with {self.numerator}/{self.denominator}"
                )

    @property
    def exact(self) -> Fraction:
        if self.basis == "fixed":
            return Fraction(self.mu)
        return Fraction(self.numerator, self.denominator)


@dataclass(frozen=True)
class SuspectIntensity:
    """The suspect's own intensity mu_L and the rule that produced it."""

    mu_L: float
    rule: str = "observed_rate"
    numerator: int = 0
    denominator: int = 0

    def __post_init__(self) -> None:
        if self.rule not in ("observed_rate", "fixed"):
            raise ValueError(f"rule must be 'observed_rate' or 'fixed', got {self.rule!r}")
        if not self.mu_L > 0:
            raise ValueError(f"suspect intensity must be positive, got {self.mu_L!r}")

    @property
    def exact(self) -> Fraction:
        if self.rule == "fixed" or self.denominator == 0:
            return Fraction(self.mu_L)
        return Fraction(self.numerator, self.denominator)


def observed_rate(incidents: int, shifts: int) -> SuspectIntensity:
    """mu_L fitted so the suspect's expected count equals her observed count."""
    if shifts < 1:
        raise ValueError(f"shifts must be >= 1, got {shifts}")
    if incidents < 1:
        raise ValueError("cannot fit intensity 0 (no incidents); LR undefined")
    return SuspectIntensity(
        mu_L=incidents / shifts,
        rule="observed_rate",
        numerator=incidents,
        denominator=shifts,
    )


def _default_ward_names(case: CaseFile) -> list[str]:
    names = [w.name for w in case.wards]
    if RKZ_41 in names and RKZ_42 in names:
        return [RKZ_41, RKZ_42]
    return names


def estimate_mu(
    case: CaseFile,
    basis: str,
    names: Sequence[str] | None = None,
    extra: NormalRateData | None = None,
    fixed_value: float | None = None,
) -> IntensityEstimate:
    """Estimate the background intensity over the named wards (pooled).

    Bases: 'exclude_suspect' uses the other nurses' incidents and shifts
    (the prosecution's convention); 'include_suspect' uses all of them (the
    defence's); 'augmented' extends exclude_suspect with counts from
    adjacent normal-operation periods; 'fixed' takes fixed_value verbatim.
    When names is None the two RKZ wards are pooled if present, matching
    the published analysis.
    """
    if basis not in MU_BASES:
        raise ValueError(f"basis must be one of {MU_BASES}, got {basis!r}")
    if basis == "fixed":
        if fixed_value is None:
            raise ValueError("basis 'fixed' requires fixed_value")
        return IntensityEstimate(mu=float(fixed_value), basis="fixed")
    pool = pool_wards(case, names if names is not None else _default_ward_names(case))
    if basis == "include_suspect":
        numerator = pool.total_incidents
        denominator = pool.total_shifts
    else:
        numerator = pool.total_incidents - pool.suspect_incidents
        denominator = pool.total_shifts - pool.suspect_shifts
        if basis == "augmented":
            if extra is None:
                raise ValueError("basis 'augmented' requires NormalRateData")
            numerator += extra.extra_incidents
            denominator += extra.extra_shifts
    if denominator == 0:
        raise ValueError("zero shifts in the intensity denominator")
    if numerator == 0:
        raise ValueError("cannot fit intensity 0 (no incidents); LR undefined")
    return IntensityEstimate(
        mu=numerator / denominator,
        basis=basis,
        numerator=numerator,
        denominator=denominator,
    )


@dataclass(frozen=True)
class LikelihoodRatio:
    """A likelihood ratio with its verbal band and direction."""

    value: float
    verbal: str
    direction: str

    def __post_init__(self) -> None:
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError(f"likelihood ratio must be positive and finite, got {self.value!r}")


def verbal_scale(lr: float) -> str:
    """Verbal band for a likelihood ratio.

    Ratios below 1 are described by their reciprocal with the hypothesis
    labels swapped, so no unlabeled sub-unit ratio is ever emitted.
    """
    if not lr > 0:
        raise ValueError(f"likelihood ratio must be positive, got {lr!r}")
    if lr == 1.0:
        return "equally likely under H_p as under H_d"
    if lr < 1.0:
        favored, other, magnitude = "H_d", "H_p", 1.0 / lr
    else:
        favored, other, magnitude = "H_p", "H_d", lr
    for upper, text in _BANDS:
        if magnitude < upper:
            return f"{text} under {favored} than under {other}"
    raise AssertionError("unreachable: band table covers (1, inf)")


def lr_poisson(
    mu: IntensityEstimate | float,
    mu_L: SuspectIntensity | float,
    r_j: int,
    k_j: int,
) -> LikelihoodRatio:
    """LR = exp(mu*r_j - mu_L*r_j) * (mu_L / mu) ** k_j.

    The other nurses' Poisson factors are identical under both hypotheses
    and cancel, leaving only the suspect's term. Computed in log space.
    """
    if r_j < 1:
        raise ValueError(f"r_j must be >= 1, got {r_j}")
    if k_j < 0:
        raise ValueError(f"k_j must be >= 0, got {k_j}")
    mu_exact = mu.exact if isinstance(mu, IntensityEstimate) else Fraction(mu)
    mu_L_exact = mu_L.exact if isinstance(mu_L, SuspectIntensity) else Fraction(mu_L)
    if mu_exact <= 0:
        raise ValueError("background intensity must be positive")
    if mu_L_exact <= 0:
        raise ValueError("suspect intensity must be positive" if k_j == 0
                         else "k_j > 0 with zero suspect intensity")
    log_lr = float((mu_exact - mu_L_exact) * r_j) + k_j * (
        math.log(mu_L_exact) - math.log(mu_exact)
    )
    value = math.exp(log_lr)
    if mu_exact == mu_L_exact:
        value = 1.0
    direction = NEUTRAL if value == 1.0 else (
        FAVORS_PROSECUTION if value > 1.0 else FAVORS_DEFENCE
    )
    return LikelihoodRatio(value=value, verbal=verbal_scale(value), direction=direction)


def conditional_binomial_test(
    case: CaseFile,
    names: Sequence[str] | None = None,
    mu_ratio_equal: bool = True,
    mu: IntensityEstimate | None = None,
    mu_L: SuspectIntensity | None = None,
) -> TestResult:
    """Exact test of the suspect's count given the grand total of incidents.

    Conditional on the total N incidents, the suspect's count is
    Binomial(N, p) with p = mu_L*r_L / (mu_L*r_L + mu*r). Under the null
    mu_L = mu (mu_ratio_equal=True) the intensities cancel and p reduces to
    r_L / (r_L + r), needing no intensity estimate at all.
    """
    pool = pool_wards(case, names if names is not None else _default_ward_names(case))
    r_L = pool.suspect_shifts
    r_others = pool.total_shifts - pool.suspect_shifts
    total = pool.total_incidents
    if mu_ratio_equal:
        p = Fraction(r_L, r_L + r_others)
    else:
        if mu is None or mu_L is None:
            raise ValueError("mu and mu_L are required when mu_ratio_equal is False")
        num = mu_L.exact * r_L
        p = num / (num + mu.exact * r_others)
    tail = binomial_tail(total, float(p), pool.suspect_incidents)
    return TestResult(
        method="conditional_binomial",
        p_value=tail,
        statistic=float(pool.suspect_incidents),
        components=((pool.name, tail, 1.0),),
        notes=(
            f"Binomial({total}, {p}) tail at {pool.suspect_incidents}, "
            "conditional on the grand total of incidents"
        ),
    )

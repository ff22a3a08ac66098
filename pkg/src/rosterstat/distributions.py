"""Exact discrete-distribution kernels.

Everything here works in log space so that counts like C(1029, 142) never
overflow, and tail sums use compensated summation so that bounds at the
1e-7 level survive cancellation. Probabilities that land within 1e-12 of
[0, 1] are clamped to the boundary; anything further out raises, because a
larger excursion means a bug rather than rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_CLAMP_TOL = 1e-12

# Below this, ln C(n,k) is computed as a compensated sum of log-ratios,
# which keeps the relative error near machine epsilon even when the
# result itself is small (lgamma differences lose absolute accuracy).
_SMALL_K = 64


class ConsistencyError(ArithmeticError):
    """A computed probability fell outside [0, 1] by more than rounding."""


def _clamp_probability(p: float) -> float:
    if p < 0.0:
        if p < -_CLAMP_TOL:
            raise ConsistencyError(f"probability {p!r} below 0 beyond tolerance")
        return 0.0
    if p > 1.0:
        if p > 1.0 + _CLAMP_TOL:
            raise ConsistencyError(f"probability {p!r} above 1 beyond tolerance")
        return 1.0
    return p


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    if n < 0 or k < 0:
        raise ValueError(f"log_binomial requires non-negative arguments, got ({n}, {k})")
    if k > n:
        raise ValueError(f"log_binomial requires k <= n, got k={k} > n={n}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    if k <= _SMALL_K:
        return math.fsum(math.log((n - k + i) / i) for i in range(1, k + 1))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class DiscreteDist:
    """A pmf over a contiguous integer support starting at ``support_min``."""

    support_min: int
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a nonempty 1-d vector")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(probs.tolist())
        if abs(total - 1.0) > _CLAMP_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 within 1e-12")

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.probabilities) - 1


def _check_hypergeom_params(n: int, r: int, k: int) -> None:
    if not (0 <= r <= n):
        raise ValueError(f"need 0 <= r <= n, got r={r}, n={n}")
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")


def hypergeom_pmf(n: int, r: int, k: int, x: int) -> float:
    """P(suspect saw exactly x of the k incidents | r of n shifts were hers).

    This is C(r,x) * C(n-r, k-x) / C(n,k): incidents land uniformly on
    shifts, conditioned on the observed totals, which cancels the unknown
    per-shift incident probability.
    """
    _check_hypergeom_params(n, r, k)
    if x < max(0, k - (n - r)) or x > min(r, k):
        return 0.0
    log_p = log_binomial(r, x) + log_binomial(n - r, k - x) - log_binomial(n, k)
    return _clamp_probability(math.exp(log_p))


def hypergeom_tail(n: int, r: int, k: int, x_min: int) -> float:
    """P(suspect saw at least x_min incidents) under the conditional model."""
    _check_hypergeom_params(n, r, k)
    lo = max(0, k - (n - r))
    hi = min(r, k)
    if x_min <= lo:
        return 1.0
    if x_min > hi:
        return 0.0
    return _clamp_probability(
        math.fsum(hypergeom_pmf(n, r, k, x) for x in range(x_min, hi + 1))
    )


def hypergeom_dist(n: int, r: int, k: int) -> DiscreteDist:
    """The full conditional pmf as a DiscreteDist (for convolutions)."""
    _check_hypergeom_params(n, r, k)
    lo = max(0, k - (n - r))
    hi = min(r, k)
    probs = np.array([hypergeom_pmf(n, r, k, x) for x in range(lo, hi + 1)])
    total = math.fsum(probs.tolist())
    # renormalize rounding residue (|1 - total| <= a few ulps) so the
    # DiscreteDist invariant holds exactly
    return DiscreteDist(lo, probs / total)


def binomial_tail(trials: int, success_prob: float, x_min: int) -> float:
    """P(X >= x_min) for X ~ Binomial(trials, success_prob)."""
    if trials < 0:
        raise ValueError(f"trials must be non-negative, got {trials}")
    if not (0.0 <= success_prob <= 1.0):
        raise ValueError(f"success_prob must be in [0, 1], got {success_prob!r}")
    if x_min <= 0:
        return 1.0
    if x_min > trials:
        return 0.0
    p = success_prob
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    terms = [
        math.exp(log_binomial(trials, x) + x * log_p + (trials - x) * log_q)
        for x in range(x_min, trials + 1)
    ]
    return _clamp_probability(math.fsum(terms))


def poisson_pmf(mean: float, k: int) -> float:
    """P(X = k) for X ~ Poisson(mean)."""
    if mean < 0:
        raise ValueError(f"mean must be non-negative, got {mean!r}")
    if k < 0:
        return 0.0
    if mean == 0.0:
        return 1.0 if k == 0 else 0.0
    return _clamp_probability(math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1)))


def chi2_survival_even(x: float, dof: int) -> float:
    """Survival function of the chi-squared distribution with even dof.

    For dof = 2n the closed form Q(x) = exp(-x/2) * sum_{j<n} (x/2)^j / j!
    holds exactly, so no incomplete-gamma machinery is needed.
    """
    if dof <= 0 or dof % 2 != 0:
        raise ValueError(f"dof must be an even positive integer, got {dof}")
    if x < 0:
        raise ValueError(f"statistic must be non-negative, got {x!r}")
    n = dof // 2
    half = x / 2.0
    if half == 0.0:
        return 1.0
    log_half = math.log(half)
    terms = [math.exp(-half + j * log_half - math.lgamma(j + 1)) for j in range(n)]
    return _clamp_probability(math.fsum(terms))


def convolve_tail(d1: DiscreteDist, d2: DiscreteDist, s_min: int) -> float:
    """P(X1 + X2 >= s_min) for independent X1 ~ d1, X2 ~ d2.

    Exact double summation; for each point of the shorter support the other
    distribution contributes a precomputed suffix sum.
    """
    if len(d1.probabilities) > len(d2.probabilities):
        d1, d2 = d2, d1
    if s_min <= d1.support_min + d2.support_min:
        return 1.0
    # suffix[j] = P(X2 >= d2.support_min + j), computed back to front
    suffix = np.zeros(len(d2.probabilities) + 1)
    acc = 0.0
    comp = 0.0
    for j in range(len(d2.probabilities) - 1, -1, -1):
        # Kahan accumulation; the tail bound must survive cancellation
        y = float(d2.probabilities[j]) - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        suffix[j] = acc
    pieces = []
    for i, p1 in enumerate(d1.probabilities.tolist()):
        need = s_min - (d1.support_min + i) - d2.support_min
        if need <= 0:
            pieces.append(p1)
        elif need <= len(d2.probabilities):
            pieces.append(p1 * suffix[need])
        # else: X2 cannot reach, contributes 0
    return _clamp_probability(math.fsum(pieces))

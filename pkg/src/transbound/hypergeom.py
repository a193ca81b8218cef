"""Exact hypergeometric machinery for random train/test splits of a fixed sample.

A classifier that makes k errors on a fixed sample of N = m + u points, of
which a uniformly random m-subset becomes the training set, makes a
hypergeometrically distributed number of training errors.  Everything here
is computed from that distribution exactly (in log space); no normal or
Poisson approximation is used anywhere.

The implicit transductive bound machinery on top of it (the threshold
epsilon*(h) and the resulting risk bounds, both the relative-deviation and
the absolute-deviation flavours) follows Vapnik's classical construction
with a prior mass p(h) on the hypothesis.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import gammaln
import mpmath

from .records import BoundValue

VARIANTS = ("relative", "absolute")

# Above this n, differences of math.lgamma values lose too much to
# cancellation for the 1e-10 accuracy contract; switch to 30-digit arithmetic.
_LGAMMA_SAFE_N = 20000


@dataclass(frozen=True)
class HypergeomSpec:
    """Population of m + u points containing k errors, sampled m at a time."""

    m: int
    u: int
    k: int

    def __post_init__(self):
        if self.m < 1 or self.u < 1:
            raise ValueError("m and u must be positive integers")
        if not 0 <= self.k <= self.m + self.u:
            raise ValueError(f"k={self.k} outside 0..{self.m + self.u}")

    @property
    def n_total(self) -> int:
        return self.m + self.u


@dataclass(frozen=True)
class EpsilonStar:
    """Minimal deviation threshold whose worst-case tail drops below p(h)*delta.

    ``achieving_k`` is the (smallest) full-sample error count attaining the
    max in the worst-case tail at ``value``.
    """

    value: float
    variant: str
    achieving_k: int

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.value < 0:
            raise ValueError("epsilon* must be nonnegative")


def log_binomial(n: int, r: int) -> float:
    """Natural log of the binomial coefficient C(n, r).

    Absolute error is below 1e-10 for n up to 1e6: small n goes through
    math.lgamma, large n through 30-digit mpmath so the only error left is
    the final rounding to a double.
    """
    if n < 0 or r < 0 or r > n:
        raise ValueError(f"need 0 <= r <= n, got n={n}, r={r}")
    if r == 0 or r == n:
        return 0.0
    if n <= _LGAMMA_SAFE_N:
        return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)
    with mpmath.workdps(30):
        v = mpmath.loggamma(n + 1) - mpmath.loggamma(r + 1) - mpmath.loggamma(n - r + 1)
        return float(v)


class _SplitTable:
    """Per-(m, u) cache of deviations and cumulative log-tails for every k.

    For each full-sample error count k the feasible training error counts are
    r in max(k-u, 0)..min(m, k).  The deviation (k-r)/u - r/m is strictly
    decreasing in r, so the tail over {deviation > eps} is a prefix of the
    r-ascending probability vector; we store cumulative log-sums of that
    prefix once and answer any tail query with a binary search.

    ``neg_dev`` holds the negated deviations (ascending) for searchsorted;
    ``neg_scaled`` holds the same multiplied by sqrt((m+u)/k), the form the
    relative-deviation machinery compares against.  Using one precomputed
    array on both the tail side and the threshold-enumeration side keeps
    threshold comparisons exact in floating point.
    """

    def __init__(self, m: int, u: int):
        self.m = m
        self.u = u
        n = m + u
        self.n_total = n
        gl = gammaln(np.arange(n + 2, dtype=np.float64))

        def lb(nn, rr):
            return gl[nn + 1] - gl[rr + 1] - gl[nn - rr + 1]

        log_total = lb(n, m)
        self.neg_dev = []
        self.neg_scaled = []
        self.log_pmfs = []
        self.log_tails = []
        for k in range(n + 1):
            r = np.arange(max(k - u, 0), min(m, k) + 1, dtype=np.int64)
            dev = (k - r) / u - r / m
            logpmf = lb(np.full_like(r, k), r) + lb(np.full_like(r, n - k), m - r) - log_total
            self.neg_dev.append(-dev)
            if k >= 1:
                self.neg_scaled.append(-dev * math.sqrt(n / k))
            else:
                self.neg_scaled.append(-dev)
            self.log_pmfs.append(logpmf)
            self.log_tails.append(np.logaddexp.accumulate(logpmf))

    def tail(self, k: int, eps: float, scaled: bool) -> float:
        """Probability that the (scaled) deviation strictly exceeds eps."""
        neg = self.neg_scaled[k] if scaled else self.neg_dev[k]
        j = int(np.searchsorted(neg, -eps, side="left"))
        if j == 0:
            return 0.0
        return float(math.exp(self.log_tails[k][j - 1]))

    def log_pmf(self, k: int, r: int) -> float:
        lo = max(k - self.u, 0)
        return float(self.log_pmfs[k][r - lo])


@lru_cache(maxsize=32)
def _split_table(m: int, u: int) -> _SplitTable:
    return _SplitTable(m, u)


def hypergeom_pmf(r: int, spec: HypergeomSpec) -> float:
    """Probability that exactly r of the k errors land in the training set.

    Zero outside the feasible range max(k-u, 0) <= r <= min(m, k); computed
    in log space and exponentiated.
    """
    k, m, u = spec.k, spec.m, spec.u
    if r < max(k - u, 0) or r > min(m, k):
        return 0.0
    return math.exp(_split_table(m, u).log_pmf(k, r))


def deviation_tail(eps: float, spec: HypergeomSpec) -> float:
    """Exact Pr{R(test) - R(train) > eps} over uniform without-replacement splits."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return _split_table(spec.m, spec.u).tail(spec.k, eps, scaled=False)


def _gamma_argmax(eps: float, m: int, u: int, variant: str) -> tuple[float, int]:
    table = _split_table(m, u)
    best, best_k = 0.0, 0
    scaled = variant == "relative"
    for k in range(1, table.n_total + 1):
        t = table.tail(k, eps, scaled=scaled)
        if t > best:
            best, best_k = t, k
    return best, best_k


def gamma(eps: float, m: int, u: int, variant: str = "absolute") -> float:
    """Worst case over k of the exact deviation tail.

    ``absolute`` maximises Pr{deviation > eps} itself; ``relative`` scales the
    threshold by sqrt(k/(m+u)) before taking the tail, which is the form the
    relative-deviation bound inverts.  k = 0 contributes 0 either way.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    return _gamma_argmax(eps, m, u, variant)[0]


def epsilon_star(prior_mass: float, delta: float, m: int, u: int,
                 variant: str = "absolute") -> EpsilonStar:
    """Exact minimal eps with gamma(eps) <= prior_mass * delta.

    The worst-case tail is a right-continuous step function that only jumps
    at the finitely many attainable (scaled) deviations, so the minimiser is
    found by enumerating those thresholds (plus 0) and binary-searching the
    monotone predicate; no continuum root finding is involved.  The largest
    threshold always satisfies the constraint (its tail is 0), so the search
    cannot fail.
    """
    if not 0.0 < prior_mass <= 1.0:
        raise ValueError("prior_mass must be in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    target = prior_mass * delta

    table = _split_table(m, u)
    negs = table.neg_scaled if variant == "relative" else table.neg_dev
    cand = np.unique(np.concatenate([-neg[neg < 0] for neg in negs[1:]]))
    cand = np.concatenate([[0.0], cand])

    # gamma is nonincreasing in eps, so "gamma(cand[i]) <= target" is a
    # monotone predicate over the ascending candidates.
    lo, hi = 0, len(cand) - 1
    if gamma(float(cand[0]), m, u, variant) <= target:
        hi = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if gamma(float(cand[mid]), m, u, variant) <= target:
            hi = mid
        else:
            lo = mid + 1
    value = float(cand[hi])
    _, k_at = _gamma_argmax(value, m, u, variant)
    return EpsilonStar(value=value, variant=variant, achieving_k=k_at)


def vapnik_bound(emp_risk: float, eps_star: EpsilonStar, m: int, u: int) -> BoundValue:
    """Test-risk bound implied by an inverted deviation threshold.

    Relative variant: R + e^2 u / (2(m+u)) + e * sqrt(R + (e u / (2(m+u)))^2)
    with e = eps_star.value; absolute variant: R + e.
    """
    if not 0.0 <= emp_risk <= 1.0:
        raise ValueError("emp_risk must be in [0, 1]")
    e = eps_star.value
    if eps_star.variant == "absolute":
        raw = emp_risk + e
        name = "vapnik_absolute"
    else:
        half = e * u / (2.0 * (m + u))
        raw = emp_risk + e * half + e * math.sqrt(emp_risk + half * half)
        name = "vapnik_relative"
    return BoundValue(raw=raw, clamped=min(raw, 1.0), name=name)

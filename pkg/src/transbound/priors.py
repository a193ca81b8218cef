"""Data-dependent priors built from the unlabelled full sample.

Seeing the full sample before labels arrive lets the prior concentrate on
hypotheses that a compression scheme or a clustering sweep could actually
output.  Two constructions live here:

* a uniform mixture over compression sizes tau = 1..m, each sub-prior
  uniform over the (worst case) 2^tau * C(m+u, tau) dichotomies of
  tau-subsets, and
* per-cluster-count sub-priors p_tau(h) = 2^-tau mixed uniformly over
  tau = 1..c (times 1/k for an ensemble of k clusterers).

Each construction exposes the complexity term ln(1/p(h)) its bound consumes,
in both the published form and the tighter form the mass actually implies.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .hypergeom import log_binomial
from .records import BoundValue

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CompressionPrior:
    """Mixture prior over compression sizes for an m + u point full sample."""

    m: int
    u: int
    max_tau: int | None = None

    def __post_init__(self):
        if self.m < 1 or self.u < 1:
            raise ValueError("m and u must be positive")
        tau = self.m if self.max_tau is None else self.max_tau
        object.__setattr__(self, "max_tau", tau)
        if not 1 <= tau <= self.m:
            raise ValueError("max_tau must lie in 1..m")

    def log_subprior_size(self, tau: int) -> float:
        """ln of the worst-case dichotomy count 2^tau C(m+u, tau)."""
        if not 1 <= tau <= self.max_tau:
            raise ValueError("tau out of range")
        return tau * _LN2 + log_binomial(self.m + self.u, tau)

    def log_mass(self, s: int) -> float:
        """ln of the mixture mass guaranteed to one size-s hypothesis."""
        return -(math.log(self.max_tau) + self.log_subprior_size(s))


@dataclass(frozen=True)
class ClusteringPrior:
    """Sub-priors 2^-tau over cluster labelings, mixed over tau = 1..c."""

    c: int
    k_ensemble: int = 1

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("cluster budget c must be >= 1")
        if self.k_ensemble < 1:
            raise ValueError("ensemble size must be >= 1")

    def mass(self, tau: int) -> float:
        if not 1 <= tau <= self.c:
            raise ValueError("tau out of range")
        return math.exp(-self.log_inverse_mass(tau))

    def log_inverse_mass(self, tau: int) -> float:
        """ln(1/p(h)) for a hypothesis constant on tau clusters."""
        return clustering_complexity(tau, self.c, self.k_ensemble, variant="exact")


def compression_complexity(s: int, m: int, u: int, variant: str = "relaxed") -> float:
    """Complexity ln(m / p_s(h)) of a hypothesis with compression size s.

    ``relaxed`` is the closed form s ln(2e(m+u)/s) + ln m obtained from
    C(m+u, s) <= (e(m+u)/s)^s; ``exact`` is ln m + s ln 2 + ln C(m+u, s).
    """
    if not 1 <= s <= m:
        raise ValueError("compression size must lie in 1..m")
    if variant == "relaxed":
        return s * math.log(2.0 * math.e * (m + u) / s) + math.log(m)
    if variant == "exact":
        return math.log(m) + s * _LN2 + log_binomial(m + u, s)
    raise ValueError(f"unknown variant {variant!r}")


def compression_bound(emp_risk: float, s: int, m: int, u: int, delta: float,
                      variant: str = "derived") -> BoundValue:
    """Test-risk bound for a compression scheme with observed size s.

    ``printed`` divides the complexity by m; ``derived`` substitutes it into
    the Serfling-type bound verbatim, dividing by 2m, and is tighter by
    exactly sqrt(2).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if not 0.0 <= emp_risk <= 1.0:
        raise ValueError("emp_risk must lie in [0, 1]")
    comp = compression_complexity(s, m, u, "relaxed") + math.log(1.0 / delta)
    if variant == "printed":
        denom = float(m)
    elif variant == "derived":
        denom = 2.0 * m
    else:
        raise ValueError(f"unknown variant {variant!r}")
    raw = emp_risk + math.sqrt((m + u) / u * (u + 1) / u * comp / denom)
    return BoundValue(raw=raw, clamped=min(raw, 1.0), name=f"compression_{variant}")


def clustering_complexity(tau: int, c: int, k_ensemble: int = 1,
                          variant: str = "exact") -> float:
    """Complexity term of a tau-cluster labeling, without the ln(1/delta) part.

    ``printed``: tau + ln(kc); ``exact``: tau ln 2 + ln(kc), which equals
    ln(1/p(h)) for the mass p(h) = 2^-tau / (kc).
    """
    if not 1 <= tau <= c:
        raise ValueError("tau must lie in 1..c")
    if k_ensemble < 1:
        raise ValueError("ensemble size must be >= 1")
    if variant == "printed":
        return tau + math.log(k_ensemble * c)
    if variant == "exact":
        return tau * _LN2 + math.log(k_ensemble * c)
    raise ValueError(f"unknown variant {variant!r}")


def clustering_bound(emp_risk: float, tau: int, c: int, m: int, u: int, delta: float,
                     k_ensemble: int = 1, variant: str = "exact") -> BoundValue:
    """Test-risk bound for the cluster-then-label hypothesis on tau clusters."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if not 0.0 <= emp_risk <= 1.0:
        raise ValueError("emp_risk must lie in [0, 1]")
    comp = clustering_complexity(tau, c, k_ensemble, variant) + math.log(1.0 / delta)
    raw = emp_risk + math.sqrt((m + u) / u * (u + 1) / u * comp / (2.0 * m))
    return BoundValue(raw=raw, clamped=min(raw, 1.0), name=f"clustering_{variant}")


def compression_mixture_log_total(m: int, u: int) -> float:
    """ln of the compression mixture's total mass, all terms kept in log space.

    Sums (1/m) * |H_tau| * p_tau(h) over tau with |H_tau| = 2^tau C(m+u, tau)
    and p_tau uniform; the result should be ln 1 = 0 up to rounding.
    """
    prior = CompressionPrior(m=m, u=u)
    terms = [
        -math.log(m) + prior.log_subprior_size(tau) - prior.log_subprior_size(tau)
        for tau in range(1, m + 1)
    ]
    return float(np.logaddexp.reduce(terms))


def clustering_mixture_total(c: int) -> Fraction:
    """Exact total mass of the clustering prior: sum of 2^tau * p_tau over tau."""
    return sum(
        (Fraction(1, c) * (2 ** tau) * Fraction(1, 2 ** tau) for tau in range(1, c + 1)),
        Fraction(0),
    )

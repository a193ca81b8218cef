"""Explicit PAC-Bayesian risk bounds for transduction.

Every bound here controls the test risk of a classifier chosen after seeing
the labelled half of a fixed full sample, in terms of its training risk, a
complexity term (a KL divergence to a sample-dependent prior for Gibbs
classifiers, or the log inverse prior mass for deterministic ones) and the
confidence parameter.  Two bounding routes appear throughout: reduction to
independence (Hoeffding) and direct without-replacement inequalities
(Serfling for general bounded losses, a counting bound for binary losses);
the direct route trades a sqrt((m+u)/u) factor for the reduction route's
(m+u)/u and stays meaningful even for a single test point.
"""

from dataclasses import dataclass
import math

import numpy as np

from .records import BoundValue

__all__ = [
    "BoundInputs",
    "BoundValue",
    "GibbsEnsemble",
    "det_bound",
    "full_to_test",
    "gibbs_bound",
    "gibbs_risk",
    "graepel_inductive_bound",
    "invert_self_bounding",
    "kl_divergence",
    "risk_mix",
]


@dataclass(frozen=True)
class BoundInputs:
    """Arguments shared by every explicit bound.

    Exactly one of ``prior_mass`` (deterministic bounds) and ``kl_value``
    (Gibbs bounds) must be given.  ``m`` >= 2 is enforced by the variants
    that divide by m - 1, not here, because the Serfling-type bound is
    valid for m = 1.
    """

    m: int
    u: int
    delta: float
    emp_risk: float
    prior_mass: float | None = None
    kl_value: float | None = None
    loss_bound: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.u < 1:
            raise ValueError("m and u must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.loss_bound <= 0:
            raise ValueError("loss bound must be positive")
        if not 0.0 <= self.emp_risk <= self.loss_bound:
            raise ValueError("emp_risk must lie in [0, loss_bound]")
        if (self.prior_mass is None) == (self.kl_value is None):
            raise ValueError("exactly one of prior_mass and kl_value must be set")
        if self.prior_mass is not None and not 0.0 < self.prior_mass <= 1.0:
            raise ValueError("prior_mass must be in (0, 1]")
        if self.kl_value is not None and self.kl_value < 0.0:
            raise ValueError("kl_value must be nonnegative")


@dataclass(frozen=True)
class GibbsEnsemble:
    """Finite hypothesis set (full-sample labelings) with prior and posterior."""

    hypotheses: np.ndarray  # (n_hyp, n_points), entries +-1
    posterior: np.ndarray
    prior: np.ndarray

    def __post_init__(self):
        n_hyp = self.hypotheses.shape[0]
        for name, vec in (("posterior", self.posterior), ("prior", self.prior)):
            if vec.shape != (n_hyp,):
                raise ValueError(f"{name} length must match hypothesis count")
            if abs(float(vec.sum()) - 1.0) > 1e-12:
                raise ValueError(f"{name} must sum to 1")
            if (vec < 0).any():
                raise ValueError(f"{name} must be nonnegative")


def full_to_test(full_excess: float, m: int, u: int) -> float:
    """Convert a bound excess over the full-sample risk into one over the test risk."""
    if u < 1:
        raise ValueError("u must be positive")
    return (m + u) / u * full_excess


def risk_mix(r_m: float, r_u: float, m: int, u: int) -> float:
    """Full-sample risk as the exact convex mixture of train and test risks."""
    if not (0.0 <= r_m <= 1.0 and 0.0 <= r_u <= 1.0):
        raise ValueError("risks must lie in [0, 1]")
    return (m * r_m + u * r_u) / (m + u)


def invert_self_bounding(a: float, b: float) -> float:
    """Upper bound a + b + sqrt(ab) for any z satisfying z <= a + sqrt(z b)."""
    if a < 0 or b < 0:
        raise ValueError("arguments must be nonnegative")
    return a + b + math.sqrt(a * b)


def kl_divergence(posterior: np.ndarray, prior: np.ndarray) -> float:
    """KL divergence between two finite distributions, 0 ln 0 := 0."""
    q = np.asarray(posterior, dtype=float)
    p = np.asarray(prior, dtype=float)
    mask = q > 0
    if (p[mask] == 0).any():
        return math.inf
    return float(np.sum(q[mask] * np.log(q[mask] / p[mask])))


def _reduction_complexity(kl_value: float, m: int, delta: float) -> float:
    return kl_value + math.log(m / delta)


def _direct_complexity(kl_value: float, m: int, u: int, delta: float,
                       population_term: bool = True) -> float:
    # the 7 ln(m+u+1) slack comes from the counting bound behind this route;
    # tests zero it to compare the two routes' sqrt factors structurally
    extra = 7.0 * math.log(m + u + 1.0) if population_term else 0.0
    return kl_value + math.log(m / delta) + extra


def _finish(raw: float, name: str, loss_bound: float) -> BoundValue:
    return BoundValue(raw=raw, clamped=min(raw / loss_bound, 1.0), name=name)


def gibbs_bound(inputs: BoundInputs, variant: str = "direct", *,
                _population_term: bool = True) -> BoundValue:
    """Test-risk bound for a Gibbs classifier with complexity D(q||p).

    ``reduction``:
        R + ((m+u)/u) (sqrt(2 R K / (m-1)) + 2 K / (m-1)),  K = D + ln(m/delta)
    ``direct`` (binary loss):
        R + sqrt((2 R (m+u)/u) T / (m-1)) + 2 T / (m-1),
        T = D + ln(m/delta) + 7 ln(m+u+1)
    """
    if inputs.kl_value is None:
        raise ValueError("gibbs_bound needs kl_value complexity")
    if inputs.m < 2:
        raise ValueError("m must be >= 2")
    if inputs.loss_bound != 1.0:
        raise ValueError("gibbs bounds are stated for binary (B = 1) losses")
    r, m, u = inputs.emp_risk, inputs.m, inputs.u
    if variant == "reduction":
        k = _reduction_complexity(inputs.kl_value, m, inputs.delta)
        raw = r + (m + u) / u * (math.sqrt(2.0 * r * k / (m - 1)) + 2.0 * k / (m - 1))
        return _finish(raw, "gibbs_reduction", 1.0)
    if variant == "direct":
        t = _direct_complexity(inputs.kl_value, m, u, inputs.delta, _population_term)
        raw = r + math.sqrt(2.0 * r * (m + u) / u * t / (m - 1)) + 2.0 * t / (m - 1)
        return _finish(raw, "gibbs_direct", 1.0)
    raise ValueError(f"unknown variant {variant!r}")


def det_bound(inputs: BoundInputs, variant: str = "serfling") -> BoundValue:
    """Test-risk bound for a deterministic classifier with prior mass p(h).

    ``reduction`` and ``direct`` are the Gibbs forms with D replaced by
    ln(1/p) (binary loss, m >= 2); ``serfling`` is
        R + B sqrt(((m+u)/u) ((u+1)/u) (ln(1/p) + ln(1/delta)) / (2m)),
    valid for any loss range B and any m >= 1.
    """
    if inputs.prior_mass is None:
        raise ValueError("det_bound needs prior_mass complexity")
    log_inv_p = math.log(1.0 / inputs.prior_mass)
    if variant == "serfling":
        m, u, b = inputs.m, inputs.u, inputs.loss_bound
        comp = (log_inv_p + math.log(1.0 / inputs.delta)) / (2.0 * m)
        raw = inputs.emp_risk + b * math.sqrt((m + u) / u * (u + 1) / u * comp)
        return _finish(raw, "serfling", b)
    if variant in ("reduction", "direct"):
        proxy = BoundInputs(
            m=inputs.m, u=inputs.u, delta=inputs.delta, emp_risk=inputs.emp_risk,
            kl_value=log_inv_p, loss_bound=inputs.loss_bound,
        )
        out = gibbs_bound(proxy, variant)
        return _finish(out.raw, f"det_{variant}", inputs.loss_bound)
    raise ValueError(f"unknown variant {variant!r}")


def gibbs_risk(ensemble: GibbsEnsemble, target: np.ndarray, subset) -> float:
    """Posterior-expected 0/1 error of the ensemble over the given point ids."""
    idx = np.asarray(list(subset), dtype=int)
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    errs = (ensemble.hypotheses[:, idx] != np.asarray(target)[idx]).mean(axis=1)
    return float(np.dot(ensemble.posterior, errs))


def graepel_inductive_bound(emp_risk: float, m: int, s: int, delta: float) -> BoundValue:
    """Inductive compression-scheme baseline with s observed support vectors.

    (m/(m-s)) R + sqrt((s ln(2em/s) + ln(1/delta) + 2 ln m) / (2(m-s))),
    with the s ln(2em/s) term read as 0 at s = 0.
    """
    if not 0 <= s < m:
        raise ValueError("need 0 <= s < m")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    s_term = 0.0 if s == 0 else s * math.log(2.0 * math.e * m / s)
    raw = m / (m - s) * emp_risk + math.sqrt(
        (s_term + math.log(1.0 / delta) + 2.0 * math.log(m)) / (2.0 * (m - s))
    )
    return _finish(raw, "graepel_inductive", 1.0)

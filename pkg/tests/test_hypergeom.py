"""Exact-tail machinery checked against brute-force split enumeration."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from transbound.hypergeom import (
    EpsilonStar,
    HypergeomSpec,
    deviation_tail,
    epsilon_star,
    gamma,
    hypergeom_pmf,
    log_binomial,
    vapnik_bound,
)


def enumerate_splits(m, u, k):
    """Training-error counts r over all C(m+u, m) splits; errors sit at 0..k-1."""
    n = m + u
    for subset in itertools.combinations(range(n), m):
        yield sum(1 for i in subset if i < k)


def brute_pmf(r, m, u, k):
    counts = [rr for rr in enumerate_splits(m, u, k)]
    return Fraction(sum(1 for rr in counts if rr == r), len(counts))


def brute_tail(eps, m, u, k):
    total = hits = 0
    for r in enumerate_splits(m, u, k):
        total += 1
        if (k - r) / u - r / m > eps:
            hits += 1
    return Fraction(hits, total)


class TestLogBinomial:
    def test_small_exact(self):
        assert log_binomial(4, 2) == pytest.approx(math.log(6), abs=1e-12)

    @pytest.mark.parametrize("n,r", [(17, 0), (17, 17), (0, 0)])
    def test_edges(self, n, r):
        assert log_binomial(n, r) == 0.0

    def test_against_exact_integers(self):
        for n in range(0, 61):
            for r in range(0, n + 1):
                assert log_binomial(n, r) == pytest.approx(
                    math.log(math.comb(n, r)), abs=1e-11
                )

    @pytest.mark.parametrize(
        "n,r",
        [(10 ** 6, 500_000), (10 ** 6, 123_456), (10 ** 6, 3), (54_321, 10_000)],
    )
    def test_large_n_accuracy(self, n, r):
        import mpmath

        with mpmath.workdps(40):
            want = float(
                mpmath.loggamma(n + 1) - mpmath.loggamma(r + 1) - mpmath.loggamma(n - r + 1)
            )
        assert abs(log_binomial(n, r) - want) <= 1e-10

    @pytest.mark.parametrize("n,r", [(3, 4), (-1, 0), (5, -2)])
    def test_domain_errors(self, n, r):
        with pytest.raises(ValueError):
            log_binomial(n, r)


class TestPmf:
    def test_two_thirds(self):
        spec = HypergeomSpec(m=2, u=2, k=2)
        want = brute_pmf(1, 2, 2, 2)
        assert want == Fraction(2, 3)
        assert hypergeom_pmf(1, spec) == pytest.approx(float(want), rel=1e-13)

    def test_no_errors(self):
        assert hypergeom_pmf(0, HypergeomSpec(m=5, u=3, k=0)) == pytest.approx(1.0)

    def test_outside_support_is_zero(self):
        spec = HypergeomSpec(m=3, u=2, k=4)
        assert hypergeom_pmf(0, spec) == 0.0  # k - u = 2 > 0
        assert hypergeom_pmf(4, spec) == 0.0  # r > m

    @pytest.mark.parametrize("m,u,k", [(3, 4, 2), (5, 5, 7), (2, 6, 0), (4, 4, 8)])
    def test_matches_enumeration(self, m, u, k):
        for r in range(0, m + 1):
            want = brute_pmf(r, m, u, k)
            assert hypergeom_pmf(r, HypergeomSpec(m, u, k)) == pytest.approx(
                float(want), abs=1e-13
            )

    def test_normalisation(self):
        for m, u in [(7, 9), (20, 40), (30, 30)]:
            for k in range(0, m + u + 1):
                spec = HypergeomSpec(m, u, k)
                s = sum(hypergeom_pmf(r, spec) for r in range(max(k - u, 0), min(m, k) + 1))
                assert abs(s - 1.0) < 1e-12

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HypergeomSpec(m=0, u=2, k=0)
        with pytest.raises(ValueError):
            HypergeomSpec(m=2, u=2, k=5)


class TestDeviationTail:
    def test_small_case(self):
        want = brute_tail(0.5, 2, 2, 2)
        assert want == Fraction(1, 6)
        assert deviation_tail(0.5, HypergeomSpec(2, 2, 2)) == pytest.approx(
            float(want), rel=1e-12
        )

    def test_zero_errors(self):
        assert deviation_tail(0.1, HypergeomSpec(4, 4, 0)) == 0.0

    def test_above_max_deviation(self):
        for k in range(0, 9):
            spec = HypergeomSpec(4, 4, k)
            assert deviation_tail(k / 4, spec) == 0.0

    @pytest.mark.parametrize("m,u,k", [(3, 5, 4), (4, 4, 3), (5, 3, 6)])
    def test_matches_enumeration_on_grid(self, m, u, k):
        spec = HypergeomSpec(m, u, k)
        for eps in np.linspace(0.0, 1.5, 40):
            want = float(brute_tail(float(eps), m, u, k))
            assert deviation_tail(float(eps), spec) == pytest.approx(want, abs=1e-12)

    def test_nonincreasing_in_eps(self):
        spec = HypergeomSpec(6, 10, 9)
        grid = np.linspace(0, 1, 60)
        vals = [deviation_tail(float(e), spec) for e in grid]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_rejects_negative_eps(self):
        with pytest.raises(ValueError):
            deviation_tail(-0.1, HypergeomSpec(2, 2, 1))


class TestGamma:
    def test_huge_eps_is_zero(self):
        assert gamma(5.0, 4, 4, "absolute") == 0.0
        assert gamma(5.0, 4, 4, "relative") == 0.0

    def test_absolute_at_zero_small_case(self):
        # brute force over every k of Pr{deviation > 0} on the 4-point sample
        want = max(float(brute_tail(0.0, 2, 2, k)) for k in range(5))
        assert want == 0.5
        assert gamma(0.0, 2, 2, "absolute") == pytest.approx(want, rel=1e-12)

    def test_relative_matches_scaled_tails(self):
        m, u = 4, 6
        n = m + u
        for eps in [0.0, 0.3, 0.8, 1.4]:
            want = max(
                float(brute_tail(math.sqrt(k / n) * eps, m, u, k)) for k in range(1, n + 1)
            )
            assert gamma(eps, m, u, "relative") == pytest.approx(want, abs=1e-12)

    def test_nonincreasing(self):
        grid = np.linspace(0, 2, 50)
        for variant in ("absolute", "relative"):
            vals = [gamma(float(e), 3, 5, variant) for e in grid]
            assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


class TestEpsilonStar:
    def test_small_case_absolute(self):
        # thresholds on the 4-point sample are {0, 0.5, 1}; gamma(0) = 1/2,
        # gamma(0.5) = 1/6 <= 0.2, so the minimiser is 0.5 (attained at k=2)
        star = epsilon_star(1.0, 0.2, 2, 2, "absolute")
        assert star.value == pytest.approx(0.5, abs=1e-15)
        assert star.achieving_k == 2

    def test_trivial_when_constraint_already_met(self):
        g0 = gamma(0.0, 2, 2, "absolute")
        star = epsilon_star(1.0, min(0.99, g0 + 0.3), 2, 2, "absolute")
        assert star.value == 0.0

    def test_nonincreasing_in_delta(self):
        deltas = [0.01, 0.05, 0.1, 0.3, 0.6]
        vals = [epsilon_star(0.5, d, 5, 7, "absolute").value for d in deltas]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
        vals = [epsilon_star(0.5, d, 5, 7, "relative").value for d in deltas]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("variant", ["absolute", "relative"])
    @pytest.mark.parametrize("p,delta", [(1.0, 0.1), (0.25, 0.05), (0.03, 0.3)])
    def test_minimality(self, variant, p, delta):
        m, u = 6, 8
        star = epsilon_star(p, delta, m, u, variant)
        assert gamma(star.value, m, u, variant) <= p * delta + 1e-15
        if star.value > 0:
            # every candidate threshold strictly below the result must fail
            from transbound.hypergeom import _split_table

            table = _split_table(m, u)
            negs = table.neg_scaled if variant == "relative" else table.neg_dev
            cands = np.unique(np.concatenate([-x[x < 0] for x in negs[1:]]))
            below = cands[cands < star.value]
            prev = float(below[-1]) if len(below) else 0.0
            assert gamma(prev, m, u, variant) > p * delta

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            epsilon_star(0.0, 0.1, 2, 2)
        with pytest.raises(ValueError):
            epsilon_star(0.5, 1.0, 2, 2)


class TestVapnikBound:
    def test_zero_everything(self):
        star = EpsilonStar(value=0.0, variant="relative", achieving_k=0)
        assert vapnik_bound(0.0, star, 3, 3).raw == 0.0

    def test_absolute_is_additive(self):
        star = EpsilonStar(value=0.1, variant="absolute", achieving_k=1)
        out = vapnik_bound(0.2, star, 10, 10)
        assert out.raw == pytest.approx(0.3)
        assert out.name == "vapnik_absolute"

    def test_relative_realizable_identity(self):
        # with zero training error and m = u the bound collapses to e^2 / 2
        e = 0.37
        star = EpsilonStar(value=e, variant="relative", achieving_k=5)
        out = vapnik_bound(0.0, star, 50, 50)
        assert out.raw == pytest.approx(e * e / 2.0, rel=1e-12)

    def test_clamping(self):
        star = EpsilonStar(value=3.0, variant="absolute", achieving_k=1)
        out = vapnik_bound(0.9, star, 5, 5)
        assert out.raw == pytest.approx(3.9)
        assert out.clamped == 1.0


class TestImplicitBoundGuarantee:
    """Exhaustive delta-validity of the inverted thresholds on a small sample.

    What the inversion provably controls is the strict-exceedance event
    {deviation > eps*}: its probability is bounded by the worst-case tail,
    which is what was inverted.  The boundary {deviation == eps*} is an atom
    that can carry real mass on a sample this small (e.g. 29% of the 252
    splits below for the absolute variant), so it is excluded here; the
    Monte-Carlo harness tracks it separately as boundary_hits.
    """

    def _random_instance(self, n, n_hyp, seed):
        rng = np.random.default_rng(seed)
        target = rng.choice([-1, 1], size=n)
        hyps = rng.choice([-1, 1], size=(n_hyp, n))
        return target, hyps

    @pytest.mark.parametrize("variant", ["absolute", "relative"])
    def test_exhaustive_split_validity(self, variant):
        n, m, n_hyp, delta = 10, 5, 8, 0.3
        u = n - m
        target, hyps = self._random_instance(n, n_hyp, seed=20240817)
        errors = (hyps != target[None, :]).astype(int)
        k_h = errors.sum(axis=1)
        star = epsilon_star(1.0 / n_hyp, delta, m, u, variant)

        violations = total = 0
        for subset in itertools.combinations(range(n), m):
            mask = np.zeros(n, dtype=bool)
            mask[list(subset)] = True
            bad = False
            for j in range(n_hyp):
                r = int(errors[j, mask].sum())
                dev = (k_h[j] - r) / u - r / m
                if variant == "relative":
                    dev = 0.0 if k_h[j] == 0 else dev * math.sqrt(n / k_h[j])
                if dev > star.value:
                    bad = True
                    break
            violations += bad
            total += 1
        assert violations / total <= delta

"""Cluster-then-label pipeline: determinism, vote rules, bound selection."""

import math

import numpy as np
import pytest

from transbound.priors import clustering_bound
from transbound.transduce import (
    Certificate,
    Dataset,
    LabeledSubset,
    Partition,
    TransduceConfig,
    cluster_sweep,
    majority_label,
    select_by_bound,
    transduce,
)

ALGOS = ["kmeans", "agglomerative_single", "agglomerative_complete"]


class TestRecords:
    def test_dataset_ids_must_cover_range(self):
        with pytest.raises(ValueError):
            Dataset(points=np.zeros((3, 2)), ids=np.array([0, 1, 3]))

    def test_dataset_rejects_nonfinite(self):
        pts = np.zeros((2, 2))
        pts[0, 0] = np.nan
        with pytest.raises(ValueError):
            Dataset(points=pts, ids=np.array([0, 1]))

    def test_labeled_subset_validation(self):
        with pytest.raises(ValueError):
            LabeledSubset(indices=np.array([0, 0]), labels=np.array([1, 1]))
        with pytest.raises(ValueError):
            LabeledSubset(indices=np.array([0, 1]), labels=np.array([1, 2]))

    def test_partition_range_check(self):
        with pytest.raises(ValueError):
            Partition(tau=2, assignment=np.array([0, 1, 2]), clusterer_id=0)


class TestClusterSweep:
    @pytest.mark.parametrize("algo", ALGOS)
    def test_tau_one_is_single_cluster(self, two_blob, algo):
        data, _, _ = two_blob
        parts = cluster_sweep(data, algo, c=3)
        assert parts[0].tau == 1
        assert (parts[0].assignment == 0).all()

    @pytest.mark.parametrize("algo", ALGOS)
    def test_two_blobs_recovered(self, two_blob, algo):
        data, _, _ = two_blob
        parts = cluster_sweep(data, algo, c=2)
        two = parts[1].assignment
        blob = np.arange(100) % 2
        # same partition up to cluster renaming
        assert (two == two[0]).sum() == 50
        agree = (two == blob).all() or (two == 1 - blob).all()
        assert agree

    @pytest.mark.parametrize("algo", ALGOS)
    def test_deterministic(self, two_blob, algo):
        data, _, _ = two_blob
        a = cluster_sweep(data, algo, c=6)
        b = cluster_sweep(data, algo, c=6)
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.assignment, pb.assignment)

    @pytest.mark.parametrize("algo", ALGOS)
    def test_presentation_order_irrelevant(self, two_blob, algo):
        data, _, _ = two_blob
        rng = np.random.default_rng(3)
        perm = rng.permutation(100)
        shuffled = Dataset(points=data.points[perm], ids=data.ids[perm])
        for pa, pb in zip(cluster_sweep(data, algo, c=4), cluster_sweep(shuffled, algo, c=4)):
            assert np.array_equal(pa.assignment, pb.assignment)

    def test_too_many_clusters_rejected(self):
        pts = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        data = Dataset(points=pts, ids=np.arange(4))
        with pytest.raises(ValueError):
            cluster_sweep(data, "kmeans", c=4)  # only 3 distinct points

    def test_sweep_covers_every_tau(self, two_blob):
        data, _, _ = two_blob
        parts = cluster_sweep(data, "agglomerative_complete", c=10)
        assert [p.tau for p in parts] == list(range(1, 11))
        for p in parts:
            assert len(np.unique(p.assignment)) == p.tau


class TestMajorityLabel:
    def _partition(self, assignment, tau):
        return Partition(tau=tau, assignment=np.array(assignment), clusterer_id=0)

    def test_majority_wins(self):
        part = self._partition([0, 0, 0, 1, 1], tau=2)
        labeled = LabeledSubset(indices=np.array([0, 1, 2]), labels=np.array([1, 1, -1]))
        hyp = majority_label(part, labeled)
        assert (hyp[[0, 1, 2]] == 1).all()

    def test_tie_goes_positive(self):
        part = self._partition([0, 0, 1], tau=2)
        labeled = LabeledSubset(indices=np.array([0, 1]), labels=np.array([1, -1]))
        assert (majority_label(part, labeled)[[0, 1]] == 1).all()

    def test_empty_cluster_goes_positive(self):
        part = self._partition([0, 0, 1, 1], tau=2)
        labeled = LabeledSubset(indices=np.array([0, 1]), labels=np.array([-1, -1]))
        hyp = majority_label(part, labeled)
        assert (hyp[[0, 1]] == -1).all()
        assert (hyp[[2, 3]] == 1).all()

    def test_constant_on_clusters(self, two_blob):
        data, labeled, _ = two_blob
        for part in cluster_sweep(data, "kmeans", c=7):
            hyp = majority_label(part, labeled)
            for j in range(part.tau):
                vals = hyp[part.assignment == j]
                assert (vals == vals[0]).all()


class TestSelectByBound:
    def test_single_partition(self, two_blob):
        data, labeled, _ = two_blob
        part = cluster_sweep(data, "kmeans", c=2)[1]
        cert = select_by_bound([part], labeled, delta=0.05)
        assert cert.chosen_tau == 2
        assert cert.emp_risk == 0.0
        assert cert.k_ensemble == 1 and cert.c == 2

    def test_tie_prefers_smaller_tau(self):
        # two partitions with identical tau-independent risk: tau=1 must win
        # only if its bound is no worse, so give both zero training error
        pts = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]])
        data = Dataset(points=pts, ids=np.arange(4))
        labeled = LabeledSubset(indices=np.array([0, 1]), labels=np.array([1, 1]))
        parts = cluster_sweep(data, "kmeans", c=2)
        cert = select_by_bound(parts, labeled, delta=0.1)
        assert cert.chosen_tau == 1  # same emp risk, smaller complexity

    @pytest.mark.parametrize(
        "bound_name,expected",
        [
            ("serfling_printed", 0.38585706456870781),
            ("serfling_exact", 0.36927778059940963),
        ],
    )
    def test_two_blob_bound_values(self, two_blob, bound_name, expected):
        data, labeled, _ = two_blob
        parts = cluster_sweep(data, "kmeans", c=10)
        cert = select_by_bound(parts, labeled, delta=0.05, bound_name=bound_name)
        assert cert.chosen_tau == 2
        assert cert.emp_risk == 0.0
        assert cert.bound.raw == pytest.approx(expected, rel=1e-12)

    def test_two_blob_vapnik_and_direct(self, two_blob):
        data, labeled, truth = two_blob
        parts = cluster_sweep(data, "kmeans", c=10)

        cert = select_by_bound(parts, labeled, delta=0.05, bound_name="vapnik_absolute")
        assert cert.emp_risk == 0.0
        assert (cert.predictions == truth[cert.test_ids]).all()
        # the implicit threshold inversion is the tightest certificate here
        assert cert.bound.raw == pytest.approx(0.32, abs=1e-12)

        cert = select_by_bound(parts, labeled, delta=0.05, bound_name="direct")
        assert cert.emp_risk == 0.0
        assert (cert.predictions == truth[cert.test_ids]).all()
        # the counting route's 7 ln(m+u+1) slack makes it vacuous at n = 100
        assert cert.bound.raw == pytest.approx(1.7511215653463221, rel=1e-12)
        assert cert.bound.clamped == 1.0

    def test_unknown_bound_rejected(self, two_blob):
        data, labeled, _ = two_blob
        parts = cluster_sweep(data, "kmeans", c=2)
        with pytest.raises(ValueError):
            select_by_bound(parts, labeled, delta=0.05, bound_name="tightest")


class TestTransduce:
    def test_c1_constant_prediction(self, two_blob):
        data, labeled, _ = two_blob
        cert = transduce(data, labeled, TransduceConfig(("kmeans",), c=1, delta=0.05))
        assert cert.chosen_tau == 1
        # 25 positive and 25 negative training labels: tie resolves to +1
        assert (cert.predictions == 1).all()

    def test_two_blob_end_to_end(self, two_blob):
        data, labeled, truth = two_blob
        cert = transduce(data, labeled, TransduceConfig(("kmeans",), c=10, delta=0.05))
        assert cert.chosen_tau == 2
        assert (cert.predictions == truth[cert.test_ids]).all()
        assert cert.bound.raw < 0.5

    def test_duplicate_ensemble_same_choice_larger_bound(self, two_blob):
        data, labeled, _ = two_blob
        one = transduce(data, labeled, TransduceConfig(("kmeans",), c=10, delta=0.05))
        two = transduce(data, labeled, TransduceConfig(("kmeans", "kmeans"), c=10, delta=0.05))
        assert two.k_ensemble == 2
        assert two.chosen_tau == one.chosen_tau
        assert np.array_equal(two.predictions, one.predictions)
        # complexity grows from ln c to ln 2c
        want = math.sqrt(
            (clustering_bound(0.0, 2, 10, 50, 50, 0.05, 2, "printed").raw ** 2)
        )
        assert two.bound.raw == pytest.approx(want, rel=1e-12)
        assert two.bound.raw > one.bound.raw

    def test_infeasible_budget_rejected(self, two_blob):
        data, labeled, _ = two_blob
        with pytest.raises(ValueError):
            transduce(data, labeled, TransduceConfig(("kmeans",), c=51, delta=0.05))

    def test_singleton_training_clusters_zero_risk(self):
        # every training point isolated: the hypothesis reproduces its label
        rng = np.random.default_rng(11)
        m = 6
        train_pts = rng.uniform(-50, 50, size=(m, 2))
        test_pts = train_pts[0:1] + 0.001  # one test point hugging train point 0
        pts = np.vstack([train_pts, test_pts])
        data = Dataset(points=pts, ids=np.arange(m + 1))
        labels = np.array([1, -1, 1, -1, 1, -1])
        labeled = LabeledSubset(indices=np.arange(m), labels=labels)
        parts = cluster_sweep(data, "agglomerative_single", c=m)
        at_m = [p for p in parts if p.tau == m][0]
        hyp = majority_label(at_m, labeled)
        assert (hyp[labeled.indices] == labels).all()

    def test_deterministic_certificates(self, two_blob):
        data, labeled, _ = two_blob
        cfg = TransduceConfig(("agglomerative_single", "kmeans"), c=8, delta=0.05)
        a = transduce(data, labeled, cfg)
        b = transduce(data, labeled, cfg)
        assert a.chosen_tau == b.chosen_tau
        assert a.bound.raw == b.bound.raw
        assert np.array_equal(a.predictions, b.predictions)

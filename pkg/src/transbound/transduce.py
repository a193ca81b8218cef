"""Cluster-then-label transduction with bound-driven model selection.

The pipeline clusters the full (labelled + unlabelled) sample into 1..c
clusters per clustering algorithm, labels every cluster by majority vote of
the training points it contains, evaluates a transductive risk bound for
each resulting hypothesis using the clustering prior, and returns the
hypothesis with the smallest bound together with a certificate for it.  The
prior only ever sees the unlabelled points and the bound evaluation only
ever sees training labels, so the certificate's guarantee holds over the
random choice of the training subset.
"""

from dataclasses import dataclass
import math

import numpy as np

from .clustering import agglomerative_sweep, kmeans_labels
from .hypergeom import epsilon_star, vapnik_bound
from .pac_bayes import BoundInputs, det_bound
from .priors import ClusteringPrior, clustering_bound
from .records import BoundValue

ALGORITHMS = ("kmeans", "agglomerative_single", "agglomerative_complete")
BOUND_NAMES = ("serfling_printed", "serfling_exact", "direct", "vapnik_absolute")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Full sample: one feature vector per point, ids covering 0..n-1."""

    points: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ids = np.asarray(self.ids, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "ids", ids)
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise ValueError("points must be a (n, d) array with d >= 1")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        n = len(pts)
        if ids.shape != (n,) or not np.array_equal(np.sort(ids), np.arange(n)):
            raise ValueError("ids must be a permutation of 0..n-1")

    @property
    def n_total(self) -> int:
        return len(self.ids)

    def points_by_id(self) -> np.ndarray:
        """Rows reordered so row i is the point with id i (presentation-order free)."""
        out = np.empty_like(self.points)
        out[self.ids] = self.points
        return out


@dataclass(frozen=True, eq=False)
class LabeledSubset:
    """Training ids and their +-1 labels."""

    indices: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        lab = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "labels", lab)
        if len(idx) < 1:
            raise ValueError("training set must be nonempty")
        if len(np.unique(idx)) != len(idx):
            raise ValueError("training ids must be unique")
        if lab.shape != idx.shape or not np.isin(lab, (-1, 1)).all():
            raise ValueError("labels must be +-1, one per training id")

    @property
    def m(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every id to one of tau clusters, tagged by its clusterer."""

    tau: int
    assignment: np.ndarray  # cluster index per id (position = id)
    clusterer_id: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", a)
        if self.tau < 1:
            raise ValueError("tau must be >= 1")
        if a.min() < 0 or a.max() >= self.tau:
            raise ValueError("cluster indices must lie in 0..tau-1")


@dataclass(frozen=True, eq=False)
class Certificate:
    """Chosen hypothesis, its bound, and the predicted test labels."""

    chosen_tau: int
    clusterer_id: int
    algorithm: str
    emp_risk: float
    bound: BoundValue
    bound_name: str
    delta: float
    c: int
    k_ensemble: int
    test_ids: np.ndarray
    predictions: np.ndarray


@dataclass(frozen=True)
class TransduceConfig:
    algorithms: tuple
    c: int
    delta: float
    bound_name: str = "serfling_printed"
    seed: int = 0

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("need at least one clustering algorithm")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown clustering algorithm {a!r}")
        if self.bound_name not in BOUND_NAMES:
            raise ValueError(f"unknown bound {self.bound_name!r}")
        if self.c < 1:
            raise ValueError("c must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


def cluster_sweep(data: Dataset, algorithm: str, c: int, seed: int = 0,
                  clusterer_id: int = 0) -> list[Partition]:
    """Partitions of the full sample into tau = 1..c clusters.

    Deterministic given (data, algorithm, c, seed); the seed is accepted for
    interface stability but none of the built-in algorithms consumes
    randomness.  Points are addressed by id, so presentation order of the
    dataset rows is irrelevant.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown clustering algorithm {algorithm!r}")
    pts = data.points_by_id()
    distinct = len(np.unique(pts, axis=0))
    if c > distinct:
        raise ValueError(f"cannot form {c} clusters from {distinct} distinct points")
    if algorithm == "kmeans":
        by_tau = {tau: kmeans_labels(pts, tau) for tau in range(1, c + 1)}
    else:
        method = algorithm.removeprefix("agglomerative_")
        by_tau = agglomerative_sweep(pts, c, method)
    return [
        Partition(tau=tau, assignment=by_tau[tau], clusterer_id=clusterer_id)
        for tau in range(1, c + 1)
    ]


def majority_label(partition: Partition, labeled: LabeledSubset) -> np.ndarray:
    """Label every point with its cluster's majority training label.

    Ties and clusters containing no training point get +1; the fixed choice
    keeps the pipeline deterministic and is made without looking at test
    labels, so it does not affect the certificate's validity.
    """
    if labeled.indices.max() >= len(partition.assignment):
        raise ValueError("training ids outside the partitioned sample")
    pos = np.zeros(partition.tau)
    neg = np.zeros(partition.tau)
    cl = partition.assignment[labeled.indices]
    np.add.at(pos, cl[labeled.labels == 1], 1.0)
    np.add.at(neg, cl[labeled.labels == -1], 1.0)
    cluster_label = np.where(pos >= neg, 1, -1).astype(np.int64)
    return cluster_label[partition.assignment]


def _evaluate_bound(bound_name: str, emp: float, tau: int, prior: ClusteringPrior,
                    m: int, u: int, delta: float) -> BoundValue:
    if bound_name == "serfling_printed":
        return clustering_bound(emp, tau, prior.c, m, u, delta, prior.k_ensemble, "printed")
    if bound_name == "serfling_exact":
        return clustering_bound(emp, tau, prior.c, m, u, delta, prior.k_ensemble, "exact")
    if bound_name == "direct":
        inputs = BoundInputs(m=m, u=u, delta=delta, emp_risk=emp, prior_mass=prior.mass(tau))
        return det_bound(inputs, "direct")
    if bound_name == "vapnik_absolute":
        star = epsilon_star(prior.mass(tau), delta, m, u, "absolute")
        return vapnik_bound(emp, star, m, u)
    raise ValueError(f"unknown bound {bound_name!r}")


def select_by_bound(partitions: list[Partition], labeled: LabeledSubset, delta: float,
                    bound_name: str = "serfling_printed",
                    algorithm_names: dict[int, str] | None = None) -> Certificate:
    """Pick the partition whose labelled hypothesis carries the smallest bound.

    The prior's cluster budget is the largest tau present and its ensemble
    size is the number of distinct clusterers, so the guarantee presumes the
    given sequence is the full sweep.  Ties break toward smaller tau, then
    smaller clusterer id.
    """
    if not partitions:
        raise ValueError("need at least one partition")
    n = len(partitions[0].assignment)
    for p in partitions:
        if len(p.assignment) != n:
            raise ValueError("partitions disagree on the sample size")
    m = labeled.m
    u = n - m
    if u < 1:
        raise ValueError("no test points left")
    c = max(p.tau for p in partitions)
    k = len({p.clusterer_id for p in partitions})
    prior = ClusteringPrior(c=c, k_ensemble=k)

    train_pos = np.zeros(n, dtype=bool)
    train_pos[labeled.indices] = True
    test_ids = np.flatnonzero(~train_pos)

    best = None
    for p in sorted(partitions, key=lambda p: (p.tau, p.clusterer_id)):
        hyp = majority_label(p, labeled)
        emp = float((hyp[labeled.indices] != labeled.labels).mean())
        bound = _evaluate_bound(bound_name, emp, p.tau, prior, m, u, delta)
        if best is None or bound.raw < best[0].raw:
            best = (bound, p, hyp, emp)
    bound, part, hyp, emp = best
    name = (algorithm_names or {}).get(part.clusterer_id, "")
    return Certificate(
        chosen_tau=part.tau,
        clusterer_id=part.clusterer_id,
        algorithm=name,
        emp_risk=emp,
        bound=bound,
        bound_name=bound_name,
        delta=delta,
        c=c,
        k_ensemble=k,
        test_ids=test_ids,
        predictions=hyp[test_ids],
    )


def transduce(data: Dataset, labeled: LabeledSubset, config: TransduceConfig) -> Certificate:
    """Full pipeline: sweep every configured clusterer, label, select, certify."""
    if config.c > labeled.m:
        raise ValueError("cluster budget c must not exceed the training size")
    if labeled.indices.max() >= data.n_total:
        raise ValueError("training ids outside the dataset")
    partitions = []
    names = {}
    for i, algo in enumerate(config.algorithms):
        partitions.extend(cluster_sweep(data, algo, config.c, config.seed, clusterer_id=i))
        names[i] = algo
    return select_by_bound(partitions, labeled, config.delta, config.bound_name, names)

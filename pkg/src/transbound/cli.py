"""Command-line surface: bound evaluation, curves, validation, transduction.

Subcommands: ``curve``, ``prior-sweep``, ``eval``, ``epsilon-star``,
``transduce``, ``validate``, ``mc-concentration``.  All output is CSV with a
fixed column order, 12-significant-digit decimal formatting and LF line
endings, so repeated runs with the same flags are byte-identical.  The CLI
performs no arithmetic of its own: every emitted value comes straight from a
library call.

Exit codes: 0 success, 2 invalid input or configuration, 3 internal failure.
"""

import argparse
import json
import math
import sys

import numpy as np

from .hypergeom import epsilon_star, vapnik_bound
from .pac_bayes import BoundInputs, det_bound, gibbs_bound
from .transduce import (
    ALGORITHMS,
    BOUND_NAMES,
    Dataset,
    LabeledSubset,
    TransduceConfig,
    transduce,
)
from .validation import (
    ClusteringInstance,
    mc_bound_validity,
    mc_concentration,
    random_hypothesis_instance,
)

CURVE_BOUNDS = (
    "vapnik_relative",
    "vapnik_absolute",
    "serfling",
    "det_reduction",
    "det_direct",
    "gibbs_reduction",
    "gibbs_direct",
)

VALIDATE_SCENARIOS = (
    "vapnik_absolute",
    "vapnik_relative",
    "serfling",
    "direct",
    "gibbs_reduction",
    "gibbs_direct",
    "clustering",
)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _emit(header, rows, stream=None):
    stream = stream or sys.stdout
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _evaluate_one(name, m, u, delta, emp_risk, prior_mass, kl, loss_bound):
    if name == "vapnik_relative" or name == "vapnik_absolute":
        star = epsilon_star(prior_mass, delta, m, u, name.removeprefix("vapnik_"))
        return vapnik_bound(emp_risk, star, m, u)
    if name in ("serfling", "det_reduction", "det_direct"):
        inputs = BoundInputs(m=m, u=u, delta=delta, emp_risk=emp_risk,
                             prior_mass=prior_mass, loss_bound=loss_bound)
        return det_bound(inputs, name.removeprefix("det_"))
    if name in ("gibbs_reduction", "gibbs_direct"):
        inputs = BoundInputs(m=m, u=u, delta=delta, emp_risk=emp_risk,
                             kl_value=kl, loss_bound=loss_bound)
        return gibbs_bound(inputs, name.removeprefix("gibbs_"))
    raise ValueError(f"unknown bound {name!r}")


def _resolve_u(rule: str, m: int) -> int:
    if rule == "sqrt":
        u = math.ceil(math.sqrt(m))
    elif rule.startswith("multiple:"):
        u = int(round(float(rule.split(":", 1)[1]) * m))
    elif rule.startswith("const:"):
        u = int(rule.split(":", 1)[1])
    else:
        raise ValueError(f"unknown u-rule {rule!r}")
    if u < 1:
        raise ValueError(f"u-rule {rule!r} yields u < 1 at m = {m}")
    return u


def _csv_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def _csv_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok != ""]


def cmd_curve(args) -> int:
    names = [tok for tok in args.bounds.split(",") if tok != ""]
    for name in names:
        if name not in CURVE_BOUNDS:
            raise ValueError(f"unknown bound {name!r}; choose from {', '.join(CURVE_BOUNDS)}")
    m_grid = _csv_ints(args.m_grid)
    if sorted(set(m_grid)) != m_grid:
        raise ValueError("m-grid must be strictly increasing")
    rows = []
    for m in m_grid:
        u = _resolve_u(args.u_rule, m)
        for name in sorted(names):
            out = _evaluate_one(name, m, u, args.delta, args.emp_risk,
                                args.prior_mass, args.kl, 1.0)
            rows.append((m, u, out.name, out.raw, out.clamped, out.valid))
    _emit(("m", "u", "bound_name", "raw", "clamped", "valid"), rows)
    return 0


def cmd_prior_sweep(args) -> int:
    ps = _csv_floats(args.p_grid)
    if any(not 0.0 < p <= 1.0 for p in ps):
        raise ValueError("prior masses must lie in (0, 1]")
    rows = []
    for p in sorted(ps):
        rel = epsilon_star(p, args.delta, args.m, args.u, "relative").value
        ab = epsilon_star(p, args.delta, args.m, args.u, "absolute").value
        serf = det_bound(
            BoundInputs(m=args.m, u=args.u, delta=args.delta, emp_risk=0.0, prior_mass=p),
            "serfling",
        ).raw
        rows.append((p, rel, ab, serf))
    _emit(
        ("p", "vapnik_relative_eps_star", "vapnik_absolute_eps_star", "serfling_complexity"),
        rows,
    )
    return 0


def cmd_eval(args) -> int:
    out = _evaluate_one(args.bound, args.m, args.u, args.delta, args.emp_risk,
                        args.prior_mass, args.kl, args.loss_bound)
    _emit(
        ("m", "u", "bound_name", "raw", "clamped", "valid"),
        [(args.m, args.u, out.name, out.raw, out.clamped, out.valid)],
    )
    return 0


def cmd_epsilon_star(args) -> int:
    star = epsilon_star(args.prior_mass, args.delta, args.m, args.u, args.variant)
    _emit(
        ("m", "u", "variant", "prior_mass", "delta", "value", "achieving_k"),
        [(args.m, args.u, star.variant, args.prior_mass, args.delta, star.value,
          star.achieving_k)],
    )
    return 0


def _load_points(path: str) -> np.ndarray:
    pts = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    if pts.size == 0:
        raise ValueError(f"no points in {path}")
    return pts


def _load_labels(path: str, n_total: int):
    ids, labels = [], []
    with open(path) as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'id,label'")
            i, lab = int(parts[0]), int(parts[1])
            if not 0 <= i < n_total:
                raise ValueError(f"{path}:{line_no}: unknown id {i}")
            if lab not in (-1, 1):
                raise ValueError(f"{path}:{line_no}: label must be +1 or -1")
            ids.append(i)
            labels.append(lab)
    return np.array(ids), np.array(labels)


def cmd_transduce(args) -> int:
    pts = _load_points(args.data)
    ids, labels = _load_labels(args.labels, len(pts))
    data = Dataset(points=pts, ids=np.arange(len(pts)))
    labeled = LabeledSubset(indices=ids, labels=labels)
    config = TransduceConfig(
        algorithms=tuple(args.clusterer),
        c=args.max_clusters,
        delta=args.delta,
        bound_name=args.bound,
        seed=args.seed,
    )
    cert = transduce(data, labeled, config)

    pred_rows = [(int(i), "+1" if int(y) == 1 else "-1")
                 for i, y in zip(cert.test_ids, cert.predictions)]
    if args.predictions_out:
        with open(args.predictions_out, "w", newline="\n") as f:
            _emit(("id", "label"), pred_rows, stream=f)
    else:
        _emit(("id", "label"), pred_rows)

    doc = {
        "algorithm": cert.algorithm,
        "bound_clamped": cert.bound.clamped,
        "bound_name": cert.bound_name,
        "bound_raw": cert.bound.raw,
        "c": cert.c,
        "chosen_tau": cert.chosen_tau,
        "clusterer_id": cert.clusterer_id,
        "delta": cert.delta,
        "emp_risk": cert.emp_risk,
        "k_ensemble": cert.k_ensemble,
        "m": len(ids),
        "predictions": [[int(i), int(y)] for i, y in zip(cert.test_ids, cert.predictions)],
        "u": len(cert.test_ids),
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.certificate_out:
        with open(args.certificate_out, "w", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args) -> int:
    if args.trials < 1:
        raise ValueError("need at least one trial")
    if args.scenario == "clustering":
        if not args.data or not args.labels:
            raise ValueError("clustering scenario needs --data and --labels (full target)")
        pts = _load_points(args.data)
        ids, labels = _load_labels(args.labels, len(pts))
        if len(ids) != len(pts):
            raise ValueError("clustering validation needs a label for every id")
        target = np.empty(len(pts), dtype=np.int64)
        target[ids] = labels
        instance = ClusteringInstance(
            points=pts, target=target, m=args.m, c=args.max_clusters,
            algorithm=args.clusterer[0] if args.clusterer else "kmeans",
            bound_name=args.bound,
        )
    else:
        instance = random_hypothesis_instance(
            n_total=args.n, m=args.m, n_hyp=args.hypotheses, seed=args.instance_seed
        )
    rep = mc_bound_validity(args.scenario, instance, args.delta, args.trials, args.seed)
    _emit(
        ("scenario", "trials", "violations", "empirical", "analytic", "tolerance",
         "passed", "boundary_hits"),
        [(args.scenario, rep.trials, rep.violations, rep.empirical, rep.analytic,
          rep.tolerance, rep.passed, rep.boundary_hits)],
    )
    return 0


def cmd_mc_concentration(args) -> int:
    if args.trials < 1:
        raise ValueError("need at least one trial")
    pop = np.zeros(args.population_size, dtype=np.int64)
    if not 0 <= args.ones <= args.population_size:
        raise ValueError("ones must lie in 0..population-size")
    pop[: args.ones] = 1
    if args.eps_grid:
        grid = _csv_floats(args.eps_grid)
    else:
        top = 1.0 - args.ones / args.population_size
        grid = [i * top / 10.0 for i in range(11)]
    reports = mc_concentration(pop, args.m, grid, args.trials, args.seed)
    rows = [
        (r.eps, r.trials, r.exceed_count, r.empirical, r.exact, r.hoeffding_kl,
         r.hoeffding_squared, r.serfling, r.direct_binary,
         r.empirical_within_tolerance, r.exact_below_bounds)
        for r in reports
    ]
    _emit(
        ("eps", "trials", "exceed_count", "empirical", "exact", "hoeffding_kl",
         "hoeffding_squared", "serfling", "direct_binary",
         "empirical_within_tolerance", "exact_below_bounds"),
        rows,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transbound",
        description="Transductive error bounds: evaluate, invert, compare, validate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_bound_flags(p):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--u", type=int, required=True)
        p.add_argument("--delta", type=float, default=0.05)
        p.add_argument("--emp-risk", type=float, default=0.0)
        p.add_argument("--prior-mass", type=float, default=1.0)
        p.add_argument("--kl", type=float, default=0.0)

    p = sub.add_parser("curve", help="bound values over an m grid")
    p.add_argument("--bounds", default="", help="comma list of: " + ",".join(CURVE_BOUNDS))
    p.add_argument("--m-grid", required=True, help="comma list, strictly increasing")
    p.add_argument("--u-rule", default="multiple:1",
                   help="multiple:ALPHA (u = ALPHA*m), sqrt, or const:V")
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--emp-risk", type=float, default=0.0)
    p.add_argument("--prior-mass", type=float, default=1.0)
    p.add_argument("--kl", type=float, default=0.0)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("prior-sweep", help="complexity terms as a function of prior mass")
    p.add_argument("--p-grid", required=True, help="comma list of prior masses in (0, 1]")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.01)
    p.set_defaults(func=cmd_prior_sweep)

    p = sub.add_parser("eval", help="evaluate a single bound from flags")
    p.add_argument("--bound", required=True, choices=CURVE_BOUNDS)
    common_bound_flags(p)
    p.add_argument("--loss-bound", type=float, default=1.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("epsilon-star", help="invert the worst-case deviation tail")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--prior-mass", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--variant", choices=("relative", "absolute"), default="absolute")
    p.set_defaults(func=cmd_epsilon_star)

    p = sub.add_parser("transduce", help="cluster, label, select by bound, certify")
    p.add_argument("--data", required=True, help="headerless CSV, one point per row")
    p.add_argument("--labels", required=True, help="CSV rows id,label with label +1/-1")
    p.add_argument("--clusterer", action="append", choices=ALGORITHMS, default=None)
    p.add_argument("--max-clusters", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--bound", choices=BOUND_NAMES, default="serfling_printed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--predictions-out", default=None)
    p.add_argument("--certificate-out", default=None)
    p.set_defaults(func=cmd_transduce)

    p = sub.add_parser("validate", help="Monte-Carlo delta-validity of a bound")
    p.add_argument("--scenario", required=True, choices=VALIDATE_SCENARIOS)
    p.add_argument("--n", type=int, default=40, help="full sample size")
    p.add_argument("--m", type=int, default=20)
    p.add_argument("--hypotheses", type=int, default=16)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instance-seed", type=int, default=0)
    p.add_argument("--data", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--clusterer", action="append", choices=ALGORITHMS, default=None)
    p.add_argument("--max-clusters", type=int, default=5)
    p.add_argument("--bound", default="serfling_printed")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mc-concentration", help="empirical vs exact vs bound tails")
    p.add_argument("--population-size", type=int, required=True)
    p.add_argument("--ones", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps-grid", default="", help="comma list; default 11 points")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mc_concentration)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if hasattr(args, "clusterer") and args.clusterer is None:
        args.clusterer = ["kmeans"]
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

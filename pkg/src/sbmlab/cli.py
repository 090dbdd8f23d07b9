"""Command-line front end.

Subcommands: gen, split, divergence, finest-partition, spectral,
detect-partial, detect-exact, oracle, sweep.  Model parameters travel in
a small YAML document (keys k, p, Q, regime, seed); graphs and labels are
plain text files; reports go to stdout or CSV.
"""

import argparse
import math
import sys

import numpy as np
import yaml

from . import divergence, evaluate, poisson, profiling, report, spectral, sphere
from .errors import SbmError
from .graph import load_graph, sample_graph, save_graph, selected_as_graph, split_edges
from .model import build_params, load_params, save_params


def _write_matrix(mat, fmt, out=None):
    out = out or sys.stdout
    if fmt == "csv":
        for row in mat:
            out.write(",".join(f"{v:.10g}" for v in row) + "\n")
    else:
        for row in mat:
            out.write("  ".join(f"{v:12.6f}" for v in row) + "\n")


def _load(args):
    params, file_seed = load_params(args.params)
    seed = args.seed if args.seed is not None else file_seed
    return params, seed


def cmd_gen(args):
    params, seed = _load(args)
    print(f"seed {seed}")
    graph = sample_graph(params, args.n, seed)
    save_graph(graph, args.out, labels_path=args.labels_out)
    print(f"wrote {graph.n} vertices, {graph.edge_count} edges to {args.out}")
    return 0


def cmd_split(args):
    params, seed = _load(args)
    print(f"seed {seed}")
    graph = load_graph(args.graph)
    parts = split_edges(graph, args.prob, seed)
    save_graph(selected_as_graph(parts, graph.n), args.selected_out)
    save_graph(parts.remainder, args.remainder_out)
    print(f"selected {len(parts.selected)} of {graph.edge_count} edges")
    return 0


def cmd_divergence(args):
    params, _ = _load(args)
    rep = divergence.divergence_matrix(params)
    _write_matrix(rep.dplus, args.format)
    return 0


def cmd_finest_partition(args):
    params, _ = _load(args)
    rep = divergence.finest_partition(params)
    for part in rep.finest:
        print(" ".join(str(c) for c in part))
    verdict = divergence.exact_recovery_solvable(params, rep.finest)
    print(f"verdict {verdict}")
    return 0


def cmd_spectral(args):
    params, _ = _load(args)
    summary = spectral.eigen_summary(params)
    print("eigenvalues " + " ".join(f"{v:.10g}" for v in summary.distinct))
    print(f"eta {summary.eta}")
    print(f"rho {summary.rho:.10g}")
    cond = spectral.theorem1_conditions(params)
    print(f"rho_gt_4 {cond.rho_gt_4}")
    print(f"pow7_lt_pow8 {cond.pow7_lt_pow8}")
    print(f"four_cube_lt_fourth {cond.four_cube_lt_fourth}")
    if cond.feasible_x_interval:
        lo, hi = cond.feasible_x_interval
        print(f"feasible_x_interval {lo:.10g} {hi:.10g}")
    else:
        print("feasible_x_interval empty")
    return 0


def _write_labels(labels, path):
    with open(path, "w") as fh:
        for v, lab in enumerate(labels):
            fh.write(f"{v} {int(lab)}\n")


def _load_labels(path, n):
    labels = np.zeros(n, dtype=np.int64)
    with open(path) as fh:
        for line in fh:
            if line.strip():
                v, lab = line.split()
                labels[int(v)] = int(lab)
    return labels


def cmd_detect_partial(args):
    params, seed = _load(args)
    print(f"seed {seed}")
    graph = load_graph(args.graph)
    hyper = sphere.default_hyperparams(params, graph.n)
    overrides = {
        name: getattr(args, name)
        for name in ("c", "m", "epsilon", "x", "T")
        if getattr(args, name) is not None
    }
    if overrides:
        hyper = sphere.SphereHyperparams(
            c=overrides.get("c", hyper.c),
            m=overrides.get("m", hyper.m),
            epsilon=overrides.get("epsilon", hyper.epsilon),
            x=overrides.get("x", hyper.x),
            T=overrides.get("T", hyper.T),
            theorem_conditions_hold=hyper.theorem_conditions_hold,
        )
    result = sphere.reliable_classification(graph, params, hyper, seed)
    _write_labels(result.labels, args.out)
    print(f"forced_fraction {result.forced_fraction:.6f}")
    print(f"runs_failed {result.runs_failed}")
    print(f"runs_discarded {result.runs_discarded}")
    if args.labels:
        truth = _load_labels(args.labels, graph.n)
        acc = evaluate.agreement(result.labels, truth, params.k)
        print(f"accuracy {acc.accuracy:.6f}")
    return 0


def cmd_detect_exact(args):
    params, seed = _load(args)
    print(f"seed {seed}")
    graph = load_graph(args.graph)
    result = profiling.degree_profiling(graph, params, seed, gamma=args.gamma)
    _write_labels(result.assignment, args.out)
    print("partition " + " | ".join(" ".join(str(c) for c in g) for g in result.groups))
    print(f"gamma {result.gamma:.6f}")
    if args.labels:
        truth = _load_labels(args.labels, graph.n)
        group_of = np.empty(params.k, dtype=np.int64)
        for s, part in enumerate(result.groups):
            for c in part:
                group_of[c] = s
        truth_groups = group_of[truth]
        t = len(result.groups)
        acc = evaluate.agreement(result.assignment, truth_groups, t)
        prelim_acc = evaluate.agreement(result.prelim, truth, params.k)
        print(f"prelim_accuracy {prelim_acc.accuracy:.6f}")
        print(f"accuracy {acc.accuracy:.6f}")
        print(f"exact_match {evaluate.exact_match(result.assignment, truth_groups, t)}")
    return 0


def cmd_oracle(args):
    if args.params:
        params, _ = load_params(args.params)
        profiles = [divergence.profile(params, j) for j in range(params.k)]
        priors = list(params.p)
    else:
        profiles = [np.array([float(v) for v in s.split(",")]) for s in args.profile]
        priors = [float(v) for v in args.prior]
    lnn = math.log(args.n)
    print("i,j,overlap,tail_bound")
    for i in range(len(profiles)):
        for j in range(i + 1, len(profiles)):
            est = poisson.overlap_sum(profiles[i], profiles[j],
                                      priors[i], priors[j], lnn)
            print(f"{i},{j},{est.value:.10g},{est.tail_bound:.4g}")
    bracket = poisson.map_error_bounds(profiles, priors, lnn)
    print(f"map_error_lower,{bracket.lower:.10g}")
    print(f"map_error_upper,{bracket.upper:.10g}")
    return 0


def _sweep_detector(name):
    def run_partial(params, n, seed):
        graph = sample_graph(params, n, seed)
        hyper = sphere.default_hyperparams(params, n)
        result = sphere.reliable_classification(graph.unlabeled(), params, hyper, seed)
        return result.labels, graph.labels, result.forced_fraction

    def run_exact(params, n, seed):
        graph = sample_graph(params, n, seed)
        result = profiling.degree_profiling(graph.unlabeled(), params, seed)
        group_of = np.empty(params.k, dtype=np.int64)
        for s, part in enumerate(result.groups):
            for c in part:
                group_of[c] = s
        return result.assignment, group_of[graph.labels], 0.0

    return {"partial": run_partial, "exact": run_exact}[name]


def cmd_sweep(args):
    with open(args.spec) as fh:
        doc = yaml.safe_load(fh)
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    print(f"seed {seed}")
    points = []
    for pt in doc.get("points", []):
        params = build_params(pt["k"], pt["p"], pt["Q"], pt["regime"])
        if doc["detector"] == "exact":
            rep = divergence.finest_partition(params)
            signal = divergence.min_cross_divergence(params, rep.finest)
            if not math.isfinite(signal):
                signal = 0.0
        else:
            signal = spectral.snr(params)
        points.append(evaluate.SweepPoint(name=pt["name"], params=params,
                                          signal=signal))
    detector = _sweep_detector(doc["detector"])
    rows = evaluate.sweep(points, int(doc["n"]), int(doc.get("trials", 1)),
                          seed, detector, out_path=args.out)
    if args.out is None:
        for row in rows:
            print(",".join(str(v) for v in row))
    if args.figure:
        path = report.render_sweep_figure(rows, args.figure)
        if path:
            print(f"figure {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sbmlab",
        description="Stochastic block model generation, thresholds, and recovery",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, needs_params=True):
        sp = sub.add_parser(name)
        if needs_params:
            sp.add_argument("--params", required=True, help="model parameter file")
        sp.add_argument("--seed", type=int, default=None,
                        help="random seed (default: value in the params file, else 0)")
        sp.set_defaults(func=func)
        return sp

    sp = add("gen", cmd_gen)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--labels-out", default=None)

    sp = add("split", cmd_split)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--prob", type=float, required=True)
    sp.add_argument("--selected-out", required=True)
    sp.add_argument("--remainder-out", required=True)

    sp = add("divergence", cmd_divergence)
    sp.add_argument("--format", choices=("text", "csv"), default="text")

    add("finest-partition", cmd_finest_partition)
    add("spectral", cmd_spectral)

    sp = add("detect-partial", cmd_detect_partial)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--labels", default=None, help="ground-truth labels file")
    sp.add_argument("--out", required=True)
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--epsilon", type=float, default=None)
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--T", type=int, default=None)

    sp = add("detect-exact", cmd_detect_exact)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--labels", default=None)
    sp.add_argument("--out", required=True)
    sp.add_argument("--gamma", type=float, default=None)

    sp = sub.add_parser("oracle")
    sp.add_argument("--params", default=None)
    sp.add_argument("--profile", action="append", default=[],
                    help="comma-separated profile entries (repeatable)")
    sp.add_argument("--prior", action="append", default=[],
                    help="prior weight per profile (repeatable)")
    sp.add_argument("--n", type=float, required=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("sweep")
    sp.add_argument("--spec", required=True, help="sweep configuration file")
    sp.add_argument("--out", default=None, help="CSV output path (default stdout)")
    sp.add_argument("--figure", default=None, help="also render a PNG summary")
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SbmError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 invalid input or parameters,
3 EM stopped before converging (output is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .cliques import ExpandableBasisError
from .core import CliqueBasis, GraphletModel, RateMatrix, WeightedNetwork, network_power, rate_matrix
from .em import CoverageError, EmConfig
from .evaluation import EvalReport, evaluate
from .pipeline import decompose
from .synth import RejectionCapError, SynthConfig, sample_model, sample_network
from .theory import accuracy_curve, candidate_count_bound, redundancy_bound

log = logging.getLogger("graphlets")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 1, 2, 3

_INT = re.compile(r"^\+?\d+$")


class InputError(Exception):
    """Malformed input file or invalid parameters; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# edge lists -----------------------------------------------------------------

def read_edge_list(path: str | Path, exact: bool = False) -> tuple[WeightedNetwork | RateMatrix, tuple[str, ...]]:
    """Parse ``u<TAB>v<TAB>w`` lines into a network over first-seen node labels.

    Without ``exact`` weights must be positive integers and the result is a
    :class:`WeightedNetwork`; with it any positive decimal is accepted and a
    :class:`RateMatrix` is returned.
    """
    index: dict[str, int] = {}
    acc: dict[tuple[int, int], float] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t") if "\t" in raw else line.split()
        parts = [p.strip() for p in parts]
        if len(parts) != 3:
            raise InputError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}")
        u, v, w = parts
        if u == v:
            raise InputError(f"{path}:{lineno}: self-loop on node {u!r}")
        if exact:
            try:
                weight = float(w)
            except ValueError:
                raise InputError(f"{path}:{lineno}: weight {w!r} is not a number") from None
            if not (math.isfinite(weight) and weight > 0):
                raise InputError(f"{path}:{lineno}: weight {w!r} must be positive")
        else:
            if not _INT.match(w) or int(w) == 0:
                raise InputError(f"{path}:{lineno}: weight {w!r} is not a positive integer")
            weight = int(w)
        i = index.setdefault(u, len(index))
        j = index.setdefault(v, len(index))
        key = (i, j) if i < j else (j, i)
        acc[key] = acc.get(key, 0) + weight
    labels = tuple(index)
    if exact:
        return RateMatrix(len(labels), {p: float(w) for p, w in acc.items()}), labels
    return WeightedNetwork(len(labels), {p: int(w) for p, w in acc.items()}, labels), labels


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def write_edge_list(path: str | Path, y: WeightedNetwork | RateMatrix, labels: Sequence[str]) -> None:
    u, v, w = y.edge_arrays()
    rows = ["# u\tv\tw"]
    rows += [f"{labels[i]}\t{labels[j]}\t{_format_weight(x)}" for i, j, x in zip(u, v, w)]
    Path(path).write_text("\n".join(rows) + "\n")


# model files ----------------------------------------------------------------

def write_model(path: str | Path, model: GraphletModel, labels: Sequence[str], meta: dict) -> None:
    doc = {
        "nodes": list(labels),
        "cliques": [list(c) for c in model.basis.cliques],
        "mu": [float(m) for m in model.mu],
        "meta": meta,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_model(path: str | Path) -> tuple[GraphletModel, tuple[str, ...], dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg})") from exc
    try:
        labels = tuple(str(x) for x in doc["nodes"])
        cliques = [tuple(int(i) for i in c) for c in doc["cliques"]]
        mu = np.array(doc["mu"], dtype=float)
        meta = dict(doc.get("meta", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed model file ({exc})") from exc
    if len(set(labels)) != len(labels):
        raise InputError(f"{path}: repeated node labels")
    for c in cliques:
        if list(c) != sorted(c):
            raise InputError(f"{path}: clique {list(c)} is not sorted")
    try:
        model = GraphletModel(CliqueBasis(len(labels), tuple(cliques)), mu)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return model, labels, meta


def _relabel_model(model: GraphletModel, labels: Sequence[str], target: dict[str, int], n: int) -> GraphletModel:
    cliques = tuple(tuple(sorted(target[labels[i]] for i in c)) for c in model.basis.cliques)
    return GraphletModel(CliqueBasis(n, cliques), model.mu)


def _relabel_network(y, labels: Sequence[str], target: dict[str, int], n: int):
    edges = {}
    for (i, j), w in y.edges.items():
        a, b = target[labels[i]], target[labels[j]]
        edges[(a, b) if a < b else (b, a)] = w
    if isinstance(y, RateMatrix):
        return RateMatrix(n, edges)
    return WeightedNetwork(n, edges)


# commands -------------------------------------------------------------------

def cmd_decompose(args) -> int:
    y, labels = read_edge_list(args.input, exact=args.exact)
    if not y.edges:
        raise InputError(f"{args.input}: no positive edges")
    if args.power != 1:
        if args.exact:
            raise InputError("--power applies to integer edge lists only")
        try:
            y = network_power(y, args.power)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    try:
        config = EmConfig(epsilon=args.epsilon, max_iters=args.max_iters, prune_fraction=args.prune)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.target_accuracy is not None and not 0 <= args.target_accuracy <= 1:
        raise InputError("--target-accuracy must lie in [0, 1]")

    d = decompose(y, config, target_accuracy=args.target_accuracy)
    out_model = d.approx.model if d.approx is not None else d.model
    meta = {
        "tool": "graphlets",
        "version": __version__,
        "command": "decompose",
        "config": {
            "epsilon": args.epsilon,
            "max_iters": args.max_iters,
            "prune": args.prune,
            "power": args.power,
            "target_accuracy": args.target_accuracy,
            "exact": args.exact,
        },
        "converged": bool(d.converged),
        "iterations": int(d.iterations),
        "candidates": d.candidates.k,
        "thresholds": d.sweep.q,
        "k_hat": d.model.k,
    }
    summary = (
        f"nodes={y.n}\tedges={len(y)}\tcandidates={d.candidates.k}\tk_hat={d.model.k}"
        f"\titerations={d.iterations}\tcandidate_seconds={d.candidate_seconds:.3f}"
        f"\tem_seconds={d.em_seconds:.3f}\tseconds={d.seconds:.3f}"
    )
    if d.approx is not None:
        ratio = d.approx.k_tilde / d.model.k
        meta.update(k_tilde=d.approx.k_tilde, achieved_accuracy=d.approx.achieved_accuracy, kt_over_kh=ratio)
        summary += f"\tk_tilde={d.approx.k_tilde}\tachieved_accuracy={d.approx.achieved_accuracy:.6f}\tkt_over_kh={ratio:.6f}"
    write_model(args.output, out_model, labels, meta)
    print(summary)
    if not d.converged:
        log.warning("EM did not converge within %d iterations", args.max_iters)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _integer_coefficients(model: GraphletModel) -> GraphletModel:
    return GraphletModel(model.basis, np.maximum(1.0, np.ceil(model.mu)))


def cmd_synth(args) -> int:
    try:
        config = SynthConfig(
            n=args.nodes,
            lambda_k=args.lambda_k,
            gamma_shape=args.alpha,
            gamma_scale=args.beta,
            bernoulli_p=args.p,
            seed=args.seed,
            require_nonexpandable=args.nonexpandable,
            max_rejects=args.max_rejects,
        )
        model = sample_model(config)
    except (ValueError, RejectionCapError) as exc:
        raise InputError(str(exc)) from exc
    labels = tuple(str(i) for i in range(model.n))
    if args.exact:
        model = _integer_coefficients(model)
        y = rate_matrix(model).to_network(labels)
    else:
        y = sample_network(model, args.seed + 1)
    meta = {
        "tool": "graphlets",
        "version": __version__,
        "command": "synth",
        "seed": args.seed,
        "config": {
            "nodes": args.nodes,
            "lambda_k": args.lambda_k,
            "alpha": args.alpha,
            "beta": args.beta,
            "p": args.p,
            "nonexpandable": args.nonexpandable,
            "exact": args.exact,
        },
    }
    write_model(args.out_model, model, labels, meta)
    if args.out_network:
        write_edge_list(args.out_network, y, labels)
    print(f"nodes={model.n}\tk={model.k}\tedges={len(y)}")
    return EXIT_OK


def cmd_eval(args) -> int:
    truth, t_labels, _ = read_model(args.truth)
    est, e_labels, _ = read_model(args.estimate)
    y, y_labels = read_edge_list(args.network, exact=args.exact)
    index = {lab: i for i, lab in enumerate(t_labels)}
    for name, labs in (("estimate", e_labels), ("network", y_labels)):
        missing = [lab for lab in labs if lab not in index]
        if missing:
            raise InputError(f"{name} has nodes outside the truth node set: {missing[:5]}")
    est = _relabel_model(est, e_labels, index, truth.n)
    y = _relabel_network(y, y_labels, index, truth.n)
    try:
        report = evaluate(truth, est, y)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.header:
        print("# " + EvalReport.header())
    print(report.to_row())
    return EXIT_OK


def cmd_accuracy_curve(args) -> int:
    try:
        curve = accuracy_curve(args.k, args.alpha, args.method, samples=args.samples, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(curve.to_tsv())
    return EXIT_OK


def cmd_bounds(args) -> int:
    if (args.n is None) != (args.c is None):
        raise InputError("--n and --c must be given together")
    try:
        rows = [("candidate_count_bound", candidate_count_bound(args.k, args.p, args.q))]
        if args.n is not None:
            rows.append(("redundancy_bound", redundancy_bound(args.n, args.p, args.c, args.q)))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print("# quantity\tvalue")
    for name, value in rows:
        print(f"{name}\t{value:.10g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphlets", description="Graphlet decomposition of weighted networks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="fit a graphlet model to an edge list")
    p.add_argument("--input", required=True, help="edge list (u<TAB>v<TAB>w)")
    p.add_argument("--output", required=True, help="model file (JSON) to write")
    p.add_argument("--epsilon", type=float, default=EmConfig.epsilon)
    p.add_argument("--max-iters", type=int, default=EmConfig.max_iters)
    p.add_argument("--prune", type=float, default=EmConfig.prune_fraction, help="mass fraction below which cliques are dropped")
    p.add_argument("--target-accuracy", type=float, default=None, help="truncate to this tau-norm share")
    p.add_argument("--power", type=int, default=1, help="decompose the k-th power of the adjacency matrix")
    p.add_argument("--exact", action="store_true", help="allow decimal weights (noise-free rate matrices)")
    p.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("synth", help="sample a ground-truth model and network")
    p.add_argument("--nodes", type=int, default=SynthConfig.n)
    p.add_argument("--lambda-k", type=float, default=SynthConfig.lambda_k)
    p.add_argument("--alpha", type=float, default=SynthConfig.gamma_shape, help="Gamma shape of the coefficients")
    p.add_argument("--beta", type=float, default=SynthConfig.gamma_scale, help="Gamma scale of the coefficients")
    p.add_argument("--p", type=float, default=SynthConfig.bernoulli_p, help="Bernoulli membership probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nonexpandable", action="store_true", help="redraw until the basis is non-expandable")
    p.add_argument("--max-rejects", type=int, default=SynthConfig.max_rejects)
    p.add_argument("--exact", action="store_true", help="integer coefficients; write the rate matrix instead of a draw")
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-network", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score an estimated model against the truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--estimate", required=True)
    p.add_argument("--network", required=True)
    p.add_argument("--header", action="store_true")
    p.add_argument("--exact", action="store_true", help="allow decimal weights in the network")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("accuracy-curve", help="expected accuracy of truncated decompositions")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--method", choices=("closed_form", "monte_carlo"), default="closed_form")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_accuracy_curve)

    p = sub.add_parser("bounds", help="candidate-count and redundancy bounds")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--c", type=float, default=None)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on usage errors, --help and --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if getattr(args, "threads", 1) < 1:
        print("graphlets: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (InputError, CoverageError, ExpandableBasisError) as exc:
        print(f"graphlets: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

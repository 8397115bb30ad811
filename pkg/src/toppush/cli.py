"""Command-line interface: ``toppush {train,predict,evaluate,cv,bench}``.

Every report is plain text with one ``key value`` pair per line.  Exit codes:
0 success, 1 usage error, 2 data error, 3 numeric failure.  Set
``TOPPUSH_LOG_LEVEL`` (e.g. ``INFO``) for progress logging on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .data_io import (
    parse_libsvm,
    predict_scores,
    read_libsvm,
    read_model,
    scale_to_unit_ball,
    stratified_folds,
    write_model,
)
from .datasets import make_gaussian_margin
from .exceptions import NonFiniteValue, TopPushError
from .metrics import ScoredDataset, average_precision, auc, evaluate, ndcg, pos_at_top
from .solver import SolverConfig, solve

logger = logging.getLogger("toppush")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_LAMBDA_GRID = [10.0 ** k for k in range(-3, 4)]
CV_METRICS = {
    "pos_at_top": pos_at_top,
    "auc": auc,
    "average_precision": average_precision,
    "ndcg": ndcg,
}


class NumericFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return v


def _float_list(text):
    vals = [_positive_float(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text):
    vals = [_positive_int(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _existing_file(text):
    if not os.path.isfile(text):
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return text


def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(pairs, out=None):
    text = "".join(f"{k} {_fmt(v)}\n" for k, v in pairs)
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _add_solver_args(p):
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=1.0,
                   help="regularization strength (default 1)")
    p.add_argument("--epsilon", type=_positive_float, default=1e-4,
                   help="stopping precision on the dual objective (default 1e-4)")
    p.add_argument("--max-iterations", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-scale", dest="scale", action="store_false",
                   help="skip unit-ball feature scaling (on by default)")


def build_parser():
    parser = _Parser(prog="toppush", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model on a LIBSVM file")
    p.add_argument("--data", required=True, type=_existing_file)
    p.add_argument("--out", required=True, help="model file to write")
    _add_solver_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score every instance of a LIBSVM file")
    p.add_argument("--model", required=True, type=_existing_file)
    p.add_argument("--data", required=True, type=_existing_file)
    p.add_argument("--out", help="write scores here as well as stdout")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="ranking metrics of a model on labelled data")
    p.add_argument("--model", required=True, type=_existing_file)
    p.add_argument("--data", required=True, type=_existing_file)
    p.add_argument("--out", help="write the report here as well as stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="choose lambda by stratified k-fold cross-validation")
    p.add_argument("--data", required=True, type=_existing_file)
    p.add_argument("--lambdas", type=_float_list, default=DEFAULT_LAMBDA_GRID,
                   help="comma-separated grid (default 1e-3,...,1e3)")
    p.add_argument("--folds", type=_positive_int, default=5)
    p.add_argument("--metric", choices=sorted(CV_METRICS), default="pos_at_top")
    p.add_argument("--out", help="write the report here as well as stdout")
    _add_solver_args(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("bench", help="time training on synthetic data of growing size")
    p.add_argument("--sizes", type=_int_list, default=[1000, 2000, 4000, 8000],
                   help="comma-separated total instance counts m+n")
    p.add_argument("--dim", type=_positive_int, default=20)
    p.add_argument("--margin", type=_positive_float, default=0.5)
    p.add_argument("--out", help="write the report here as well as stdout")
    _add_solver_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _solver_config(args, lam=None, record_trace=False):
    return SolverConfig(lam=args.lam if lam is None else lam, epsilon=args.epsilon,
                        max_iterations=args.max_iterations, rng_seed=args.seed,
                        record_trace=record_trace)


def _solve(data, config):
    try:
        return solve(data, config)
    except NonFiniteValue as exc:
        raise NumericFailure(str(exc)) from exc


def cmd_train(args):
    data = read_libsvm(args.data)
    factor = 1.0
    if args.scale:
        data, factor = scale_to_unit_ball(data)
    outcome = _solve(data, _solver_config(args))
    model = dataclasses.replace(outcome.model, scale_factor=factor)
    write_model(model, args.out)
    _emit([
        ("m", data.m), ("n", data.n), ("d", data.d),
        ("lambda", args.lam), ("epsilon", args.epsilon),
        ("iterations", outcome.iterations), ("converged", outcome.converged),
        ("primal_objective", outcome.primal_value),
        ("dual_objective", outcome.dual_value),
        ("duality_gap", outcome.final_gap_estimate),
        ("scale_factor", factor), ("model", args.out),
    ])
    if not outcome.converged:
        logger.warning("max iterations reached before epsilon; model written anyway")
    return EXIT_OK


def _load_for_scoring(args):
    model = read_model(args.model)
    X, y = parse_libsvm(args.data, check_labels=False)
    if X.shape[1] != model.d:
        logger.warning("data has d=%d but model has d=%d; extra features get zero weight",
                       X.shape[1], model.d)
    return model, X, y


def cmd_predict(args):
    model, X, _ = _load_for_scoring(args)
    scores = predict_scores(model, X)
    text = "".join(f"{s!r}\n" for s in scores.tolist())
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_evaluate(args):
    model, X, y = _load_for_scoring(args)
    scores = predict_scores(model, X)
    pos = y > 0
    report = evaluate(ScoredDataset(scores[pos], scores[~pos]), model.loss_kind)
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def run_cv(data, lambdas, folds, seed, metric, config_for):
    """Return ``(best_lambda, table)`` with ``table[lam] = [per-fold scores]``.

    Ties on the mean score go to the smaller lambda.
    """
    splits = stratified_folds(data, folds, seed)
    score_fn = CV_METRICS[metric]
    table = {}
    for lam in sorted(lambdas):
        scores = []
        for i, (train, valid) in enumerate(splits):
            outcome = _solve(train, config_for(lam))
            w = outcome.model.w
            s = ScoredDataset(valid.positives.csr @ w, valid.negatives.csr @ w)
            scores.append(score_fn(s))
            logger.info("lambda=%g fold=%d %s=%.4f", lam, i, metric, scores[-1])
        table[lam] = scores
    best = None
    for lam in sorted(table):
        if best is None or np.mean(table[lam]) > np.mean(table[best]):
            best = lam
    return best, table


def cmd_cv(args):
    data = read_libsvm(args.data)
    if args.scale:
        data, _ = scale_to_unit_ball(data)
    best, table = run_cv(data, args.lambdas, args.folds, args.seed, args.metric,
                         lambda lam: _solver_config(args, lam))
    pairs = [("metric", args.metric), ("folds", args.folds)]
    for lam in sorted(table):
        for i, v in enumerate(table[lam]):
            pairs.append((f"fold_{i}_lambda_{lam!r}", v))
        pairs.append((f"mean_lambda_{lam!r}", float(np.mean(table[lam]))))
    pairs.append(("best_lambda", best))
    grid = sorted(table)
    on_boundary = len(grid) > 1 and best in (grid[0], grid[-1])
    pairs.append(("best_on_boundary", on_boundary))
    _emit(pairs, args.out)
    if on_boundary:
        print(f"warning: best lambda {best!r} is on the grid boundary; "
              "consider extending the grid", file=sys.stderr)
    return EXIT_OK


def loglog_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def run_bench(sizes, dim, margin, seed, config):
    rows = []
    for size in sizes:
        m = size // 2
        data = make_gaussian_margin(m, size - m, dim, margin, seed)
        tic = time.perf_counter()
        outcome = _solve(data, config)
        total = time.perf_counter() - tic
        per_iter = float(np.median([r.seconds for r in outcome.trace]))
        rows.append({
            "size": size, "d": dim, "median_iteration_seconds": per_iter,
            "iterations": outcome.iterations, "total_seconds": total,
        })
    return rows


def cmd_bench(args):
    config = _solver_config(args, record_trace=True)
    rows = run_bench(args.sizes, args.dim, args.margin, args.seed, config)
    pairs = [("d", args.dim), ("epsilon", args.epsilon), ("lambda", args.lam)]
    for r in rows:
        s = r["size"]
        pairs += [
            (f"size_{s}_median_iteration_seconds", r["median_iteration_seconds"]),
            (f"size_{s}_iterations", r["iterations"]),
            (f"size_{s}_total_seconds", r["total_seconds"]),
        ]
    if len({r["size"] for r in rows}) > 1:
        sizes = [r["size"] for r in rows]
        pairs.append(("slope_total_seconds", loglog_slope(sizes, [r["total_seconds"] for r in rows])))
        pairs.append(("slope_iteration_seconds",
                      loglog_slope(sizes, [r["median_iteration_seconds"] for r in rows])))
    _emit(pairs, args.out)
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=os.environ.get("TOPPUSH_LOG_LEVEL", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericFailure as exc:
        print(f"toppush: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TopPushError, OSError) as exc:
        print(f"toppush: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``grasslrr {synth,cluster,eval,sweep}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 solver did not
converge (outputs are still written), 5 a neighbour pair sits at the cut
locus. ``GRASSLRR_THREADS`` caps the BLAS thread pool.
"""

import argparse
import csv
import logging
import os
import sys
import time

import numpy as np

from .data import (
    ImageSet,
    ManifestEntry,
    SynthSpec,
    generate_synthetic,
    image_set_to_point,
    load_manifest,
    read_matrix,
    write_manifest,
    write_matrix,
)
from .evaluate import accuracy, append_report, run_report
from .exceptions import CutLocus, InvalidInput, ParseError, ValidationError
from .grassmann import from_basis
from .lglrr import SolverConfig, build_btensor, build_neighborhood, solve_btensor, write_trace_csv
from .spectral import affinity_from_w, ncut

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NOT_CONVERGED, EXIT_CUT_LOCUS = 0, 2, 3, 4, 5

logger = logging.getLogger("grasslrr")


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    return values


def _add_solver_flags(p):
    p.add_argument("--p", type=int, default=10, help="subspace dimension (default 10)")
    p.add_argument("--lam", "--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--C", "--c", dest="C", type=int, default=10, help="neighbourhood size")
    p.add_argument("--R", "--r", dest="R", type=int, required=True, help="number of clusters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", action="store_true", help="standardize each frame before the SVD")
    p.add_argument("--rho0", type=float, default=1.9)
    p.add_argument("--beta0", type=float, default=0.1)
    p.add_argument("--beta-max", type=float, default=1e6)
    p.add_argument("--eps1", type=float, default=1e-4)
    p.add_argument("--eps2", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--eta-w", type=float, default=None, help="override the proximal constant")


def build_parser():
    parser = argparse.ArgumentParser(prog="grasslrr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic clustered Grassmann dataset")
    p.add_argument("--r", "--R", dest="R", type=int, required=True)
    p.add_argument("--per-cluster", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cluster", help="solve for W and cluster a manifest")
    p.add_argument("manifest")
    _add_solver_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="accuracy of predicted labels against truth")
    p.add_argument("predicted")
    p.add_argument("truth")

    p = sub.add_parser("sweep", help="accuracy over a grid of lambda or C values")
    p.add_argument("manifest")
    _add_solver_flags(p)
    p.add_argument("--param", choices=["lambda", "C"], default="lambda")
    p.add_argument("--values", type=_float_list, required=True, help="comma-separated grid")
    p.add_argument("--truth", default=None, help="labels CSV; defaults to manifest labels")
    p.add_argument("--out", required=True, help="output CSV path")
    return parser


def write_labels(path, ids, labels):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"])
        for i, lab in zip(ids, labels):
            writer.writerow([i, int(lab)])


def read_labels(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["id", "label"]:
        raise ParseError("expected header 'id,label'", line=1, path=path)
    ids, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError("expected two columns", line=lineno, path=path)
        try:
            labels.append(int(row[1]))
        except ValueError:
            raise ParseError(f"label {row[1]!r} is not an integer", line=lineno, path=path) from None
        ids.append(row[0])
    return ids, np.array(labels, dtype=np.int64)


def _config(args, **overrides):
    kw = dict(
        lam=args.lam, C=args.C, rho0=args.rho0, beta0=args.beta0, beta_max=args.beta_max,
        eps1=args.eps1, eps2=args.eps2, max_iters=args.max_iters, eta_w_override=args.eta_w,
    )
    kw.update(overrides)
    return SolverConfig(**kw)


def _load(args):
    if not os.path.isfile(args.manifest):
        raise UsageError(f"manifest not found: {args.manifest}")
    manifest = load_manifest(args.manifest)
    points = []
    for e in manifest.entries:
        A = read_matrix(manifest.resolve(e))
        if args.normalize:
            points.append(image_set_to_point(ImageSet(list(A.T), e.id), args.p, normalize=True))
        else:
            points.append(from_basis(A, args.p))
    if len(points) < 2:
        raise InvalidInput("need at least two image sets")
    return manifest, points


def cmd_synth(args):
    spec = SynthSpec(args.R, args.per_cluster, args.d, args.p, args.sigma, args.seed)
    points, labels = generate_synthetic(spec)
    out = args.out
    os.makedirs(os.path.join(out, "points"), exist_ok=True)
    entries = []
    width = len(str(len(points) - 1))
    for k, (X, lab) in enumerate(zip(points, labels)):
        name = f"points/set{k:0{width}d}.txt"
        write_matrix(os.path.join(out, name), X.X)
        entries.append(ManifestEntry(name, f"set{k:0{width}d}", int(lab)))
    write_manifest(os.path.join(out, "manifest.tsv"), entries)
    write_labels(os.path.join(out, "truth.csv"), [e.id for e in entries], labels)
    print(f"wrote {len(points)} points to {out}")
    return EXIT_OK


def cmd_cluster(args):
    manifest, points = _load(args)
    config = _config(args)
    start = time.perf_counter()
    graph = build_neighborhood(points, config.C)
    B = build_btensor(points, graph)
    state = solve_btensor(B, graph, config)
    labels = ncut(affinity_from_w(state.W), args.R, seed=args.seed)
    wall = time.perf_counter() - start

    os.makedirs(args.out, exist_ok=True)
    write_labels(os.path.join(args.out, "labels.csv"), manifest.ids, labels)
    write_matrix(os.path.join(args.out, "W.txt"), state.W)
    write_trace_csv(state, os.path.join(args.out, "trace.csv"))
    truth = manifest.labels
    acc = accuracy(labels, truth) if truth is not None else None
    append_report(
        os.path.join(args.out, "report.jsonl"),
        run_report(acc, state.iter, wall, state.converged, config.as_dict(),
                   p=args.p, R=args.R, seed=args.seed, warnings=state.warnings),
    )
    msg = f"iterations={state.iter} converged={state.converged}"
    if acc is not None:
        msg += f" accuracy={acc:.4f}"
    print(msg)
    return EXIT_OK if state.converged else EXIT_NOT_CONVERGED


def cmd_eval(args):
    _, pred = read_labels(args.predicted)
    _, truth = read_labels(args.truth)
    print(f"{accuracy(pred, truth):.4f}")
    return EXIT_OK


def cmd_sweep(args):
    if not args.values:
        raise UsageError("the parameter grid is empty")
    manifest, points = _load(args)
    if args.truth is not None:
        _, truth = read_labels(args.truth)
    else:
        truth = manifest.labels
        if truth is None:
            raise UsageError("sweep needs truth labels (--truth or labelled manifest)")
    cache = {}
    rows = []
    for value in args.values:
        C = int(value) if args.param == "C" else args.C
        lam = value if args.param == "lambda" else args.lam
        if C not in cache:
            graph = build_neighborhood(points, C)
            cache[C] = (graph, build_btensor(points, graph))
        graph, B = cache[C]
        state = solve_btensor(B, graph, _config(args, lam=lam, C=C))
        labels = ncut(affinity_from_w(state.W), args.R, seed=args.seed)
        rows.append((args.param, value, accuracy(labels, truth), state.iter, state.converged))
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["param", "value", "accuracy", "iterations", "converged"])
        for param, value, acc, it, conv in rows:
            writer.writerow([param, f"{value:g}", f"{acc:.4f}", it, int(conv)])
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "cluster": cmd_cluster, "eval": cmd_eval, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    threads = os.environ.get("GRASSLRR_THREADS")
    try:
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return COMMANDS[args.command](args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CutLocus as exc:
        print(f"cut locus: {exc}", file=sys.stderr)
        return EXIT_CUT_LOCUS
    except (ParseError, ValidationError, InvalidInput) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

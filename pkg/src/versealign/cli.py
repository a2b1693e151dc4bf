"""Command-line interface.

Exit codes: 0 on success, 1 on validation problems (bad flags, bad
data, broken invariants), 2 on I/O failures.  Given the same inputs
and seed, every subcommand writes byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .alphabet import AlphabetError
from .cluster import (
    LINKAGES,
    adjusted_rand_index,
    agglomerate,
    cut,
    load_partition,
    save_partition,
    to_newick,
)
from .corpus import CorpusFormatError, read_corpus, record_from_obj, write_corpus
from .distance import DistanceMatrix, distance_matrix
from .evaluate import EvalConfig, Method, knn_loo, run_evaluation
from .scoring import default_scheme, load_scheme
from .simulate import FORM_NAMES, ari_benchmark, builtin_form, generate_corpus

__all__ = ["main", "main_entry"]


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def _add_threads(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--threads",
        type=int,
        default=0,
        help="worker threads; 0 auto-detects (default 0)",
    )


def _add_scheme(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scheme",
        default=None,
        metavar="PATH",
        help="scoring scheme config (default: built-in weighted scheme)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="versealign",
        description="Alignment distances, clustering, and simulation for verse encodings.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check every record of a corpus")
    p.add_argument("corpus", metavar="CORPUS", help="corpus file, one JSON record per line")

    p = sub.add_parser("distmat", help="write an all-pairs distance matrix")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="PATH")
    _add_scheme(p)
    _add_threads(p)

    p = sub.add_parser("knn", help="leave-one-out kNN accuracy over a matrix")
    p.add_argument("--dist", required=True, metavar="PATH")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.add_argument("--k", type=int, default=7)
    p.add_argument("--label", default="meter", help="label name to predict (default meter)")
    p.add_argument("--out", default=None, metavar="PATH", help="default: stdout")

    p = sub.add_parser("eval", help="repeated stratified evaluation runs")
    p.add_argument("--corpus", required=True, metavar="PATH")
    p.add_argument(
        "--method",
        required=True,
        choices=[m.value for m in Method],
    )
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--per-class", type=int, default=10, dest="per_class")
    p.add_argument("--k", type=int, default=7)
    p.add_argument(
        "--class-labels",
        default="language,meter",
        dest="class_labels",
        help="comma-separated label names forming the class (default language,meter)",
    )
    p.add_argument("--out", default=None, metavar="PATH", help="default: stdout")
    _add_seed(p)
    _add_scheme(p)
    _add_threads(p)

    p = sub.add_parser("cluster", help="agglomerate a distance matrix")
    p.add_argument("--dist", required=True, metavar="PATH")
    p.add_argument("--linkage", default="average", choices=list(LINKAGES))
    p.add_argument("--newick", default=None, metavar="PATH", help="write the tree here")
    p.add_argument("--cut", type=int, default=None, metavar="K", help="cut into K clusters")
    p.add_argument("--out", default=None, metavar="PATH", help="partition file for --cut")

    p = sub.add_parser("ari", help="adjusted Rand index of two partition files")
    p.add_argument("--a", required=True, metavar="PATH")
    p.add_argument("--b", required=True, metavar="PATH")

    p = sub.add_parser("simulate", help="generate a synthetic corpus")
    p.add_argument(
        "--form",
        required=True,
        help=f"one of {', '.join(FORM_NAMES)}, or 'all'",
    )
    p.add_argument("--poems", type=int, required=True, help="poems per form")
    p.add_argument("--lambda", type=float, default=14.0, dest="lam",
                   help="mean line count (default 14)")
    p.add_argument("--out", required=True, metavar="PATH")
    _add_seed(p)

    p = sub.add_parser("bench-ari", help="clustering recovery benchmark")
    p.add_argument(
        "--forms",
        required=True,
        help="comma-separated form names to mix",
    )
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--per-form", type=int, default=20, dest="per_form")
    p.add_argument("--out", default=None, metavar="PATH", help="default: stdout")
    _add_seed(p)
    _add_scheme(p)
    _add_threads(p)

    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_scheme_arg(args: argparse.Namespace):
    if getattr(args, "scheme", None):
        return load_scheme(args.scheme)
    return default_scheme()


def _cmd_validate(args: argparse.Namespace) -> int:
    bad = 0
    with open(args.corpus, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = record_from_obj(json.loads(line))
                print(f"{rec.id}\tok")
            except (json.JSONDecodeError, CorpusFormatError, AlphabetError) as exc:
                bad += 1
                print(f"line {lineno}\terror: {exc}")
    return 1 if bad else 0


def _cmd_distmat(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus)
    matrix = distance_matrix(records, _load_scheme_arg(args), args.threads)
    matrix.save_tsv(args.out)
    return 0


def _cmd_knn(args: argparse.Namespace) -> int:
    matrix = DistanceMatrix.load_tsv(args.dist)
    records = {rec.id: rec for rec in read_corpus(args.corpus)}
    missing = [id_ for id_ in matrix.ids if id_ not in records]
    if missing:
        raise CorpusFormatError(f"matrix ids missing from corpus: {missing[:5]}")
    labels = [records[id_].labels.get(args.label, "") for id_ in matrix.ids]
    accuracy, predictions = knn_loo(matrix, labels, args.k)
    report = {
        "k": args.k,
        "n": len(matrix.ids),
        "accuracy": accuracy,
        "predictions": dict(zip(matrix.ids, predictions)),
    }
    _emit(json.dumps(report, sort_keys=True, indent=2), args.out)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus)
    config = EvalConfig(
        method=Method(args.method),
        per_class=args.per_class,
        k=args.k,
        runs=args.runs,
        seed=args.seed,
        class_labels=tuple(s.strip() for s in args.class_labels.split(",") if s.strip()),
    )
    scheme = load_scheme(args.scheme) if args.scheme else None
    report = run_evaluation(records, config, scheme, args.threads)
    _emit(report.to_json(), args.out)
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    if args.newick is None and args.cut is None:
        raise ValueError("nothing to do: pass --newick and/or --cut with --out")
    if (args.cut is None) != (args.out is None):
        raise ValueError("--cut and --out go together")
    matrix = DistanceMatrix.load_tsv(args.dist)
    dendro = agglomerate(matrix, args.linkage)
    if args.newick is not None:
        with open(args.newick, "w", encoding="utf-8") as fh:
            fh.write(to_newick(dendro) + "\n")
    if args.cut is not None:
        save_partition(cut(dendro, args.cut), args.out)
    return 0


def _cmd_ari(args: argparse.Namespace) -> int:
    value = adjusted_rand_index(load_partition(args.a), load_partition(args.b))
    print(format(value, ".9g"))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.poems < 1:
        raise ValueError("--poems must be positive")
    if args.form == "all":
        forms = [builtin_form(name) for name in FORM_NAMES]
    else:
        forms = [builtin_form(args.form)]
    rng = np.random.default_rng(args.seed)
    records = generate_corpus(forms, args.poems, rng, args.lam)
    write_corpus(records, args.out)
    return 0


def _cmd_bench_ari(args: argparse.Namespace) -> int:
    names = [s.strip() for s in args.forms.split(",") if s.strip()]
    if len(names) < 2:
        raise ValueError("--forms needs at least two form names")
    forms = [builtin_form(name) for name in names]
    scheme = load_scheme(args.scheme) if args.scheme else None
    rng = np.random.default_rng(args.seed)
    result = ari_benchmark(
        forms, args.per_form, args.runs, rng, scheme, threads=args.threads
    )
    report = {
        "forms": names,
        "runs": args.runs,
        "per_form": args.per_form,
        "seed": args.seed,
        "per_run_ari": list(result.aris),
        "median": result.median,
    }
    _emit(json.dumps(report, sort_keys=True, indent=2), args.out)
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "distmat": _cmd_distmat,
    "knn": _cmd_knn,
    "eval": _cmd_eval,
    "cluster": _cmd_cluster,
    "ari": _cmd_ari,
    "simulate": _cmd_simulate,
    "bench-ari": _cmd_bench_ari,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage errors;
        # usage errors are validation problems here.
        return 0 if exc.code in (0, None) else 1
    try:
        return _HANDLERS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()

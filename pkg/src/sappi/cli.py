"""Command-line interface: every pipeline as a subcommand with stable reports.

Reports default to stdout; ``--out``/``--report`` write files, and every file
output gains a ``<path>.manifest.json`` sibling holding the invocation
parameters, tool version, and timestamp.  Report bytes themselves carry no
timestamps, so identical invocations produce identical reports.

Exit codes: 0 success, 1 domain error (bad input data), 2 usage error.
"""

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, costs, images, inference, metrics
from .adders import AdderKind, build_program, parse_kind, truth_table, truth_table_csv
from .errors import SappiError
from .imply import format_trace, run_program
from .rca import MulConfig, RcaConfig

_FUNCTIONAL = ("exact", "sappi1", "sappi2")
_PROGRAM = ("sappi1", "sappi2")


def _write_manifest(args: argparse.Namespace, outputs: list[str]) -> None:
    if not outputs:
        return
    manifest = {
        "subcommand": args.command,
        "parameters": {
            key: value
            for key, value in sorted(vars(args).items())
            if key not in ("command", "func") and value is not None
        },
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
    }
    with open(outputs[0] + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _emit(text: str, path: str | None, args: argparse.Namespace) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)
        _write_manifest(args, [path])


def _cmd_truth_table(args) -> int:
    kind = parse_kind(args.kind)
    if args.format == "csv":
        _emit(truth_table_csv(kind), None, args)
    else:
        rows = [
            {"a": r.a, "b": r.b, "c": r.c, "sum": r.outcome.sum, "cout": r.outcome.cout}
            for r in truth_table(kind)
        ]
        _emit(json.dumps({"kind": str(kind), "rows": rows}, indent=2) + "\n", None, args)
    return 0


def _cmd_simulate(args) -> int:
    kind = parse_kind(args.kind)
    program = build_program(kind)
    result = run_program(program, {"A": args.a, "B": args.b, "C": args.c})
    print(f"sum={result.outputs['sum']} cout={result.outputs['cout']}")
    if args.trace:
        print(format_trace(list(result.trace)))
    return 0


def _cmd_error_metrics(args) -> int:
    cfg = RcaConfig(n=args.n, k=args.k, kind=parse_kind(args.kind))
    report = metrics.exhaustive_metrics(cfg, threads=args.threads)
    if args.out and args.out.endswith(".json"):
        _emit(metrics.report_json(report) + "\n", args.out, args)
    else:
        _emit(metrics.report_csv(report), args.out, args)
    return 0


def _cmd_compare(args) -> int:
    rows = costs.comparison_table(args.n, args.k)
    if args.out and args.out.endswith(".json"):
        _emit(costs.comparison_json(rows, args.n, args.k) + "\n", args.out, args)
    else:
        _emit(costs.comparison_csv(rows), args.out, args)
    return 0


def _cmd_gains(args) -> int:
    report = costs.application_gains(
        args.application, args.additions, parse_kind(args.kind), args.n, args.k
    )
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out, args)
    return 0


def _load_gray(path) -> images.GrayImage:
    image = images.load_image(path)
    if not isinstance(image, images.GrayImage):
        raise SappiError(f"{path} is not a grayscale image")
    return image


def _finish_image_command(args, out_image, reference, cfg, application, gains) -> int:
    images.save_image(out_image, args.out)
    outputs = [args.out]
    if args.report:
        report = images.quality_report(application, cfg, reference, out_image, gains)
        with open(args.report, "w") as fh:
            fh.write(images.report_json(report) + "\n")
        outputs.append(args.report)
    _write_manifest(args, outputs)
    return 0


def _cmd_image_add(args) -> int:
    cfg = RcaConfig(n=8, k=args.k, kind=parse_kind(args.kind))
    img_a = _load_gray(args.a)
    img_b = _load_gray(args.b)
    out, gains = images.image_add(cfg, img_a, img_b)
    reference, _ = images.image_add(RcaConfig(n=8, k=0), img_a, img_b)
    return _finish_image_command(args, out, reference, cfg, "image-add", gains)


def _cmd_grayscale(args) -> int:
    cfg = RcaConfig(n=8, k=args.k, kind=parse_kind(args.kind))
    image = images.load_image(args.infile)
    if not isinstance(image, images.RgbImage):
        raise SappiError(f"{args.infile} is not an RGB image")
    out, gains = images.rgb_to_gray(cfg, image)
    reference, _ = images.rgb_to_gray(RcaConfig(n=8, k=0), image)
    return _finish_image_command(args, out, reference, cfg, "grayscale", gains)


def _cmd_blur(args) -> int:
    rca = RcaConfig(n=20, k=args.k, kind=parse_kind(args.kind))
    cfg = MulConfig(rca=rca, a_bits=8, b_bits=8)
    image = _load_gray(args.infile)
    out, gains = images.gaussian_blur(cfg, image)
    reference, _ = images.gaussian_blur(MulConfig(rca=RcaConfig(n=20, k=0)), image)
    return _finish_image_command(args, out, reference, rca, "blur", gains)


def _cmd_mnist_eval(args) -> int:
    dataset = inference.load_idx(args.images, args.labels)
    net = inference.load_weights(args.weights)
    cfg = MulConfig(rca=RcaConfig(n=20, k=args.k, kind=parse_kind(args.kind)))
    report = inference.evaluate(net, dataset, cfg, sample_limit=args.limit)
    _emit(inference.report_json(report) + "\n", args.report, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sappi",
        description="Simulator and evaluation toolkit for serial IMPLY approximate adders",
    )
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker cap for parallelizable enumerations")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("truth-table", help="8-row truth table of an adder kind")
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_truth_table)

    p = sub.add_parser("simulate", help="run one step program on a single bit triple")
    p.add_argument("--kind", required=True, choices=_PROGRAM)
    for name in ("a", "b", "c"):
        p.add_argument(f"--{name}", required=True, type=int, choices=(0, 1))
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("error-metrics", help="exhaustive MED/NMED/MRED for one configuration")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_error_metrics)

    p = sub.add_parser("compare", help="circuit-level comparison across all adder kinds")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("image-add", help="average two grayscale images")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_image_add)

    p = sub.add_parser("grayscale", help="average RGB channels into a grayscale image")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_grayscale)

    p = sub.add_parser("blur", help="3x3 binomial blur via the shift-and-add multiplier")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_blur)

    p = sub.add_parser("mnist-eval", help="evaluate a quantized network on IDX data")
    p.add_argument("--images", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--limit", type=int, default=1000)
    p.add_argument("--report")
    p.set_defaults(func=_cmd_mnist_eval)

    p = sub.add_parser("gains", help="application-level energy and step savings")
    p.add_argument("--application", required=True)
    p.add_argument("--additions", required=True, type=int)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--kind", required=True, choices=_FUNCTIONAL)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gains)

    return parser


def _validate_ranges(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    n = getattr(args, "n", None)
    k = getattr(args, "k", None)
    if args.command in ("image-add", "grayscale"):
        n = 8
    elif args.command in ("blur", "mnist-eval"):
        n = 20
    if n is not None and n < 1:
        parser.error(f"--n must be positive, got {n}")
    if k is not None and not 0 <= k <= (n if n is not None else k):
        parser.error(f"--k must satisfy 0 <= k <= {n}, got {k}")
    if args.command == "error-metrics" and n > metrics.MAX_EXHAUSTIVE_WIDTH:
        parser.error(f"--n is capped at {metrics.MAX_EXHAUSTIVE_WIDTH} for exhaustive enumeration")
    if getattr(args, "additions", 0) < 0:
        parser.error("--additions cannot be negative")
    if getattr(args, "limit", 0) < 0:
        parser.error("--limit cannot be negative")
    if args.threads < 1:
        parser.error("--threads must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_ranges(parser, args)
    try:
        return args.func(args)
    except (SappiError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

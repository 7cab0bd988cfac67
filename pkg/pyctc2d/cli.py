"""
The ``pyctc2d`` console script.

Original Date:   2 March 2026

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import argparse
import logging
import sys

from pyctc2d import __version__ as VERSION
from pyctc2d import bench
from pyctc2d.ctc2d_cntrl import (
    INFEASIBLE,
    MALFORMED,
    run_bench_cmd,
    run_decode,
    run_demo_cmd,
    run_generate,
    run_loss,
    run_visualize,
)
from pyctc2d.ctc2d_help import help_str
from pyctc2d.errors import CTC2DError, InfeasibleLabelError

logger = logging.getLogger("pyctc2d")


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1; got {value}")
    return value


def _add_inputs(parser, label=False):
    parser.add_argument("x", help="class map (H, W, C) or sequence (T, C) tensor file")
    if label:
        parser.add_argument("label", help="target label, spelled with the alphabet")
    parser.add_argument("--psi", help="path transition tensor file (default: uniform)")
    parser.add_argument("--gamma", help="initial row distribution tensor file (default: uniform)")
    parser.add_argument("--loss", choices=("vanilla", "2d"), default="2d", help="model (default: 2d)")
    parser.add_argument(
        "--variant", choices=("simplified", "full"), default="simplified", help="path transitions (default: simplified)"
    )
    parser.add_argument(
        "--collapse", choices=("mean", "max"), default="mean", help="height collapse of a map, for vanilla CTC"
    )
    parser.add_argument("--alphabet", help="real symbols, in class order (default: A, B, C, ...)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyctc2d",
        description="Two dimensional CTC: loss, decoding and a small training demonstration.",
        epilog=help_str,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeat for debug)")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("loss", help="print the loss of a label")
    _add_inputs(p, label=True)
    p.add_argument("--permissive", action="store_true", help="print an infinite loss, rather than fail, when infeasible")
    p.add_argument("--grad-out", metavar="PREFIX", help="write logit gradients to PREFIX_<part>.ctc2dt")
    p.set_defaults(func=run_loss)

    p = sub.add_parser("decode", help="print the best label")
    _add_inputs(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--greedy", action="store_true", help="best path decoding (default)")
    group.add_argument("--beam", type=_positive, metavar="N", help="prefix beam search of width N")
    p.set_defaults(func=run_decode)

    p = sub.add_parser("demo", help="compare the losses on synthetic data")
    p.add_argument("--config", help="YAML configuration (default: the bundled one)")
    p.add_argument("--out", help="report path (.yaml or .json)")
    p.add_argument("--epochs", type=int, help="override train.epochs")
    p.add_argument("--threads", type=_positive, help="override train.threads")
    p.add_argument("--debug", action="store_true", help="echo the trainer's console log")
    p.set_defaults(func=run_demo_cmd)

    p = sub.add_parser("visualize", help="write PGM images of the maps")
    _add_inputs(p)
    p.add_argument("--out", required=True, metavar="PREFIX", help="output path prefix")
    p.set_defaults(func=run_visualize)

    p = sub.add_parser("generate", help="write a synthetic data set")
    p.add_argument("--config", help="YAML configuration; its data section is used (default: the bundled one)")
    p.add_argument("--out", required=True, help="data set directory")
    p.add_argument("--count", type=_positive, default=100, help="instances (default: 100)")
    p.add_argument("--start", type=int, default=0, help="first instance index (default: 0)")
    p.set_defaults(func=run_generate)

    p = sub.add_parser("bench", help="time both losses")
    p.add_argument("--batch", type=_positive, default=bench.gBatch)
    p.add_argument("--height", type=_positive, default=bench.gHeight)
    p.add_argument("--width", type=_positive, default=bench.gWidth)
    p.add_argument("--classes", type=_positive, default=bench.gClasses)
    p.add_argument("--label-len", type=int, default=bench.gLabelLen)
    p.add_argument("--warmup", type=int, default=bench.gWarmUpIter, help="untimed runs")
    p.add_argument("--repeats", type=_positive, default=bench.gMeasureIter, help="timed runs")
    p.add_argument("--threads", type=_positive, default=1)
    p.set_defaults(func=run_bench_cmd)
    return parser


def main(argv=None, out=None) -> int:
    """Run one command; returns the exit status."""

    args = make_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except InfeasibleLabelError as err:
        logger.error("infeasible label: %s", err)
        return INFEASIBLE
    except (CTC2DError, ValueError, OSError) as err:
        logger.error("%s", err)
        return MALFORMED

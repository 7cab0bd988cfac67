"""
Command implementations behind the ``pyctc2d`` console script.

Original Date:   2 March 2026

Each ``run_<command>()`` function takes the parsed command line and an
output stream, does its work, prints its line oriented results and
returns the process exit status. Errors are left to propagate; ``cli``
maps them onto exit statuses.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import json
import logging
from pathlib import Path

import numpy as np
import yaml

from pyctc2d import __version__ as VERSION
from pyctc2d.bench import run_bench
from pyctc2d.ctc import LossPolicy, ctc_grad, ctc_loss
from pyctc2d.ctc2d import ctc2d_grad, ctc2d_loss
from pyctc2d.ctc2d_cfg import DemoConfig, config_to_dict, load_config
from pyctc2d.ctc2d_data import read_tensor, save_dataset, write_tensor
from pyctc2d.ctc2d_plot import export_maps
from pyctc2d.decoder import DecodeResult, beam_decode, greedy_decode_1d, greedy_decode_2d
from pyctc2d.errors import InfeasibleLabelError, InvalidTensorError, ShapeMismatchError
from pyctc2d.synth import generate
from pyctc2d.tensors import (
    Alphabet,
    ProbMap2D,
    ProbSeq1D,
    TransitionMap,
    Variant,
    collapse_height,
    validate,
)
from pyctc2d.trainer import Trainer, run_demo

logger = logging.getLogger(__name__)

gFileNormTol = 1.0e-5  # row sum tolerance of float32 file contents
gPrecision = 12  # significant digits printed
gZero = "0." + "0" * gPrecision
gDefaultConfig = Path(__file__).parent / "configs" / "demo_default.yaml"

OK, MALFORMED, INFEASIBLE = 0, 1, 2  # exit statuses


def format_number(value) -> str:
    """Fixed, platform independent rendering with ``gPrecision`` significant digits."""

    value = float(value)
    if value == 0.0:
        return gZero
    return np.format_float_positional(value, precision=gPrecision, unique=False, fractional=False, trim="k")


def _distribution(path, axis_names):
    """Read a tensor file, check its rows, and undo float32 rounding."""

    values = read_tensor(path).astype(float)
    if values.ndim != len(axis_names):
        raise ShapeMismatchError(f"{Path(path).name}: expected rank {len(axis_names)}; got shape {values.shape}")
    report = validate(values, axis_names, tol=gFileNormTol)
    if not report.ok:
        raise InvalidTensorError(report._replace(message=f"{Path(path).name}: {report.message}"))
    return values / values.sum(axis=-1, keepdims=True)


def load_sequence(x_path, collapse_mode="mean") -> ProbSeq1D:
    """(T, C) sequence file, or an (H, W, C) map file collapsed over height."""

    rank = read_tensor(x_path).ndim
    if rank == 3:
        return collapse_height(ProbMap2D(_distribution(x_path, ("h", "w", "c"))), collapse_mode)
    return ProbSeq1D(_distribution(x_path, ("t", "c")))


def load_map(x_path, psi_path=None, gamma_path=None, variant=Variant.SIMPLIFIED):
    """
    Class map and path transitions from files.

    A (T, C) sequence file is read as a one row map. Missing transitions,
    or gamma, default to uniform.

    Returns:
        (ProbMap2D, TransitionMap): The inputs.
    """

    variant = Variant(variant)
    if read_tensor(x_path).ndim == 2:
        x = ProbMap2D(_distribution(x_path, ("t", "c"))[None])
    else:
        x = ProbMap2D(_distribution(x_path, ("h", "w", "c")))
    gamma = None if gamma_path is None else _distribution(gamma_path, ("h",))
    if psi_path is None:
        uniform = TransitionMap.uniform(x.height, x.width, variant)
        psi = TransitionMap(uniform.values, gamma=gamma, variant=variant)
    else:
        names = ("h", "w", "j") if variant is Variant.FULL else ("w", "h")
        psi = TransitionMap(_distribution(psi_path, names), gamma=gamma, variant=variant)
    return x, psi


def make_alphabet(symbols, num_classes) -> Alphabet:
    """The given real symbols, or the default alphabet, for ``num_classes`` classes."""

    alphabet = Alphabet.default(num_classes) if not symbols else Alphabet(symbols)
    if alphabet.size != num_classes:
        raise ShapeMismatchError(f"Alphabet {alphabet!r} has {alphabet.size} classes; the input has {num_classes}.")
    return alphabet


def _grad_path(prefix, part):
    prefix = Path(prefix)
    return prefix.with_name(f"{prefix.name}_{part}.ctc2dt")


def run_loss(args, out) -> int:
    """Print ``loss=<value>``, optionally writing the logit gradients."""

    policy = LossPolicy(args.permissive)
    if args.loss == "vanilla":
        x = load_sequence(args.x, args.collapse)
        y = make_alphabet(args.alphabet, x.num_classes).encode(args.label)
        value = ctc_loss(x, y, policy)
    else:
        x, psi = load_map(args.x, args.psi, args.gamma, args.variant)
        y = make_alphabet(args.alphabet, x.num_classes).encode(args.label)
        value = ctc2d_loss(x, psi, y, policy)
    print(f"loss={format_number(value)}", file=out)
    if not args.grad_out:
        return OK
    try:
        if args.loss == "vanilla":
            grads = {"class": ctc_grad(x, y)}
        else:
            g = ctc2d_grad(x, psi, y, train_gamma=True)
            grads = {"class": g.class_logits, "trans": g.transition_logits, "gamma": g.gamma_logits}
    except InfeasibleLabelError as err:
        logger.warning("No gradients written: %s.", err)
        return OK
    for part, values in grads.items():
        write_tensor(_grad_path(args.grad_out, part), values)
    return OK


def run_decode(args, out) -> int:
    """Print ``label=<string> score=<log-prob>`` for the best decode."""

    if args.loss == "vanilla":
        x = load_sequence(args.x, args.collapse)
        if args.beam:
            results = beam_decode(x, args.beam)
        else:
            results = [greedy_decode_1d(x)]
    else:
        x, psi = load_map(args.x, args.psi, args.gamma, args.variant)
        if args.beam:
            results = beam_decode(x, args.beam, psi)
        else:
            results = [greedy_decode_2d(x, psi)]
    alphabet = make_alphabet(args.alphabet, x.num_classes)
    best = results[0] if results else DecodeResult(alphabet.encode(""), float("-inf"))
    print(f"label={alphabet.decode(best.label)} score={format_number(best.score)}", file=out)
    return OK


def load_demo_config(path=None) -> DemoConfig:
    """The named configuration file, or the bundled default."""

    return load_config(gDefaultConfig if path is None else path)


def _write_report(path, doc):
    path = Path(path)
    with open(path, "w") as fh:
        if path.suffix.lower() == ".json":
            json.dump(doc, fh, indent=2)
        else:
            yaml.safe_dump(doc, fh, default_flow_style=False, sort_keys=False)
    logger.info("Report written to %s.", path)


def run_demo_cmd(args, out) -> int:
    """Train and compare both losses; print final held out scores, and write the report."""

    cfg = load_demo_config(args.config)
    if args.epochs is not None:
        cfg.train.epochs = args.epochs
    if args.threads is not None:
        cfg.train.threads = args.threads
    trainer = Trainer(config=cfg.train, debug=args.debug)
    reports = run_demo(cfg, trainer)
    for kind, report in reports.items():
        print(
            f"kind={kind} accuracy={format_number(report.final.accuracy)} "
            f"edit_distance={format_number(report.final.edit_distance)}",
            file=out,
        )
    if args.out:
        _write_report(
            args.out,
            {
                "producer": f"pyctc2d {VERSION}",
                "config": config_to_dict(cfg),
                "results": {kind: report.to_dict() for kind, report in reports.items()},
            },
        )
    return OK


def run_visualize(args, out) -> int:
    """Write grayscale images of the maps, and their sidecar; print each path written."""

    x, psi = load_map(args.x, args.psi, args.gamma, args.variant)
    alphabet = make_alphabet(args.alphabet, x.num_classes)
    for path in export_maps(args.out, x, psi, alphabet):
        print(f"wrote={path}", file=out)
    return OK


def run_generate(args, out) -> int:
    """Write a synthetic data set directory."""

    cfg = load_demo_config(args.config)
    instances = generate(cfg.data, args.count, start=args.start)
    save_dataset(args.out, instances, cfg.data)
    print(f"count={len(instances)} path={args.out}", file=out)
    return OK


def run_bench_cmd(args, out) -> int:
    """Print ``vanilla_ms=<v> ctc2d_ms=<v> ratio=<v>``."""

    res = run_bench(
        batch=args.batch,
        height=args.height,
        width=args.width,
        classes=args.classes,
        label_len=args.label_len,
        warm_up_iter=args.warmup,
        measure_iter=args.repeats,
        threads=args.threads or 1,
    )
    print(
        f"vanilla_ms={format_number(res.vanilla_ms)} ctc2d_ms={format_number(res.ctc2d_ms)} "
        f"ratio={format_number(res.ratio)}",
        file=out,
    )
    return OK

"""
Loss overhead timing: 2D CTC against vanilla CTC, loss plus logit gradients.

Original Date:   2 March 2026

Both losses are timed on the same random batch of class logits; the
vanilla loss sees them through its usual height collapse. Each timing
is a warm up run followed by an averaged measurement run.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from time import perf_counter
from typing import NamedTuple

import numpy as np
from numpy import array_split
from numpy.random import default_rng

from pyctc2d.loss import CTC2DLoss, Loss, VanillaLoss
from pyctc2d.readout import ReadoutOutput
from pyctc2d.tensors import Label

logger = logging.getLogger(__name__)

gBatch = 256
gHeight = 16
gWidth = 32
gClasses = 37  # 36 symbols plus the blank
gLabelLen = 8
gWarmUpIter = 2
gMeasureIter = 5


class BenchResult(NamedTuple):
    """Mean wall clock per batch, in milliseconds."""

    vanilla_ms: float
    ctc2d_ms: float
    ratio: float  #: ``ctc2d_ms / vanilla_ms``


def make_batch(batch, height, width, classes, label_len, seed=0):
    """
    Random logits and feasible labels.

    Returns:
        (ReadoutOutput, [Label]): The batch.
    """

    if 2 * label_len > width:
        raise ValueError(f"Labels of {label_len} symbols may not fit {width} columns.")
    rng = default_rng(seed)
    output = ReadoutOutput(
        rng.standard_normal((batch, height, width, classes)),
        rng.standard_normal((batch, width - 1, height)),
        None,
        None,
    )
    labels = [Label(rng.integers(1, classes, size=label_len)) for _ in range(batch)]
    return output, labels


def time_call(fn, warm_up_iter=gWarmUpIter, measure_iter=gMeasureIter) -> float:
    """Mean milliseconds per call of ``fn()``, after ``warm_up_iter`` untimed calls."""

    for _ in range(warm_up_iter):
        fn()
    start = perf_counter()
    for _ in range(measure_iter):
        fn()
    return 1000.0 * (perf_counter() - start) / max(measure_iter, 1)


def _runner(loss: Loss, output: ReadoutOutput, labels, threads):
    chunks = [ix for ix in array_split(np.arange(len(labels)), threads) if len(ix)]

    def work(ix):
        part = ReadoutOutput(output.class_logits[ix], output.transition_logits[ix], None, None)
        return loss.evaluate(part, [labels[i] for i in ix])

    def run():
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(work, chunks))
        return [work(ix) for ix in chunks]

    return run


def run_bench(
    batch=gBatch,
    height=gHeight,
    width=gWidth,
    classes=gClasses,
    label_len=gLabelLen,
    warm_up_iter=gWarmUpIter,
    measure_iter=gMeasureIter,
    threads=1,
    seed=0,
) -> BenchResult:
    """Time both losses, with gradients, on one random batch."""

    output, labels = make_batch(batch, height, width, classes, label_len, seed)
    timings = []
    for loss in (VanillaLoss(), CTC2DLoss()):
        ms = time_call(_runner(loss, output, labels, threads), warm_up_iter, measure_iter)
        logger.info("%s: %.3f ms per batch of %d.", loss.name, ms, batch)
        timings.append(ms)
    vanilla_ms, ctc2d_ms = timings
    return BenchResult(vanilla_ms, ctc2d_ms, ctc2d_ms / vanilla_ms if vanilla_ms > 0 else float("inf"))

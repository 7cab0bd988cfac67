"""
Gradient descent training of the readout, with either CTC loss.

Original Date:   2 March 2026

This module provides the ``Trainer`` application object, which trains
and evaluates ``ReadoutModel`` instances on synthetic data, keeping a
timestamped console log and a one line status, and ``run_demo()``,
which compares the two losses on a common data set.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import logging
import platform
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from time import perf_counter
from typing import Dict, List, NamedTuple

import numpy as np
from numpy import array_split, isfinite
from numpy.random import default_rng
from traits.api import Bool, HasTraits, Instance, String

from pyctc2d import __version__ as VERSION
from pyctc2d.ctc2d_cfg import DemoConfig, TrainConfig
from pyctc2d.ctc2d_util import normalized_edit_distance
from pyctc2d.errors import TrainingDivergedError
from pyctc2d.loss import Loss, make_loss
from pyctc2d.readout import ReadoutGrads, ReadoutModel
from pyctc2d.synth import generate, stack_features

logger = logging.getLogger(__name__)

gChunk = 256  # most items pushed through the readout at once


class EvalResult(NamedTuple):
    """Held out performance."""

    accuracy: float  #: Exact match rate.
    edit_distance: float  #: Mean normalized edit distance.
    loss: float  #: Mean loss.


class TrainReport(NamedTuple):
    """Outcome of one training run."""

    kind: str
    num_parameters: int
    epoch_losses: List[float]  #: Mean training loss after each epoch.
    step_sizes: List[float]  #: Step size in force during each epoch.
    epoch_seconds: List[float]  #: Wall clock of each epoch.
    initial: EvalResult
    final: EvalResult

    def to_dict(self) -> dict:
        """Plain dictionary image, for YAML / JSON output."""

        return {
            "kind": self.kind,
            "num_parameters": self.num_parameters,
            "epoch_losses": [float(v) for v in self.epoch_losses],
            "step_sizes": [float(v) for v in self.step_sizes],
            "epoch_seconds": [float(v) for v in self.epoch_seconds],
            "initial": {k: float(v) for k, v in self.initial._asdict().items()},
            "final": {k: float(v) for k, v in self.final._asdict().items()},
        }

    def comparable(self) -> dict:
        """``to_dict()`` without the wall clock timings, for run to run comparison."""

        res = self.to_dict()
        del res["epoch_seconds"]
        return res


def _add(a: ReadoutGrads, b: ReadoutGrads) -> ReadoutGrads:
    return ReadoutGrads(*(x + y for x, y in zip(a, b)))


def _scale(a: ReadoutGrads, k: float) -> ReadoutGrads:
    return ReadoutGrads(*(k * x for x in a))


def _mean_gradient(grads: ReadoutGrads, count, clip_norm) -> ReadoutGrads:
    """Mean of summed item gradients, rescaled down to norm ``clip_norm`` when longer (0 disables)."""

    mean = _scale(grads, 1.0 / count)
    if clip_norm > 0.0:
        norm = np.sqrt(sum(float(np.sum(g * g)) for g in mean))
        if norm > clip_norm:
            mean = _scale(mean, clip_norm / norm)
    return mean


class Trainer(HasTraits):
    """
    Trains and evaluates readouts, keeping a console log and a status line.
    """

    config = Instance(TrainConfig, ())  #: Training parameters.
    debug = Bool(False)  #: Echo log messages to the terminal, as well as the console. (Default = False)
    status = String("Ready.")  #: Current activity.
    console_log = String("pyctc2d Console Log\n\n")

    def log(self, msg, alert=False, exception=None):
        """Log a message to the console and, optionally, to the terminal and/or the module logger."""
        _msg = msg.strip()
        txt = "\n[{}]: {}\n".format(datetime.now(), _msg)
        if self.debug:
            print(txt)
        self.console_log += txt
        if alert:
            logger.warning(_msg)
        else:
            logger.debug(_msg)
        if exception:
            raise exception

    def __init__(self, **traits):
        super().__init__(**traits)
        self.log("Started.")
        self.log_information()
        if self.debug:
            self.log("Debug Mode Enabled.")

    def log_information(self):
        """Log the system information."""
        self.log(f"System: {platform.system()} {platform.release()}")
        self.log(f"Python Version: {platform.python_version()}")
        self.log(f"pyctc2d Version: {VERSION}")

    def _status_changed(self, new):
        logger.info(new)

    def _chunks(self, n):
        pieces = max(self.config.threads, (n + gChunk - 1) // gChunk)
        return [ix for ix in array_split(np.arange(n), pieces) if len(ix)]

    def _map(self, fn, chunks):
        if self.config.threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
                return list(pool.map(fn, chunks))
        return [fn(ix) for ix in chunks]

    def batch_gradient(self, model: ReadoutModel, loss: Loss, features, labels):
        """
        Per-item losses of a batch, and the parameter gradient of their sum.

        The batch is split into chunks, processed by ``config.threads``
        workers; chunk results are combined in chunk order.
        """

        def work(ix):
            output = model.forward(features[ix])
            res = loss.evaluate(output, [labels[i] for i in ix])
            return res.losses, model.backward(output, res.dclass, res.dtrans, res.dgamma)

        results = self._map(work, self._chunks(len(labels)))
        losses = np.concatenate([r[0] for r in results])
        grads = results[0][1]
        for r in results[1:]:
            grads = _add(grads, r[1])
        return losses, grads

    def evaluate(self, model: ReadoutModel, instances, kind) -> EvalResult:
        """
        Decode ``instances`` greedily and score them against their labels.

        Args:
            model(ReadoutModel): The readout.
            instances([SynthInstance]): Held out data.
            kind(str): Loss, and decoder, to use: "vanilla" or "2d".
        """

        if not instances:
            return EvalResult(0.0, 0.0, 0.0)
        loss = make_loss(kind, self.config)
        features = stack_features(instances)
        labels = [inst.label for inst in instances]

        def work(ix):
            output = model.forward(features[ix])
            return loss.evaluate(output, [labels[i] for i in ix]).losses, loss.decode(output)

        results = self._map(work, self._chunks(len(labels)))
        losses = np.concatenate([r[0] for r in results])
        decoded = [y for r in results for y in r[1]]
        hits = sum(1 for hyp, ref in zip(decoded, labels) if tuple(hyp) == tuple(ref))
        dist = np.mean([normalized_edit_distance(hyp, ref) for hyp, ref in zip(decoded, labels)])
        return EvalResult(hits / len(labels), float(dist), float(losses.mean()))

    def _diverged(self, kind, epoch, value, step):
        msg = f"Training {kind} diverged: loss {value} in epoch {epoch + 1} (step size {step:g})."
        self.status = "Diverged!"
        self.log(msg, alert=True, exception=TrainingDivergedError(msg))

    def train(self, model: ReadoutModel, train_set, kind, test_set=()) -> TrainReport:
        """
        Train ``model`` in place by (momentum) gradient descent on the mean loss.

        The mean gradient is clipped to ``config.clip_norm``, when set.

        Args:
            model(ReadoutModel): The readout to train.
            train_set([SynthInstance]): Training data.
            kind(str): "vanilla" or "2d".
            test_set([SynthInstance]): Held out data. (Default = none)

        Returns:
            TrainReport: Per-epoch losses, and held out evaluations
                before and after training.

        Raises:
            TrainingDivergedError: On a non-finite training loss.
        """

        cfg = self.config
        loss = make_loss(kind, cfg)
        features = stack_features(train_set)
        labels = [inst.label for inst in train_set]
        N = len(labels)
        rng = default_rng(cfg.seed)
        step = cfg.step_size
        velocity = _scale(model.params(), 0.0)
        full_batch = cfg.batch_size == 0 or cfg.batch_size >= N

        self.status = f"Evaluating {kind}..."
        initial = self.evaluate(model, list(test_set), kind)
        self.log(f"{kind}: {model.num_parameters} parameters; initial accuracy {initial.accuracy:.3f}.")

        epoch_losses, step_sizes, epoch_seconds = [], [], []
        if full_batch and cfg.epochs:
            losses, grads = self.batch_gradient(model, loss, features, labels)
            current = float(losses.mean())
            if not isfinite(current):
                self._diverged(kind, 0, current, step)
        for epoch in range(cfg.epochs):
            self.status = f"Training {kind}... (epoch {epoch + 1} of {cfg.epochs})"
            start = perf_counter()
            step_sizes.append(step)
            if full_batch:
                descent = _scale(_mean_gradient(grads, N, cfg.clip_norm), -step)
                trial_velocity = _add(_scale(velocity, cfg.momentum), descent)
                trial = model.copy()
                trial.step(trial_velocity)
                trial_losses, trial_grads = self.batch_gradient(trial, loss, features, labels)
                trial_loss = float(trial_losses.mean())
                if not isfinite(trial_loss):
                    self._diverged(kind, epoch, trial_loss, step)
                if cfg.halve_on_increase and trial_loss > current:
                    self.log(f"{kind}: loss rose to {trial_loss:.6g} in epoch {epoch + 1}; halving step size.")
                    step /= 2.0
                    velocity = _scale(velocity, 0.0)
                else:
                    model.step(trial_velocity)
                    velocity, grads, current = trial_velocity, trial_grads, trial_loss
                epoch_losses.append(current)
            else:
                order = rng.permutation(N)
                total = 0.0
                for batch in array_split(order, (N + cfg.batch_size - 1) // cfg.batch_size):
                    losses, grads = self.batch_gradient(model, loss, features[batch], [labels[i] for i in batch])
                    total += float(losses.sum())
                    if not isfinite(total):
                        self._diverged(kind, epoch, total, step)
                    descent = _scale(_mean_gradient(grads, len(batch), cfg.clip_norm), -step)
                    velocity = _add(_scale(velocity, cfg.momentum), descent)
                    model.step(velocity)
                epoch_losses.append(total / N)
            epoch_seconds.append(perf_counter() - start)
            self.log(f"{kind}: epoch {epoch + 1}: loss {epoch_losses[-1]:.6g}.")

        self.status = f"Evaluating {kind}..."
        final = self.evaluate(model, list(test_set), kind) if cfg.epochs else initial
        self.log(f"{kind}: final accuracy {final.accuracy:.3f}, edit distance {final.edit_distance:.3f}.")
        self.status = "Done."
        return TrainReport(kind, model.num_parameters, epoch_losses, step_sizes, epoch_seconds, initial, final)


def make_model(config: DemoConfig) -> ReadoutModel:
    """Fresh readout for the data and training parameters of ``config``."""

    data, train = config.data, config.train
    if train.init == "identity":
        return ReadoutModel.identity(data.num_symbols, data.noise_channels, train.identity_gain, train.train_gamma)
    return ReadoutModel.init(data.num_features, data.num_symbols + 1, train.seed, train.init_scale, train.train_gamma)


def run_demo(config: DemoConfig, trainer: Trainer = None) -> Dict[str, TrainReport]:
    """
    Train one readout per loss kind on common data, and report each.

    The training set is instances ``0 .. train_count - 1`` of the data
    configuration; the held out set, the following ``test_count``.
    """

    if trainer is None:
        trainer = Trainer(config=config.train)
    trainer.status = "Generating data..."
    train_set = generate(config.data, config.train_count)
    test_set = generate(config.data, config.test_count, start=config.train_count)
    reports = {}
    for kind in config.loss_kinds:
        reports[kind] = trainer.train(make_model(config), train_set, kind, test_set)
    return reports

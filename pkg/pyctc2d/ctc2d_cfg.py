"""
Demonstration configuration data encapsulation, for pyctc2d.

Original Date:   2 March 2026

This module provides the data structures encapsulating the synthetic
data generation and training configuration of a demonstration run,
along with their YAML storage. All randomness in a run enters through
the seeds held here.

A configuration file has up to three sections::

    data:      # SynthConfig fields
      height: 8
      ...
    train:     # TrainConfig fields
      step_size: 0.2
      ...
    demo:      # DemoConfig fields
      train_count: 2000
      ...

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
from pathlib import Path

import yaml
from traits.api import Bool, Enum, Float, HasTraits, Instance, List, Range, TraitError

from pyctc2d.errors import ConfigError

# Default synthetic data parameters.
gSeed = 1
gHeight = 8  # map rows
gWidth = 24  # map columns
gNumSymbols = 10  # real symbols (blank excluded)
gAmplitude = 2.5  # baseline excursion (rows)
gPeriods = 1.0  # sinusoid periods across the width
gNoise = 0.1  # Gaussian noise standard deviation
gClutter = 0.1  # distractor probability, per symbol slot
gBumpWidth = 0.8  # evidence bump standard deviation (rows)
gMinLabelLen = 3
gMaxLabelLen = 5
gNoiseChannels = 2
gMaxSpan = 3  # widest column span of one symbol

# Default training parameters.
gStepSize = 0.2
gMomentum = 0.9
gEpochs = 80
gBatchSize = 64  # 0 means full batch
gInitScale = 0.01
gClipNorm = 1.0  # mean gradient norm limit; 0 disables
gIdentityGain = 20.0


class SynthConfig(HasTraits):
    """Synthetic scene text generation parameters."""

    seed = Range(low=0, high=2 ** 32 - 1, value=gSeed)  #: Generator seed.
    height = Range(low=1, high=256, value=gHeight)  #: Map rows.
    width = Range(low=1, high=1024, value=gWidth)  #: Map columns.
    num_symbols = Range(low=1, high=36, value=gNumSymbols)  #: Alphabet size, blank excluded.
    curvature = Enum("flat", "slanted", "sinusoidal")  #: Baseline shape.
    amplitude = Range(low=0.0, high=128.0, value=gAmplitude)  #: Baseline excursion (rows).
    periods = Range(low=0.0, high=16.0, value=gPeriods)  #: Sinusoid periods across the width.
    noise = Range(low=0.0, high=10.0, value=gNoise)  #: Noise standard deviation.
    clutter = Range(low=0.0, high=1.0, value=gClutter)  #: Distractor probability, per symbol slot.
    bump_width = Range(low=0.05, high=16.0, value=gBumpWidth)  #: Evidence bump standard deviation (rows).
    min_label_len = Range(low=0, high=512, value=gMinLabelLen)  #: Shortest label.
    max_label_len = Range(low=0, high=512, value=gMaxLabelLen)  #: Longest label.
    noise_channels = Range(low=0, high=64, value=gNoiseChannels)  #: Pure noise feature channels.
    max_span = Range(low=1, high=64, value=gMaxSpan)  #: Widest column span of one symbol.

    @property
    def num_features(self) -> int:
        """Symbol channels, plus the text line channel, plus the noise channels."""
        return self.num_symbols + 1 + self.noise_channels

    def check(self):
        """
        Cross-field validation.

        Raises:
            ConfigError: If the label lengths don't fit the map, or the
                baseline can leave it.
        """

        if self.min_label_len > self.max_label_len:
            raise ConfigError(
                f"field 'data.min_label_len': {self.min_label_len} exceeds max_label_len={self.max_label_len}"
            )
        if self.max_label_len > self.width // 2:
            raise ConfigError(
                f"field 'data.max_label_len': labels of {self.max_label_len} symbols "
                f"don't fit {self.width} columns (capacity {self.width // 2})"
            )
        if self.curvature != "flat" and 2 * self.amplitude > self.height - 1:
            raise ConfigError(
                f"field 'data.amplitude': {self.amplitude} rows moves the baseline off a {self.height} row map"
            )


class TrainConfig(HasTraits):
    """Readout training parameters."""

    seed = Range(low=0, high=2 ** 32 - 1, value=gSeed)  #: Parameter initialization and shuffling seed.
    step_size = Range(low=0.0, high=100.0, value=gStepSize)  #: Gradient descent step size.
    momentum = Range(low=0.0, high=0.999, value=gMomentum)  #: Momentum coefficient.
    clip_norm = Range(low=0.0, high=1.0e6, value=gClipNorm)  #: Mean gradient norm limit; 0 disables clipping.
    epochs = Range(low=0, high=100000, value=gEpochs)  #: Passes over the training data.
    batch_size = Range(low=0, high=1000000, value=gBatchSize)  #: Items per step; 0 means full batch.
    collapse = Enum("mean", "max")  #: Height collapse for the vanilla baseline.
    variant = Enum("simplified", "full")  #: Path transition formulation of the 2D loss.
    permissive = Bool(False)  #: Clamp, rather than abort on, infeasible items.
    clamp = Float(float("inf"))  #: Per-item loss substituted in permissive mode.
    train_gamma = Bool(False)  #: Learn the initial row distribution.
    halve_on_increase = Bool(False)  #: Reject the step and halve the step size when the loss rises (full batch only).
    threads = Range(low=1, high=256, value=1)  #: Gradient worker threads.
    init = Enum("random", "identity")  #: Readout initialization.
    init_scale = Range(low=0.0, high=10.0, value=gInitScale)  #: Random initialization scale.
    identity_gain = Range(low=0.0, high=1000.0, value=gIdentityGain)  #: Identity readout gain.


class DemoConfig(HasTraits):
    """A complete demonstration run: data, training and split sizes."""

    data = Instance(SynthConfig, ())
    train = Instance(TrainConfig, ())
    train_count = Range(low=1, high=1000000, value=2000)  #: Training instances.
    test_count = Range(low=1, high=1000000, value=500)  #: Held out instances.
    loss_kinds = List(Enum("2d", "vanilla"), value=["vanilla", "2d"])  #: Losses compared.


gSections = {"data": "data", "train": "train", "demo": None}


def config_fields(obj):
    """Names of the configurable traits of ``obj``."""
    return [name for name in obj.editable_traits() if name not in ("data", "train")]


def _apply(target, section, mapping_node, loader, fname):
    if not isinstance(mapping_node, yaml.MappingNode):
        raise ConfigError(f"{fname}:{mapping_node.start_mark.line + 1}: section '{section}' must be a mapping")
    names = config_fields(target)
    for key_node, value_node in mapping_node.value:
        line = key_node.start_mark.line + 1
        name = key_node.value
        if name not in names:
            raise ConfigError(f"{fname}:{line}: field '{section}.{name}': unknown field")
        value = loader.construct_object(value_node, deep=True)
        try:
            setattr(target, name, value)
        except TraitError as err:
            reason = str(err).splitlines()[0]
            raise ConfigError(f"{fname}:{line}: field '{section}.{name}': {reason}")


def load_config(path) -> DemoConfig:
    """
    Read a demonstration configuration from a YAML file.

    Missing fields keep their defaults.

    Raises:
        ConfigError: With file, line and field, for the first problem found.
    """

    path = Path(path)
    fname = path.name
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{fname}: can't read configuration: {err}")
    loader = yaml.SafeLoader(text)
    try:
        root = loader.get_single_node()
        cfg = DemoConfig()
        if root is None:
            return cfg
        if not isinstance(root, yaml.MappingNode):
            raise ConfigError(f"{fname}:{root.start_mark.line + 1}: top level must be a mapping")
        section_lines = {}
        for key_node, value_node in root.value:
            section = key_node.value
            line = key_node.start_mark.line + 1
            if section not in gSections:
                raise ConfigError(f"{fname}:{line}: unknown section '{section}'")
            target = getattr(cfg, gSections[section]) if gSections[section] else cfg
            _apply(target, section, value_node, loader, fname)
            section_lines[section] = line
    except yaml.YAMLError as err:
        raise ConfigError(f"{fname}: malformed YAML: {err}")
    finally:
        loader.dispose()
    try:
        cfg.data.check()
    except ConfigError as err:
        raise ConfigError(f"{fname}:{section_lines.get('data', 1)}: {err}")
    return cfg


def config_to_dict(cfg: DemoConfig) -> dict:
    """Plain dictionary image of ``cfg``, in file layout."""

    res = {
        "data": {name: getattr(cfg.data, name) for name in config_fields(cfg.data)},
        "train": {name: getattr(cfg.train, name) for name in config_fields(cfg.train)},
        "demo": {name: getattr(cfg, name) for name in config_fields(cfg)},
    }
    res["demo"]["loss_kinds"] = list(cfg.loss_kinds)
    return res


def save_config(cfg: DemoConfig, path):
    """Write ``cfg`` to a YAML file ``load_config()`` reads back."""

    with open(path, "w") as fh:
        yaml.safe_dump(config_to_dict(cfg), fh, default_flow_style=False, sort_keys=True)

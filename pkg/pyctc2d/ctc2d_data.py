"""
Tensor and data set file encapsulation, for pyctc2d.

Original Date:   2 March 2026

This module provides the two on-disk formats used by the console script:

    - the tensor file, a small binary container (``.ctc2dt``) holding one
      float32 tensor, with a JSON text alternative (``.json``) for small
      tensors of rank 3 or less;
    - the data set directory, holding a ``manifest.yaml``, the stacked
      features, the labels (one per line) and the true baselines of a
      batch of synthetic instances.

Binary tensor layout (all integers little endian)::

    6 bytes     magic, b"CTC2DT"
    u8          format version (1)
    u8          element type tag (1 = float32)
    u8          rank
    rank x u32  dimension sizes
    ...         row major float32 payload

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import json
import logging
from pathlib import Path
from typing import List, NamedTuple

import numpy as np
import yaml

from pyctc2d import __version__ as VERSION
from pyctc2d.ctc2d_cfg import SynthConfig, config_fields
from pyctc2d.errors import AlphabetMismatchError, FormatError
from pyctc2d.tensors import Alphabet, Label

logger = logging.getLogger(__name__)

gMagic = b"CTC2DT"
gVersion = 1
gFloat32 = 1  # element type tag
gMaxJsonRank = 3
gDatasetFormat = "ctc2d-dataset"

gFeaturesFile = "features.ctc2dt"
gLabelsFile = "labels.txt"
gBaselinesFile = "baselines.ctc2dt"
gManifestFile = "manifest.yaml"


def encode_tensor(values) -> bytes:
    """Binary tensor file image of ``values``, as float32."""

    arr = np.array(values, dtype="<f4", order="C")
    header = gMagic + bytes((gVersion, gFloat32, arr.ndim))
    return header + np.array(arr.shape, dtype="<u4").tobytes() + arr.tobytes(order="C")


def decode_tensor(data: bytes, name="tensor") -> np.ndarray:
    """
    Inverse of ``encode_tensor()``.

    Raises:
        FormatError: On a bad magic string, version, type tag or payload length.
    """

    fixed = len(gMagic) + 3
    if len(data) < fixed or data[: len(gMagic)] != gMagic:
        raise FormatError(f"{name}: not a tensor file (bad magic)")
    version, tag, rank = data[len(gMagic) : fixed]
    if version != gVersion:
        raise FormatError(f"{name}: unsupported format version {version}")
    if tag != gFloat32:
        raise FormatError(f"{name}: unsupported element type tag {tag}")
    if len(data) < fixed + 4 * rank:
        raise FormatError(f"{name}: truncated header")
    shape = tuple(int(n) for n in np.frombuffer(data, dtype="<u4", count=rank, offset=fixed))
    offset = fixed + 4 * rank
    expected = 4 * int(np.prod(shape, dtype=np.int64))
    if len(data) - offset != expected:
        raise FormatError(f"{name}: payload holds {len(data) - offset} bytes; shape {shape} needs {expected}")
    return np.frombuffer(data, dtype="<f4", offset=offset).reshape(shape).astype(np.float32)


def tensor_to_json(values) -> dict:
    """JSON text alternative of the binary format, for rank 3 or less."""

    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim > gMaxJsonRank:
        raise ValueError(f"JSON tensors are limited to rank {gMaxJsonRank}; got rank {arr.ndim}.")
    return {
        "magic": gMagic.decode("ascii"),
        "version": gVersion,
        "dtype": "float32",
        "shape": list(arr.shape),
        "data": arr.tolist(),
    }


def tensor_from_json(doc, name="tensor") -> np.ndarray:
    """
    Inverse of ``tensor_to_json()``.

    Raises:
        FormatError: On missing keys, or data not matching the declared shape.
    """

    if not isinstance(doc, dict):
        raise FormatError(f"{name}: JSON tensor must be an object")
    missing = [key for key in ("magic", "version", "dtype", "shape", "data") if key not in doc]
    if missing:
        raise FormatError(f"{name}: JSON tensor lacks {', '.join(missing)}")
    if doc["magic"] != gMagic.decode("ascii"):
        raise FormatError(f"{name}: not a tensor file (bad magic)")
    if doc["version"] != gVersion:
        raise FormatError(f"{name}: unsupported format version {doc['version']}")
    if doc["dtype"] != "float32":
        raise FormatError(f"{name}: unsupported element type {doc['dtype']}")
    shape = tuple(doc["shape"])
    try:
        arr = np.array(doc["data"], dtype=np.float32)
    except (TypeError, ValueError) as err:
        raise FormatError(f"{name}: malformed data: {err}")
    if arr.shape != shape:
        raise FormatError(f"{name}: data has shape {arr.shape}, but shape {shape} is declared")
    return arr


def read_tensor(path) -> np.ndarray:
    """
    Read a tensor file; ``.json`` files hold the text form.

    Raises:
        FormatError: If the file can't be read, or is malformed.
    """

    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            try:
                return tensor_from_json(json.loads(path.read_text()), path.name)
            except json.JSONDecodeError as err:
                raise FormatError(f"{path.name}: malformed JSON: {err}")
        return decode_tensor(path.read_bytes(), path.name)
    except OSError as err:
        raise FormatError(f"{path.name}: can't read tensor: {err}")


def write_tensor(path, values):
    """Write a tensor file; the form follows the suffix, as in ``read_tensor()``."""

    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(tensor_to_json(values)))
    else:
        path.write_bytes(encode_tensor(values))
    logger.debug("Wrote %s.", path)


class Dataset(NamedTuple):
    """Contents of a data set directory."""

    alphabet: Alphabet
    features: np.ndarray  #: (N, H, W, F) float32 features.
    labels: List[Label]
    baselines: np.ndarray  #: (N, W) true rows, 0-based.
    manifest: dict


def save_dataset(directory, instances, config: SynthConfig = None):
    """
    Write synthetic instances to a data set directory.

    Args:
        directory(path): Created if missing.
        instances([SynthInstance]): Non-empty, with common shapes and alphabet.
        config(SynthConfig): Generator configuration, echoed in the manifest. (Default = None)
    """

    if not instances:
        raise ValueError("Can't save an empty data set.")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    alphabet = instances[0].alphabet
    features = np.stack([inst.features for inst in instances])
    baselines = np.array([inst.baseline for inst in instances], dtype=float)
    manifest = {
        "format": gDatasetFormat,
        "version": gVersion,
        "producer": f"pyctc2d {VERSION}",
        "alphabet": "".join(alphabet.symbols[1:]),
        "blank": alphabet.symbols[0],
        "count": len(instances),
        "features_shape": list(features.shape),
    }
    if config is not None:
        manifest["generator"] = {name: getattr(config, name) for name in config_fields(config)}
    write_tensor(directory / gFeaturesFile, features)
    write_tensor(directory / gBaselinesFile, baselines)
    (directory / gLabelsFile).write_text("".join(alphabet.decode(inst.label) + "\n" for inst in instances))
    with open(directory / gManifestFile, "w") as fh:
        yaml.safe_dump(manifest, fh, default_flow_style=False, sort_keys=False)
    logger.info("Saved %d instances to %s.", len(instances), directory)


def _manifest_field(manifest, key, kind, name):
    if key not in manifest:
        raise FormatError(f"{name}: manifest lacks '{key}'")
    value = manifest[key]
    if not isinstance(value, kind):
        raise FormatError(f"{name}: manifest field '{key}' is malformed: {value!r}")
    return value


def load_dataset(directory) -> Dataset:
    """
    Read a data set directory written by ``save_dataset()``.

    Raises:
        FormatError: If a file is missing or malformed, a label uses a
            symbol outside the declared alphabet, or shapes disagree with
            the manifest.
    """

    directory = Path(directory)
    name = str(directory / gManifestFile)
    try:
        manifest = yaml.safe_load((directory / gManifestFile).read_text())
        label_lines = (directory / gLabelsFile).read_text().split("\n")
    except OSError as err:
        raise FormatError(f"{directory}: can't read data set: {err}")
    except yaml.YAMLError as err:
        raise FormatError(f"{name}: malformed YAML: {err}")
    if not isinstance(manifest, dict) or manifest.get("format") != gDatasetFormat:
        raise FormatError(f"{name}: not a data set manifest")
    if manifest.get("version") != gVersion:
        raise FormatError(f"{name}: unsupported data set version {manifest.get('version')}")
    symbols = _manifest_field(manifest, "alphabet", str, name)
    blank = _manifest_field(manifest, "blank", str, name)
    count = _manifest_field(manifest, "count", int, name)
    shape = tuple(_manifest_field(manifest, "features_shape", list, name))
    try:
        alphabet = Alphabet(symbols, blank)
    except ValueError as err:
        raise FormatError(f"{name}: {err}")

    features = read_tensor(directory / gFeaturesFile)
    baselines = read_tensor(directory / gBaselinesFile)
    if features.shape != shape or len(shape) != 4 or shape[0] != count:
        raise FormatError(f"{gFeaturesFile}: shape {features.shape} disagrees with the manifest's {shape}")
    if baselines.shape != (count, shape[2]):
        raise FormatError(f"{gBaselinesFile}: shape {baselines.shape}; expected {(count, shape[2])}")

    if label_lines and label_lines[-1] == "":
        label_lines.pop()
    if len(label_lines) != count:
        raise FormatError(f"{gLabelsFile}: {len(label_lines)} labels for {count} instances")
    labels = []
    for line_no, text in enumerate(label_lines, start=1):
        try:
            labels.append(alphabet.encode(text))
        except AlphabetMismatchError as err:
            raise FormatError(f"{gLabelsFile}:{line_no}: {err}")
    return Dataset(alphabet, features, labels, baselines, manifest)

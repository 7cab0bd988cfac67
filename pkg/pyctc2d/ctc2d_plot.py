"""
Image export of probability distribution and path transition maps, for pyctc2d.

Original Date:   2 March 2026

Maps are written as binary (P5) grayscale PGM images, one pixel per map
position, rows top to bottom. Gray level 255 is probability 1 and the
quantization is linear. A JSON sidecar holds the raw values, in the JSON
tensor form of ``ctc2d_data``.

Copyright (c) 2026 the pyctc2d developers; all rights reserved World wide.
"""
import json
import logging
from pathlib import Path
from typing import List

import numpy as np
from numpy import clip, rint

from pyctc2d.ctc2d import height_marginals
from pyctc2d.ctc2d_data import tensor_from_json, tensor_to_json
from pyctc2d.tensors import ProbMap2D, TransitionMap, check_consistent

logger = logging.getLogger(__name__)

gMaxGray = 255


def to_gray(values) -> np.ndarray:
    """Linear quantization of probabilities to 8 bit gray levels."""

    return rint(gMaxGray * clip(np.asarray(values, dtype=float), 0.0, 1.0)).astype(np.uint8)


def encode_pgm(values) -> bytes:
    """Binary PGM image of a 2D array of probabilities."""

    gray = to_gray(values)
    if gray.ndim != 2:
        raise ValueError(f"An image needs a 2D array; got shape {gray.shape}.")
    rows, cols = gray.shape
    return b"P5\n%d %d\n%d\n" % (cols, rows, gMaxGray) + gray.tobytes()


def decode_pgm(data: bytes) -> np.ndarray:
    """Gray levels of a binary PGM image written by ``encode_pgm()``."""

    fields = data.split(b"\n", 3)
    if len(fields) < 4 or fields[0] != b"P5":
        raise ValueError("Not a binary PGM image.")
    cols, rows = (int(n) for n in fields[1].split())
    maxval = int(fields[2])
    if maxval != gMaxGray:
        raise ValueError(f"Unsupported PGM maximum gray level {maxval}.")
    return np.frombuffer(fields[3], dtype=np.uint8).reshape(rows, cols)


def path_prior_image(psi: TransitionMap) -> np.ndarray:
    """
    (H, W - 1) picture of a transition map.

    Pixel ``(h, w)`` is the prior probability of the path entering row
    ``h`` of map column ``w + 1``; for a simplified map that's just
    ``psi_hat[w, h]``.
    """

    return height_marginals(psi.gamma[None], psi.values[None], psi.variant)[0, 1:].T


def export_maps(prefix, x: ProbMap2D, psi: TransitionMap = None, alphabet=None) -> List[Path]:
    """
    Write grayscale images of a probability map and its path transitions.

    Files written::

        <prefix>_class<c>.pgm   one per class channel, (H, W)
        <prefix>_psi.pgm        path transitions, (H, W - 1); omitted when W = 1
        <prefix>.json           raw values

    Args:
        prefix(path): Output path prefix.
        x(ProbMap2D): Class distributions.
        psi(TransitionMap): Path transitions. (Default = uniform, simplified)
        alphabet(Alphabet): Names of the classes, recorded in the sidecar. (Default = None)

    Returns:
        [Path]: The files written.

    Raises:
        OSError: If an output can't be written.
    """

    if psi is None:
        psi = TransitionMap.uniform(x.height, x.width)
    check_consistent(x, psi)
    prefix = Path(prefix)
    written = []

    def put(path, data):
        path.write_bytes(data)
        written.append(path)

    for c in range(x.num_classes):
        put(prefix.with_name(f"{prefix.name}_class{c}.pgm"), encode_pgm(x.values[:, :, c]))
    if x.width > 1:
        put(prefix.with_name(f"{prefix.name}_psi.pgm"), encode_pgm(path_prior_image(psi)))
    sidecar = {
        "variant": psi.variant.value,
        "classes": tensor_to_json(x.values),
        "transitions": tensor_to_json(psi.values),
        "gamma": tensor_to_json(psi.gamma),
    }
    if alphabet is not None:
        sidecar["symbols"] = list(alphabet.symbols)
    put(prefix.with_name(f"{prefix.name}.json"), json.dumps(sidecar, indent=1).encode("utf-8"))
    logger.info("Wrote %d files under %s.", len(written), prefix)
    return written


def read_sidecar(path) -> dict:
    """Arrays of a sidecar written by ``export_maps()``, keyed by name, plus the variant (and symbols)."""

    doc = json.loads(Path(path).read_text())
    res = {key: tensor_from_json(doc[key], key) for key in ("classes", "transitions", "gamma")}
    res["variant"] = doc["variant"]
    if "symbols" in doc:
        res["symbols"] = doc["symbols"]
    return res

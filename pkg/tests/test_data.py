import json

import numpy as np
import pytest
import yaml

from pyctc2d.ctc2d_cfg import SynthConfig
from pyctc2d.ctc2d_data import (
    decode_tensor,
    encode_tensor,
    load_dataset,
    read_tensor,
    save_dataset,
    tensor_from_json,
    tensor_to_json,
    write_tensor,
)
from pyctc2d.errors import FormatError
from pyctc2d.synth import generate


def test_binary_layout():
    data = encode_tensor(np.array([[0.5, 0.25, 0.25]], dtype=np.float32))
    assert data[:6] == b"CTC2DT"
    assert data[6:9] == bytes((1, 1, 2))
    assert data[9:17] == np.array([1, 3], dtype="<u4").tobytes()
    assert len(data) == 17 + 12


def test_binary_is_bit_exact(rng):
    values = rng.standard_normal((2, 3, 4)).astype(np.float32)
    back = decode_tensor(encode_tensor(values))
    assert back.dtype == np.float32
    assert back.tobytes() == values.tobytes()


def test_scalar_tensor():
    assert decode_tensor(encode_tensor(np.float32(0.5))).shape == ()


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda d: b"XXXXXX" + d[6:], "bad magic"),
        (lambda d: d[:6] + b"\x02" + d[7:], "version 2"),
        (lambda d: d[:7] + b"\x02" + d[8:], "type tag 2"),
        (lambda d: d[:-1], "payload holds 7 bytes"),
        (lambda d: d[:10], "truncated header"),
        (lambda d: d[:4], "bad magic"),
    ],
)
def test_decode_rejects_malformed(mangle, message):
    data = encode_tensor(np.ones((2,)))
    with pytest.raises(FormatError) as info:
        decode_tensor(mangle(data), "x.ctc2dt")
    assert str(info.value).startswith("x.ctc2dt: ")
    assert message in str(info.value)


def test_json_form():
    doc = tensor_to_json([[0.5, 0.5]])
    assert doc == {"magic": "CTC2DT", "version": 1, "dtype": "float32", "shape": [1, 2], "data": [[0.5, 0.5]]}
    assert tensor_from_json(doc).shape == (1, 2)
    with pytest.raises(ValueError):
        tensor_to_json(np.zeros((1, 1, 1, 1)))
    with pytest.raises(FormatError):
        tensor_from_json(dict(doc, shape=[2, 2]))
    with pytest.raises(FormatError):
        tensor_from_json({"magic": "CTC2DT"})
    with pytest.raises(FormatError):
        tensor_from_json([1, 2])


def test_files_follow_suffix(tmp_path):
    values = np.full((2, 2), 0.5, dtype=np.float32)
    write_tensor(tmp_path / "a.json", values)
    write_tensor(tmp_path / "a.ctc2dt", values)
    assert json.loads((tmp_path / "a.json").read_text())["shape"] == [2, 2]
    assert np.array_equal(read_tensor(tmp_path / "a.json"), read_tensor(tmp_path / "a.ctc2dt"))
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(FormatError):
        read_tensor(tmp_path / "bad.json")
    with pytest.raises(FormatError):
        read_tensor(tmp_path / "missing.ctc2dt")


@pytest.fixture
def dataset(tmp_path):
    cfg = SynthConfig(height=4, width=12, num_symbols=4, min_label_len=0, max_label_len=4)
    instances = generate(cfg, 5)
    save_dataset(tmp_path / "set", instances, cfg)
    return tmp_path / "set", instances


def test_dataset_round_trip(dataset):
    directory, instances = dataset
    data = load_dataset(directory)
    assert data.alphabet.symbols == instances[0].alphabet.symbols
    assert data.features.shape == (5, 4, 12, 7)
    assert np.allclose(data.features, np.stack([inst.features for inst in instances]), atol=1e-6)
    assert data.labels == [inst.label for inst in instances]
    assert data.baselines.tolist() == [list(inst.baseline) for inst in instances]
    assert data.manifest["producer"].startswith("pyctc2d ")
    assert data.manifest["generator"]["width"] == 12


def test_dataset_rejects_bad_label(dataset):
    directory, _ = dataset
    lines = (directory / "labels.txt").read_text().split("\n")
    lines[2] = "AZ"
    (directory / "labels.txt").write_text("\n".join(lines))
    with pytest.raises(FormatError) as info:
        load_dataset(directory)
    assert str(info.value).startswith("labels.txt:3: ")


def test_dataset_rejects_bad_manifest(dataset):
    directory, _ = dataset
    manifest = yaml.safe_load((directory / "manifest.yaml").read_text())
    manifest["count"] = 6
    (directory / "manifest.yaml").write_text(yaml.safe_dump(manifest))
    with pytest.raises(FormatError):
        load_dataset(directory)
    manifest["format"] = "other"
    (directory / "manifest.yaml").write_text(yaml.safe_dump(manifest))
    with pytest.raises(FormatError) as info:
        load_dataset(directory)
    assert "not a data set manifest" in str(info.value)


def test_dataset_missing_files(tmp_path):
    with pytest.raises(FormatError):
        load_dataset(tmp_path)
    with pytest.raises(ValueError):
        save_dataset(tmp_path / "empty", [])

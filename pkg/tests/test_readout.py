import numpy as np
import pytest

from pyctc2d.ctc2d_cfg import SynthConfig
from pyctc2d.loss import CTC2DLoss
from pyctc2d.readout import ReadoutModel, mix_features
from pyctc2d.synth import generate_instance


def test_mix_features():
    features = np.ones((1, 4, 6, 2))
    mixed = mix_features(features)
    assert mixed.shape == (1, 4, 6, 8)
    assert np.allclose(mixed[..., :2], 1.0)
    # Zero padded at the borders.
    assert np.allclose(mixed[0, 1:3, :, 2:4], 1.0)
    assert np.allclose(mixed[0, 0, :, 2:4], 2.0 / 3.0)
    assert np.allclose(mixed[0, :, 2:4, 4:], 1.0)
    assert np.allclose(mixed[0, :, 0, 4:6], 3.0 / 5.0)


def test_column_max_reaches_every_row():
    features = np.zeros((1, 5, 3, 1))
    features[0, 4, 1, 0] = 2.0
    column = mix_features(features)[0, :, :, 3]
    assert np.allclose(column[:, 1], 2.0)
    assert not column[:, [0, 2]].any()


@pytest.mark.parametrize("train_gamma", [False, True])
def test_forward_shapes(rng, train_gamma):
    model = ReadoutModel.init(3, 4, seed=5, train_gamma=train_gamma)
    out = model.forward(rng.standard_normal((2, 3, 5, 3)))
    assert out.class_logits.shape == (2, 3, 5, 4)
    assert out.transition_logits.shape == (2, 4, 3)
    if train_gamma:
        assert out.gamma_logits.shape == (2, 3)
    else:
        assert out.gamma_logits is None
    assert model.num_classes == 4
    assert model.num_parameters == 12 * 4 + 4 + 12


def test_backward_matches_finite_differences(rng):
    model = ReadoutModel.init(2, 3, seed=1, scale=1.0, train_gamma=True)
    features = rng.standard_normal((2, 3, 4, 2))
    weights = (
        rng.standard_normal((2, 3, 4, 3)),
        rng.standard_normal((2, 3, 3)),
        rng.standard_normal((2, 3)),
    )

    def objective(m):
        out = m.forward(features)
        return sum(np.sum(a * b) for a, b in zip((out.class_logits, out.transition_logits, out.gamma_logits), weights))

    grads = model.backward(model.forward(features), *weights)
    for name, grad in zip(("w_cls", "b_cls", "w_tr"), grads):
        param = getattr(model, name)
        numeric = np.zeros_like(param)
        for ix in np.ndindex(*param.shape):
            up, down = model.copy(), model.copy()
            getattr(up, name)[ix] += 1.0e-6
            getattr(down, name)[ix] -= 1.0e-6
            numeric[ix] = (objective(up) - objective(down)) / 2.0e-6
        assert np.allclose(grad, numeric, atol=1e-5), name


def test_step_and_copy():
    model = ReadoutModel.init(1, 2, seed=0)
    twin = model.copy()
    model.step(model.params())
    assert np.allclose(model.w_cls, 2.0 * twin.w_cls)
    assert np.allclose(model.w_tr, 2.0 * twin.w_tr)


def test_rejects_inconsistent_shapes():
    with pytest.raises(ValueError):
        ReadoutModel(np.zeros((6, 3)), np.zeros(2), np.zeros(6))


def test_identity_readout_reads_clean_symbols():
    cfg = SynthConfig(height=6, width=16, num_symbols=4, noise=0.0, clutter=0.0, min_label_len=3, max_label_len=3)
    inst = generate_instance(cfg, 0)
    model = ReadoutModel.identity(cfg.num_symbols, cfg.noise_channels)
    out = model.forward(inst.features[None])
    rows = np.array(inst.baseline)
    best = np.argmax(out.class_logits[0, rows, np.arange(cfg.width)], axis=1)
    collapsed = [int(c) for i, c in enumerate(best) if c and (i == 0 or c != best[i - 1])]
    assert tuple(collapsed) == inst.label


def test_identity_readout_decodes_noiseless_text():
    cfg = SynthConfig(height=6, width=16, num_symbols=4, noise=0.0, clutter=0.0, min_label_len=1, max_label_len=4)
    model = ReadoutModel.identity(cfg.num_symbols, cfg.noise_channels)
    for i in range(5):
        inst = generate_instance(cfg, i)
        assert CTC2DLoss().decode(model.forward(inst.features[None])) == [inst.label]

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.random import default_rng
from scipy.special import logsumexp

from conftest import delta_path, random_label, random_map, random_psi
from pyctc2d.ctc import LossPolicy, ctc_forward, ctc_grad, ctc_loss
from pyctc2d.ctc2d import (
    ctc2d_backward_batch,
    ctc2d_forward,
    ctc2d_forward_batch,
    ctc2d_grad,
    ctc2d_grads_batch,
    ctc2d_loss,
    ctc2d_loss_batch,
    ctc2d_posteriors,
    expand_simplified,
    height_marginals,
)
from pyctc2d.errors import InfeasibleLabelError, ShapeMismatchError
from pyctc2d.oracle import oracle_ctc2d_prob
from pyctc2d.tensors import Label, ProbMap2D, ProbSeq1D, TransitionMap, Variant, expand_batch

gEps = 1.0e-6
VARIANTS = [Variant.SIMPLIFIED, Variant.FULL]


def _loss_of_logits(class_logits, trans_logits, gamma_logits, y, variant):
    x = ProbMap2D.from_logits(class_logits)
    psi = TransitionMap.from_logits(trans_logits, gamma_logits, variant)
    return ctc2d_loss(x, psi, y)


def _numeric_grad(fn, point):
    res = np.zeros_like(point)
    for ix in np.ndindex(*point.shape):
        bump = np.zeros_like(point)
        bump[ix] = gEps
        res[ix] = (fn(point + bump) - fn(point - bump)) / (2 * gEps)
    return res


def test_one_row_uniform_fixture():
    x = ProbMap2D(np.full((1, 2, 2), 0.5))
    assert ctc2d_loss(x, TransitionMap.uniform(1, 2), (1,)) == pytest.approx(-np.log(0.75), abs=1e-12)


@pytest.mark.parametrize("variant", VARIANTS)
def test_delta_path_has_zero_loss(variant):
    x, psi = delta_path([0, 1, 2, 1, 0], [2, 3, 1, 0, 1], 3, 4, variant)
    assert ctc2d_loss(x, psi, (2, 3, 1, 1)) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 4), st.integers(2, 3), st.sampled_from(VARIANTS))
def test_forward_matches_oracle(seed, height, width, classes, variant):
    rng = default_rng(seed)
    x = random_map(rng, height, width, classes)
    psi = random_psi(rng, height, width, variant)
    y = random_label(rng, classes, 3)
    expected = oracle_ctc2d_prob(x, psi, y)
    log_p, _ = ctc2d_forward(x, psi, y)
    if expected == 0.0:
        assert log_p == -np.inf
    else:
        assert np.exp(log_p) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(2, 4))
def test_one_row_map_degenerates_to_vanilla(seed, width, classes):
    rng = default_rng(seed)
    x = random_map(rng, 1, width, classes)
    y = random_label(rng, classes, 3)
    seq = ProbSeq1D(x.values[0])
    vanilla, _ = ctc_forward(seq, y)
    for variant in VARIANTS:
        log_p, _ = ctc2d_forward(x, TransitionMap.uniform(1, width, variant), y)
        assert log_p == pytest.approx(vanilla, abs=1e-10) or log_p == vanilla
    if np.isfinite(vanilla):
        grad = ctc2d_grad(x, TransitionMap.uniform(1, width), y)
        assert np.allclose(grad.class_logits[0], ctc_grad(seq, y), atol=1e-10)
        assert ctc2d_loss(x, TransitionMap.uniform(1, width), y) == pytest.approx(ctc_loss(seq, y), abs=1e-10)


def test_simplified_beta_matches_full_recursion(rng):
    x = random_map(rng, 3, 5, 3)
    psi = random_psi(rng, 3, 5)
    y = (1, 2, 2)
    log_p, beta = ctc2d_forward(x, psi, y)
    full_log_p, full_beta = ctc2d_forward(x, expand_simplified(psi), y)
    assert log_p == pytest.approx(full_log_p, abs=1e-12)
    assert beta.values.shape == (7, 3, 5)
    finite = np.isfinite(full_beta.values)
    assert np.array_equal(finite, np.isfinite(beta.values))
    assert np.allclose(beta.values[finite], full_beta.values[finite])
    # The path ends in the last symbol or the trailing blank, at any row.
    assert logsumexp(beta.values[-2:, :, -1]) == pytest.approx(log_p)


@pytest.mark.parametrize("variant", VARIANTS)
def test_beta_and_backward_agree(rng, variant):
    x = random_map(rng, 2, 5, 3)
    psi = random_psi(rng, 2, 5, variant)
    batch = expand_batch([Label((1, 2))])
    arrays = (x.values[None], psi.values[None], psi.gamma[None])
    log_p, beta = ctc2d_forward_batch(*arrays, batch, variant)
    bwd = ctc2d_backward_batch(*arrays, batch, variant)
    per_column = logsumexp((beta + bwd)[0], axis=(1, 2))
    assert np.allclose(per_column, log_p[0])


@pytest.mark.parametrize("variant", VARIANTS)
def test_posteriors_are_consistent(rng, variant):
    x = random_map(rng, 3, 4, 3)
    psi = random_psi(rng, 3, 4, variant)
    post = ctc2d_posteriors(x, psi, (2, 1))
    assert np.allclose(post.height_occ.sum(axis=1), 1.0)
    assert np.allclose(post.class_occ.sum(axis=2).T, post.height_occ)
    if variant is Variant.FULL:
        assert np.allclose(post.transition_occ.sum(axis=0), post.height_occ[1:])
        assert np.allclose(post.transition_occ.sum(axis=2).T, post.height_occ[:-1])
    else:
        assert np.allclose(post.transition_occ, post.height_occ[1:])


@pytest.mark.parametrize("variant", VARIANTS)
def test_gradients_match_finite_differences(rng, variant):
    H, W, C = 2, 4, 3
    y = (1, 2)
    cl = rng.standard_normal((H, W, C))
    tl = rng.standard_normal((H, W - 1, H) if variant is Variant.FULL else (W - 1, H))
    gl = rng.standard_normal(H)
    x = ProbMap2D.from_logits(cl)
    psi = TransitionMap.from_logits(tl, gl, variant)
    grad = ctc2d_grad(x, psi, y, train_gamma=True)

    assert np.allclose(grad.class_logits, _numeric_grad(lambda p: _loss_of_logits(p, tl, gl, y, variant), cl), atol=1e-6)
    assert np.allclose(
        grad.transition_logits, _numeric_grad(lambda p: _loss_of_logits(cl, p, gl, y, variant), tl), atol=1e-6
    )
    assert np.allclose(grad.gamma_logits, _numeric_grad(lambda p: _loss_of_logits(cl, tl, p, y, variant), gl), atol=1e-6)
    assert ctc2d_grad(x, psi, y).gamma_logits is None


def test_simplified_and_expanded_full_agree(rng):
    x = random_map(rng, 3, 4, 3)
    psi = random_psi(rng, 3, 4)
    y = (2, 1)
    simple = ctc2d_grad(x, psi, y)
    full = ctc2d_grad(x, expand_simplified(psi), y)
    assert ctc2d_loss(x, psi, y) == pytest.approx(ctc2d_loss(x, expand_simplified(psi), y), abs=1e-12)
    assert np.allclose(simple.class_logits, full.class_logits)
    # Shared transitions: the full gradient summed over source rows.
    assert np.allclose(simple.transition_logits, full.transition_logits.sum(axis=0))


def test_infeasible_width():
    x = ProbMap2D(np.full((2, 4, 4), 0.25))
    psi = TransitionMap.uniform(2, 4)
    free = (2, 3, 1, 1)
    with pytest.raises(InfeasibleLabelError) as info:
        ctc2d_loss(x, psi, free)
    assert info.value.min_width == 5
    assert "min_width=5" in str(info.value)
    assert ctc2d_loss(x, psi, free, LossPolicy(permissive=True)) == np.inf
    with pytest.raises(InfeasibleLabelError):
        ctc2d_grad(x, psi, free)


def test_batch_loss_permissive(rng):
    x = np.stack([random_map(rng, 2, 3, 3).values for _ in range(2)])
    trans = np.full((2, 2, 2), 0.5)
    gamma = np.full((2, 2), 0.5)
    labels = [Label((1,)), Label((1, 1, 1))]
    with pytest.raises(InfeasibleLabelError):
        ctc2d_loss_batch(x, trans, gamma, labels)
    mean, losses = ctc2d_loss_batch(x, trans, gamma, labels, policy=LossPolicy(True, 50.0))
    assert losses[1] == 50.0
    assert mean == pytest.approx((losses[0] + 50.0) / 2)


def test_batch_grads_zero_infeasible_items(rng):
    x = np.stack([random_map(rng, 2, 3, 3).values for _ in range(2)])
    trans = np.full((2, 2, 2), 0.5)
    gamma = np.full((2, 2), 0.5)
    log_p, dclass, dtrans, dgamma = ctc2d_grads_batch(x, trans, gamma, expand_batch([Label((1,)), Label((2, 2, 2))]))
    assert np.isfinite(log_p[0]) and log_p[1] == -np.inf
    assert not dclass[1].any() and not dtrans[1].any() and not dgamma[1].any()
    assert dclass[0].any()


def test_shape_checks():
    x = ProbMap2D(np.full((2, 3, 2), 0.5))
    with pytest.raises(ShapeMismatchError):
        ctc2d_loss(x, TransitionMap.uniform(3, 3), (1,))
    batch = expand_batch([Label((1,))])
    with pytest.raises(ShapeMismatchError):
        ctc2d_forward_batch(x.values[None], np.full((1, 3, 2), 0.5), np.full((1, 2), 0.5), batch)


def test_height_marginals_chain(rng):
    psi = random_psi(rng, 3, 4, Variant.FULL)
    m = height_marginals(psi.gamma[None], psi.values[None], Variant.FULL)[0]
    assert m.shape == (4, 3)
    assert np.allclose(m.sum(axis=1), 1.0)
    assert np.allclose(m[1], psi.gamma @ psi.values[:, 0, :])
    simple = random_psi(rng, 3, 4)
    m = height_marginals(simple.gamma[None], simple.values[None])[0]
    assert np.allclose(m[1:], simple.values)


@pytest.mark.parametrize("variant", VARIANTS)
def test_label_probabilities_sum_to_one(rng, variant):
    x = random_map(rng, 2, 3, 3)
    psi = random_psi(rng, 2, 3, variant)
    every = [y for n in range(4) for y in product((1, 2), repeat=n)]
    total = sum(np.exp(ctc2d_forward(x, psi, y)[0]) for y in every)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("variant", VARIANTS)
def test_oracle_sweep(variant):
    rng = default_rng(7)
    for _ in range(500):
        H, W, C = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(2, 4))
        x = random_map(rng, H, W, C)
        psi = random_psi(rng, H, W, variant)
        y = random_label(rng, C, 3)
        expected = oracle_ctc2d_prob(x, psi, y)
        log_p, _ = ctc2d_forward(x, psi, y)
        assert np.exp(log_p) == pytest.approx(expected, rel=1e-9, abs=0.0 if expected else 1e-300)


@pytest.mark.slow
def test_height_one_sweep():
    rng = default_rng(8)
    for _ in range(1000):
        W, C = int(rng.integers(1, 7)), int(rng.integers(2, 5))
        x = random_map(rng, 1, W, C)
        y = random_label(rng, C, 3)
        seq = ProbSeq1D(x.values[0])
        vanilla, _ = ctc_forward(seq, y)
        log_p, _ = ctc2d_forward(x, TransitionMap.uniform(1, W), y)
        assert (log_p == vanilla) or abs(log_p - vanilla) <= 1e-10


def test_expand_simplified_broadcasts_rows():
    psi = TransitionMap(np.array([[0.3, 0.7], [0.5, 0.5]]))
    full = expand_simplified(psi)
    assert full.variant is Variant.FULL
    assert np.allclose(full.values[0], psi.values)
    assert np.allclose(full.values[1], psi.values)
    assert np.allclose(expand_simplified(TransitionMap.uniform(2, 3)).values, 0.5)


def test_single_column_closed_form():
    x = ProbMap2D(np.full((2, 1, 2), 0.5))
    log_p, beta = ctc2d_forward(x, TransitionMap.uniform(2, 1), (1,))
    assert np.exp(log_p) == pytest.approx(0.5)
    assert beta.values.shape == (3, 2, 1)


@pytest.mark.parametrize("variant", VARIANTS)
def test_uniform_two_by_two_matches_enumeration(variant):
    x = ProbMap2D(np.full((2, 2, 2), 0.5))
    psi = TransitionMap.uniform(2, 2, variant)
    assert ctc2d_loss(x, psi, (1,)) == pytest.approx(-np.log(oracle_ctc2d_prob(x, psi, (1,))), abs=1e-12)
    assert oracle_ctc2d_prob(x, psi, (1,)) == pytest.approx(0.75)


@pytest.mark.parametrize("variant", VARIANTS)
def test_delta_minimum_has_zero_gradient(variant):
    x, psi = delta_path([0, 1, 2, 1, 0], [2, 3, 1, 0, 1], 3, 4, variant)
    grad = ctc2d_grad(x, psi, (2, 3, 1, 1), train_gamma=True)
    for part in grad:
        assert np.linalg.norm(part) <= 1e-8


@pytest.mark.parametrize("variant", VARIANTS)
def test_height_permutation_leaves_probability_unchanged(rng, variant):
    x = random_map(rng, 3, 4, 3)
    psi = random_psi(rng, 3, 4, variant)
    perm = rng.permutation(3)
    if variant is Variant.FULL:
        values = psi.values[perm][:, :, perm]
    else:
        values = psi.values[:, perm]
    moved = TransitionMap(values, gamma=psi.gamma[perm], variant=variant)
    y = (1, 2)
    assert ctc2d_forward(ProbMap2D(x.values[perm]), moved, y)[0] == pytest.approx(ctc2d_forward(x, psi, y)[0], abs=1e-12)

import numpy as np
import pytest
from hypothesis import given

from conftest import labels
from pyctc2d.errors import AlphabetMismatchError, InvalidTensorError, ShapeMismatchError
from pyctc2d.tensors import (
    BLANK,
    Alphabet,
    ExpandedLabel,
    Label,
    ProbMap2D,
    ProbSeq1D,
    TransitionMap,
    Variant,
    check_consistent,
    collapse_height,
    expand_batch,
    expand_label,
    min_width,
    strip_blanks,
    validate,
)


def test_expand_label():
    assert expand_label((3, 1, 1)) == (0, 3, 0, 1, 0, 1, 0)
    assert expand_label(()) == (BLANK,)


@given(labels(6, 8))
def test_strip_blanks_inverts_expand_label(y):
    expanded = expand_label(y)
    assert len(expanded) == 2 * len(y) + 1
    assert strip_blanks(expanded) == y


def test_expanded_label_checks_interleave():
    with pytest.raises(ValueError):
        ExpandedLabel((0, 1, 1))
    with pytest.raises(ValueError):
        ExpandedLabel((0, 1))


def test_min_width():
    free = Alphabet("EFR").encode("FREE")
    assert min_width(free) == 5
    assert min_width(()) == 0
    assert min_width((1, 1, 1)) == 5
    assert min_width((1, 2, 1)) == 3


def test_label_rejects_blank():
    with pytest.raises(AlphabetMismatchError):
        Label((1, 0, 2))
    with pytest.raises(AlphabetMismatchError):
        Label((3,)).check(3)


def test_expand_batch_pads_with_blanks():
    batch = expand_batch([Label((1,)), Label((2, 2))])
    assert batch.lengths.tolist() == [3, 5]
    assert batch.classes.tolist() == [[0, 1, 0, 0, 0], [0, 2, 0, 2, 0]]
    # A repeat can't skip its separating blank.
    assert batch.skip[1].tolist() == [False, False, False, False, False]
    assert expand_batch([Label((1, 2))]).skip[0].tolist() == [False, False, False, True, False]


def test_alphabet():
    alphabet = Alphabet.default(5)
    assert alphabet.symbols == ("-", "A", "B", "C", "D")
    assert alphabet.size == len(alphabet) == 5
    assert alphabet.encode("DAB") == (4, 1, 2)
    assert alphabet.decode((4, 1, 2)) == "DAB"
    assert alphabet.decode(()) == ""
    with pytest.raises(AlphabetMismatchError):
        alphabet.encode("Z")
    with pytest.raises(AlphabetMismatchError):
        alphabet.decode((5,))
    with pytest.raises(ValueError):
        Alphabet("AA")
    with pytest.raises(ValueError):
        Alphabet("A-")
    with pytest.raises(ValueError):
        Alphabet.default(1)


def test_prob_seq_validation():
    with pytest.raises(InvalidTensorError) as info:
        ProbSeq1D([[0.5, 0.5], [1.0, 0.5]])
    report = info.value.report
    assert not report.ok
    assert "row sum 1.5" in report.message
    assert report.index == (1,)
    assert report.observed == pytest.approx(1.5)

    with pytest.raises(InvalidTensorError) as info:
        ProbSeq1D([[1.2, -0.2]])
    assert "outside [0, 1]" in info.value.report.message

    with pytest.raises(ShapeMismatchError):
        ProbSeq1D([0.5, 0.5])


def test_prob_seq_permissive_renormalizes():
    x = ProbSeq1D([[1.0, 3.0]], strict=False)
    assert np.allclose(x.values, [[0.25, 0.75]])
    assert np.allclose(x.log_values, np.log([[0.25, 0.75]]))


def test_prob_map_is_immutable():
    x = ProbMap2D(np.full((2, 3, 4), 0.25))
    assert (x.height, x.width, x.num_classes) == (2, 3, 4)
    with pytest.raises(ValueError):
        x.values[0, 0, 0] = 1.0


def test_prob_map_reports_position():
    values = np.full((2, 3, 2), 0.5)
    values[1, 2] = [0.9, 0.9]
    with pytest.raises(InvalidTensorError) as info:
        ProbMap2D(values)
    assert info.value.report.message.endswith("at (h=1, w=2)")


def test_transition_map_shapes():
    psi = TransitionMap.uniform(3, 5)
    assert psi.values.shape == (4, 3)
    assert (psi.height, psi.width) == (3, 5)
    assert psi.full_values().shape == (3, 4, 3)
    full = TransitionMap.uniform(3, 5, Variant.FULL)
    assert full.values.shape == (3, 4, 3)
    assert np.allclose(full.gamma, 1.0 / 3.0)
    with pytest.raises(ShapeMismatchError):
        TransitionMap(np.full((3, 4, 2), 0.5), variant=Variant.FULL)
    with pytest.raises(ShapeMismatchError):
        TransitionMap(np.full((4, 3), 1.0 / 3.0), gamma=[0.5, 0.5])


def test_transition_map_gamma_validation():
    with pytest.raises(InvalidTensorError) as info:
        TransitionMap(np.full((2, 2), 0.5), gamma=[0.7, 0.7])
    report = info.value.report
    assert report.axis == "gamma"
    assert report.message == "gamma sum 1.4"


def test_transition_map_from_logits():
    psi = TransitionMap.from_logits(np.zeros((2, 4)), gamma_logits=[0.0, 0.0, 0.0, np.log(3.0)])
    assert np.allclose(psi.values, 0.25)
    assert np.allclose(psi.gamma, [1 / 6, 1 / 6, 1 / 6, 1 / 2])


def test_validate():
    assert validate(np.full((2, 2), 0.5)).ok
    assert validate(np.full((1, 2, 4), 0.25)).ok
    assert not validate(np.full((2, 2), 0.6)).ok
    assert not validate(np.zeros((1, 1, 1, 1))).ok
    assert validate(ProbSeq1D([[0.5, 0.5]])).ok
    assert validate(np.array([0.5, 0.5 + 1e-4]), tol=1e-3).ok
    assert validate(np.full((3, 2), 0.5), axis_names=("w", "h")).ok


def test_check_consistent():
    check_consistent(ProbMap2D(np.full((2, 3, 2), 0.5)), TransitionMap.uniform(2, 3))
    with pytest.raises(ShapeMismatchError):
        check_consistent(ProbMap2D(np.full((2, 3, 2), 0.5)), TransitionMap.uniform(3, 3))


def test_collapse_height():
    values = np.zeros((2, 1, 3))
    values[0, 0] = [1.0, 0.0, 0.0]
    values[1, 0] = [0.0, 0.5, 0.5]
    x = ProbMap2D(values)
    assert np.allclose(collapse_height(x).values, [[0.5, 0.25, 0.25]])
    assert np.allclose(collapse_height(x, "max").values, [[0.5, 0.25, 0.25]])
    with pytest.raises(ValueError):
        collapse_height(x, "median")

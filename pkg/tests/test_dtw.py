import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from imurep.dtw import (
    AxisStats,
    align,
    axis_stats,
    dtw_distance,
    normalized_cost,
    score,
    weight_for,
)
from imurep.errors import EmptySeriesError
from imurep.series import TriaxialSeries
from oracles import dtw_bruteforce, variance_oracle

vals = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def series(max_len):
    return arrays(np.float64, st.tuples(st.integers(1, max_len), st.just(3)), elements=vals)


def embed(xs):
    return np.array([[x, 0.0, 0.0] for x in xs])


def test_identity_is_zero(rng):
    a = rng.normal(size=(17, 3))
    assert dtw_distance(a, a) == 0.0
    assert dtw_distance(a, a, normalize=True) == 0.0


def test_hand_examples():
    assert dtw_distance(embed([0, 2]), embed([0, 0])) == 2.0
    assert dtw_bruteforce(embed([0, 2]), embed([0, 0]))[0] == 2.0
    assert dtw_distance(embed([0, 1]), embed([0, 1, 1])) == 0.0
    assert dtw_bruteforce(embed([0, 1]), embed([0, 1, 1]))[0] == 0.0


def test_accepts_triaxial_series():
    s = TriaxialSeries([(0, 0, 0), (2, 0, 0)], 50)
    t = TriaxialSeries([(0, 0, 0), (0, 0, 0)], 50)
    assert dtw_distance(s, t) == 2.0


@settings(max_examples=150)
@given(series(6), series(6))
def test_matches_exhaustive_enumeration(s, t):
    al = align(s, t)
    best, lengths = dtw_bruteforce(s, t)
    assert al.cost == pytest.approx(best, rel=1e-9, abs=1e-12)
    if al.cost == best:
        assert al.path_length == min(lengths)


@given(series(12), series(12))
def test_symmetric(s, t):
    assert dtw_distance(s, t) == dtw_distance(t, s)
    assert dtw_distance(s, t, normalize=True) == dtw_distance(t, s, normalize=True)


@given(series(10), series(10))
def test_normalized_is_cost_over_path(s, t):
    al = align(s, t)
    assert max(len(s), len(t)) <= al.path_length <= len(s) + len(t) - 1
    assert dtw_distance(s, t, normalize=True) == al.cost / al.path_length
    assert normalized_cost(s, t, "template") == al.cost / len(t)
    assert normalized_cost(s, t, "none") == al.cost


def test_empty_rejected():
    with pytest.raises(EmptySeriesError):
        dtw_distance(np.empty((0, 3)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        normalized_cost(np.zeros((2, 3)), np.zeros((2, 3)), "bogus")


def test_band(rng):
    a, b = rng.normal(size=(20, 3)), rng.normal(size=(24, 3))
    assert dtw_distance(a, b, band=100) == dtw_distance(a, b)
    assert dtw_distance(a, b, band=1) >= dtw_distance(a, b)
    c = rng.normal(size=(20, 3))
    diagonal = float(np.sum(np.sqrt(np.sum((a - c) ** 2, axis=1))))
    assert dtw_distance(a, c, band=0) == pytest.approx(diagonal, rel=1e-12)


def test_axis_stats_single_axis_motion():
    z = np.sin(np.linspace(0, 6, 50))
    data = np.column_stack([np.full(50, 0.5), np.full(50, -0.25), z])
    st_ = axis_stats(data)
    assert st_.dominant == "Z"
    assert st_.var_x == 0 and st_.var_y == 0


def test_axis_stats_tie_break():
    data = np.array([[1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]])
    assert axis_stats(data).dominant == "X"
    data = np.array([[0.0, 1.0, 1.0], [0.0, -1.0, -1.0]])
    assert axis_stats(data).dominant == "Y"


def test_axis_stats_burst_against_two_pass_oracle():
    t = np.arange(100) / 50
    shape = np.sin(2 * np.pi * t)
    data = np.column_stack([0.2 * shape, 0.1 * shape, 0.9 * shape]) + [0.5, 0.5, 0.7]
    st_ = axis_stats(data)
    assert st_.dominant == "Z"
    for k, v in enumerate(st_.variances):
        assert v == pytest.approx(variance_oracle(data[:, k].tolist()), rel=1e-12)
    ratios = np.array(st_.variances) / st_.var_z
    np.testing.assert_allclose(ratios, [0.2**2 / 0.81, 0.1**2 / 0.81, 1.0], rtol=1e-9)


def test_axis_stats_needs_two_samples():
    with pytest.raises(ValueError):
        axis_stats(np.zeros((1, 3)))


def _stats(dominant):
    return AxisStats(1, 1, 1, dominant)


def test_weight_for():
    assert weight_for(_stats("Z"), _stats("Z"), 0.9) == 0.9
    assert weight_for(_stats("X"), _stats("Z"), 0.9) == 1.0
    for a in "XYZ":
        for b in "XYZ":
            assert weight_for(_stats(a), _stats(b), 1.0) == 1.0
    with pytest.raises(ValueError):
        weight_for(_stats("X"), _stats("X"), 0.0)


@given(series(8).filter(lambda a: len(a) >= 2), series(8).filter(lambda a: len(a) >= 2),
       st.floats(0.05, 1.0), st.sampled_from(["template", "path", "none"]))
def test_weighted_never_exceeds_raw(s, t, w, mode):
    b = score(s, t, axis_stats(s), axis_stats(t), w, mode)
    assert 0 <= b.weighted <= b.raw_dtw
    assert b.weighted == b.raw_dtw * b.weight
    assert b.normalized == (mode != "none")

import json

import numpy as np
import pytest

from imurep.generator import (
    GeneratorSpec,
    PatternSpec,
    five_pattern_spec,
    generate,
    load_spec,
    circuit_protocol_spec,
    single_pattern_spec,
)


def test_deterministic():
    a = generate(five_pattern_spec(seed=4))
    b = generate(five_pattern_spec(seed=4))
    c = generate(five_pattern_spec(seed=5))
    assert a == b
    assert a[0] != c[0]
    assert a[1] == c[1]


def test_truth_shape():
    samples, truth = generate(five_pattern_spec(seed=1))
    assert len(truth) == 50
    labels = [iv.label for iv in truth]
    assert [labels.count(l) for l in dict.fromkeys(labels)] == [10] * 5
    for prev, cur in zip(truth, truth[1:]):
        assert prev.end_ms <= cur.start_ms
    ts = [s.t_ms for s in samples]
    assert all(b - a == 20 for a, b in zip(ts, ts[1:]))


def test_rep_duration_matches_period():
    _, truth = generate(single_pattern_spec("push-up", seed=0, repetitions=4))
    assert [iv.end_ms - iv.start_ms for iv in truth] == [1900] * 4


def test_tri_phasic_truth_spans_all_phases():
    _, truth = generate(single_pattern_spec("sit-up", seed=0, repetitions=2))
    assert [iv.end_ms - iv.start_ms for iv in truth] == [3300, 3300]


def test_still_blocks_are_gravity_plus_noise():
    spec = single_pattern_spec("running", seed=3, repetitions=0, noise_std=0.0)
    samples, truth = generate(spec)
    assert truth == []
    xyz = np.array([s.xyz for s in samples])
    np.testing.assert_allclose(np.linalg.norm(xyz, axis=1), 1.0, rtol=1e-12)


def test_silence_gaps_leave_holes():
    samples, _ = generate(five_pattern_spec(seed=2, repetitions=2, silence_gaps=True))
    gaps = [b.t_ms - a.t_ms for a, b in zip(samples, samples[1:])]
    assert sum(g > 40 for g in gaps) == 4


def test_protocol_shape():
    _, truth = generate(circuit_protocol_spec(seed=0))
    labels = [iv.label for iv in truth]
    assert labels.count("running") == 22 and labels.count("walking") == 22
    assert labels.count("push-up") == 10


def test_spec_json_round_trip(tmp_path):
    spec = five_pattern_spec(seed=9, repetitions=3, silence_gaps=True)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_spec(path) == spec


def test_amplitude_shorthand():
    d = {"seed": 1, "patterns": [{"label": "curl", "amplitude": [0, 0, 1], "period_s": 1.0, "repetitions": 2}]}
    spec = GeneratorSpec.from_dict(d)
    assert spec.patterns[0].phases == ((0.0, 0.0, 1.0),)


def test_validation():
    with pytest.raises(ValueError):
        PatternSpec("x", ((1, 0),), 1.0, 1)
    with pytest.raises(ValueError):
        PatternSpec("x", ((1, 0, 0),), 0.0, 1)
    with pytest.raises(ValueError):
        GeneratorSpec((), sample_rate_hz=0)
    with pytest.raises(KeyError):
        single_pattern_spec("yoga", seed=0)

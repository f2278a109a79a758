import numpy as np
import pytest

from imurep.errors import DuplicateLabelError, FormatVersionError, ParseError
from imurep.generator import generate, single_pattern_spec
from imurep.segmentation import segment_samples
from imurep.series import TriaxialSeries
from imurep.templates import (
    Template,
    TemplateStore,
    check_label,
    dumps_templates,
    load_templates,
    loads_templates,
    make_template,
    pick_segment,
    save_templates,
)
from sessions import random_store


def small_store():
    data = TriaxialSeries([[0.1, 0.2, 1.0], [0.0, -0.5, 1.25], [1e-300, 3.0, -0.0]], 50)
    return TemplateStore([
        Template("squat", data, suppress_trailing=1),
        Template("lunge", data, threshold_override=0.2, match_weight=0.8),
    ])


def test_round_trip_file(tmp_path):
    store = small_store()
    path = tmp_path / "t.txt"
    save_templates(store, path)
    again = load_templates(path)
    assert again == store
    assert again.labels == ["squat", "lunge"]
    assert again["lunge"].threshold_override == 0.2
    assert again["squat"].suppress_trailing == 1


def test_round_trip_random(rng):
    for _ in range(30):
        store = random_store(rng)
        text = dumps_templates(store)
        again = loads_templates(text)
        assert again == store
        assert dumps_templates(again) == text


def test_empty_store_round_trip():
    assert len(loads_templates(dumps_templates(TemplateStore()))) == 0


def test_corrupted_row_reports_line():
    lines = dumps_templates(small_store()).splitlines()
    lines[6] = "0.1 oops 1.0"
    with pytest.raises(ParseError) as info:
        loads_templates("\n".join(lines))
    assert info.value.line == 7
    assert "line 7" in str(info.value)
    assert info.value.field == "ay"


def test_short_row_and_missing_rows():
    lines = dumps_templates(small_store()).splitlines()
    bad = lines[:5] + ["1.0 2.0"] + lines[6:]
    with pytest.raises(ParseError) as info:
        loads_templates("\n".join(bad))
    assert info.value.line == 6
    with pytest.raises(ParseError):
        loads_templates("\n".join(lines[:6]))


def test_version_mismatch():
    text = dumps_templates(small_store()).replace("template 1", "template 2", 1)
    with pytest.raises(FormatVersionError) as info:
        loads_templates(text)
    assert info.value.line == 1


def test_unknown_header_key():
    text = dumps_templates(small_store()).replace("suppress_trailing", "supress", 1)
    with pytest.raises(ParseError) as info:
        loads_templates(text)
    assert info.value.field == "supress"


def test_duplicate_labels():
    store = small_store()
    with pytest.raises(DuplicateLabelError):
        store.add(store["squat"])
    text = dumps_templates(store).replace("label lunge", "label squat")
    with pytest.raises(ParseError):
        loads_templates(text)


@pytest.mark.parametrize("bad", ["", "two words", "REJECTED", "-", "a#b", "tab\there"])
def test_reserved_and_malformed_labels(bad):
    with pytest.raises(ValueError):
        check_label(bad)


def test_template_validation():
    data = TriaxialSeries(np.zeros((3, 3)), 50)
    with pytest.raises(ValueError):
        Template("x", TriaxialSeries(np.zeros((1, 3)), 50))
    with pytest.raises(ValueError):
        Template("x", data, suppress_trailing=-1)
    with pytest.raises(ValueError):
        Template("x", data, match_weight=1.5)


def test_enrollment_from_five_reps():
    samples, _ = generate(single_pattern_spec("walking", seed=11, repetitions=5))
    segs = segment_samples(samples, 50.0)
    assert len(segs) >= 4
    chosen = pick_segment(segs)
    durations = sorted(s.duration_ms for s in segs)
    assert chosen.duration_ms == durations[(len(durations) - 1) // 2]
    tmpl = make_template(chosen, "walking")
    np.testing.assert_array_equal(tmpl.data.samples, chosen.data.samples)
    assert tmpl.stats.dominant == "Y"
    assert pick_segment(segs, 0) is segs[0]
    with pytest.raises(IndexError):
        pick_segment(segs, len(segs))
    with pytest.raises(ValueError):
        pick_segment([])

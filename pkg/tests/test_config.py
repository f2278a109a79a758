import pytest

from imurep.config import PipelineConfig, load_config, parse_config
from imurep.errors import ConfigurationError, ParseError


def test_defaults_round_trip():
    cfg = PipelineConfig()
    assert parse_config(cfg.dumps()) == cfg


def test_partial_file(tmp_path):
    path = tmp_path / "c.conf"
    path.write_text("# tuned for the lab rig\nthreshold = 0.35\nband = 8\nnormalization = path\n")
    cfg = load_config(path)
    assert cfg.threshold == 0.35 and cfg.band == 8 and cfg.normalization == "path"
    assert cfg.peak_window_s == 0.25


def test_unknown_key_names_line_and_field():
    with pytest.raises(ParseError) as info:
        parse_config("threshold = 0.3\nthreshhold = 0.2\n")
    assert info.value.line == 2 and info.value.field == "threshhold"


def test_bad_value():
    with pytest.raises(ParseError) as info:
        parse_config("match_weight = heavy\n")
    assert info.value.field == "match_weight"
    with pytest.raises(ParseError):
        parse_config("just words\n")


@pytest.mark.parametrize(
    "changes",
    [dict(match_weight=0.0), dict(match_weight=1.5), dict(threshold=-1.0), dict(normalization="l2"),
     dict(baseline_mode="mean"), dict(peak_window_s=0.0), dict(band=-1)],
)
def test_validation(changes):
    with pytest.raises(ConfigurationError):
        PipelineConfig(**changes)

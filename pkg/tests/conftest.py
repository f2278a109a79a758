import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from imurep.generator import FIVE_PATTERNS, SUPPRESS, generate, single_pattern_spec
from imurep.config import PipelineConfig
from imurep.segmentation import segment_samples
from imurep.templates import TemplateStore, make_template, pick_segment

LABELS = [label for label, _, _ in FIVE_PATTERNS]


def enrolled_store(seed=1000, config=PipelineConfig()):
    """One template per preset pattern, each from its own single-rep recording."""
    store = TemplateStore()
    for i, label in enumerate(LABELS):
        samples, _ = generate(single_pattern_spec(label, seed=seed + i))
        segments = segment_samples(samples, 50.0, config)
        pick = 0 if label in SUPPRESS else None
        store.add(make_template(pick_segment(segments, pick), label, SUPPRESS.get(label, 0)))
    return store


@pytest.fixture(scope="session")
def store():
    return enrolled_store()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

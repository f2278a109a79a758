"""One-sample exercise templates and their text file format.

File layout (one or more blocks)::

    template 1
    label push-up
    sample_rate_hz 50.0
    suppress_trailing 0
    threshold_override 0.25      # optional
    match_weight 0.9             # optional
    samples 3
    0.01 -0.2 0.98
    ...

Values are written with ``repr`` (shortest exact round-trip form).  Blank
lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

from .dtw import AxisStats, axis_stats
from .errors import DuplicateLabelError, FormatVersionError, ParseError
from .segmentation import Segment
from .series import TriaxialSeries

FORMAT_VERSION = 1


def check_label(label: str) -> str:
    if not isinstance(label, str) or not label or any(c.isspace() for c in label):
        raise ValueError(f"labels must be non-empty and contain no whitespace: {label!r}")
    if "#" in label:
        raise ValueError(f"labels may not contain '#': {label!r}")
    if label in ("REJECTED", "-"):
        raise ValueError(f"{label!r} is reserved")
    return label


@dataclass(frozen=True, eq=False)
class Template:
    label: str
    data: TriaxialSeries
    stats: AxisStats = None
    suppress_trailing: int = 0
    threshold_override: Optional[float] = None
    match_weight: Optional[float] = None

    def __post_init__(self):
        check_label(self.label)
        if len(self.data) < 2:
            raise ValueError(f"template {self.label!r} needs at least two samples")
        if self.suppress_trailing < 0:
            raise ValueError("suppress_trailing must be non-negative")
        if self.threshold_override is not None and not self.threshold_override >= 0:
            raise ValueError("threshold_override must be non-negative")
        if self.match_weight is not None and not 0 < self.match_weight <= 1:
            raise ValueError("match_weight must lie in (0, 1]")
        if self.stats is None:
            object.__setattr__(self, "stats", axis_stats(self.data))

    def __eq__(self, other):
        if not isinstance(other, Template):
            return NotImplemented
        return (
            self.label == other.label
            and self.data.same_values(other.data)
            and self.stats == other.stats
            and self.suppress_trailing == other.suppress_trailing
            and self.threshold_override == other.threshold_override
            and self.match_weight == other.match_weight
        )

    __hash__ = None


def make_template(segment: Segment, label: str, suppress_trailing: int = 0, **kwargs) -> Template:
    """Wrap a segment's raw samples verbatim as a template."""
    if len(segment.data) < 2:
        raise ValueError("segment is too short to serve as a template")
    # timestamps are irrelevant to matching; keep only values and rate
    data = TriaxialSeries(segment.data.samples, segment.data.sample_rate_hz)
    return Template(label, data, suppress_trailing=suppress_trailing, **kwargs)


def pick_segment(segments: Sequence[Segment], index: Optional[int] = None) -> Segment:
    """The median-duration candidate, or ``segments[index]`` when given."""
    if not segments:
        raise ValueError("no candidate segments")
    if index is not None:
        if not -len(segments) <= index < len(segments):
            raise IndexError(f"segment index {index} out of range (0..{len(segments) - 1})")
        return segments[index]
    durations = [s.duration_ms for s in segments]
    target = statistics.median_low(durations)
    return segments[durations.index(target)]


class TemplateStore:
    """Ordered label -> Template mapping with unique labels."""

    def __init__(self, templates: Iterable[Template] = ()):
        self._items: Dict[str, Template] = {}
        for t in templates:
            self.add(t)

    def add(self, template: Template):
        if template.label in self._items:
            raise DuplicateLabelError(template.label)
        self._items[template.label] = template

    def __getitem__(self, label) -> Template:
        return self._items[label]

    def __contains__(self, label):
        return label in self._items

    def __iter__(self) -> Iterator[Template]:
        return iter(self._items.values())

    def __len__(self):
        return len(self._items)

    @property
    def labels(self) -> List[str]:
        return list(self._items)

    @property
    def max_suppression(self) -> int:
        return max((t.suppress_trailing for t in self), default=0)

    def __eq__(self, other):
        if not isinstance(other, TemplateStore):
            return NotImplemented
        return self.labels == other.labels and all(a == b for a, b in zip(self, other))

    __hash__ = None


def dumps_templates(store: Iterable[Template]) -> str:
    out = []
    for t in store:
        out.append(f"template {FORMAT_VERSION}")
        out.append(f"label {t.label}")
        out.append(f"sample_rate_hz {t.data.sample_rate_hz!r}")
        out.append(f"suppress_trailing {t.suppress_trailing}")
        if t.threshold_override is not None:
            out.append(f"threshold_override {float(t.threshold_override)!r}")
        if t.match_weight is not None:
            out.append(f"match_weight {float(t.match_weight)!r}")
        out.append(f"samples {len(t.data)}")
        for x, y, z in t.data.samples.tolist():
            out.append(f"{x!r} {y!r} {z!r}")
        out.append("")
    return "\n".join(out)


def _float(text, lineno, name):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line=lineno, field=name) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", line=lineno, field=name)
    return v


def _int(text, lineno, name):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"not an integer: {text!r}", line=lineno, field=name) from None


_HEADER_KEYS = ("label", "sample_rate_hz", "suppress_trailing", "threshold_override", "match_weight")


def loads_templates(text: str) -> TemplateStore:
    lines = [
        (no, raw.split("#", 1)[0].strip()) for no, raw in enumerate(text.splitlines(), 1)
    ]
    lines = [(no, ln) for no, ln in lines if ln]
    store = TemplateStore()
    pos = 0
    while pos < len(lines):
        no, line = lines[pos]
        key, _, val = line.partition(" ")
        if key != "template":
            raise ParseError(f"expected 'template <version>', got {line!r}", line=no)
        version = _int(val.strip(), no, "template")
        if version != FORMAT_VERSION:
            raise FormatVersionError(
                f"unsupported template format version {version} (expected {FORMAT_VERSION})",
                line=no,
            )
        block_line = no
        header = {}
        pos += 1
        while True:
            if pos >= len(lines):
                raise ParseError("template block ended before 'samples'", line=block_line)
            no, line = lines[pos]
            key, _, val = line.partition(" ")
            val = val.strip()
            pos += 1
            if key == "samples":
                count = _int(val, no, "samples")
                break
            if key not in _HEADER_KEYS:
                raise ParseError(f"unknown header key", line=no, field=key)
            if key in header:
                raise ParseError("repeated header key", line=no, field=key)
            header[key] = (no, val)
        for required in ("label", "sample_rate_hz"):
            if required not in header:
                raise ParseError("missing header", line=block_line, field=required)
        rows = []
        for _ in range(count):
            if pos >= len(lines):
                raise ParseError(f"expected {count} sample rows, found {len(rows)}", line=no)
            no, line = lines[pos]
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"sample row needs 3 values, got {len(parts)}", line=no)
            rows.append([_float(p, no, name) for p, name in zip(parts, ("ax", "ay", "az"))])
            pos += 1
        try:
            lno, label = header["label"]
            rate = _float(header["sample_rate_hz"][1], header["sample_rate_hz"][0], "sample_rate_hz")
            kwargs = {}
            if "suppress_trailing" in header:
                lno, v = header["suppress_trailing"]
                kwargs["suppress_trailing"] = _int(v, lno, "suppress_trailing")
            for opt in ("threshold_override", "match_weight"):
                if opt in header:
                    lno, v = header[opt]
                    kwargs[opt] = _float(v, lno, opt)
            template = Template(label, TriaxialSeries(rows, rate), **kwargs)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), line=block_line) from None
        try:
            store.add(template)
        except DuplicateLabelError as exc:
            raise ParseError(str(exc), line=block_line, field="label") from None
    return store


def save_templates(store: Iterable[Template], destination) -> None:
    Path(destination).write_text(dumps_templates(store))


def load_templates(source) -> TemplateStore:
    return loads_templates(Path(source).read_text())

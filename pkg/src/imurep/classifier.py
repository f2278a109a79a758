"""Segment classification, repetition counting and the runtime pipeline.

Each segment is scored against every template with weighted DTW; the
lowest score wins if it does not exceed the effective threshold (the
template's override, else the global one).  An exact tie for the lowest
score is rejected.  A match on a template with ``suppress_trailing = k``
marks the next k segments as suppressed; they are never counted.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Iterator, List, Optional, Tuple, Union

from .config import PipelineConfig
from .dtw import ScoreBreakdown, axis_stats, normalized_cost, score
from .errors import ConfigurationError, ParseError
from .segmentation import Discontinuity, Segment, StreamSegmenter
from .series import AccelSample
from .templates import TemplateStore

REJECTED = "REJECTED"


@dataclass(frozen=True, eq=False)
class Classification:
    segment: Segment
    outcome: str  # a template label or REJECTED
    scores: Dict[str, ScoreBreakdown]
    suppressed: bool = False
    note: str = ""  # tie / too-short / low-energy / suppressed
    suppress_trailing: int = 0  # of the winning template

    @property
    def is_label(self) -> bool:
        return self.outcome != REJECTED

    def ranked(self) -> List[Tuple[str, float]]:
        return sorted(((k, v.weighted) for k, v in self.scores.items()), key=lambda kv: kv[1])

    @property
    def best_score(self) -> Optional[float]:
        r = self.ranked()
        return r[0][1] if r else None

    @property
    def runner_up_score(self) -> Optional[float]:
        r = self.ranked()
        return r[1][1] if len(r) > 1 else None


def classify_segment(
    segment: Segment,
    store: TemplateStore,
    threshold: float,
    config: PipelineConfig = PipelineConfig(),
) -> Classification:
    if len(store) == 0:
        raise ConfigurationError("template store is empty")
    data = segment.data.samples
    seg_stats = axis_stats(data) if len(data) >= 2 else None
    scores = {}
    for t in store:
        mw = t.match_weight if t.match_weight is not None else config.match_weight
        if seg_stats is None:
            raw = normalized_cost(data, t.data.samples, config.normalization, config.band)
            scores[t.label] = ScoreBreakdown(
                raw, 1.0, raw, config.normalization != "none", config.normalization
            )
        else:
            scores[t.label] = score(
                data, t.data.samples, seg_stats, t.stats, mw, config.normalization, config.band
            )
    if seg_stats is None:
        return Classification(segment, REJECTED, scores, note="too-short")
    if config.min_segment_energy is not None:
        seg_energy = 0.5 * (segment.start.energy + segment.end.energy)
        if seg_energy < config.min_segment_energy:
            return Classification(segment, REJECTED, scores, note="low-energy")

    ranked = sorted(scores.items(), key=lambda kv: kv[1].weighted)
    label, best = ranked[0]
    if len(ranked) > 1 and ranked[1][1].weighted == best.weighted:
        return Classification(segment, REJECTED, scores, note="tie")
    tmpl = store[label]
    limit = tmpl.threshold_override if tmpl.threshold_override is not None else threshold
    if best.weighted <= limit:
        return Classification(segment, label, scores, suppress_trailing=tmpl.suppress_trailing)
    return Classification(segment, REJECTED, scores)


@dataclass(frozen=True)
class CountEvent:
    label: str
    count: int
    t_ms: int  # confirmation time (closing peak)
    start_ms: int
    end_ms: int
    score: float
    runner_up: Optional[float]

    @property
    def mid_ms(self) -> int:
        return (self.start_ms + self.end_ms) // 2


@dataclass(frozen=True)
class CountState:
    counts: Dict[str, int] = field(default_factory=dict)
    pending_suppression: int = 0
    last_label: Optional[str] = None

    def cleared(self) -> "CountState":
        return replace(self, pending_suppression=0)


def update_counts(
    c: Classification, state: CountState
) -> Tuple[CountState, Optional[CountEvent]]:
    """Advance the counter by one classified segment."""
    if state.pending_suppression > 0:
        return replace(state, pending_suppression=state.pending_suppression - 1), None
    if not c.is_label:
        return state, None
    counts = dict(state.counts)
    counts[c.outcome] = counts.get(c.outcome, 0) + 1
    seg = c.segment
    event = CountEvent(
        c.outcome,
        counts[c.outcome],
        seg.end.t_ms,
        seg.start.t_ms,
        seg.end.t_ms,
        c.best_score,
        c.runner_up_score,
    )
    return CountState(counts, c.suppress_trailing, c.outcome), event


@dataclass(frozen=True)
class SegmentDetected:
    segment: Segment


@dataclass(frozen=True)
class Classified:
    classification: Classification


@dataclass(frozen=True)
class Summary:
    t_ms: int
    counts: Dict[str, int]


Event = Union[SegmentDetected, Classified, CountEvent, Discontinuity, Summary]


class Pipeline:
    """Single-threaded runtime: segmenter -> classifier -> counter."""

    def __init__(self, store: TemplateStore, sample_rate_hz: float, config=PipelineConfig()):
        if len(store) == 0:
            raise ConfigurationError("template store is empty")
        self.store = store
        self.config = config
        self.segmenter = StreamSegmenter(sample_rate_hz, config)
        self.state = CountState({label: 0 for label in store.labels})
        self._last_t: Optional[int] = None

    @property
    def counts(self) -> Dict[str, int]:
        return dict(self.state.counts)

    def push(self, sample: AccelSample) -> List[Event]:
        events = self._handle(self.segmenter.push(sample))
        self._last_t = sample.t_ms
        return events

    def finish(self) -> List[Event]:
        events = self._handle(self.segmenter.flush())
        if self._last_t is not None:
            events.append(Summary(self._last_t, self.counts))
        return events

    def _handle(self, seg_events) -> List[Event]:
        out: List[Event] = []
        for ev in seg_events:
            if isinstance(ev, Discontinuity):
                self.state = self.state.cleared()
                out.append(ev)
                continue
            out.append(SegmentDetected(ev))
            c = classify_segment(ev, self.store, self.config.threshold, self.config)
            if self.state.pending_suppression > 0:
                c = replace(c, suppressed=True, note="suppressed")
            self.state, count = update_counts(c, self.state)
            out.append(Classified(c))
            if count is not None:
                out.append(count)
        return out


def run_pipeline(
    samples: Iterable[AccelSample],
    store: TemplateStore,
    sample_rate_hz: float,
    config: PipelineConfig = PipelineConfig(),
) -> Iterator[Event]:
    pipe = Pipeline(store, sample_rate_hz, config)
    for s in samples:
        yield from pipe.push(s)
    yield from pipe.finish()


# -- event log -------------------------------------------------------------

LOG_FIELDS = ("kind", "t_ms", "label", "count", "score", "runner_up", "start_ms", "end_ms", "note")
LOG_HEADER = "# " + "\t".join(LOG_FIELDS)


def _f(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return repr(v)
    return str(v) if v != "" else "-"


def format_event(ev: Event) -> List[str]:
    """Render one event as tab-separated log lines (a summary yields several)."""
    if isinstance(ev, SegmentDetected):
        s = ev.segment
        row = ("segment", s.end.t_ms, None, None, None, None, s.start.t_ms, s.end.t_ms, f"n={len(s.data)}")
    elif isinstance(ev, Classified):
        c = ev.classification
        s = c.segment
        row = ("classified", s.end.t_ms, c.outcome, None, c.best_score, c.runner_up_score,
               s.start.t_ms, s.end.t_ms, c.note)
    elif isinstance(ev, CountEvent):
        row = ("count", ev.t_ms, ev.label, ev.count, ev.score, ev.runner_up, ev.start_ms, ev.end_ms, None)
    elif isinstance(ev, Discontinuity):
        row = ("discontinuity", ev.t_ms, None, None, None, None, None, None, f"gap={ev.gap_ms}")
    elif isinstance(ev, Summary):
        return [
            "\t".join(_f(v) for v in ("summary", ev.t_ms, label, n, None, None, None, None, None))
            for label, n in ev.counts.items()
        ]
    else:
        raise TypeError(f"unknown event {ev!r}")
    return ["\t".join(_f(v) for v in row)]


def write_event_log(events: Iterable[Event], fh) -> None:
    fh.write(LOG_HEADER + "\n")
    for ev in events:
        for line in format_event(ev):
            fh.write(line + "\n")


@dataclass(frozen=True)
class LogRecord:
    kind: str
    t_ms: int
    label: Optional[str]
    count: Optional[int]
    score: Optional[float]
    runner_up: Optional[float]
    start_ms: Optional[int]
    end_ms: Optional[int]
    note: Optional[str]


def parse_event_log(text: str) -> List[LogRecord]:
    records = []
    for no, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != len(LOG_FIELDS):
            raise ParseError(f"expected {len(LOG_FIELDS)} tab-separated fields", line=no)
        vals = [None if p == "-" else p for p in parts]
        try:
            kind, t_ms, label, count, sc, ru, start, end, note = vals
            records.append(
                LogRecord(
                    kind,
                    int(t_ms),
                    label,
                    None if count is None else int(count),
                    None if sc is None else float(sc),
                    None if ru is None else float(ru),
                    None if start is None else int(start),
                    None if end is None else int(end),
                    note,
                )
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad event record: {exc}", line=no) from None
    return records


def calibrate_threshold(
    store: TemplateStore,
    labelled_segments: Iterable[Tuple[str, Segment]],
    config: PipelineConfig = PipelineConfig(),
    factor: float = 3.0,
) -> float:
    """``factor`` times the median weighted score of segments against their own template."""
    selfs = []
    for label, seg in labelled_segments:
        c = classify_segment(seg, store, math.inf, config)
        selfs.append(c.scores[label].weighted)
    if not selfs:
        raise ValueError("no labelled segments to calibrate on")
    return factor * statistics.median(selfs)

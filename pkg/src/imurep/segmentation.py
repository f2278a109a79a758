"""Peak detection on the short-term energy and peak-to-peak segmentation.

A sample is a peak when it is the strict maximum of the centred window of
``peak_window_s`` seconds (an odd number of samples, at least 3) and its
energy reaches ``min_prominence``.  Windows must fit entirely inside the
series, so no peak is reported within half a window of either end.  Each
segment holds the raw samples from its opening peak up to, but excluding,
its closing peak.

The streaming segmenter reproduces the batch result exactly.  A peak can
only be confirmed once ``floor(W_energy / 2) + floor(W_peak / 2)`` further
samples have arrived; that is the inherent latency of the method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .config import PipelineConfig
from .errors import InvalidWindowError, StreamOrderError
from .series import (
    AccelSample,
    ScalarSeries,
    TriaxialSeries,
    energy_offsets,
    estimate_baseline,
    index_to_ms,
    sample_norm,
    short_term_energy,
    synthetic_norm,
    window_energy,
    window_samples,
)


@dataclass(frozen=True)
class Peak:
    index: int
    t_ms: int
    energy: float


@dataclass(frozen=True, eq=False)
class Segment:
    start: Peak
    end: Peak
    data: TriaxialSeries

    @property
    def duration_ms(self) -> int:
        return self.end.t_ms - self.start.t_ms

    @property
    def mid_ms(self) -> int:
        return (self.start.t_ms + self.end.t_ms) // 2

    def __eq__(self, other):
        if not isinstance(other, Segment):
            return NotImplemented
        return self.start == other.start and self.end == other.end and self.data == other.data

    __hash__ = None

    def __repr__(self):
        return (
            f"Segment({self.start.index}->{self.end.index}, "
            f"{self.start.t_ms}-{self.end.t_ms} ms, n={len(self.data)})"
        )


@dataclass(frozen=True)
class Discontinuity:
    """Reported when consecutive timestamps are further apart than allowed."""

    t_ms: int  # timestamp of the first sample after the gap
    gap_ms: int


def peak_window_samples(window_s: float, sample_rate_hz: float) -> int:
    width = window_samples(window_s, sample_rate_hz)
    if width % 2 == 0:
        width += 1
    if width < 3:
        raise InvalidWindowError(
            f"peak window of {window_s} s at {sample_rate_hz:g} Hz covers fewer than 3 samples"
        )
    return width


def detect_peaks(
    energy: ScalarSeries,
    window_s: float = 0.25,
    min_prominence: float = 0.05,
    t_ms=None,
) -> List[Peak]:
    """Indices where the energy is the strict maximum of its centred window.

    Exact ties inside a window suppress the peak at every tied index.
    ``t_ms`` supplies timestamps; by default they follow from the sample rate.
    """
    width = peak_window_samples(window_s, energy.sample_rate_hz)
    values = energy.values
    n = len(values)
    if width > n:
        return []
    half = width // 2
    windows = sliding_window_view(values, width)
    centre = windows[:, half]
    others = np.delete(windows, half, axis=1).max(axis=1)
    hits = np.flatnonzero((centre > others) & (centre >= min_prominence)) + half
    stamps = index_to_ms(hits, energy.sample_rate_hz) if t_ms is None else np.asarray(t_ms)[hits]
    return [Peak(int(i), int(t), float(values[i])) for i, t in zip(hits, stamps)]


def extract_segments(raw: TriaxialSeries, peaks: Sequence[Peak]) -> List[Segment]:
    """Cut ``raw`` between consecutive peaks; start peak included, end peak excluded."""
    segments = []
    for a, b in zip(peaks, peaks[1:]):
        if not (0 <= a.index < b.index <= len(raw)):
            raise ValueError(f"peaks {a.index}, {b.index} are unsorted or out of range")
        segments.append(Segment(a, b, raw.slice(a.index, b.index)))
    return segments


def resolve_baseline(norm_values, config: PipelineConfig, sample_rate_hz: float) -> float:
    if config.baseline_mode == "fixed":
        return float(config.baseline_value)
    warmup = max(1, window_samples(config.baseline_warmup_s, sample_rate_hz))
    return estimate_baseline(np.asarray(norm_values)[:warmup])


def segment_series(
    series: TriaxialSeries, config: PipelineConfig = PipelineConfig(), index_offset: int = 0
) -> List[Segment]:
    """Batch path: norm, energy, peaks and segments for one contiguous bout."""
    norm = synthetic_norm(series)
    baseline = resolve_baseline(norm.values, config, series.sample_rate_hz)
    energy = short_term_energy(norm, config.energy_window_s, baseline)
    peaks = detect_peaks(energy, config.peak_window_s, config.min_prominence, series.t_ms)
    segments = extract_segments(series, peaks)
    if index_offset:
        segments = [
            Segment(
                replace(s.start, index=s.start.index + index_offset),
                replace(s.end, index=s.end.index + index_offset),
                s.data,
            )
            for s in segments
        ]
    return segments


def max_gap_ms(sample_rate_hz: float, gap_factor: float = 2.0) -> float:
    return gap_factor * 1000.0 / sample_rate_hz


def split_bouts(samples: Sequence[AccelSample], sample_rate_hz: float, gap_factor: float = 2.0):
    """Split a sample list wherever the timestamp gap exceeds the allowed maximum."""
    limit = max_gap_ms(sample_rate_hz, gap_factor)
    bouts, current = [], []
    last = None
    for s in samples:
        if last is not None:
            if s.t_ms <= last:
                raise StreamOrderError(f"timestamp {s.t_ms} does not follow {last}")
            if s.t_ms - last > limit:
                bouts.append(current)
                current = []
        current.append(s)
        last = s.t_ms
    if current:
        bouts.append(current)
    return bouts


def segment_samples(
    samples: Sequence[AccelSample], sample_rate_hz: float, config: PipelineConfig = PipelineConfig()
) -> List[Segment]:
    """Batch segmentation of a whole stream, bout by bout."""
    out = []
    offset = 0
    for bout in split_bouts(samples, sample_rate_hz, config.gap_factor):
        series = TriaxialSeries.from_samples(bout, sample_rate_hz)
        out.extend(segment_series(series, config, index_offset=offset))
        offset += len(bout)
    return out


SegmenterEvent = Union[Segment, Discontinuity]


class StreamSegmenter:
    """Incremental segmentation, one sample at a time.

    ``push`` returns the events made final by that sample; ``flush`` closes the
    current bout (edge windows are clipped exactly as the batch path clips
    them) and must be called at end of stream.
    """

    _TRIM_SLACK = 512

    def __init__(self, sample_rate_hz: float, config: PipelineConfig = PipelineConfig()):
        if not sample_rate_hz > 0:
            raise ValueError("sample rate must be positive")
        self.sample_rate_hz = float(sample_rate_hz)
        self.config = config
        energy_width = window_samples(config.energy_window_s, sample_rate_hz)
        if energy_width < 1:
            raise InvalidWindowError("energy window is shorter than one sample")
        self._before, self._after = energy_offsets(energy_width)
        self._half = peak_window_samples(config.peak_window_s, sample_rate_hz) // 2
        self._warmup = max(1, window_samples(config.baseline_warmup_s, sample_rate_hz))
        self._max_gap = max_gap_ms(sample_rate_hz, config.gap_factor)
        self._last_t: Optional[int] = None
        self._count = 0
        self._new_bout()

    @property
    def latency_samples(self) -> int:
        return self._after + self._half

    def _new_bout(self):
        self._bout_start = self._count
        self._base = 0  # bout-local index of list position 0
        self._n = 0  # samples in this bout
        self._t: List[int] = []
        self._xyz: List[tuple] = []
        self._norm: List[float] = []
        self._sq: List[float] = []
        self._energy: List[float] = []
        self._n_energy = 0
        self._next_candidate = self._half
        self._last_peak: Optional[Peak] = None
        self._baseline = (
            float(self.config.baseline_value) if self.config.baseline_mode == "fixed" else None
        )

    def push(self, sample: AccelSample) -> List[SegmenterEvent]:
        events: List[SegmenterEvent] = []
        if self._last_t is not None:
            if sample.t_ms <= self._last_t:
                raise StreamOrderError(
                    f"timestamp {sample.t_ms} ms does not follow {self._last_t} ms"
                )
            gap = sample.t_ms - self._last_t
            if gap > self._max_gap:
                events.extend(self._close_bout())
                events.append(Discontinuity(sample.t_ms, gap))
                self._new_bout()
        self._last_t = sample.t_ms
        self._count += 1
        self._n += 1
        self._t.append(sample.t_ms)
        self._xyz.append(sample.xyz)
        norm = sample_norm(*sample.xyz)
        if self._baseline is None:
            self._norm.append(norm)
            if self._n >= self._warmup:
                self._set_baseline()
        else:
            d = norm - self._baseline
            self._sq.append(d * d)
        events.extend(self._advance(final=False))
        return events

    def flush(self) -> List[Segment]:
        """Finish the current bout; later samples start a fresh one."""
        events = self._close_bout()
        self._new_bout()
        return events

    def _close_bout(self) -> List[Segment]:
        if self._n == 0:
            return []
        if self._baseline is None:
            self._set_baseline()
        return self._advance(final=True)

    def _set_baseline(self):
        self._baseline = estimate_baseline(self._norm[: self._warmup])
        b = self._baseline
        self._sq = [(v - b) * (v - b) for v in self._norm]
        self._norm = []

    def _advance(self, final: bool) -> List[Segment]:
        if self._baseline is None:
            return []
        n, base = self._n, self._base
        limit = n if final else n - self._after
        while self._n_energy < limit:
            i = self._n_energy
            lo = max(0, i - self._before) - base
            hi = min(n, i + self._after + 1) - base
            self._energy.append(window_energy(self._sq, lo, hi))
            self._n_energy += 1

        out = []
        half, floor = self._half, self.config.min_prominence
        energy = self._energy
        while self._next_candidate + half < self._n_energy:
            c = self._next_candidate
            pos = c - base
            centre = energy[pos]
            if centre >= floor and all(
                energy[k] < centre for k in range(pos - half, pos + half + 1) if k != pos
            ):
                peak = Peak(self._bout_start + c, self._t[pos], centre)
                if self._last_peak is not None:
                    start = self._last_peak.index - self._bout_start - base
                    data = TriaxialSeries(self._xyz[start:pos], self.sample_rate_hz, self._t[start:pos])
                    out.append(Segment(self._last_peak, peak, data))
                self._last_peak = peak
            self._next_candidate += 1
        self._trim()
        return out

    def _trim(self):
        keep = min(self._n_energy - self._before, self._next_candidate - self._half)
        if self._last_peak is not None:
            keep = min(keep, self._last_peak.index - self._bout_start)
        else:
            keep = min(keep, self._next_candidate - self._half)
        drop = keep - self._base
        if drop > self._TRIM_SLACK:
            for buf in (self._t, self._xyz, self._sq, self._energy):
                del buf[:drop]
            self._base += drop

    def run(self, samples: Iterable[AccelSample]) -> Iterator[SegmenterEvent]:
        for s in samples:
            yield from self.push(s)
        yield from self.flush()

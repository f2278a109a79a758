"""Sample and series types plus the norm / short-term-energy stages.

Accelerations are carried in g throughout.  Window lengths are given in
seconds and converted to sample counts per stream with round-half-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import EmptySeriesError, InvalidWindowError

STANDARD_GRAVITY = 9.80665  # m/s^2 per g


@dataclass(frozen=True, slots=True)
class AccelSample:
    """One timestamped triaxial reading (t_ms since stream start, axes in g)."""

    t_ms: int
    ax: float
    ay: float
    az: float

    def __post_init__(self):
        if self.t_ms < 0:
            raise ValueError(f"negative timestamp {self.t_ms}")
        if not (math.isfinite(self.ax) and math.isfinite(self.ay) and math.isfinite(self.az)):
            raise ValueError(f"non-finite acceleration at t_ms={self.t_ms}")

    @property
    def xyz(self):
        return (self.ax, self.ay, self.az)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class TriaxialSeries:
    """Uniformly sampled 3-axis acceleration, shape (n, 3), n >= 1.

    ``t_ms`` is optional; when absent, timestamps are derived from the index
    and the sample rate.
    """

    __slots__ = ("samples", "sample_rate_hz", "_t_ms")

    def __init__(self, samples, sample_rate_hz: float, t_ms=None):
        arr = np.array(samples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) array, got shape {arr.shape}")
        if arr.shape[0] == 0:
            raise EmptySeriesError("triaxial series must hold at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("triaxial series contains non-finite values")
        if not (sample_rate_hz > 0 and math.isfinite(sample_rate_hz)):
            raise ValueError(f"sample rate must be positive, got {sample_rate_hz}")
        self.samples = _frozen(arr)
        self.sample_rate_hz = float(sample_rate_hz)
        if t_ms is not None:
            t = np.array(t_ms, dtype=np.int64)
            if t.shape != (arr.shape[0],):
                raise ValueError("t_ms length does not match samples")
            t_ms = _frozen(t)
        self._t_ms = t_ms

    def __len__(self):
        return self.samples.shape[0]

    @property
    def t_ms(self) -> np.ndarray:
        if self._t_ms is None:
            return index_to_ms(np.arange(len(self)), self.sample_rate_hz)
        return self._t_ms

    def slice(self, start: int, stop: int) -> "TriaxialSeries":
        t = None if self._t_ms is None else self._t_ms[start:stop]
        return TriaxialSeries(self.samples[start:stop], self.sample_rate_hz, t)

    def same_values(self, other: "TriaxialSeries") -> bool:
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )

    def __eq__(self, other):
        if not isinstance(other, TriaxialSeries):
            return NotImplemented
        return self.same_values(other) and bool(np.array_equal(self.t_ms, other.t_ms))

    __hash__ = None

    def __repr__(self):
        return f"TriaxialSeries(n={len(self)}, rate={self.sample_rate_hz:g} Hz)"

    @classmethod
    def from_samples(cls, samples: Sequence[AccelSample], sample_rate_hz: float):
        if not samples:
            raise EmptySeriesError("no samples")
        return cls([s.xyz for s in samples], sample_rate_hz, [s.t_ms for s in samples])


@dataclass(frozen=True, eq=False)
class ScalarSeries:
    sample_rate_hz: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError("scalar series must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar series contains non-finite values")
        object.__setattr__(self, "values", _frozen(vals))

    def __len__(self):
        return self.values.shape[0]


def index_to_ms(index, sample_rate_hz: float):
    """Nominal timestamp (ms, rounded half up) of sample ``index``."""
    return np.floor(np.asarray(index) * (1000.0 / sample_rate_hz) + 0.5).astype(np.int64)


def window_samples(window_s: float, sample_rate_hz: float) -> int:
    if not window_s > 0:
        raise InvalidWindowError(f"window length must be positive, got {window_s} s")
    return int(math.floor(window_s * sample_rate_hz + 0.5))


def sample_norm(ax: float, ay: float, az: float) -> float:
    # Must stay bit-identical to the vectorised form in synthetic_norm.
    return math.sqrt(ax * ax + ay * ay + az * az)


def synthetic_norm(series: TriaxialSeries) -> ScalarSeries:
    """Per-sample Euclidean norm of the three axes."""
    if series is None or len(series) == 0:
        raise EmptySeriesError("cannot take the norm of an empty series")
    s = series.samples
    x, y, z = s[:, 0], s[:, 1], s[:, 2]
    return ScalarSeries(series.sample_rate_hz, np.sqrt(x * x + y * y + z * z))


def estimate_baseline(norm) -> float:
    """Median of the series values (the resting offset to remove, ~1 g)."""
    vals = norm.values if isinstance(norm, ScalarSeries) else np.asarray(norm, dtype=np.float64)
    if vals.size == 0:
        raise EmptySeriesError("cannot estimate a baseline from an empty series")
    return float(np.median(vals))


def energy_offsets(width: int) -> tuple[int, int]:
    """Samples before / after the centre covered by a centred window of ``width``."""
    return (width - 1) // 2, width // 2


def window_energy(squared: Sequence[float], lo: int, hi: int) -> float:
    """Mean of ``squared[lo:hi]``; shared by the batch and streaming paths."""
    return math.fsum(squared[lo:hi]) / (hi - lo)


def short_term_energy(norm: ScalarSeries, window_s: float, baseline: float) -> ScalarSeries:
    """Centred moving mean of squared deviations from ``baseline``.

    Windows are clipped at the series edges and divided by the number of
    samples actually inside them, so the output has the input's length.
    """
    if len(norm) == 0:
        raise EmptySeriesError("cannot compute energy of an empty series")
    width = window_samples(window_s, norm.sample_rate_hz)
    if width < 1:
        raise InvalidWindowError(
            f"{window_s} s at {norm.sample_rate_hz:g} Hz is shorter than one sample"
        )
    dev = norm.values - baseline
    squared = (dev * dev).tolist()
    before, after = energy_offsets(width)
    n = len(squared)
    out = [
        window_energy(squared, max(0, i - before), min(n, i + after + 1)) for i in range(n)
    ]
    return ScalarSeries(norm.sample_rate_hz, np.array(out))

"""Multivariate DTW distance and dominant-axis score weighting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySeriesError
from .series import TriaxialSeries

AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class AxisStats:
    var_x: float
    var_y: float
    var_z: float
    dominant: str

    @property
    def variances(self):
        return (self.var_x, self.var_y, self.var_z)


NORMALIZATIONS = ("template", "path", "none")


@dataclass(frozen=True)
class ScoreBreakdown:
    raw_dtw: float  # DTW cost after the chosen normalisation, before weighting
    weight: float
    weighted: float
    normalized: bool
    mode: str = "template"


@dataclass(frozen=True)
class Alignment:
    cost: float  # cumulative cost along the optimal warping path
    path_length: int  # cells on that path (shortest among equal-cost paths)

    @property
    def normalized(self) -> float:
        return self.cost / self.path_length


def _as_array(s) -> np.ndarray:
    arr = s.samples if isinstance(s, TriaxialSeries) else np.asarray(s, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[0] == 0:
        raise EmptySeriesError("DTW needs two non-empty series")
    return arr


def pairwise_cost(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Euclidean distance between every sample of ``s`` and every sample of ``t``."""
    diff = s[:, None, :] - t[None, :, :]
    sq = diff * diff
    acc = sq[:, :, 0]
    for k in range(1, sq.shape[2]):
        acc = acc + sq[:, :, k]
    return np.sqrt(acc)


def align(s, t, band: Optional[int] = None) -> Alignment:
    """Dynamic-programming alignment of two sample sequences.

    Standard (n+1) x (m+1) table with D[0, 0] = 0 and infinite borders,
    steps (i-1, j), (i, j-1), (i-1, j-1).  Among predecessors of equal cost
    the one with the shorter path wins, which keeps the result symmetric.
    ``band`` is an optional Sakoe-Chiba radius, widened to |n - m| so the
    end cell stays reachable.
    """
    a, b = _as_array(s), _as_array(t)
    n, m = a.shape[0], b.shape[0]
    cost = pairwise_cost(a, b).tolist()
    inf = math.inf
    if band is None:
        radius = max(n, m)
    else:
        radius = max(band, abs(n - m))

    prev_d = [0.0] + [inf] * m
    prev_l = [0] * (m + 1)
    for i in range(1, n + 1):
        row = cost[i - 1]
        cur_d = [inf] * (m + 1)
        cur_l = [0] * (m + 1)
        lo = max(1, i - radius)
        hi = min(m, i + radius)
        for j in range(lo, hi + 1):
            best, length = prev_d[j - 1], prev_l[j - 1]
            up, left = prev_d[j], cur_d[j - 1]
            if up < best or (up == best and prev_l[j] < length):
                best, length = up, prev_l[j]
            if left < best or (left == best and cur_l[j - 1] < length):
                best, length = left, cur_l[j - 1]
            cur_d[j] = row[j - 1] + best
            cur_l[j] = length + 1
        prev_d, prev_l = cur_d, cur_l
    return Alignment(prev_d[m], prev_l[m])


def dtw_distance(s, t, normalize: bool = False, band: Optional[int] = None) -> float:
    """DTW distance; with ``normalize`` the cost is divided by the path length."""
    al = align(s, t, band)
    return al.normalized if normalize else al.cost


def axis_stats(series) -> AxisStats:
    """Population variance per axis; ties go to the earlier axis (X, then Y, then Z)."""
    arr = _as_array(series)
    if arr.shape[0] < 2:
        raise ValueError("axis statistics need at least two samples")
    var = [float(v) for v in np.var(arr, axis=0)]
    best = 0
    for k in (1, 2):
        if var[k] > var[best]:
            best = k
    return AxisStats(var[0], var[1], var[2], AXES[best])


def weight_for(seg_stats: AxisStats, tmpl_stats: AxisStats, match_weight: float = 0.9) -> float:
    """``match_weight`` when both series share a dominant axis, otherwise 1."""
    if not 0 < match_weight <= 1:
        raise ValueError("match_weight must lie in (0, 1]")
    return match_weight if seg_stats.dominant == tmpl_stats.dominant else 1.0


def normalized_cost(s, t, normalization: str = "template", band: Optional[int] = None) -> float:
    """DTW cost of ``s`` against reference ``t`` under a normalisation mode.

    ``"template"`` divides by the reference's sample count, ``"path"`` by the
    alignment path length, ``"none"`` keeps the raw cumulative cost.
    """
    al = align(s, t, band)
    if normalization == "template":
        return al.cost / _as_array(t).shape[0]
    if normalization == "path":
        return al.normalized
    if normalization == "none":
        return al.cost
    raise ValueError(f"unknown normalization {normalization!r}")


def score(
    segment,
    template,
    seg_stats: AxisStats,
    tmpl_stats: AxisStats,
    match_weight: float = 0.9,
    normalization: str = "template",
    band: Optional[int] = None,
) -> ScoreBreakdown:
    raw = normalized_cost(segment, template, normalization, band)
    w = weight_for(seg_stats, tmpl_stats, match_weight)
    return ScoreBreakdown(raw, w, raw * w, normalization != "none", normalization)

"""Confusion matrices, precision / recall / F1, and ground-truth matching.

Conventions:

* A ratio whose denominator is zero is reported as 1.0 (the numerator is
  necessarily zero too): an evaluation with nothing to find and nothing
  predicted counts as perfect rather than failed.
* F1 is the harmonic mean of precision and recall, 0 when both are 0.
* Segmentation is judged after classification: every truth x predicted
  cell counts as a correctly segmented repetition, misclassified or not.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from .errors import ParseError


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def ratio(num, den) -> float:
    return 1.0 if den == 0 else num / den


def harmonic(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def prf(hits, predicted, actual) -> PRF:
    p, r = ratio(hits, predicted), ratio(hits, actual)
    return PRF(p, r, harmonic(p, r))


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple
    cells: tuple  # cells[truth][predicted]
    overlooked: tuple  # per truth label
    mistook: tuple  # per predicted label

    def __post_init__(self):
        n = len(self.labels)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "cells", tuple(tuple(int(v) for v in row) for row in self.cells))
        object.__setattr__(self, "overlooked", tuple(int(v) for v in self.overlooked))
        object.__setattr__(self, "mistook", tuple(int(v) for v in self.mistook))
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if len(self.cells) != n or any(len(row) != n for row in self.cells):
            raise ValueError("confusion matrix must be square over its labels")
        if len(self.overlooked) != n or len(self.mistook) != n:
            raise ValueError("overlooked/mistook need one entry per label")
        values = [v for row in self.cells for v in row] + list(self.overlooked) + list(self.mistook)
        if any(v < 0 for v in values):
            raise ValueError("counts must be non-negative")

    @classmethod
    def empty(cls, labels: Sequence[str]) -> "ConfusionMatrix":
        n = len(labels)
        return cls(tuple(labels), [[0] * n for _ in range(n)], [0] * n, [0] * n)

    def index(self, label) -> int:
        return self.labels.index(label)

    def row_sum(self, i):
        return sum(self.cells[i])

    def col_sum(self, j):
        return sum(row[j] for row in self.cells)

    @property
    def total(self):
        return sum(sum(row) for row in self.cells)

    @property
    def diagonal(self):
        return sum(self.cells[i][i] for i in range(len(self.labels)))

    def scaled(self, k: int) -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.labels,
            [[v * k for v in row] for row in self.cells],
            [v * k for v in self.overlooked],
            [v * k for v in self.mistook],
        )


@dataclass(frozen=True)
class MetricsReport:
    per_label: Dict[str, PRF]
    micro: PRF
    segmentation: PRF


def segmentation_metrics(cm: ConfusionMatrix) -> PRF:
    matched = cm.total
    return prf(matched, matched + sum(cm.mistook), matched + sum(cm.overlooked))


def classification_metrics(cm: ConfusionMatrix) -> MetricsReport:
    per_label = {}
    for i, label in enumerate(cm.labels):
        hit = cm.cells[i][i]
        per_label[label] = prf(
            hit, cm.col_sum(i) + cm.mistook[i], cm.row_sum(i) + cm.overlooked[i]
        )
    micro = prf(
        cm.diagonal, cm.total + sum(cm.mistook), cm.total + sum(cm.overlooked)
    )
    return MetricsReport(per_label, micro, segmentation_metrics(cm))


# -- ground truth ------------------------------------------------------------


@dataclass(frozen=True)
class TruthInterval:
    start_ms: int
    end_ms: int
    label: str


@dataclass(frozen=True)
class Prediction:
    t_ms: int
    label: str


def predictions(count_events) -> List[Prediction]:
    """Match points for count events: the midpoint of each counted segment."""
    return [Prediction((e.start_ms + e.end_ms) // 2, e.label) for e in count_events]


def _check_truth(truth: Sequence[TruthInterval]):
    for k, iv in enumerate(truth):
        if iv.end_ms < iv.start_ms:
            raise ValueError(f"truth interval {k} ends before it starts")
        if k and iv.start_ms < truth[k - 1].end_ms:
            raise ValueError(
                f"truth intervals {k - 1} and {k} overlap or are out of order"
            )


def match_events(
    predicted: Iterable,
    truth: Sequence[TruthInterval],
    tolerance_ms: int = 250,
    labels: Optional[Sequence[str]] = None,
) -> ConfusionMatrix:
    """Greedy time-ordered matching of predicted count events to truth reps.

    ``predicted`` items need ``t_ms`` and ``label``.  An event matches the
    closest still-unmatched interval containing its timestamp, widened by
    ``tolerance_ms`` on both sides; ties go to the earlier interval.  Extra
    events become *mistook*, unmatched repetitions *overlooked*.
    """
    if tolerance_ms < 0:
        raise ValueError("tolerance must be non-negative")
    truth = list(truth)
    _check_truth(truth)
    preds = sorted(predicted, key=lambda p: p.t_ms)
    if labels is None:
        labels = []
        for lab in [iv.label for iv in truth] + [p.label for p in preds]:
            if lab not in labels:
                labels.append(lab)
    labels = list(labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    cells = [[0] * n for _ in range(n)]
    mistook = [0] * n
    overlooked = [0] * n

    starts = [iv.start_ms for iv in truth]
    ends = [iv.end_ms for iv in truth]
    used = [False] * len(truth)
    for p in preds:
        if p.label not in idx:
            raise ValueError(f"prediction label {p.label!r} not in label list")
        # sorted disjoint intervals: the candidates form one contiguous run
        lo = bisect_left(ends, p.t_ms - tolerance_ms)
        hi = bisect_right(starts, p.t_ms + tolerance_ms)
        best, best_dist = None, None
        for k in range(lo, hi):
            if used[k]:
                continue
            dist = max(starts[k] - p.t_ms, p.t_ms - ends[k], 0)
            if best is None or dist < best_dist:
                best, best_dist = k, dist
        if best is None:
            mistook[idx[p.label]] += 1
        else:
            used[best] = True
            cells[idx[truth[best].label]][idx[p.label]] += 1
    for k, iv in enumerate(truth):
        if not used[k]:
            if iv.label not in idx:
                raise ValueError(f"truth label {iv.label!r} not in label list")
            overlooked[idx[iv.label]] += 1
    return ConfusionMatrix(tuple(labels), cells, overlooked, mistook)


# -- file formats ------------------------------------------------------------


def loads_truth(text: str) -> List[TruthInterval]:
    """Parse ``start_ms end_ms label`` lines (``#`` comments allowed)."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected 'start_ms end_ms label'", line=no)
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("start/end must be integers", line=no) from None
        if end < start:
            raise ParseError("interval ends before it starts", line=no)
        if out and start < out[-1].end_ms:
            raise ParseError("truth intervals overlap or are out of order", line=no)
        out.append(TruthInterval(start, end, parts[2]))
    return out


def dumps_truth(truth: Iterable[TruthInterval]) -> str:
    lines = ["# start_ms end_ms label"]
    lines += [f"{iv.start_ms} {iv.end_ms} {iv.label}" for iv in truth]
    return "\n".join(lines) + "\n"


def loads_matrix(text: str) -> ConfusionMatrix:
    """Parse a confusion matrix file.

    ::

        labels Running Walking
        Running 231 6 3        # truth row: predicted counts..., overlooked
        Walking 0 272 22
        mistook 3 8
    """
    labels = None
    rows: Dict[str, List[int]] = {}
    overlooked: Dict[str, int] = {}
    mistook = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "labels":
            if labels is not None:
                raise ParseError("repeated labels line", line=no)
            labels = rest
            if not labels or len(set(labels)) != len(labels):
                raise ParseError("labels must be present and unique", line=no)
            continue
        if labels is None:
            raise ParseError("the 'labels' line must come first", line=no)
        try:
            nums = [int(v) for v in rest]
        except ValueError:
            raise ParseError("counts must be integers", line=no) from None
        if head == "mistook":
            if len(nums) != len(labels):
                raise ParseError(f"mistook row needs {len(labels)} counts", line=no)
            mistook = nums
        elif head in labels:
            if len(nums) != len(labels) + 1:
                raise ParseError(
                    f"row needs {len(labels)} predicted counts plus overlooked", line=no
                )
            if head in rows:
                raise ParseError(f"repeated row {head!r}", line=no)
            rows[head] = nums[:-1]
            overlooked[head] = nums[-1]
        else:
            raise ParseError(f"unknown row label {head!r}", line=no)
    if labels is None:
        raise ParseError("missing 'labels' line")
    missing = [lab for lab in labels if lab not in rows]
    if missing:
        raise ParseError(f"missing rows for {missing}")
    try:
        return ConfusionMatrix(
            tuple(labels),
            [rows[lab] for lab in labels],
            [overlooked[lab] for lab in labels],
            mistook if mistook is not None else [0] * len(labels),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dumps_matrix(cm: ConfusionMatrix) -> str:
    lines = ["labels " + " ".join(cm.labels)]
    for i, lab in enumerate(cm.labels):
        lines.append(" ".join([lab] + [str(v) for v in cm.cells[i]] + [str(cm.overlooked[i])]))
    lines.append("mistook " + " ".join(str(v) for v in cm.mistook))
    return "\n".join(lines) + "\n"


def load_truth(path) -> List[TruthInterval]:
    return loads_truth(Path(path).read_text())


def load_matrix(path) -> ConfusionMatrix:
    return loads_matrix(Path(path).read_text())


# -- reporting ---------------------------------------------------------------


def format_matrix(cm: ConfusionMatrix) -> str:
    width = max([len(l) for l in cm.labels] + [10])
    head = " " * width + " | " + " ".join(f"{l:>{width}}" for l in cm.labels) + f" | {'overlooked':>10}"
    lines = [head, "-" * len(head)]
    for i, lab in enumerate(cm.labels):
        lines.append(
            f"{lab:>{width}} | "
            + " ".join(f"{v:>{width}d}" for v in cm.cells[i])
            + f" | {cm.overlooked[i]:>10d}"
        )
    lines.append(f"{'mistook':>{width}} | " + " ".join(f"{v:>{width}d}" for v in cm.mistook))
    return "\n".join(lines)


def percent(x: float, places: int = 1) -> str:
    """``x`` as a percentage rounded half up (0.9625 -> '96.3')."""
    q = Decimal(1).scaleb(-places)
    return str((Decimal(repr(x)) * 100).quantize(q, rounding=ROUND_HALF_UP))


def format_report(report: MetricsReport) -> str:
    rows = [("segmentation", report.segmentation)]
    rows += list(report.per_label.items())
    rows.append(("micro-average", report.micro))
    width = max(len(name) for name, _ in rows)
    out = [f"{'':<{width}}  precision  recall   f1"]
    for name, m in rows:
        out.append(
            f"{name:<{width}}  {percent(m.precision):>8}%  {percent(m.recall):>5}%  {percent(m.f1):>5}%"
        )
    return "\n".join(out)


def report_keyvalues(report: MetricsReport) -> str:
    out = []

    def emit(prefix, m):
        out.append(f"{prefix}.precision={m.precision!r}")
        out.append(f"{prefix}.recall={m.recall!r}")
        out.append(f"{prefix}.f1={m.f1!r}")

    emit("segmentation", report.segmentation)
    for label, m in report.per_label.items():
        emit(f"label.{label}", m)
    emit("micro", report.micro)
    return "\n".join(out)

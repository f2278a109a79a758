"""Deterministic synthetic IMU sessions with exact ground truth.

Each exercise bout is a train of raised-cosine bursts added to a static
gravity vector.  A bout of ``repetitions`` reps with ``k`` phases per rep
has ``k * repetitions + 1`` bursts spaced ``period_s / k`` apart; every
burst uses the amplitude triple of its phase (cycling), so a rep runs from
one phase-0 burst to the next.  Bouts are separated by still rest (gravity
plus noise) or, with ``silence_gaps``, by a gap with no samples at all.

The model is deliberately minimal.  It exists to make pipeline properties
testable, not to mimic biomechanics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .evaluation import TruthInterval
from .series import AccelSample, index_to_ms
from .templates import check_label

DEFAULT_GRAVITY = (0.5, 0.5, math.sqrt(0.5))  # unit vector, tilted chest mount


@dataclass(frozen=True)
class PatternSpec:
    label: str
    phases: Tuple[Tuple[float, float, float], ...]
    period_s: float
    repetitions: int
    noise_std: Optional[float] = None  # g; None -> session default
    rest_after_s: float = 3.0

    def __post_init__(self):
        check_label(self.label)
        phases = tuple(tuple(float(v) for v in p) for p in self.phases)
        object.__setattr__(self, "phases", phases)
        if not phases or any(len(p) != 3 for p in phases):
            raise ValueError("each phase needs an (ax, ay, az) amplitude triple")
        if any(v < 0 or not math.isfinite(v) for p in phases for v in p):
            raise ValueError("amplitudes must be finite and non-negative")
        if not self.period_s > 0:
            raise ValueError("period must be positive")
        if self.repetitions < 0:
            raise ValueError("repetitions must be non-negative")
        if self.noise_std is not None and self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.rest_after_s < 0:
            raise ValueError("rest_after_s must be non-negative")

    @property
    def spacing_s(self) -> float:
        return self.period_s / len(self.phases)


@dataclass(frozen=True)
class GeneratorSpec:
    patterns: Tuple[PatternSpec, ...]
    seed: int = 0
    sample_rate_hz: float = 50.0
    noise_std: float = 0.05
    gravity: Tuple[float, float, float] = DEFAULT_GRAVITY
    lead_in_s: float = 2.0
    silence_gaps: bool = False

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "gravity", tuple(float(g) for g in self.gravity))
        if not self.sample_rate_hz > 0:
            raise ValueError("sample rate must be positive")
        if self.noise_std < 0 or self.lead_in_s < 0:
            raise ValueError("noise_std and lead_in_s must be non-negative")
        if len(self.gravity) != 3:
            raise ValueError("gravity needs three components")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "sample_rate_hz": self.sample_rate_hz,
            "noise_std": self.noise_std,
            "gravity": list(self.gravity),
            "lead_in_s": self.lead_in_s,
            "silence_gaps": self.silence_gaps,
            "patterns": [
                {
                    "label": p.label,
                    "phases": [list(ph) for ph in p.phases],
                    "period_s": p.period_s,
                    "repetitions": p.repetitions,
                    "noise_std": p.noise_std,
                    "rest_after_s": p.rest_after_s,
                }
                for p in self.patterns
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        d = dict(d)
        pats = []
        for p in d.pop("patterns"):
            p = dict(p)
            if "amplitude" in p:
                p["phases"] = [p.pop("amplitude")]
            pats.append(PatternSpec(**p))
        return cls(patterns=tuple(pats), **d)


def load_spec(path) -> GeneratorSpec:
    return GeneratorSpec.from_dict(json.loads(Path(path).read_text()))


def _bout(pattern: PatternSpec, rate: float):
    """Motion (n, 3) without gravity/noise, plus burst centre times (s)."""
    d = pattern.spacing_s
    k = len(pattern.phases)
    bursts = k * pattern.repetitions + 1
    duration = bursts * d
    n = int(math.floor(duration * rate + 0.5))
    tau = np.arange(n) / rate
    j = np.clip(np.floor(tau / d).astype(np.int64), 0, bursts - 1)
    u = (tau - (j + 0.5) * d) / d
    shape = np.cos(np.pi * u) ** 2
    amps = np.array(pattern.phases)[j % k]
    centres = (np.arange(bursts) + 0.5) * d
    return amps * shape[:, None], centres


def generate(spec: GeneratorSpec) -> Tuple[List[AccelSample], List[TruthInterval]]:
    """Render a session; identical specs (including seed) give identical output."""
    rng = np.random.default_rng(spec.seed)
    rate = spec.sample_rate_hz
    g = np.array(spec.gravity)
    blocks = []  # (first sample index on the timeline, values)
    truth: List[TruthInterval] = []
    cursor = 0  # timeline position in samples

    def still(seconds, sigma):
        nonlocal cursor
        n = int(math.floor(seconds * rate + 0.5))
        if n:
            blocks.append((cursor, g + rng.normal(0.0, sigma, (n, 3))))
        cursor += n

    still(spec.lead_in_s, spec.noise_std)
    for i, pattern in enumerate(spec.patterns):
        if pattern.repetitions == 0:
            continue
        if spec.silence_gaps and i > 0:
            still(spec.lead_in_s, spec.noise_std)
        sigma = spec.noise_std if pattern.noise_std is None else pattern.noise_std
        motion, centres = _bout(pattern, rate)
        start = cursor
        blocks.append((start, g + motion + rng.normal(0.0, sigma, motion.shape)))
        cursor += motion.shape[0]
        k = len(pattern.phases)
        edges = index_to_ms(start + centres * rate, rate)
        for r in range(pattern.repetitions):
            truth.append(TruthInterval(int(edges[r * k]), int(edges[(r + 1) * k]), pattern.label))
        last = i == len(spec.patterns) - 1
        if spec.silence_gaps and not last:
            cursor += int(math.floor(pattern.rest_after_s * rate + 0.5))
        else:
            still(pattern.rest_after_s, spec.noise_std)

    samples = []
    for first, values in blocks:
        stamps = index_to_ms(np.arange(first, first + values.shape[0]), rate).tolist()
        for t, (x, y, z) in zip(stamps, values.tolist()):
            samples.append(AccelSample(t, x, y, z))
    return samples, truth


# -- presets -------------------------------------------------------------------

FIVE_PATTERNS = (
    # label, phases, period (s)
    ("running", ((0.25, 0.3, 1.1),), 0.8),
    ("walking", ((0.2, 0.8, 0.25),), 1.1),
    ("jumping", ((0.4, 0.35, 1.6),), 1.5),
    ("push-up", ((1.0, 0.15, 0.25),), 1.9),
    ("sit-up", ((0.2, 0.15, 0.9), (0.65, 0.65, 0.1), (0.1, 0.55, 0.55)), 3.3),
)
SUPPRESS = {"sit-up": 2}


def five_pattern_spec(seed: int = 0, repetitions: int = 10, noise_std: float = 0.05,
                      rest_s: float = 3.0, **kwargs) -> GeneratorSpec:
    """Five exercises with distinct dominant axes / periods, sit-ups tri-phasic."""
    pats = tuple(
        PatternSpec(label, phases, period, repetitions, rest_after_s=rest_s)
        for label, phases, period in FIVE_PATTERNS
    )
    return GeneratorSpec(pats, seed=seed, noise_std=noise_std, **kwargs)


def circuit_protocol_spec(seed: int = 0, noise_std: float = 0.05) -> GeneratorSpec:
    """Gait bouts of more than 20 cycles, the other exercises ~10 reps."""
    reps = {"running": 22, "walking": 22}
    pats = tuple(
        PatternSpec(label, phases, period, reps.get(label, 10))
        for label, phases, period in FIVE_PATTERNS
    )
    return GeneratorSpec(pats, seed=seed, noise_std=noise_std)


def single_pattern_spec(label: str, seed: int, repetitions: int = 1, **kwargs) -> GeneratorSpec:
    for lab, phases, period in FIVE_PATTERNS:
        if lab == label:
            return GeneratorSpec(
                (PatternSpec(lab, phases, period, repetitions),), seed=seed, **kwargs
            )
    raise KeyError(label)

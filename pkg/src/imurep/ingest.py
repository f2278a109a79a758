"""CSV stream ingestion, re-emission and paced replay.

A stream file starts with one header comment, then ``t_ms,ax,ay,az`` rows::

    # sample_rate_hz=50 units=g axes=xyz
    0,0.01,0.49,0.71
    20,0.02,0.50,0.70

``units`` is ``g`` or ``m/s2``; values are converted to g on the way in.
``axes`` names the order of the three value columns (any permutation of
``xyz``).
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, TextIO, Tuple, Union

from .errors import ParseError, StreamOrderError
from .series import STANDARD_GRAVITY, AccelSample

_UNIT_ALIASES = {"g": "g", "m/s2": "m/s2", "m/s^2": "m/s2", "m/s²": "m/s2", "mps2": "m/s2"}


@dataclass(frozen=True)
class StreamHeader:
    sample_rate_hz: float
    units: str = "g"
    axes: str = "xyz"

    def __post_init__(self):
        if not (self.sample_rate_hz > 0 and math.isfinite(self.sample_rate_hz)):
            raise ValueError("sample_rate_hz must be positive")
        if self.units not in ("g", "m/s2"):
            raise ValueError(f"unknown units {self.units!r}")
        if sorted(self.axes) != ["x", "y", "z"]:
            raise ValueError(f"axes must be a permutation of 'xyz', got {self.axes!r}")

    @property
    def scale(self) -> float:
        return 1.0 if self.units == "g" else 1.0 / STANDARD_GRAVITY

    def format(self) -> str:
        return f"# sample_rate_hz={self.sample_rate_hz!r} units={self.units} axes={self.axes}"


def parse_header(line: str, lineno: int = 1) -> StreamHeader:
    text = line.strip()
    if not text.startswith("#"):
        raise ParseError("first line must be a '# sample_rate_hz=...' header", line=lineno)
    fields = {}
    for token in text[1:].split():
        key, sep, val = token.partition("=")
        if not sep:
            raise ParseError(f"malformed header token {token!r}", line=lineno)
        fields[key] = val
    if "sample_rate_hz" not in fields:
        raise ParseError("header lacks sample_rate_hz", line=lineno, field="sample_rate_hz")
    try:
        rate = float(fields["sample_rate_hz"])
    except ValueError:
        raise ParseError("not a number", line=lineno, field="sample_rate_hz") from None
    units = _UNIT_ALIASES.get(fields.get("units", "g"))
    if units is None:
        raise ParseError(f"unknown units {fields['units']!r}", line=lineno, field="units")
    try:
        return StreamHeader(rate, units, fields.get("axes", "xyz"))
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from None


def _open_text(source) -> Tuple[TextIO, bool]:
    if isinstance(source, (str, Path)):
        return open(source, "r", newline=""), True
    return source, False


def ingest_csv(source) -> Tuple[StreamHeader, Iterator[AccelSample]]:
    """Read the header eagerly and return a lazy, validating sample iterator.

    ``source`` is a path or an open text stream.
    """
    fh, owned = _open_text(source)
    first = fh.readline()
    if not first:
        if owned:
            fh.close()
        raise ParseError("empty stream file", line=1)
    try:
        header = parse_header(first, 1)
    except ParseError:
        if owned:
            fh.close()
        raise
    return header, _rows(fh, owned, header)


def _rows(fh, owned, header: StreamHeader) -> Iterator[AccelSample]:
    order = [header.axes.index(a) for a in "xyz"]
    scale = header.scale
    last = None
    try:
        for lineno, raw in enumerate(fh, 2):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ParseError(f"expected 4 comma-separated fields, got {len(parts)}", line=lineno)
            try:
                t = int(parts[0])
            except ValueError:
                raise ParseError(f"not an integer: {parts[0]!r}", line=lineno, field="t_ms") from None
            vals = []
            for name, text in zip(("c1", "c2", "c3"), parts[1:]):
                try:
                    v = float(text)
                except ValueError:
                    raise ParseError(f"not a number: {text!r}", line=lineno, field=name) from None
                if not math.isfinite(v):
                    raise ParseError(f"non-finite value {text!r}", line=lineno, field=name)
                vals.append(v)
            if t < 0:
                raise ParseError("negative timestamp", line=lineno, field="t_ms")
            if last is not None and t <= last:
                raise StreamOrderError(f"t_ms {t} does not follow {last}", line=lineno)
            last = t
            x, y, z = (vals[k] for k in order)
            if scale != 1.0:
                x, y, z = x * scale, y * scale, z * scale
            yield AccelSample(t, x, y, z)
    finally:
        if owned:
            fh.close()


def read_csv(source) -> Tuple[StreamHeader, List[AccelSample]]:
    header, rows = ingest_csv(source)
    return header, list(rows)


def write_csv(sample_rate_hz: float, samples: Iterable[AccelSample], destination) -> None:
    """Write samples in g with exact (``repr``) float formatting."""
    header = StreamHeader(sample_rate_hz)
    if isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            _write(header, samples, fh)
    else:
        _write(header, samples, destination)


def _write(header, samples, fh):
    fh.write(header.format() + "\n")
    for s in samples:
        fh.write(f"{s.t_ms},{s.ax!r},{s.ay!r},{s.az!r}\n")


def dumps_csv(sample_rate_hz: float, samples: Iterable[AccelSample]) -> str:
    buf = io.StringIO()
    write_csv(sample_rate_hz, samples, buf)
    return buf.getvalue()


def paced(samples: Iterable[AccelSample], speed: float = 1.0, clock=time.monotonic, sleep=time.sleep):
    """Yield samples no faster than their timestamps allow (real-time replay)."""
    t0_wall = None
    t0_ms = None
    for s in samples:
        if t0_wall is None:
            t0_wall, t0_ms = clock(), s.t_ms
        else:
            due = t0_wall + (s.t_ms - t0_ms) / (1000.0 * speed)
            delay = due - clock()
            if delay > 0:
                sleep(delay)
        yield s

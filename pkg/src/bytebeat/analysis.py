"""Musical analysis of rendered streams.

The output byte is a sum of eight square waves, one per bit, so most of
the analyses here work on the per-bit decomposition: which bands are
sounding, how busy they are, and how a multiplier series maps to pitches
once the sawtooth carrier and alias folding are taken into account.
A small autocorrelation tracker recovers monophonic pitch straight from
the rendered audio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .audio import AudioSink, SampleChunk, open_sink
from .expr import Expr
from .semantics import SemanticsMode, eval_ast, typecheck
from .vm import Program, render_range

NOTE_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


class PitchReference(Enum):
    """Equal-tempered reference grids: concert pitch, or the power-of-two
    friendly C4 = 256 Hz that byte-exact sawtooths land on."""

    A440 = "a440"
    C256 = "c256"

    @property
    def c0_hz(self) -> float:
        if self is PitchReference.C256:
            return 16.0
        return 440.0 / 2 ** (57 / 12)


@dataclass(frozen=True, slots=True)
class NoteEvent:
    t_start: int
    t_len: int
    freq: float | None
    note: str | None = None
    octave: int | None = None
    cents: int | None = None


@dataclass(frozen=True, slots=True)
class BandActivity:
    duty: float
    toggles: int


@dataclass(frozen=True, slots=True)
class BitBandMatrix:
    window_len: int
    rows: tuple[tuple[BandActivity, ...], ...]  # 8 rows, bit 0 first


# ── Bit-band decomposition ───────────────────────────────────────────

def bit_components(program: Program, t0: int, n: int) -> list[list[int]]:
    """Per-bit 0/1 sequences of the output; summing 2^k * row k over the
    eight rows reconstructs the sample bytes exactly."""
    if n <= 0:
        raise ValueError("need at least one sample")
    data = render_range(program, t0, n).data
    return [[(s >> k) & 1 for s in data] for k in range(8)]


def band_activity(bits: Sequence[int], window_len: int) -> list[BandActivity]:
    """Duty cycle and toggle count per full window; a band is sounding
    in a window when its toggle count is nonzero."""
    if window_len < 2:
        raise ValueError("window must span at least two samples")
    out = []
    for start in range(0, len(bits) - window_len + 1, window_len):
        w = bits[start : start + window_len]
        toggles = sum(1 for i in range(window_len - 1) if w[i] != w[i + 1])
        out.append(BandActivity(duty=sum(w) / window_len, toggles=toggles))
    return out


def bit_band_matrix(program: Program, t0: int, n: int, window_len: int) -> BitBandMatrix:
    rows = tuple(
        tuple(band_activity(bits, window_len)) for bits in bit_components(program, t0, n)
    )
    return BitBandMatrix(window_len=window_len, rows=rows)


# ── Pitch series and note naming ─────────────────────────────────────

def series(e: Expr, mode: SemanticsMode, stride: int, count: int) -> list[int | float]:
    """Sample the pre-truncation value at note boundaries: element k is
    the expression at t = k*stride."""
    if stride < 1:
        raise ValueError("stride must be at least 1")
    typecheck(e, mode)
    return [eval_ast(e, k * stride, mode) for k in range(count)]


def sawtooth_freq(multiplier: int | float, rate: int) -> float:
    """Fundamental of the t*multiplier sawtooth after byte truncation:
    |v| mod 256 ramp wraps per 256/v samples.  Multiples of 256 are DC."""
    if rate <= 0:
        raise ValueError("sample rate must be positive")
    reduced = abs(multiplier) % 256
    return reduced * rate / 256


def alias_fold(freq: float, rate: int) -> float:
    """Fold a frequency into [0, rate/2], the band where components above
    Nyquist actually sound."""
    if rate <= 0:
        raise ValueError("sample rate must be positive")
    f = freq % rate
    return rate - f if f > rate / 2 else f


def note_name(freq: float, ref: PitchReference = PitchReference.A440) -> tuple[str, int, int] | None:
    """Nearest equal-tempered note as (letter, octave, cents offset),
    or None for non-positive frequencies."""
    if freq <= 0:
        return None
    semis = 12.0 * math.log2(freq / ref.c0_hz)
    nearest = round(semis)
    cents = round(100.0 * (semis - nearest))
    if cents == 50:
        nearest += 1
        cents = -50
    return NOTE_NAMES[nearest % 12], nearest // 12, cents


# ── Pitch estimation from rendered audio ─────────────────────────────

def estimate_pitch(
    samples: SampleChunk,
    window_len: int = 1024,
    *,
    ref: PitchReference = PitchReference.A440,
    threshold: float = 0.8,
    min_lag: int = 2,
    max_lag: int | None = None,
) -> list[NoteEvent]:
    """Normalized-autocorrelation pitch track over full windows.

    Each window is mean-subtracted; the first correlation peak at or
    above the threshold gives the period, refined by parabolic
    interpolation.  Windows without such a peak report freq None.
    """
    if window_len < 128:
        raise ValueError("window must be at least 128 samples")
    rate = samples.rate
    if max_lag is None:
        max_lag = rate // 20
    max_lag = min(max_lag, window_len // 2)
    x = np.frombuffer(samples.data, dtype=np.uint8).astype(np.float64)
    events: list[NoteEvent] = []
    for start in range(0, len(x) - window_len + 1, window_len):
        y = x[start : start + window_len]
        y = y - y.mean()
        freq = _window_freq(y, rate, threshold, min_lag, max_lag)
        named = note_name(freq, ref) if freq else None
        events.append(
            NoteEvent(
                t_start=samples.t0 + start,
                t_len=window_len,
                freq=freq,
                note=named[0] if named else None,
                octave=named[1] if named else None,
                cents=named[2] if named else None,
            )
        )
    return events


def _window_freq(y: np.ndarray, rate: int, threshold: float, min_lag: int, max_lag: int) -> float | None:
    energy = float(y @ y)
    if energy == 0.0:
        return None
    n = len(y)
    sq = np.concatenate(([0.0], np.cumsum(y * y)))
    corr = np.correlate(y, y, mode="full")[n - 1 :]  # corr[L] = sum y[i] y[i+L]
    lags = np.arange(min_lag, max_lag + 1)
    head = sq[n - lags] - sq[0]   # energy of y[:n-L]
    tail = sq[n] - sq[lags]       # energy of y[L:]
    denom = np.sqrt(head * tail)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0, corr[min_lag : max_lag + 1] / denom, -1.0)
    # The zero-lag peak bleeds into small lags, so skip its descending
    # flank before looking for the first qualifying period peak.
    i = 0
    while i < len(r) and r[i] >= threshold:
        i += 1
    above = np.nonzero(r[i:] >= threshold)[0]
    if len(above) == 0:
        return None
    j = i + int(above[0])
    while j + 1 < len(r) and r[j + 1] > r[j]:
        j += 1
    lag = float(lags[j])
    if 0 < j < len(r) - 1:
        a, b, c = float(r[j - 1]), float(r[j]), float(r[j + 1])
        curvature = a - 2 * b + c
        if curvature != 0:
            delta = 0.5 * (a - c) / curvature
            lag += max(-0.5, min(0.5, delta))
    return rate / lag


# ── Amplitude bitmaps ────────────────────────────────────────────────

def render_bitmap(program: Program, t0: int, n: int, sink: AudioSink) -> int:
    """Plot amplitude against time as a binary P6 pixmap, one column per
    sample, white pixel at row 255 - value; returns bytes written."""
    if n < 1:
        raise ValueError("need at least one column")
    data = render_range(program, t0, n).data
    header = b"P6\n%d 256\n255\n" % n
    image = bytearray(n * 256 * 3)
    for x, sample in enumerate(data):
        offset = ((255 - sample) * n + x) * 3
        image[offset : offset + 3] = b"\xff\xff\xff"
    with open_sink(sink) as fh:
        fh.write(header)
        fh.write(bytes(image))
    return len(header) + len(image)

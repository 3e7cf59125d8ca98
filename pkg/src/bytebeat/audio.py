"""Raw PCM and WAV serialization of rendered sample streams.

Output is always mono unsigned 8-bit: the artifacts of byte wrap-around
are the point, so there is no resampling and no dithering.  The default
rate of 8000 Hz matches the classic command-line playback path
(/dev/dsp, aplay) these one-liners were written for.
"""

from __future__ import annotations

import struct
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

DEFAULT_RATE = 8000

# Data bytes must fit the 32-bit RIFF size field next to the 44-byte header.
MAX_WAV_SAMPLES = 2**32 - 45


@dataclass(frozen=True, slots=True)
class SampleChunk:
    """A contiguous run of unsigned 8-bit samples starting at index t0."""

    t0: int
    data: bytes
    rate: int = DEFAULT_RATE

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError("sample rate must be positive")

    def __len__(self) -> int:
        return len(self.data)


AudioSink = str | Path | BinaryIO


@contextmanager
def open_sink(sink: AudioSink) -> Iterator[BinaryIO]:
    """Yield a writable binary stream for a path or pass one through."""
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as fh:
            yield fh
    else:
        yield sink


def write_raw(chunk: SampleChunk, sink) -> int:
    """Write the bare sample bytes, headerless; returns the byte count."""
    with open_sink(sink) as fh:
        fh.write(chunk.data)
    return len(chunk.data)


def wav_header(n_samples: int, rate: int) -> bytes:
    """The canonical 44-byte RIFF/WAVE header for 8-bit mono PCM."""
    if n_samples > MAX_WAV_SAMPLES:
        raise ValueError(f"too many samples for one WAV file: {n_samples}")
    if rate <= 0:
        raise ValueError("sample rate must be positive")
    return struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + n_samples, b"WAVE",
        b"fmt ", 16,
        1,       # PCM
        1,       # mono
        rate,
        rate,    # byte rate: one byte per sample
        1,       # block align
        8,       # bits per sample
        b"data", n_samples,
    )


def write_wav(chunks: Iterable[SampleChunk] | SampleChunk, rate: int, sink) -> int:
    """Write chunks as one WAV file; returns total bytes written.

    The chunks are concatenated in the order given, which must be their
    t order; the total sample count is known before anything is written.
    """
    if isinstance(chunks, SampleChunk):
        chunks = (chunks,)
    else:
        chunks = tuple(chunks)
    total = sum(len(c.data) for c in chunks)
    header = wav_header(total, rate)
    with open_sink(sink) as fh:
        fh.write(header)
        for chunk in chunks:
            fh.write(chunk.data)
    return len(header) + total

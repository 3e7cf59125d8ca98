"""The built-in formula collection.

These are the classic one-liners the workbench's analyses were built
around, grouped by what they demonstrate.  Sources are stored exactly as
circulated; a few circulated in visibly truncated form and are kept with
status "truncated" so they are never rendered or asserted on, and one
melody is a reconstruction consistent with its published note table and
flagged as such.
"""

from __future__ import annotations

from dataclasses import dataclass

from .semantics import SemanticsMode

VERBATIM = "verbatim"
RECONSTRUCTED = "reconstructed"
TRUNCATED = "truncated"

_ALL_MODES = (SemanticsMode.C32, SemanticsMode.C64, SemanticsMode.JS)


@dataclass(frozen=True, slots=True)
class Preset:
    id: str
    source: str
    family: str  # basic | sierpinski | melody | wraparound
    credit: str | None
    modes: tuple[SemanticsMode, ...]
    status: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "family": self.family,
            "credit": self.credit,
            "modes": [m.value for m in self.modes],
            "status": self.status,
        }


PRESETS: tuple[Preset, ...] = (
    Preset("sawtooth", "t", "basic", None, _ALL_MODES, VERBATIM),
    Preset("sierpinski", "t&t>>8", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("sierpinski-3t", "3*t&t>>8", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("two-bands", "t&96", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("two-bands-gated", "t&96&t>>8", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("lullaby", "t*5&t>>7|t*3&t>>8", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("lullaby-slow", "t*5&t>>7|t*3&t>>10", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("lullaby-triple", "t*9&t>>4|t*5&t>>7|t*3&t>>10", "sierpinski", None, _ALL_MODES, VERBATIM),
    Preset("rrrola", "t*(0xCA98>>(t>>9&14)&15)|t>>8", "melody", "Rrrola", _ALL_MODES, VERBATIM),
    Preset("mu6k-melody", "(t>>6^t>>8|t>>12|t)&63", "melody", "Mu6k", _ALL_MODES, VERBATIM),
    Preset("fortytwo", "t*(42&t>>10)", "melody", None, _ALL_MODES, VERBATIM),
    Preset(
        "fortytwo-mod", "t*((42&t>>10)", "melody", None, (), TRUNCATED,
    ),
    Preset(
        "eleven-series", "t*(((t>>9)^((t>>9)-2))%11)", "melody", None, _ALL_MODES, RECONSTRUCTED,
    ),
    Preset(
        "eleven-series-src", "((t>>10)^(t>>10)-2)", "melody", None, (), TRUNCATED,
    ),
    Preset("wrap-gate", "(t&t", "wraparound", None, (), TRUNCATED),
    Preset(
        "percussive", "(t*9&t>>4|t*5&t>>7|t*3&t>>10)-1", "wraparound", None, _ALL_MODES, VERBATIM,
    ),
    Preset("sweep", "(int)(t/1e7*t*t+t)", "wraparound", None, _ALL_MODES, VERBATIM),
    Preset("zigzag", "t>>6&1?t>>5:-t>>4", "wraparound", None, _ALL_MODES, VERBATIM),
    Preset(
        "divider-grit",
        "t>>4|t&((t>>5)/(t>>7-(t>>15)&-t>>7-(t>>15)))",
        "wraparound", None, _ALL_MODES, VERBATIM,
    ),
)

_BY_ID = {p.id: p for p in PRESETS}


def presets() -> list[Preset]:
    return list(PRESETS)


def get_preset(preset_id: str) -> Preset:
    return _BY_ID[preset_id]


def verbatim_presets() -> list[Preset]:
    return [p for p in PRESETS if p.status == VERBATIM]


def playable_presets() -> list[Preset]:
    """Presets safe to hand to the renderer: everything not truncated."""
    return [p for p in PRESETS if p.status != TRUNCATED]

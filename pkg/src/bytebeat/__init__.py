"""Bytebeat workbench: parse, compile, render and analyze one-liner music."""

from .analysis import (
    BandActivity,
    BitBandMatrix,
    NoteEvent,
    PitchReference,
    alias_fold,
    band_activity,
    bit_band_matrix,
    bit_components,
    estimate_pitch,
    note_name,
    render_bitmap,
    sawtooth_freq,
    series,
)
from .audio import DEFAULT_RATE, SampleChunk, wav_header, write_raw, write_wav
from .cache import ProgramCache
from .corpus import Preset, get_preset, presets
from .expr import ParseError, Token, TokenKind, format_expr, parse, tokenize
from .semantics import (
    SemanticsMode,
    TypecheckError,
    apply_binary,
    apply_unary,
    eval_ast,
    eval_ast_sample,
    to_int32,
    typecheck,
)
from .vm import Instr, Program, build_program, compile_program, eval_sample, render_range

__version__ = "0.1.0"

__all__ = [
    "BandActivity",
    "BitBandMatrix",
    "DEFAULT_RATE",
    "Instr",
    "NoteEvent",
    "ParseError",
    "PitchReference",
    "Preset",
    "Program",
    "ProgramCache",
    "SampleChunk",
    "SemanticsMode",
    "Token",
    "TokenKind",
    "TypecheckError",
    "alias_fold",
    "apply_binary",
    "apply_unary",
    "band_activity",
    "bit_band_matrix",
    "bit_components",
    "build_program",
    "compile_program",
    "estimate_pitch",
    "eval_ast",
    "eval_ast_sample",
    "eval_sample",
    "format_expr",
    "get_preset",
    "note_name",
    "parse",
    "presets",
    "render_bitmap",
    "render_range",
    "sawtooth_freq",
    "series",
    "to_int32",
    "tokenize",
    "typecheck",
    "wav_header",
    "write_raw",
    "write_wav",
]

import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bytebeat.analysis import (
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
from bytebeat.expr import parse
from bytebeat.semantics import SemanticsMode
from bytebeat.vm import build_program, eval_sample, render_range

C32, JS = SemanticsMode.C32, SemanticsMode.JS
A440, C256 = PitchReference.A440, PitchReference.C256


class TestBitComponents:
    def test_masked_bands_only(self):
        rows = bit_components(build_program("t&96", C32), 0, 512)
        for k, row in enumerate(rows):
            if k in (5, 6):
                assert any(row)
            else:
                assert not any(row)

    def test_counter_bit_periods(self):
        rows = bit_components(build_program("t", C32), 0, 512)
        for k, row in enumerate(rows):
            period = 2 ** (k + 1)
            assert all(row[i] == (i % period) // (period // 2) for i in range(512))

    def test_sierpinski_bit_identity(self):
        rows = bit_components(build_program("t&t>>8", C32), 0, 2**16)
        for t in range(2**16):
            for k in range(8):
                assert rows[k][t] == ((t >> k) & 1) & ((t >> (k + 8)) & 1)

    def test_reconstruction_is_exact(self):
        program = build_program("t*(0xCA98>>(t>>9&14)&15)|t>>8", C32)
        rows = bit_components(program, 1000, 4096)
        for i in range(4096):
            total = sum(rows[k][i] << k for k in range(8))
            assert total == eval_sample(program, 1000 + i)


class TestBandActivity:
    def test_all_zero_window(self):
        (act,) = band_activity([0] * 256, 256)
        assert act.duty == 0 and act.toggles == 0

    def test_alternating_window(self):
        (act,) = band_activity([0, 1] * 128, 256)
        assert act.duty == 0.5 and act.toggles == 255

    def test_gated_band_silent_until_bit13(self):
        rows = bit_components(build_program("t&96&t>>8", C32), 0, 2**14)
        bit5 = rows[5]
        assert not any(bit5[: 2**13])
        assert any(bit5[2**13 :])
        activity = band_activity(bit5, 1024)
        assert all(act.toggles == 0 for act in activity[:8])
        assert any(act.toggles > 0 for act in activity[8:])

    def test_partial_window_dropped(self):
        assert len(band_activity([0] * 700, 256)) == 2

    def test_matrix_shape(self):
        matrix = bit_band_matrix(build_program("t", C32), 0, 1024, 256)
        assert matrix.window_len == 256
        assert len(matrix.rows) == 8
        assert all(len(row) == 4 for row in matrix.rows)


class TestSeries:
    def test_fortytwo_multipliers(self):
        values = series(parse("42&t>>10"), C32, 1024, 16)
        assert values == [42 & k for k in range(16)]
        assert values == [0, 0, 2, 2, 0, 0, 2, 2, 8, 8, 10, 10, 8, 8, 10, 10]

    def test_eleven_series_at_even_indices(self):
        values = series(parse("(t^(t-2))%11"), C32, 2, 16)
        assert values == [-2, 2, 6, 2, 3, 2, 6, 2, 8, 2, 6, 2, 3, 2, 6, 2]

    def test_empty(self):
        assert series(parse("t"), C32, 8, 0) == []

    def test_stride_must_be_positive(self):
        with pytest.raises(ValueError):
            series(parse("t"), C32, 0, 4)

    def test_js_mode_values_are_floats(self):
        values = series(parse("t/2"), JS, 1, 3)
        assert values == [0.0, 0.5, 1.0]


class TestSawtoothFreq:
    def test_examples(self):
        assert sawtooth_freq(8, 8000) == 250.0
        assert sawtooth_freq(1, 8000) == 31.25
        assert sawtooth_freq(256, 8000) == 0.0

    def test_negative_multiplier(self):
        assert sawtooth_freq(-8, 8000) == 250.0

    def test_reduction_mod_256(self):
        assert sawtooth_freq(260, 8000) == sawtooth_freq(4, 8000)


class TestAliasFold:
    def test_examples(self):
        assert alias_fold(6000, 8000) == 2000.0
        assert alias_fold(250, 8000) == 250.0
        assert alias_fold(12000, 8000) == 4000.0

    @given(st.floats(0, 10**6), st.integers(1, 96000))
    def test_idempotent_into_band(self, freq, rate):
        folded = alias_fold(freq, rate)
        assert 0 <= folded <= rate / 2
        assert math.isclose(alias_fold(folded, rate), folded, abs_tol=1e-6)


class TestNoteName:
    def test_reference_identity(self):
        assert note_name(440.0, A440) == ("A", 4, 0)
        assert note_name(256.0, C256) == ("C", 4, 0)

    def test_paper_table_values(self):
        assert note_name(250.0, C256) == ("C", 4, -41)
        assert note_name(93.75, C256) == ("G", 2, -39)

    def test_non_positive(self):
        assert note_name(0.0) is None
        assert note_name(-5.0) is None

    @given(st.floats(20.0, 10000.0))
    def test_octave_doubling(self, freq):
        name, octave, cents = note_name(freq, A440)
        name2, octave2, cents2 = note_name(2 * freq, A440)
        assert (name2, octave2) == (name, octave + 1)
        assert abs(cents2 - cents) <= 1  # rounding of an identical offset

    def test_cents_range(self):
        for freq in (27.5, 100.0, 440.0, 466.0, 452.9, 453.1, 7040.0):
            _, _, cents = note_name(freq, A440)
            assert -50 <= cents < 50


class TestEstimatePitch:
    def test_sawtooth_125_hz(self):
        chunk = render_range(build_program("t*4", C32), 0, 8000, rate=8000)
        events = estimate_pitch(chunk, 1024)
        assert len(events) == 7
        for ev in events:
            assert ev.freq is not None
            assert abs(ev.freq - 125.0) <= 0.02 * 125.0

    def test_constant_is_unvoiced(self):
        chunk = render_range(build_program("128", C32), 0, 4096, rate=8000)
        assert all(ev.freq is None for ev in estimate_pitch(chunk, 1024))

    def test_fortytwo_first_window_silent(self):
        chunk = render_range(build_program("t*(42&t>>10)", C32), 0, 1024, rate=8000)
        (event,) = estimate_pitch(chunk, 1024)
        assert event.freq is None

    @pytest.mark.parametrize("v", [2, 3, 5, 8, 16, 31, 64])
    def test_sawtooth_family_tracks_fundamental(self, v):
        chunk = render_range(build_program(f"t*{v}", C32), 0, 4096, rate=8000)
        expected = sawtooth_freq(v, 8000)
        for ev in estimate_pitch(chunk, 1024):
            assert ev.freq is not None
            assert abs(ev.freq - expected) <= 0.02 * expected

    def test_events_carry_note_names(self):
        chunk = render_range(build_program("t*8", C32), 0, 2048, rate=8000)
        events = estimate_pitch(chunk, 1024, ref=C256)
        assert events[0].note == "C" and events[0].octave == 4

    def test_window_floor(self):
        chunk = render_range(build_program("t", C32), 0, 512, rate=8000)
        with pytest.raises(ValueError):
            estimate_pitch(chunk, 64)


class TestRenderBitmap:
    def test_sawtooth_antidiagonal(self):
        buf = io.BytesIO()
        render_bitmap(build_program("t", C32), 0, 256, buf)
        raw = buf.getvalue()
        header = b"P6\n256 256\n255\n"
        assert raw.startswith(header)
        pixels = raw[len(header):]
        assert len(pixels) == 256 * 256 * 3
        for x in range(256):
            row = 255 - x
            offset = (row * 256 + x) * 3
            assert pixels[offset : offset + 3] == b"\xff\xff\xff"
        assert pixels.count(b"\xff") == 256 * 3

    def test_constant_row(self):
        buf = io.BytesIO()
        render_bitmap(build_program("128", C32), 0, 4, buf)
        pixels = buf.getvalue()[len(b"P6\n4 256\n255\n"):]
        for x in range(4):
            offset = ((255 - 128) * 4 + x) * 3
            assert pixels[offset : offset + 3] == b"\xff\xff\xff"

    def test_byte_count_returned(self):
        buf = io.BytesIO()
        written = render_bitmap(build_program("t", C32), 0, 16, buf)
        assert written == len(buf.getvalue())

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bytebeat.corpus import verbatim_presets
from bytebeat.expr import parse
from bytebeat.semantics import SemanticsMode, eval_ast_sample
from bytebeat.vm import (
    Instr,
    Program,
    build_program,
    compile_program,
    eval_sample,
    render_range,
)

from strategies import any_exprs, int_exprs

C32, C64, JS = SemanticsMode.C32, SemanticsMode.C64, SemanticsMode.JS

BOUNDARY_TS = [0, 1, 255, 4095, 2**16 - 1, 2**31 - 1, 2**31, 2**32 - 1, 2**33 + 17]


class TestCompile:
    def test_identity_program(self):
        program = build_program("t", C32)
        assert [ins.op for ins in program.code] == ["loadt"]

    def test_postfix_order(self):
        program = build_program("t&t>>8", C32)
        assert list(program.code) == [
            Instr("loadt"),
            Instr("loadt"),
            Instr("pushi", 8),
            Instr("shri"),
            Instr("andi"),
        ]

    def test_constant_folding(self):
        program = build_program("2*3&t", C32)
        assert list(program.code) == [Instr("pushi", 6), Instr("loadt"), Instr("andi")]

    def test_folding_disabled(self):
        program = build_program("2*3&t", C32, fold=False)
        assert [ins.op for ins in program.code] == ["pushi", "pushi", "muli", "loadt", "andi"]

    def test_max_stack_matches_true_depth(self):
        for source, depth in [
            ("t", 1),
            ("t&t>>8", 3),
            ("t?t:t", 3),
            ("1+(2+(3+(4+t)))", 5),
        ]:
            program = build_program(source, C32, fold=False)
            assert program.max_stack == depth, source

    def test_promotion_inserted_for_mixed_operands(self):
        ops = [ins.op for ins in build_program("t/1e7", C32).code]
        assert ops == ["loadt", "i2d", "pushd", "divd"]
        ops = [ins.op for ins in build_program("1e7/t", C32).code]
        assert ops == ["pushd", "loadt", "i2d", "divd"]

    def test_js_everything_is_double(self):
        program = build_program("t&t>>8", JS)
        assert [ins.op for ins in program.code] == ["loadt", "loadt", "pushd", "shrj", "andj"]

    def test_cast_of_int_is_a_no_op(self):
        assert [ins.op for ins in build_program("(int)t", C32).code] == ["loadt"]

    def test_invalid_postfix_rejected(self):
        with pytest.raises(ValueError):
            Program(C32, (Instr("andi"),))
        with pytest.raises(ValueError):
            Program(C32, (Instr("loadt"), Instr("loadt")))
        with pytest.raises(ValueError):
            Program(C32, (Instr("bogus"),))


class TestEvalSample:
    def test_t_mod_256(self):
        program = build_program("t", C32)
        assert eval_sample(program, 300) == 44

    def test_low_byte_of_product(self):
        program = build_program("t*(42&t>>10)", C32)
        assert eval_sample(program, 2048) == 0

    def test_wraparound_percussion_at_zero(self):
        program = build_program("(t*9&t>>4|t*5&t>>7|t*3&t>>10)-1", C32)
        assert eval_sample(program, 0) == 255


class TestRenderRange:
    def test_byte_wrap(self):
        assert list(render_range(build_program("t", C32), 254, 3).data) == [254, 255, 0]

    def test_sierpinski_start(self):
        assert list(render_range(build_program("t&t>>8", C32), 256, 2).data) == [0, 1]

    def test_empty_range(self):
        chunk = render_range(build_program("t", C32), 123, 0)
        assert chunk.data == b"" and chunk.t0 == 123

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            render_range(build_program("t", C32), 0, -1)

    def test_wrap_law_at_width(self):
        program = build_program("t*9", C32)
        for t in (0, 999, 123456):
            assert eval_sample(program, t) == eval_sample(program, t + 2**32)


class TestDifferential:
    """The compiled VM must agree with the tree-walking oracle."""

    @pytest.mark.parametrize("preset", verbatim_presets(), ids=lambda p: p.id)
    def test_corpus_sampled(self, preset):
        tree = parse(preset.source)
        for mode in preset.modes:
            program = compile_program(tree, mode)
            ts = list(range(0, 2048)) + [2**16 - 1, 2**31 - 1, 2**31, 2**32 - 1]
            for t in ts:
                assert eval_sample(program, t) == eval_ast_sample(tree, t, mode), (
                    preset.id, mode, t,
                )

    @settings(max_examples=60)
    @given(int_exprs, st.sampled_from(BOUNDARY_TS))
    def test_random_int_exprs_all_modes(self, tree, t):
        for mode in (C32, C64, JS):
            program = compile_program(tree, mode)
            assert eval_sample(program, t) == eval_ast_sample(tree, t, mode)

    @settings(max_examples=60)
    @given(any_exprs, st.sampled_from(BOUNDARY_TS))
    def test_random_js_exprs(self, tree, t):
        program = compile_program(tree, JS)
        assert eval_sample(program, t) == eval_ast_sample(tree, t, JS)

    @settings(max_examples=40)
    @given(int_exprs)
    def test_folding_preserves_semantics(self, tree):
        for mode in (C32, JS):
            folded = compile_program(tree, mode, fold=True)
            plain = compile_program(tree, mode, fold=False)
            for t in (0, 1, 255, 4096, 2**31):
                assert eval_sample(folded, t) == eval_sample(plain, t)


def test_folding_agrees_over_range():
    source = "(1000+24)*2&t|t>>(4/2)"
    for mode in (C32, C64, JS):
        folded = build_program(source, mode, fold=True)
        plain = build_program(source, mode, fold=False)
        assert len(folded.code) < len(plain.code)
        assert render_range(folded, 0, 2**16).data == render_range(plain, 0, 2**16).data


def test_concurrent_evaluations_share_a_program():
    import threading

    program = build_program("t*(42&t>>10)", C32)
    expected = render_range(program, 0, 40000).data
    results = {}

    def worker(idx):
        results[idx] = render_range(program, 0, 40000).data

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(buf == expected for buf in results.values())

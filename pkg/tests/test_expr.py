import pytest
from hypothesis import given

from bytebeat.expr import (
    Binary,
    Const,
    ParseError,
    Ternary,
    Token,
    TokenKind,
    Unary,
    VarT,
    format_expr,
    parse,
    tokenize,
)
from bytebeat.corpus import presets

from strategies import any_exprs


def kinds_and_texts(source):
    return [(tok.kind, tok.text) for tok in tokenize(source)]


class TestTokenize:
    def test_simple(self):
        assert kinds_and_texts("t&t>>8") == [
            (TokenKind.VAR_T, "t"),
            (TokenKind.OP, "&"),
            (TokenKind.VAR_T, "t"),
            (TokenKind.OP, ">>"),
            (TokenKind.INT, "8"),
        ]

    def test_hex_and_parens(self):
        texts = [tok.text for tok in tokenize("t*(0xCA98>>(t>>9&14)&15)|t>>8")]
        assert texts == [
            "t", "*", "(", "0xCA98", ">>", "(", "t", ">>", "9",
            "&", "14", ")", "&", "15", ")", "|", "t", ">>", "8",
        ]

    def test_unknown_identifier(self):
        with pytest.raises(ParseError) as err:
            tokenize("u+1")
        assert err.value.pos == 0
        assert err.value.found == "u"

    def test_positions_strictly_increase(self):
        toks = tokenize("t * ( int ) ( t + 0x1F )")
        positions = [tok.pos for tok in toks]
        assert positions == sorted(set(positions))

    def test_concatenation_reproduces_source(self):
        source = "t * (int) ( t / 1e7 ) ? ~t : -2.5"
        rebuilt = "".join(tok.text for tok in tokenize(source))
        assert rebuilt.replace(" ", "") == source.replace(" ", "")

    def test_cast_with_inner_whitespace(self):
        toks = tokenize("( int )t")
        assert toks[0].kind is TokenKind.CAST_INT
        assert toks[1].kind is TokenKind.VAR_T

    def test_float_forms(self):
        for text in ("1e7", "2.5", "1.", ".5", "1E+3", "2e-4"):
            (tok,) = tokenize(text)
            assert tok.kind is TokenKind.FLOAT, text

    def test_foreign_character(self):
        with pytest.raises(ParseError) as err:
            tokenize("t;t")
        assert err.value.pos == 1

    def test_other_cast_is_rejected(self):
        with pytest.raises(ParseError) as err:
            tokenize("(char)t")
        assert err.value.pos == 1


class TestParse:
    def test_precedence_ladder(self):
        t = VarT()
        assert parse("t*5&t>>7|t*3&t>>8") == Binary(
            "|",
            Binary("&", Binary("*", t, Const(5)), Binary(">>", t, Const(7))),
            Binary("&", Binary("*", t, Const(3)), Binary(">>", t, Const(8))),
        )

    def test_ternary_with_unary_minus(self):
        t = VarT()
        assert parse("t>>6&1?t>>5:-t>>4") == Ternary(
            Binary("&", Binary(">>", t, Const(6)), Const(1)),
            Binary(">>", t, Const(5)),
            Binary(">>", Unary("neg", t), Const(4)),
        )

    def test_double_ampersand_position(self):
        with pytest.raises(ParseError) as err:
            parse("t&&t")
        assert err.value.pos == 2

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError) as err:
            parse("t*((42&t>>10)")
        assert err.value.pos == len("t*((42&t>>10)")

    def test_dangling_operator(self):
        with pytest.raises(ParseError) as err:
            parse("t+")
        assert err.value.pos == 2

    def test_empty_ternary_branch(self):
        with pytest.raises(ParseError):
            parse("t?t:")

    def test_cast_binds_like_unary(self):
        assert parse("(int)t/1e7") == Binary("/", Unary("cast", VarT()), Const(1e7))

    def test_additive_binds_tighter_than_shift(self):
        t = VarT()
        assert parse("t>>7-t") == Binary(">>", t, Binary("-", Const(7), t))

    def test_ternary_right_associative(self):
        t = VarT()
        assert parse("t?1:t?2:3") == Ternary(
            t, Const(1), Ternary(t, Const(2), Const(3))
        )

    def test_error_positions_inside_source(self):
        for bad in ("t&&t", "((t)", "t+", "5?:t", "t^^t", "()"):
            with pytest.raises(ParseError) as err:
                parse(bad)
            assert 0 <= err.value.pos <= len(bad)


class TestFormat:
    def test_no_redundant_parens(self):
        tree = parse("t*5&t>>7|t*3&t>>8")
        assert format_expr(tree) == "t*5&t>>7|t*3&t>>8"

    def test_const(self):
        assert format_expr(Const(42)) == "42"

    def test_forced_parens(self):
        assert format_expr(Binary("*", VarT(), Binary("+", VarT(), Const(1)))) == "t*(t+1)"

    def test_corpus_round_trip(self):
        for preset in presets():
            if preset.status == "truncated":
                continue
            tree = parse(preset.source)
            assert parse(format_expr(tree)) == tree, preset.id

    @given(any_exprs)
    def test_round_trip(self, tree):
        assert parse(format_expr(tree)) == tree

    @given(any_exprs)
    def test_parens_are_minimal(self, tree):
        text = format_expr(tree)
        for start, end in _paren_pairs(text):
            if text[start : end + 1] == "(int)":
                continue
            stripped = text[:start] + text[start + 1 : end] + text[end + 1 :]
            try:
                reparsed = parse(stripped)
            except ParseError:
                continue
            assert reparsed != tree, f"removable parens in {text!r} at {start}"


def _paren_pairs(text):
    stack, pairs = [], []
    for i, ch in enumerate(text):
        if ch == "(":
            stack.append(i)
        elif ch == ")":
            pairs.append((stack.pop(), i))
    return pairs


def test_token_is_frozen():
    tok = Token(TokenKind.INT, "8", 0)
    with pytest.raises(AttributeError):
        tok.text = "9"


def test_ast_is_frozen():
    node = parse("t+1")
    with pytest.raises(AttributeError):
        node.op = "-"

from plkit.database import Database, OperatorDef
from plkit.lexer import (
    ATOM_KINDS,
    TRIVIA_KINDS,
    Token,
    TokenKind,
    TokenRole,
    classify,
    tokenize,
)


def toks(source):
    tokens, diagnostics = tokenize(source, "<t>")
    assert not diagnostics, [d.message for d in diagnostics]
    return [t for t in tokens if t.kind not in TRIVIA_KINDS]


def kinds(source):
    return [t.kind for t in toks(source)]


def test_lossless_stream():
    source = "foo(X) :- % hi\n  bar(X), /* c */ X > 0.\n"
    tokens, diagnostics = tokenize(source, "<t>")
    assert not diagnostics
    assert "".join(t.text for t in tokens) == source


def test_atom_kinds():
    got = toks("foo 'Bar baz' + ! ;")
    assert [t.kind for t in got] == [
        TokenKind.NAME_ATOM, TokenKind.QUOTED_ATOM, TokenKind.SYMBOL_ATOM,
        TokenKind.SOLO_CHAR, TokenKind.SOLO_CHAR,
    ]
    assert all(t.kind in ATOM_KINDS for t in got)
    assert got[1].value == "Bar baz"
    assert got[1].atom_name() == "Bar baz"


def test_variables():
    got = toks("X _foo _ Abc1")
    assert all(t.kind == TokenKind.VARIABLE for t in got)
    assert [t.text for t in got] == ["X", "_foo", "_", "Abc1"]


def test_integers():
    got = toks("0 42 0x1F 0o17 0b101 0'a 0''' 0'\\n")
    assert all(t.kind == TokenKind.INTEGER for t in got)
    assert [t.value for t in got] == [0, 42, 31, 15, 5, ord("a"), ord("'"), 10]


def test_floats():
    got = toks("3.14 1.0e10 2.5E-3 0.0")
    assert all(t.kind == TokenKind.FLOAT for t in got)
    assert got[0].value == 3.14
    assert got[1].value == 1.0e10
    assert got[2].value == 2.5e-3


def test_float_requires_fraction_digits():
    # "1.e3" is integer 1, End, then atom e3 — not a float.
    got = toks("1. ")
    assert [t.kind for t in got] == [TokenKind.INTEGER, TokenKind.END]


def test_quoted_atom_escapes():
    got = toks(r"'a\nb' 'it''s' 'x\\y' 'u\x41\'")
    assert [t.value for t in got] == ["a\nb", "it's", "x\\y", "uA"]


def test_strings():
    got = toks('"hello" "a\\"b" ""')
    assert all(t.kind == TokenKind.STRING for t in got)
    assert [t.value for t in got] == ["hello", 'a"b', ""]


def test_symbol_atom_runs():
    assert [t.text for t in toks("=.. --> ?- @< \\+")] == [
        "=..", "-->", "?-", "@<", "\\+",
    ]


def test_end_token():
    # '.' followed by layout, comment, or EOF ends a sentence.
    got = toks("a. b .% c\nd.")
    assert [t.kind for t in got] == [
        TokenKind.NAME_ATOM, TokenKind.END,
        TokenKind.NAME_ATOM, TokenKind.END,
        TokenKind.NAME_ATOM, TokenKind.END,
    ]


def test_dot_in_symbol_run_is_not_end():
    got = toks("a =.. b.")
    assert TokenKind.END in [t.kind for t in got]
    assert [t.text for t in got][1] == "=.."


def test_open_paren_context():
    got = toks("foo(x), foo (x), X(y)")
    opens = [t.kind for t in got if t.kind in (TokenKind.OPEN_PAREN,
                                               TokenKind.OPEN_PAREN_CT)]
    assert opens == [TokenKind.OPEN_PAREN_CT, TokenKind.OPEN_PAREN,
                     TokenKind.OPEN_PAREN_CT]


def test_comments_kept_in_stream():
    tokens, _ = tokenize("% line\n/* block */ a.", "<t>")
    comment_kinds = [t.kind for t in tokens if t.kind in TRIVIA_KINDS]
    assert TokenKind.LINE_COMMENT in comment_kinds
    assert TokenKind.BLOCK_COMMENT in comment_kinds


def test_spans_are_one_based():
    tokens, _ = tokenize("ab\ncd.", "<t>")
    cd = [t for t in tokens if t.text == "cd"][0]
    assert (cd.span.start_line, cd.span.start_col) == (2, 1)
    assert (cd.span.end_line, cd.span.end_col) == (2, 3)


def test_invalid_character_diagnostic():
    tokens, diagnostics = tokenize("a \x01 b.", "<t>")
    assert any(t.kind == TokenKind.INVALID for t in tokens)
    assert len(diagnostics) == 1
    assert diagnostics[0].code == "invalid_character"


def test_unterminated_quoted_atom():
    _, diagnostics = tokenize("'oops", "<t>")
    assert any(d.code == "unterminated_quoted_atom" for d in diagnostics)


def test_unterminated_block_comment():
    _, diagnostics = tokenize("/* never closed", "<t>")
    assert any(d.code == "unterminated_block_comment" for d in diagnostics)


def test_classify_against_operator_table():
    db = Database()

    def role(text):
        token = toks(text)[0]
        return classify(token, db.operators)

    assert role("foo") == TokenRole.OPERAND
    assert role("mod") == TokenRole.INFIX_OP
    assert role("\\+") == TokenRole.PREFIX_OP
    assert role("-") == TokenRole.AMBIGUOUS  # prefix and infix
    assert role("'+'") == TokenRole.OPERAND  # quoting disables operator-hood


def test_classify_follows_table_changes():
    db = Database()
    token = toks("loves")[0]
    assert classify(token, db.operators) == TokenRole.OPERAND
    db.operators.add(OperatorDef("loves", 700, "xfx"))
    assert classify(token, db.operators) == TokenRole.INFIX_OP

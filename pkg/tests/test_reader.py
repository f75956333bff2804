from conftest import read_one, read_term
from plkit.database import Database
from plkit.engine import Loader, consult_source
from plkit.lexer import tokenize
from plkit.reader import Reader
from plkit.terms import Atom, Compound, Int, Var
from term_gen import to_tuple


def tup(text, db=None):
    return to_tuple(read_term(text, db))


def read_source(source, db=None):
    db = db or Database()
    tokens, lex_diags = tokenize(source, "<t>")
    reader = Reader(tokens, db, "<t>")
    sentences, diagnostics = [], list(lex_diags)
    while True:
        result = reader.read_sentence()
        diagnostics.extend(result.diagnostics)
        if result.at_eof:
            break
        if result.sentence is not None:
            sentences.append(result.sentence)
    return sentences, diagnostics


# --- structure ------------------------------------------------------------


def test_atomic_terms():
    assert tup("foo") == ("atom", "foo")
    assert tup("'odd atom'") == ("atom", "odd atom")
    assert tup("42") == ("int", 42)
    assert tup("3.5") == ("float", 3.5)
    assert tup('"text"') == ("str", "text")
    assert tup("X") == ("var", "X")


def test_canonical_compound():
    assert tup("f(a, B, 1)") == (
        "compound", "f", [("atom", "a"), ("var", "B"), ("int", 1)])


def test_space_before_paren_is_not_argument_list():
    # f (x) reads as prefix-less atom applied to nothing: just an error,
    # unless f is an operator.  With default table, 'f' is plain: the
    # parenthesis cannot attach.
    _, diagnostics = read_source("f (x).")
    assert diagnostics  # unexpected '('


def test_operator_precedence_tree():
    assert tup("1 + 2 * 3") == (
        "compound", "+",
        [("int", 1), ("compound", "*", [("int", 2), ("int", 3)])])
    assert tup("(1 + 2) * 3") == (
        "compound", "*",
        [("compound", "+", [("int", 1), ("int", 2)]), ("int", 3)])


def test_yfx_left_associative():
    assert tup("1 - 2 - 3") == (
        "compound", "-",
        [("compound", "-", [("int", 1), ("int", 2)]), ("int", 3)])


def test_xfy_right_associative():
    assert tup("a ; b ; c") == (
        "compound", ";",
        [("atom", "a"), ("compound", ";", [("atom", "b"), ("atom", "c")])])


def test_xfx_not_associative():
    _, diagnostics = read_source("a = b = c.")
    assert any(d.code in ("unexpected_token", "operator_clash")
               for d in diagnostics)


def test_comma_nests_right():
    assert tup("a, b, c") == (
        "compound", ",",
        [("atom", "a"), ("compound", ",", [("atom", "b"), ("atom", "c")])])


def test_clause_structure():
    sentence = read_one("head(X) :- body(X), more.")
    assert sentence.kind == "clause"
    assert to_tuple(sentence.head) == ("compound", "head", [("var", "X")])
    assert to_tuple(sentence.body)[1] == ","


def test_fact_and_directive_and_dcg():
    assert read_one("just_a_fact.").kind == "fact"
    assert read_one(":- dynamic(foo/1).").kind == "directive"
    assert read_one("greeting --> [hello], name.").kind == "dcg_rule"


def test_prefix_operators():
    assert tup("- X") == ("compound", "-", [("var", "X")])
    assert tup("\\+ a") == ("compound", "\\+", [("atom", "a")])
    assert tup(":- a") == ("compound", ":-", [("atom", "a")])


def test_negative_number_literals():
    assert tup("-1") == ("int", -1)
    assert tup("-2.5") == ("float", -2.5)
    assert tup("1 - 2") == ("compound", "-", [("int", 1), ("int", 2)])
    # Adjacent after an operand: infix minus, not a negative literal.
    assert tup("X-1") == ("compound", "-", [("var", "X"), ("int", 1)])


def test_operator_atom_as_operand():
    assert tup("f(+)") == ("compound", "f", [("atom", "+")])
    assert tup("[=, mod]") == (
        "compound", ".",
        [("atom", "="),
         ("compound", ".", [("atom", "mod"), ("atom", "[]")])])


def test_lists():
    assert tup("[]") == ("atom", "[]")
    assert tup("[a]") == ("compound", ".", [("atom", "a"), ("atom", "[]")])
    assert tup("[a, b | T]") == (
        "compound", ".",
        [("atom", "a"),
         ("compound", ".", [("atom", "b"), ("var", "T")])])


def test_curly():
    assert tup("{}") == ("atom", "{}")
    assert tup("{a, b}") == (
        "compound", "{}",
        [("compound", ",", [("atom", "a"), ("atom", "b")])])


def test_argument_priority_is_999():
    # A naked 1200-priority term cannot be an argument...
    _, diagnostics = read_source("f(a :- b).")
    assert diagnostics
    # ...but a parenthesized one can.
    assert tup("f((a :- b))") == (
        "compound", "f",
        [("compound", ":-", [("atom", "a"), ("atom", "b")])])


def test_variable_identity_per_sentence():
    term = read_term("f(X, X, Y)")
    x1, x2, y = term.args
    assert x1.vid == x2.vid
    assert y.vid != x1.vid
    # '_' is always fresh
    a, b = read_term("g(_, _)").args
    assert a.vid != b.vid


def test_variables_not_shared_across_sentences():
    sentences, _ = read_source("f(X). g(X).")
    v1 = sentences[0].term.args[0]
    v2 = sentences[1].term.args[0]
    assert v1.vid != v2.vid


def test_spans_cover_source():
    term = read_term("foo(bar, X)")
    assert term.span is not None
    assert term.span.start_offset == 0
    assert term.span.end_offset == len("foo(bar, X)")
    assert term.functor_span.start_offset == 0
    assert term.functor_span.end_offset == 3
    assert term.args[0].span.start_offset == 4


def test_end_span_recorded():
    sentence = read_one("a.")
    assert sentence.end_span.start_offset == 1
    assert sentence.end_span.end_offset == 2


def test_leading_comments_attached():
    sentences, diagnostics = read_source("% doc line\n%% more\nfoo.\nbar.")
    assert not diagnostics
    assert [t.text for t in sentences[0].leading_comments] == [
        "% doc line", "%% more"]
    assert sentences[1].leading_comments == []


# --- diagnostics and recovery ---------------------------------------------


def test_missing_end_diagnostic():
    _, diagnostics = read_source("foo(a)")
    assert any(d.code == "missing_end" for d in diagnostics)


def test_recovery_drops_to_next_end():
    sentences, diagnostics = read_source("foo(. bar. baz.")
    assert len(diagnostics) == 1
    assert [to_tuple(s.term) for s in sentences] == [
        ("atom", "bar"), ("atom", "baz")]


def test_each_broken_sentence_reports_once():
    source = "ok1. f(]. ok2. ) broken. ok3."
    sentences, diagnostics = read_source(source)
    assert len([s for s in sentences]) == 3
    assert len(diagnostics) == 2


def test_unbalanced_close_diagnostic():
    _, diagnostics = read_source("f(a)).")
    assert diagnostics


def test_operator_clash_reported():
    _, diagnostics = read_source("a :- b :- c.")
    assert diagnostics


# --- dynamic grammar ------------------------------------------------------


def test_directive_reshapes_grammar_mid_file():
    db = Database()
    source = ":- op(700, xfx, ===).\na === b.\n"
    sentences, diagnostics = consult_source(source, db, Loader(), "<t>")
    assert not diagnostics
    assert to_tuple(sentences[1].term) == (
        "compound", "===", [("atom", "a"), ("atom", "b")])


def test_operator_use_before_declaration_fails():
    db = Database()
    source = "a === b.\n:- op(700, xfx, ===).\n"
    sentences, diagnostics = consult_source(source, db, Loader(), "<t>")
    assert len(diagnostics) == 1
    assert len(sentences) == 1  # only the directive survives


def test_operator_removal_mid_file():
    db = Database()
    source = (":- op(700, xfx, ===).\na === b.\n"
              ":- op(0, xfx, ===).\nc === d.\n")
    _, diagnostics = consult_source(source, db, Loader(), "<t>")
    assert len(diagnostics) == 1


def test_read_at_reduced_priority():
    db = Database()
    tokens, _ = tokenize("a, b", "<t>")
    reader = Reader(tokens, db, "<t>")
    term = reader.parse_term(999)
    # At 999 the comma operator is out of reach: only 'a' parses.
    assert to_tuple(term) == ("atom", "a")

import os

import pytest

from plkit.diagnostics import Severity
from plkit.workspace import (
    ProjectConfig,
    StaleFixError,
    apply_fix,
    build_project,
    complete,
    hover,
    outline,
    quick_fixes,
)

B_SOURCE = """\
:- module(b, [f/1, h/2]).

% Author: Jan
% Description: Wraps g/1.
f(X) :- g(X).

g(1).

h(X, Y) :- f(X), f(Y).
"""

A_SOURCE = """\
:- module(a, [main/0]).
:- use_module(b, [f/1]).

main :- f(1).
"""


def build(project, files, **cfg):
    root = project(files)
    return build_project(root, ProjectConfig(**cfg) if cfg else None), root


def errors(model):
    return [d for d in model.diagnostics if d.severity == Severity.ERROR]


def by_code(model, code):
    return [d for d in model.diagnostics if d.code == code]


def fpath(root, name):
    return os.path.join(root, name)


def at(model, root, name, needle):
    file = fpath(root, name)
    return file, model.sources[file].index(needle)


# --- project building and linking -----------------------------------------


def test_clean_project_has_no_diagnostics(project):
    model, _ = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    assert model.diagnostics == []


def test_each_file_gets_isolated_database(project):
    model, root = build(project, {
        "one.pl": ":- op(650, xfx, ~~>).\na ~~> b.\n",
        "two.pl": "plain(fact).\n",
    })
    one = model.file_index(fpath(root, "one.pl"))
    two = model.file_index(fpath(root, "two.pl"))
    assert one.db.operators.infix("~~>") is not None
    assert two.db.operators.infix("~~>") is None


def test_undefined_predicate_error(project):
    model, root = build(project, {
        "a.pl": ":- module(a, [main/0]).\nmain :- missing(1).\n"})
    diags = by_code(model, "undefined_predicate")
    assert len(diags) == 1
    diag = diags[0]
    assert diag.severity == Severity.ERROR
    assert diag.data["name"] == "missing"
    assert diag.data["arity"] == 1


def test_did_you_mean_arity_neighbor(project):
    model, _ = build(project, {
        "a.pl": "p(1, 2).\nq :- p(1).\n"})
    diags = by_code(model, "undefined_predicate")
    assert len(diags) == 1
    assert any("p/2" in message for _, message in diags[0].related)


def test_import_makes_predicate_visible(project):
    model, _ = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    assert by_code(model, "undefined_predicate") == []


def test_missing_import_is_undefined(project):
    source = A_SOURCE.replace(":- use_module(b, [f/1]).\n", "")
    model, _ = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    assert len(by_code(model, "undefined_predicate")) == 1


def test_not_exported_error(project):
    source = A_SOURCE.replace("[f/1]", "[f/1, g/1]").replace(
        "main :- f(1).", "main :- f(1), g(1).")
    model, _ = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    diags = by_code(model, "not_exported")
    assert len(diags) == 1
    assert diags[0].severity == Severity.ERROR
    assert "g/1" in diags[0].message


def test_unresolved_import_warning(project):
    model, _ = build(project, {
        "a.pl": ":- module(a, []).\n:- use_module(phantom).\n"})
    assert any(d.code == "unresolved_import" and d.severity == Severity.WARNING
               for d in model.diagnostics)


def test_builtins_are_never_undefined(project):
    model, _ = build(project, {
        "a.pl": "p(X) :- X = 1, X > 0, \\+ fail.\n"})
    assert by_code(model, "undefined_predicate") == []


def test_dynamic_predicates_are_never_undefined(project):
    model, _ = build(project, {
        "a.pl": ":- dynamic(counter/1).\nbump :- counter(_).\n"})
    assert by_code(model, "undefined_predicate") == []


def test_singleton_variable_warning(project):
    model, _ = build(project, {"a.pl": "p(X, Lonely) :- q(X).\nq(1).\n"})
    diags = by_code(model, "singleton_variable")
    assert len(diags) == 1
    assert "Lonely" in diags[0].message
    assert diags[0].severity == Severity.WARNING


def test_underscore_prefix_suppresses_singleton(project):
    model, _ = build(project, {"a.pl": "p(X, _Extra) :- q(X).\nq(1).\n"})
    assert by_code(model, "singleton_variable") == []


def test_discontiguous_clauses_warning(project):
    model, _ = build(project, {
        "a.pl": "p(1).\nq(1).\np(2).\n"})
    diags = by_code(model, "discontiguous_clauses")
    assert len(diags) == 1
    assert "p/1" in diags[0].message


def test_discontiguous_directive_suppresses_warning(project):
    model, _ = build(project, {
        "a.pl": ":- discontiguous(p/1).\np(1).\nq(1).\np(2).\n"})
    assert by_code(model, "discontiguous_clauses") == []


def test_dcg_rules_link_at_expanded_arity(project):
    model, _ = build(project, {
        "a.pl": "s --> np, vp.\nnp --> [dog].\nvp --> [barks].\n"})
    assert by_code(model, "undefined_predicate") == []


def test_diagnostics_deterministic_under_file_order(project):
    files = {"a.pl": A_SOURCE, "b.pl": B_SOURCE,
             "c.pl": "x :- ghost(1).\n"}
    root = project(files)
    paths = sorted(fpath(root, n) for n in files)
    first = build_project(root, file_order=paths)
    second = build_project(root, file_order=list(reversed(paths)))
    assert ([d.machine_line() for d in first.diagnostics]
            == [d.machine_line() for d in second.diagnostics])


# --- outline --------------------------------------------------------------


def test_outline_shape_and_order(project):
    model, root = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    items = outline(fpath(root, "b.pl"), model)
    assert [(i.kind, i.label) for i in items] == [
        ("Module", "b"),
        ("ExportedPredicate", "f/1"),
        ("PrivatePredicate", "g/1"),
        ("ExportedPredicate", "h/2"),
    ]
    offsets = [i.target_span.start_offset for i in items]
    assert offsets == sorted(offsets)


def test_outline_imports_and_dcg(project):
    model, root = build(project, {
        "a.pl": ":- use_module(other).\ngreeting --> [hi].\np(1).\n",
        "other.pl": "o(1).\n"})
    items = outline(fpath(root, "a.pl"), model)
    kinds = [i.kind for i in items]
    assert "ImportDirective" in kinds
    assert "DcgNonterminal" in kinds
    labels = [i.label for i in items]
    assert "greeting//0" in labels


# --- hover ----------------------------------------------------------------


def test_hover_user_predicate(project):
    model, root = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    file, offset = at(model, root, "a.pl", "f(1)")
    info = hover(file, offset, "definition", model)
    assert info is not None
    assert "f(X)" in info.text
    assert "b.pl:5" in info.text


def test_hover_builtin_catalog(project):
    model, root = build(project, {"a.pl": "p(X) :- X = 1.\n"})
    file, offset = at(model, root, "a.pl", "=")
    info = hover(file, offset, "definition", model)
    assert info is not None
    assert "Unify" in info.text


def test_hover_operator(project):
    model, root = build(project, {
        "a.pl": ":- op(700, xfx, ===).\np :- q.\nq.\n"})
    file, offset = at(model, root, "a.pl", "===")
    info = hover(file, offset, "definition", model)
    assert info is not None
    assert "op(700, xfx, ===)" in info.text


def test_hover_import_target_lists_exports(project):
    model, root = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    file = fpath(root, "a.pl")
    offset = model.sources[file].index("use_module(b") + len("use_module(")
    info = hover(file, offset, "definition", model)
    assert info is not None
    assert "f/1" in info.text and "h/2" in info.text


def test_hover_doc_mode(project):
    model, root = build(project, {"a.pl": A_SOURCE, "b.pl": B_SOURCE})
    file, offset = at(model, root, "b.pl", "f(X)")
    info = hover(file, offset, "doc", model)
    assert info is not None
    assert "Jan" in info.text
    assert "Wraps g/1." in info.text


def test_hover_nothing_on_layout(project):
    model, root = build(project, {"a.pl": "p(1).\n"})
    file = fpath(root, "a.pl")
    assert hover(file, model.sources[file].index("("), "definition",
                 model) is None


# --- completion -----------------------------------------------------------


def complete_at(model, root, name, needle):
    file = fpath(root, name)
    offset = model.sources[file].index(needle) + len(needle)
    return complete(file, offset, model)


def test_complete_local_before_imported_before_builtin(project):
    model, root = build(project, {
        "a.pl": (":- module(a, []).\n:- use_module(b, [f/1]).\n"
                 "fix_it :- f(1).\nfar(1).\n"),
        "b.pl": B_SOURCE})
    items = complete_at(model, root, "a.pl", "fix_it :- f")
    labels = [i.label for i in items]
    assert "f/1" in labels
    assert labels.index("fix_it/0") < labels.index("fail/0")
    assert labels.index("f/1") < labels.index("fail/0")


def test_complete_builtin_member(project):
    model, root = build(project, {"a.pl": "p :- mem_x.\nmem_x.\n"})
    items = complete_at(model, root, "a.pl", "p :- mem")
    assert any(i.label == "member/2" for i in items)


def test_complete_variable_prefix(project):
    model, root = build(project, {
        "a.pl": "p(Count, Counter) :- Count > 0, Co.\n"})
    items = complete_at(model, root, "a.pl", "Count > 0, Co")
    labels = [i.label for i in items]
    assert "Count" in labels and "Counter" in labels
    assert all(i.kind == "Variable" for i in items)


def test_completion_cap(project):
    root = project({"a.pl": "p :- q.\nq.\n"})
    model = build_project(root, ProjectConfig(completion_cap=3))
    file = fpath(root, "a.pl")
    offset = model.sources[file].index("p :- q") + len("p :- ")
    items = complete(file, offset + 1, model)
    assert len(items) <= 3


# --- quick fixes ----------------------------------------------------------


def test_fix_undefined_by_import(project):
    source = A_SOURCE.replace(":- use_module(b, [f/1]).\n", "")
    model, root = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    diag = by_code(model, "undefined_predicate")[0]
    fixes = quick_fixes(diag, model)
    assert len(fixes) == 1
    assert "Import f/1" in fixes[0].title
    updated = apply_fix(fixes[0], model.sources)
    for file, content in updated.items():
        with open(file, "w", encoding="utf-8") as fh:
            fh.write(content)
    rebuilt = build_project(root)
    assert errors(rebuilt) == []


def test_fix_not_exported_by_extending_exports(project):
    source = A_SOURCE.replace("[f/1]", "[f/1, g/1]").replace(
        "main :- f(1).", "main :- f(1), g(1).")
    model, root = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    diag = by_code(model, "not_exported")[0]
    fixes = quick_fixes(diag, model)
    assert fixes
    updated = apply_fix(fixes[0], model.sources)
    b_file = fpath(root, "b.pl")
    assert "g/1" in updated[b_file].splitlines()[0]
    for file, content in updated.items():
        with open(file, "w", encoding="utf-8") as fh:
            fh.write(content)
    rebuilt = build_project(root)
    assert errors(rebuilt) == []


def test_stale_fix_rejected(project):
    source = A_SOURCE.replace(":- use_module(b, [f/1]).\n", "")
    model, root = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    diag = by_code(model, "undefined_predicate")[0]
    fix = quick_fixes(diag, model)[0]
    drifted = dict(model.sources)
    for file in list(drifted):
        drifted[file] = "% edited meanwhile\n" + drifted[file]
    with pytest.raises(StaleFixError):
        apply_fix(fix, drifted)


def test_apply_fix_does_not_mutate_input(project):
    source = A_SOURCE.replace(":- use_module(b, [f/1]).\n", "")
    model, _ = build(project, {"a.pl": source, "b.pl": B_SOURCE})
    diag = by_code(model, "undefined_predicate")[0]
    fix = quick_fixes(diag, model)[0]
    before = dict(model.sources)
    apply_fix(fix, model.sources)
    assert model.sources == before

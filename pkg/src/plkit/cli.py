"""Command-line front end: check, outline, hover, complete, fix, doc, repl."""

from __future__ import annotations

import argparse
import os
import sys

from .database import Database
from .diagnostics import Diagnostic, Severity
from .docgen import generate_html, project_docs
from .engine import Loader, repl as run_repl
from .workspace import (
    ProjectConfig,
    ProjectModel,
    StaleFixError,
    apply_fix,
    build_project,
    complete,
    hover,
    outline,
    quick_fixes,
)

CONFIG_FILE = "plkit.cfg"

EXIT_OK = 0
EXIT_ERRORS = 1
EXIT_FAILURE = 2


def read_config_file(root: str) -> dict[str, list[str]]:
    """Flat key/value config; repeated keys accumulate."""
    path = os.path.join(root, CONFIG_FILE)
    values: dict[str, list[str]] = {}
    if not os.path.isfile(path):
        return values
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, _, value = line.partition("=")
            values.setdefault(key.strip(), []).append(value.strip())
    return values


def make_config(root: str, args) -> ProjectConfig:
    file_cfg = read_config_file(root)
    globs = tuple(args.glob) if args.glob else tuple(file_cfg.get("glob", [])) or ("**/*.pl",)
    libs = tuple(args.lib) if args.lib else tuple(file_cfg.get("lib", []))
    cap = 50
    if file_cfg.get("cap"):
        cap = int(file_cfg["cap"][0])
    doc_out = file_cfg.get("doc_out", ["prologdoc"])[0]
    return ProjectConfig(globs=globs, library_paths=libs,
                         completion_cap=cap, doc_out=doc_out)


def output_format(args, root: str) -> str:
    if args.format:
        return args.format
    file_cfg = read_config_file(root)
    if file_cfg.get("format"):
        return file_cfg["format"][0]
    return "human"


def print_diagnostics(diagnostics: list[Diagnostic], fmt: str, out) -> None:
    for diag in diagnostics:
        out.write((diag.machine_line() if fmt == "machine" else diag.human_line()) + "\n")


def _build(root: str, args) -> ProjectModel:
    return build_project(root, make_config(root, args))


def _to_offset(source: str, line: int, col: int):
    if line < 1 or col < 1:
        return None
    lines = source.split("\n")
    if line > len(lines):
        return None
    if col > len(lines[line - 1]) + 1:
        return None
    return sum(len(l) + 1 for l in lines[: line - 1]) + col - 1


def cmd_check(args, out) -> int:
    root = args.root
    if not os.path.isdir(root):
        sys.stderr.write(f"error: {root!r} is not a directory\n")
        return EXIT_FAILURE
    model = _build(root, args)
    print_diagnostics(model.diagnostics, output_format(args, root), out)
    has_errors = any(d.severity == Severity.ERROR for d in model.diagnostics)
    return EXIT_ERRORS if has_errors else EXIT_OK


def _file_command_model(args) -> tuple[ProjectModel, str] | int:
    file = os.path.abspath(args.file)
    if not os.path.isfile(file):
        sys.stderr.write(f"error: {file!r} is not a file\n")
        return EXIT_FAILURE
    root = os.path.abspath(args.root) if args.root else os.path.dirname(file)
    model = _build(root, args)
    if model.file_index(file) is None:
        sys.stderr.write(f"error: {file!r} is not part of the project\n")
        return EXIT_FAILURE
    return model, file


def cmd_outline(args, out) -> int:
    result = _file_command_model(args)
    if isinstance(result, int):
        return result
    model, file = result
    fmt = output_format(args, args.root or os.path.dirname(file))
    for item in outline(file, model):
        s = item.target_span
        if fmt == "machine":
            out.write("\t".join([item.kind, item.label, str(s.start_line),
                                 str(s.start_col), str(s.end_line),
                                 str(s.end_col)]) + "\n")
        else:
            out.write(f"{s.start_line}:{s.start_col} {item.kind} {item.label}\n")
    return EXIT_OK


def cmd_hover(args, out) -> int:
    result = _file_command_model(args)
    if isinstance(result, int):
        return result
    model, file = result
    source = model.sources[file]
    offset = _to_offset(source, args.line, args.col)
    if offset is None:
        sys.stderr.write("error: position out of range\n")
        return EXIT_FAILURE
    info = hover(file, offset, args.mode, model)
    if info is None:
        return EXIT_OK
    fmt = output_format(args, args.root or os.path.dirname(file))
    if fmt == "machine":
        text = info.text.replace("\n", "\\n")
        out.write(f"{info.span.start_line}\t{info.span.start_col}\t{text}\n")
    else:
        out.write(info.text + "\n")
    return EXIT_OK


def cmd_complete(args, out) -> int:
    result = _file_command_model(args)
    if isinstance(result, int):
        return result
    model, file = result
    source = model.sources[file]
    offset = _to_offset(source, args.line, args.col)
    if offset is None:
        sys.stderr.write("error: position out of range\n")
        return EXIT_FAILURE
    fmt = output_format(args, args.root or os.path.dirname(file))
    for item in complete(file, offset, model):
        if fmt == "machine":
            out.write("\t".join([item.label, item.kind,
                                 item.synopsis.replace("\t", " "),
                                 item.insert_text]) + "\n")
        else:
            out.write(f"{item.label} ({item.kind}) {item.synopsis}\n")
    return EXIT_OK


def _match_selector(diag: Diagnostic, selector: str) -> bool:
    # CODE[@FILEPART[:LINE]]
    code, _, rest = selector.partition("@")
    if diag.code != code:
        return False
    if not rest:
        return True
    filepart, _, line = rest.partition(":")
    if filepart and filepart not in diag.span.file_id:
        return False
    if line:
        try:
            if diag.span.start_line != int(line):
                return False
        except ValueError:
            return False
    return True


def cmd_fix(args, out) -> int:
    root = args.root
    if not os.path.isdir(root):
        sys.stderr.write(f"error: {root!r} is not a directory\n")
        return EXIT_FAILURE
    model = _build(root, args)
    matches = [d for d in model.diagnostics if _match_selector(d, args.selector)]
    if len(matches) != 1:
        sys.stderr.write(
            f"error: selector matches {len(matches)} diagnostics (need exactly 1)\n"
        )
        for diag in matches:
            sys.stderr.write("  " + diag.human_line() + "\n")
        return EXIT_FAILURE
    diagnostic = matches[0]
    fixes = quick_fixes(diagnostic, model)
    if not fixes:
        out.write("no fixes available\n")
        return EXIT_OK
    if not args.apply:
        for i, fix in enumerate(fixes):
            out.write(f"[{i}] {fix.title}\n")
        return EXIT_OK
    if args.index is None:
        if len(fixes) > 1:
            sys.stderr.write("error: multiple fixes, pick one with --index\n")
            for i, fix in enumerate(fixes):
                sys.stderr.write(f"  [{i}] {fix.title}\n")
            return EXIT_FAILURE
        chosen = fixes[0]
    else:
        if not 0 <= args.index < len(fixes):
            sys.stderr.write(f"error: fix index {args.index} out of range\n")
            return EXIT_FAILURE
        chosen = fixes[args.index]
    try:
        updated = apply_fix(chosen, model.sources)
    except StaleFixError as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_FAILURE
    for file, _, _ in chosen.edits:
        with open(file, "w", encoding="utf-8") as fh:
            fh.write(updated[file])
    before = sum(1 for d in model.diagnostics if d.severity == Severity.ERROR)
    rebuilt = _build(root, args)
    after = sum(1 for d in rebuilt.diagnostics if d.severity == Severity.ERROR)
    out.write(f"applied: {chosen.title}\n")
    out.write(f"errors: {before} -> {after}\n")
    return EXIT_OK


def cmd_doc(args, out) -> int:
    root = args.root
    if not os.path.isdir(root):
        sys.stderr.write(f"error: {root!r} is not a directory\n")
        return EXIT_FAILURE
    model = _build(root, args)
    out_dir = args.out or os.path.join(root, model.config.doc_out)
    try:
        written = generate_html(model, project_docs(model), out_dir)
    except OSError as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_FAILURE
    for path in written:
        out.write(path + "\n")
    return EXIT_OK


def cmd_repl(args, out) -> int:
    db = Database()
    run_repl(db, sys.stdin, out, Loader(tuple(args.lib or ())))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["human", "machine"], default=None,
                        help="output format (default: human, or config file)")
    common.add_argument("--lib", action="append", metavar="PATH",
                        help="library search path (repeatable)")
    common.add_argument("--glob", action="append", metavar="PATTERN",
                        help="source glob (repeatable, default **/*.pl)")
    parser = argparse.ArgumentParser(
        prog="plkit",
        description="Prolog project checker, IDE query engine, and doc generator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("check", help="build a project and list diagnostics")
    p.add_argument("root")
    p.set_defaults(func=cmd_check)

    p = add_parser("outline", help="structural outline of one file")
    p.add_argument("file")
    p.add_argument("--root", default=None)
    p.set_defaults(func=cmd_outline)

    p = add_parser("hover", help="hover info at a 1-based line:col")
    p.add_argument("file")
    p.add_argument("line", type=int)
    p.add_argument("col", type=int)
    p.add_argument("--mode", choices=["definition", "doc"], default="definition")
    p.add_argument("--root", default=None)
    p.set_defaults(func=cmd_hover)

    p = add_parser("complete", help="completion proposals at line:col")
    p.add_argument("file")
    p.add_argument("line", type=int)
    p.add_argument("col", type=int)
    p.add_argument("--root", default=None)
    p.set_defaults(func=cmd_complete)

    p = add_parser("fix", help="list or apply quick fixes")
    p.add_argument("root")
    p.add_argument("selector", help="diagnostic selector CODE[@FILEPART[:LINE]]")
    p.add_argument("--index", type=int, default=None)
    p.add_argument("--apply", action="store_true")
    p.set_defaults(func=cmd_fix)

    p = add_parser("doc", help="generate the HTML documentation tree")
    p.add_argument("root")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_doc)

    p = add_parser("repl", help="interactive read-eval loop")
    p.set_defaults(func=cmd_repl)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except FileNotFoundError as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

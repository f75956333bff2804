"""Project-level analysis: per-file indexing, cross-file linking, and the
IDE queries (outline, hover, completion, quick fixes) served from the
resulting immutable model."""

from __future__ import annotations

import glob as globmod
import hashlib
import os
from dataclasses import dataclass, field
from typing import Optional

from .catalog import BuiltinCatalog, load_default_catalog
from .database import (
    Database,
    ImportRecord,
    ModuleInfo,
    OperatorDef,
    PredicateIndicator,
)
from .diagnostics import Diagnostic, Severity, sort_key
from .engine import BUILTIN_INDICATORS, Loader
from .lexer import ATOM_KINDS, Token, TokenKind
from .printer import atom_text, pretty_print
from .reader import Sentence
from .spans import SourceSpan
from .terms import Atom, Compound, Str, Term, Var, indicator_of


@dataclass
class ProjectConfig:
    globs: tuple[str, ...] = ("**/*.pl",)
    library_paths: tuple[str, ...] = ()
    completion_cap: int = 50
    doc_out: str = "prologdoc"

    def __post_init__(self):
        if not self.globs:
            raise ValueError("at least one source glob is required")
        if self.completion_cap < 1:
            raise ValueError("completion cap must be >= 1")


@dataclass
class DefInfo:
    indicator: PredicateIndicator
    clause_spans: list[SourceSpan] = field(default_factory=list)
    dcg: bool = False
    source_arity: Optional[int] = None  # declared arity of a DCG nonterminal
    first_head: Optional[Term] = None
    properties: set[str] = field(default_factory=set)

    @property
    def first_span(self) -> SourceSpan:
        return self.clause_spans[0]

    @property
    def display_label(self) -> str:
        if self.dcg:
            return f"{self.indicator.name}//{self.source_arity}"
        return f"{self.indicator.name}/{self.indicator.arity}"


@dataclass
class CallSite:
    indicator: PredicateIndicator
    span: SourceSpan


@dataclass
class FileIndex:
    file: str
    module: Optional[ModuleInfo]
    defined: dict[PredicateIndicator, DefInfo]
    calls: list[CallSite]
    imports: list[ImportRecord]
    operators_declared: list[tuple[OperatorDef, SourceSpan]]
    sentences: list[Sentence]
    tokens: list[Token]
    db: Database
    diagnostics: list[Diagnostic]

    def unique_defs(self) -> list[DefInfo]:
        seen: list[DefInfo] = []
        for info in self.defined.values():
            if not any(info is s for s in seen):
                seen.append(info)
        return sorted(seen, key=lambda d: d.first_span.start_offset)


@dataclass
class GlobalIndex:
    files: dict[str, FileIndex]
    # (name, arity) -> exporting file paths, sorted
    exporters: dict[tuple[str, int], list[str]]


@dataclass
class OutlineItem:
    kind: str  # ExportedPredicate | PrivatePredicate | DcgNonterminal | ImportDirective | Module
    label: str
    target_span: SourceSpan
    children: list["OutlineItem"] = field(default_factory=list)


@dataclass
class HoverInfo:
    text: str
    span: SourceSpan


@dataclass
class CompletionItem:
    label: str
    kind: str  # Predicate | Module | Dcg | Variable | Keyword
    synopsis: str
    insert_text: str


@dataclass
class QuickFix:
    title: str
    edits: list[tuple[str, SourceSpan, str]]  # (file, span, replacement)
    fixes_diagnostic: tuple[str, SourceSpan]
    # content digests of every touched file at fix creation time
    base_digests: dict[str, str] = field(default_factory=dict)


@dataclass
class ProjectModel:
    root: str
    config: ProjectConfig
    index: GlobalIndex
    diagnostics: list[Diagnostic]
    sources: dict[str, str]
    catalog: BuiltinCatalog
    loader: Loader

    def file_index(self, file: str) -> Optional[FileIndex]:
        return self.index.files.get(os.path.abspath(file))


class StaleFixError(Exception):
    pass


# --- phase I + II ---------------------------------------------------------

CONTROL_CONSTRUCTS = {(",", 2), (";", 2), ("->", 2), ("\\+", 1)}


def _walk_goals(goal: Term, sink: list[CallSite], dcg: bool = False):
    if isinstance(goal, Var):
        return  # meta-call through a variable: unresolvable but silent
    ind = indicator_of(goal)
    if ind is None:
        return  # numbers / strings in DCG bodies (terminals)
    name, arity = ind
    if (name, arity) in CONTROL_CONSTRUCTS:
        for arg in goal.args:
            _walk_goals(arg, sink, dcg)
        return
    if name == "call" and arity == 1 and isinstance(goal, Compound):
        inner = goal.args[0]
        if not isinstance(inner, Var):
            _walk_goals(inner, sink, dcg)
        return
    if dcg:
        if name == "{}" and arity == 1 and isinstance(goal, Compound):
            _walk_goals(goal.args[0], sink, dcg=False)
            return
        if name == "." and arity == 2:
            return  # terminal list
        if name == "[]" and arity == 0:
            return
        if name == "!" and arity == 0:
            return
        sink.append(CallSite(PredicateIndicator(name, arity + 2), goal.span))
        return
    sink.append(CallSite(PredicateIndicator(name, arity), goal.span))


def _var_occurrences(term: Term, sink: list[Var]):
    if isinstance(term, Var):
        sink.append(term)
    elif isinstance(term, Compound):
        for arg in term.args:
            _var_occurrences(arg, sink)


def index_file(sentences: list[Sentence], db: Database, file: str,
               tokens: list[Token],
               phase1_diagnostics: list[Diagnostic]) -> FileIndex:
    """Phase II: decorate one file's sentences into a FileIndex."""
    defined: dict[PredicateIndicator, DefInfo] = {}
    calls: list[CallSite] = []
    diagnostics = list(phase1_diagnostics)

    prev_indicator: Optional[PredicateIndicator] = None
    seen_order: list[PredicateIndicator] = []
    for sentence in sentences:
        if sentence.kind == "directive":
            prev_indicator = None
            continue
        head = sentence.head
        ind = indicator_of(head)
        if ind is None:
            continue
        name, arity = ind
        if sentence.kind == "dcg_rule":
            indicator = PredicateIndicator(name, arity + 2)
            alias = PredicateIndicator(name, arity)
        else:
            indicator = PredicateIndicator(name, arity)
            alias = None
        info = defined.get(indicator)
        is_new = info is None
        if info is None:
            info = DefInfo(indicator, dcg=(sentence.kind == "dcg_rule"),
                           source_arity=arity if sentence.kind == "dcg_rule" else None,
                           first_head=head)
            defined[indicator] = info
            if alias is not None and alias not in defined:
                defined[alias] = info
            seen_order.append(indicator)
        info.clause_spans.append(sentence.span)
        entry = db.lookup(indicator)
        if entry is not None:
            info.properties = entry.properties
        # clause order interruption without a discontiguous declaration
        if (
            not is_new
            and prev_indicator is not None
            and prev_indicator != indicator
            and "discontiguous" not in info.properties
        ):
            diagnostics.append(
                Diagnostic(
                    Severity.WARNING,
                    "discontiguous_clauses",
                    f"clauses of {info.display_label} are not together "
                    "(missing discontiguous declaration?)",
                    sentence.span,
                )
            )
        prev_indicator = indicator

        if sentence.body is not None:
            _walk_goals(sentence.body, calls, dcg=(sentence.kind == "dcg_rule"))

        # singleton variables, one warning per offending variable
        occurrences: list[Var] = []
        _var_occurrences(sentence.term, occurrences)
        counts: dict[int, list[Var]] = {}
        for var in occurrences:
            counts.setdefault(var.vid, []).append(var)
        for occ in counts.values():
            var = occ[0]
            if len(occ) == 1 and not var.name.startswith("_"):
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "singleton_variable",
                        f"singleton variable {var.name}",
                        var.span or sentence.span,
                    )
                )

    operators = [
        (definition, span)
        for definition, span in db.declared_operators
        if span is not None and span.file_id == file
    ]
    return FileIndex(
        file=file,
        module=db.module,
        defined=defined,
        calls=calls,
        imports=list(db.imports),
        operators_declared=operators,
        sentences=sentences,
        tokens=tokens,
        db=db,
        diagnostics=diagnostics,
    )


# --- phase III + IV -------------------------------------------------------


def _file_exports(index: FileIndex) -> set[tuple[str, int]]:
    if index.module is not None:
        return {(i.name, i.arity) for i in index.module.exports}
    # A non-module "database" file exports every top-level definition.
    return {(d.indicator.name, d.indicator.arity) for d in index.unique_defs()}


def link(indices: dict[str, FileIndex],
         loader: Optional[Loader] = None) -> tuple[GlobalIndex, list[Diagnostic]]:
    """Phase III: resolve calls and imports across all file indices."""
    diagnostics: list[Diagnostic] = []
    exporters: dict[tuple[str, int], list[str]] = {}
    for path in sorted(indices):
        for key in sorted(_file_exports(indices[path])):
            exporters.setdefault(key, []).append(path)

    for path in sorted(indices):
        index = indices[path]
        visible: set[tuple[str, int]] = set()
        for record in index.imports:
            target_path = record.resolved_file
            target_index = indices.get(target_path) if target_path else None
            if target_index is None and target_path is not None and loader is not None:
                cached = loader.consult_file(target_path)
                if cached is not None:
                    target_db, target_sents, _ = cached
                    target_index = index_file(target_sents, target_db,
                                              target_path, [], [])
            if target_index is None:
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        "unresolved_import",
                        f"cannot resolve import {pretty_print(record.target)}",
                        record.span,
                    )
                )
                continue
            available = _file_exports(target_index)
            if record.indicators is None:
                visible |= available
            else:
                for indicator in record.indicators:
                    key = (indicator.name, indicator.arity)
                    if key in available:
                        visible.add(key)
                    else:
                        diagnostics.append(
                            Diagnostic(
                                Severity.ERROR,
                                "not_exported",
                                f"{indicator} is not exported by "
                                f"{os.path.basename(target_index.file)}",
                                record.span,
                                data={
                                    "name": indicator.name,
                                    "arity": indicator.arity,
                                    "exporter": target_index.file,
                                },
                            )
                        )

        local = {(d.name, d.arity) for d in index.defined}
        # declared-but-undefined dynamic predicates are legitimate call targets
        local |= {
            (ind.name, ind.arity)
            for ind, entry in index.db.predicates.items()
            if "dynamic" in entry.properties
        }
        for call in index.calls:
            key = (call.indicator.name, call.indicator.arity)
            if key in local or key in BUILTIN_INDICATORS or key in visible:
                continue
            related = []
            neighbors = sorted(
                arity
                for (name, arity) in (local | visible | set(exporters))
                if name == call.indicator.name and arity != call.indicator.arity
            )
            message = f"undefined predicate {call.indicator}"
            if neighbors:
                related = [(call.span,
                            f"did you mean {call.indicator.name}/{neighbors[0]}?")]
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "undefined_predicate",
                    message,
                    call.span,
                    related=related,
                    data={"name": call.indicator.name,
                          "arity": call.indicator.arity,
                          "file": index.file},
                )
            )
    return GlobalIndex(files=dict(indices), exporters=exporters), diagnostics


def discover_files(root: str, config: ProjectConfig) -> list[str]:
    found: set[str] = set()
    for pattern in config.globs:
        for path in globmod.glob(os.path.join(root, pattern), recursive=True):
            if os.path.isfile(path):
                found.add(os.path.abspath(path))
    return sorted(found)


def build_project(root: str, config: Optional[ProjectConfig] = None,
                  file_order: Optional[list[str]] = None) -> ProjectModel:
    """Run phases I-IV over every file under `root` matching the config.

    `file_order` overrides discovery order (used to verify that the result
    does not depend on it); the output is sorted either way.
    """
    config = config or ProjectConfig()
    if not os.path.isdir(root):
        raise FileNotFoundError(f"project root {root!r} is not a directory")
    loader = Loader(library_paths=tuple(
        os.path.join(root, p) if not os.path.isabs(p) else p
        for p in config.library_paths
    ))
    files = file_order if file_order is not None else discover_files(root, config)
    indices: dict[str, FileIndex] = {}
    sources: dict[str, str] = {}
    extra: list[Diagnostic] = []
    for path in files:
        try:
            # the loader caches, so files pulled in early as import targets
            # are read, tokenized, and consulted exactly once
            consulted = loader.consult_file(path)
        except OSError as err:
            span = SourceSpan(path, 0, 0, 1, 1, 1, 1)
            extra.append(Diagnostic(Severity.ERROR, "unreadable_file",
                                    str(err), span))
            continue
        db, sentences, phase1 = consulted
        path = os.path.abspath(path)
        sources[path] = loader.source_of(path) or ""
        indices[path] = index_file(sentences, db, path,
                                   loader.tokens_of(path), list(phase1))
    index, link_diags = link(indices, loader)
    diagnostics = sorted(
        [d for fi in indices.values() for d in fi.diagnostics]
        + link_diags + extra,
        key=sort_key,
    )
    return ProjectModel(
        root=os.path.abspath(root),
        config=config,
        index=index,
        diagnostics=diagnostics,
        sources=sources,
        catalog=load_default_catalog(),
        loader=loader,
    )


# --- outline --------------------------------------------------------------


def outline(file: str, model: ProjectModel) -> list[OutlineItem]:
    index = model.file_index(file)
    if index is None:
        return []
    items: list[OutlineItem] = []
    exports = (
        {(i.name, i.arity) for i in index.module.exports}
        if index.module is not None
        else set()
    )
    if index.module is not None:
        for sentence in index.sentences:
            if sentence.kind == "directive":
                ind = indicator_of(sentence.goal)
                if ind == ("module", 2):
                    items.append(OutlineItem("Module", index.module.name,
                                             sentence.span))
                    break
    for record in index.imports:
        if record.span is not None:
            items.append(
                OutlineItem("ImportDirective", pretty_print(record.target),
                            record.span)
            )
    for info in index.unique_defs():
        if info.dcg:
            kind = "DcgNonterminal"
        elif (info.indicator.name, info.indicator.arity) in exports:
            kind = "ExportedPredicate"
        else:
            kind = "PrivatePredicate"
        items.append(OutlineItem(kind, info.display_label, info.first_span))
    items.sort(key=lambda it: it.target_span.start_offset)
    return items


# --- hover ----------------------------------------------------------------


def _token_at(tokens: list[Token], offset: int) -> Optional[Token]:
    for token in tokens:
        if token.span.covers(offset):
            return token
    return None


def _sentence_at(index: FileIndex, offset: int) -> Optional[Sentence]:
    for sentence in index.sentences:
        if sentence.span.start_offset <= offset < sentence.span.end_offset:
            return sentence
    return None


def _innermost_term(term: Term, offset: int, best=None):
    if term.span is None or not term.span.covers(offset):
        return best
    best = term
    if isinstance(term, Compound):
        for arg in term.args:
            best2 = _innermost_term(arg, offset, None)
            if best2 is not None:
                return best2 if best2 is not None else best
    return best


def _enclosing_chain(term: Term, offset: int, chain: list) -> bool:
    if term.span is None or not term.span.covers(offset):
        return False
    chain.append(term)
    if isinstance(term, Compound):
        for arg in term.args:
            if _enclosing_chain(arg, offset, chain):
                return True
    return True


def _indicator_at(index: FileIndex, offset: int) -> Optional[tuple[str, int]]:
    sentence = _sentence_at(index, offset)
    if sentence is None:
        return None
    chain: list[Term] = []
    _enclosing_chain(sentence.term, offset, chain)
    for term in reversed(chain):
        if isinstance(term, Compound):
            if term.functor_span is not None and term.functor_span.covers(offset):
                return term.name, term.arity
        if isinstance(term, Atom):
            if term.span is not None and term.span.covers(offset):
                return term.name, 0
    return None


def hover(file: str, offset: int, mode: str,
          model: ProjectModel) -> Optional[HoverInfo]:
    """mode: 'definition' or 'doc'."""
    index = model.file_index(file)
    if index is None:
        return None
    token = _token_at(index.tokens, offset)
    if token is None or token.kind not in ATOM_KINDS | {TokenKind.VARIABLE}:
        return None
    span = token.span

    sentence = _sentence_at(index, offset)
    # use_module target: show the export list of the imported file
    if sentence is not None and sentence.kind == "directive":
        ind = indicator_of(sentence.goal)
        if ind is not None and ind[0] == "use_module":
            target = sentence.goal.args[0]
            if target.span is not None and target.span.covers(offset):
                return _hover_import(target, index, model, span)

    name_arity = _indicator_at(index, offset)
    if name_arity is None:
        return None
    name, arity = name_arity

    if mode == "doc":
        return _hover_doc(name, arity, index, model, span)

    # operator atom: render its definition(s)
    chain: list[Term] = []
    if sentence is not None:
        _enclosing_chain(sentence.term, offset, chain)
    for term in reversed(chain):
        from .terms import OpApply

        if isinstance(term, OpApply) and term.functor_span is not None \
                and term.functor_span.covers(offset):
            d = term.op
            op_line = f"op({d.priority}, {d.fixity}, {atom_text(d.name)})"
            entry = model.catalog.get(name, arity)
            if entry is not None:
                text = f"{name}/{arity}: {entry.synopsis}"
                if entry.arguments:
                    text += "\n" + "\n".join(entry.arguments)
                return HoverInfo(text + "\n" + op_line, span)
            return HoverInfo(op_line, span)
    defs = index.db.operators.defs(name)
    if defs and arity == 0:
        lines = [f"op({d.priority}, {d.fixity}, {atom_text(d.name)})"
                 for d in sorted(defs, key=lambda d: d.fixity)]
        return HoverInfo("\n".join(lines), span)

    info = _find_def(name, arity, index, model)
    if info is not None:
        def_info, def_file = info
        head = def_info.first_head
        synopsis = pretty_print(head) if head is not None else def_info.display_label
        line = def_info.first_span.start_line
        where = os.path.basename(def_file)
        return HoverInfo(f"{synopsis} defined at {where}:{line}", span)

    entry = model.catalog.get(name, arity)
    if entry is not None:
        text = f"{name}/{arity}: {entry.synopsis}"
        if entry.arguments:
            text += "\n" + "\n".join(entry.arguments)
        return HoverInfo(text, span)
    return None


def _hover_import(target: Term, index: FileIndex, model: ProjectModel,
                  span: SourceSpan) -> Optional[HoverInfo]:
    for record in index.imports:
        if record.span is None:
            continue
        if record.resolved_file:
            target_index = model.index.files.get(record.resolved_file)
            if target_index is not None:
                exports = sorted(f"{n}/{a}" for n, a in _file_exports(target_index))
                label = pretty_print(record.target)
                return HoverInfo(
                    f"{label} exports: " + (", ".join(exports) or "(nothing)"),
                    span,
                )
    return None


def _find_def(name: str, arity: int, index: FileIndex,
              model: ProjectModel) -> Optional[tuple[DefInfo, str]]:
    indicator = PredicateIndicator(name, arity)
    info = index.defined.get(indicator)
    if info is not None:
        return info, index.file
    for path in model.index.exporters.get((name, arity), []):
        other = model.index.files.get(path)
        if other is not None and indicator in other.defined:
            return other.defined[indicator], path
    return None


def _hover_doc(name: str, arity: int, index: FileIndex, model: ProjectModel,
               span: SourceSpan) -> Optional[HoverInfo]:
    from .docgen import project_docs

    docs = project_docs(model)
    for block in docs.blocks:
        if block.target_kind == "predicate" and block.target == (name, arity):
            text = "\n".join(f"{tag} {body}" for tag, body in block.entries)
            return HoverInfo(text, span)
        if block.target_kind == "module" and arity == 0 \
                and block.target == name:
            text = "\n".join(f"{tag} {body}" for tag, body in block.entries)
            return HoverInfo(text, span)
    return None


# --- completion -----------------------------------------------------------


def _prefix_at(source: str, offset: int) -> str:
    start = offset
    while start > 0 and (source[start - 1].isalnum() or source[start - 1] == "_"):
        start -= 1
    return source[start:offset]


def complete(file: str, offset: int, model: ProjectModel) -> list[CompletionItem]:
    index = model.file_index(file)
    if index is None:
        return []
    source = model.sources.get(index.file, "")
    prefix = _prefix_at(source, offset)
    items: list[tuple[tuple, CompletionItem]] = []

    def add(label: str, kind: str, synopsis: str, insert: str, locality: int):
        name_part = label.split("/")[0].split("//")[0]
        if prefix and not name_part.startswith(prefix):
            return
        rank = 0 if name_part == prefix else 1
        items.append(((rank, locality, label),
                      CompletionItem(label, kind, synopsis, insert)))

    if prefix and (prefix[0].isupper() or prefix[0] == "_"):
        sentence = _sentence_at(index, offset)
        if sentence is not None:
            seen = set()
            occurrences: list[Var] = []
            _var_occurrences(sentence.term, occurrences)
            for var in occurrences:
                if var.name not in seen and var.name != "_":
                    seen.add(var.name)
                    add(var.name, "Variable", "clause variable", var.name, 0)
    else:
        sentence = _sentence_at(index, offset)
        in_import = (
            sentence is not None
            and sentence.kind == "directive"
            and (indicator_of(sentence.goal) or ("",))[0] == "use_module"
        )
        if in_import:
            for path in sorted(model.index.files):
                other = model.index.files[path]
                if other.module is not None:
                    add(other.module.name, "Module", f"module in {os.path.basename(path)}",
                        other.module.name, 1)
        for info in index.unique_defs():
            synopsis = (
                pretty_print(info.first_head) if info.first_head is not None
                else info.display_label
            )
            kind = "Dcg" if info.dcg else "Predicate"
            add(info.display_label, kind, synopsis, info.indicator.name, 0)
        visible = _visible_imports(index, model)
        for (name, arity), origin in sorted(visible.items()):
            other = model.index.files.get(origin)
            synopsis = f"{name}/{arity} from {os.path.basename(origin)}"
            if other is not None:
                found = other.defined.get(PredicateIndicator(name, arity))
                if found is not None and found.first_head is not None:
                    synopsis = pretty_print(found.first_head)
            add(f"{name}/{arity}", "Predicate", synopsis, name, 1)
        seen_builtin = set()
        for entry in model.catalog.entries():
            seen_builtin.add((entry.name, entry.arity))
            add(entry.indicator, "Keyword", entry.synopsis, entry.name, 2)
        for name, arity in sorted(BUILTIN_INDICATORS - seen_builtin):
            add(f"{name}/{arity}", "Keyword", "built-in", name, 2)

    items.sort(key=lambda pair: pair[0])
    return [item for _, item in items[: model.config.completion_cap]]


def _visible_imports(index: FileIndex,
                     model: ProjectModel) -> dict[tuple[str, int], str]:
    visible: dict[tuple[str, int], str] = {}
    for record in index.imports:
        if not record.resolved_file:
            continue
        target = model.index.files.get(record.resolved_file)
        if target is None:
            continue
        available = _file_exports(target)
        wanted = (
            available
            if record.indicators is None
            else {(i.name, i.arity) for i in record.indicators} & available
        )
        for key in wanted:
            visible.setdefault(key, target.file)
    return visible


# --- quick fixes ----------------------------------------------------------


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _directive_insert_offset(index: FileIndex) -> int:
    offset = 0
    for sentence in index.sentences:
        if sentence.kind == "directive":
            offset = sentence.end_span.end_offset
        else:
            break
    return offset


def quick_fixes(diagnostic: Diagnostic, model: ProjectModel) -> list[QuickFix]:
    if diagnostic.code == "undefined_predicate" and diagnostic.data:
        return _fixes_undefined(diagnostic, model)
    if diagnostic.code == "not_exported" and diagnostic.data:
        return _fixes_not_exported(diagnostic, model)
    return []


def _point_span(file: str, offset: int, source: str) -> SourceSpan:
    from .spans import LineIndex

    return LineIndex(source).span(file, offset, offset)


def _fixes_undefined(diagnostic: Diagnostic, model: ProjectModel) -> list[QuickFix]:
    name = diagnostic.data["name"]
    arity = diagnostic.data["arity"]
    file = diagnostic.data["file"]
    index = model.file_index(file)
    if index is None:
        return []
    source = model.sources.get(index.file, "")
    fixes: list[QuickFix] = []
    for exporter in model.index.exporters.get((name, arity), []):
        if exporter == index.file:
            continue
        rel = os.path.relpath(exporter, os.path.dirname(index.file))
        if rel.endswith(".pl"):
            rel = rel[:-3]
        target_atom = atom_text(rel.replace(os.sep, "/"))
        insert_at = _directive_insert_offset(index)
        directive = f":- use_module({target_atom}, [{atom_text(name)}/{arity}]).\n"
        if insert_at > 0:
            directive = "\n" + directive
        span = _point_span(index.file, insert_at, source)
        fixes.append(
            QuickFix(
                title=f"Import {name}/{arity} from {os.path.basename(exporter)}",
                edits=[(index.file, span, directive)],
                fixes_diagnostic=(diagnostic.code, diagnostic.span),
                base_digests={index.file: _digest(source)},
            )
        )
    fixes.sort(key=lambda f: f.title)
    return fixes


def _fixes_not_exported(diagnostic: Diagnostic, model: ProjectModel) -> list[QuickFix]:
    name = diagnostic.data["name"]
    arity = diagnostic.data["arity"]
    exporter = diagnostic.data["exporter"]
    target = model.index.files.get(os.path.abspath(exporter))
    if target is None or target.module is None:
        return []
    source = model.sources.get(target.file, "")
    for sentence in target.sentences:
        if sentence.kind != "directive":
            continue
        if (indicator_of(sentence.goal) or ("",))[0] != "module":
            continue
        exports_term = sentence.goal.args[1]
        span = exports_term.span
        old = source[span.start_offset:span.end_offset]
        extended = old.rstrip()
        if extended.endswith("]"):
            inner = extended[:-1].rstrip()
            sep = "" if inner.endswith("[") else ", "
            new_text = f"{inner}{sep}{atom_text(name)}/{arity}]"
        else:
            return []
        return [
            QuickFix(
                title=f"Export {name}/{arity} from {os.path.basename(exporter)}",
                edits=[(target.file, span, new_text)],
                fixes_diagnostic=(diagnostic.code, diagnostic.span),
                base_digests={target.file: _digest(source)},
            )
        ]
    return []


def apply_fix(fix: QuickFix, sources: dict[str, str]) -> dict[str, str]:
    """Apply a fix's edits; rejects the whole fix if any file changed."""
    for file, digest in fix.base_digests.items():
        current = sources.get(file)
        if current is None or _digest(current) != digest:
            raise StaleFixError(f"{file} changed since the fix was computed")
    updated = dict(sources)
    by_file: dict[str, list[tuple[SourceSpan, str]]] = {}
    for file, span, replacement in fix.edits:
        by_file.setdefault(file, []).append((span, replacement))
    for file, edits in by_file.items():
        text = updated[file]
        for span, replacement in sorted(edits, key=lambda e: -e[0].start_offset):
            text = text[: span.start_offset] + replacement + text[span.end_offset:]
        updated[file] = text
    return updated

"""Typed AST nodes for Prolog terms.

Lists and curly terms are kept in their canonical compound encoding
('.'/2 chains ending in '[]', and '{}'/1) so that structural equality
stays a plain functor/argument comparison; the pretty printer restores
the sugar. Operator applications are Compound nodes tagged with the
operator definition that produced them.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .spans import SourceSpan

LIST_FUNCTOR = "."
NIL = "[]"
CURLY_FUNCTOR = "{}"


class Term:
    __slots__ = ("span", "functor_span")

    def __init__(self, span: Optional[SourceSpan] = None,
                 functor_span: Optional[SourceSpan] = None):
        self.span = span
        self.functor_span = functor_span or span

    def is_callable(self) -> bool:
        return False


class Atom(Term):
    __slots__ = ("name",)

    def __init__(self, name: str, span=None, functor_span=None):
        super().__init__(span, functor_span)
        self.name = name

    def is_callable(self):
        return True

    def __repr__(self):
        return f"Atom({self.name!r})"


class Var(Term):
    __slots__ = ("name", "vid")

    def __init__(self, name: str, vid: int, span=None):
        super().__init__(span)
        self.name = name
        self.vid = vid

    def __repr__(self):
        return f"Var({self.name}#{self.vid})"


class Int(Term):
    __slots__ = ("value",)

    def __init__(self, value: int, span=None):
        super().__init__(span)
        self.value = value

    def __repr__(self):
        return f"Int({self.value})"


class Float(Term):
    __slots__ = ("value",)

    def __init__(self, value: float, span=None):
        super().__init__(span)
        self.value = value

    def __repr__(self):
        return f"Float({self.value})"


class Str(Term):
    __slots__ = ("value",)

    def __init__(self, value: str, span=None):
        super().__init__(span)
        self.value = value

    def __repr__(self):
        return f"Str({self.value!r})"


class Compound(Term):
    __slots__ = ("name", "args")

    def __init__(self, name: str, args: list, span=None, functor_span=None):
        if not args:
            raise ValueError("compound term needs at least one argument")
        super().__init__(span, functor_span)
        self.name = name
        self.args = args

    def is_callable(self):
        return True

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self):
        return f"Compound({self.name!r}, {self.args!r})"


class OpApply(Compound):
    """Compound built by the reader from operator notation."""

    __slots__ = ("op",)

    def __init__(self, op, args: list, span=None, functor_span=None):
        super().__init__(op.name, args, span, functor_span)
        self.op = op

    def __repr__(self):
        return f"OpApply({self.op.name!r}/{self.op.fixity}, {self.args!r})"


def make_list(items: Iterable[Term], tail: Optional[Term] = None,
              span=None) -> Term:
    result = tail if tail is not None else Atom(NIL, span)
    for item in reversed(list(items)):
        result = Compound(LIST_FUNCTOR, [item, result], span)
    return result


def list_parts(term: Term) -> Optional[tuple[list, Optional[Term]]]:
    """Decompose a '.'/2 chain into (items, tail); tail None means proper."""
    items = []
    node = term
    while isinstance(node, Compound) and node.name == LIST_FUNCTOR and node.arity == 2:
        items.append(node.args[0])
        node = node.args[1]
    if not items:
        return None
    if isinstance(node, Atom) and node.name == NIL:
        return items, None
    return items, node


def struct_eq(a: Term, b: Term) -> bool:
    """Structural equality, spans excluded; variables compare by name."""
    if isinstance(a, Atom):
        return isinstance(b, Atom) and a.name == b.name
    if isinstance(a, Var):
        return isinstance(b, Var) and a.name == b.name
    if isinstance(a, Int):
        return isinstance(b, Int) and a.value == b.value
    if isinstance(a, Float):
        return isinstance(b, Float) and a.value == b.value
    if isinstance(a, Str):
        return isinstance(b, Str) and a.value == b.value
    if isinstance(a, Compound):
        return (
            isinstance(b, Compound)
            and a.name == b.name
            and a.arity == b.arity
            and all(struct_eq(x, y) for x, y in zip(a.args, b.args))
        )
    raise TypeError(f"not a term: {a!r}")


def term_variables(term: Term, acc: Optional[list] = None) -> list:
    """Variables in first-occurrence order (one entry per vid)."""
    if acc is None:
        acc = []
    if isinstance(term, Var):
        if all(v.vid != term.vid for v in acc):
            acc.append(term)
    elif isinstance(term, Compound):
        for arg in term.args:
            term_variables(arg, acc)
    return acc


def indicator_of(term: Term) -> Optional[tuple[str, int]]:
    """name/arity of a callable term, else None."""
    if isinstance(term, Compound):
        return term.name, term.arity
    if isinstance(term, Atom):
        return term.name, 0
    return None

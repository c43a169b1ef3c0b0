"""Syntax of the extended modal fixpoint language.

The AST is kept in negation normal form: negation exists only on atoms and
every operator comes paired with its dual.  Formulas are immutable and
hashable, so they can be shared freely between threads and used as cache
keys.

Concrete grammar (ASCII):

    T / F                  verum / falsum
    p, ~p                  atom / negated atom, atoms match [a-z][a-zA-Z0-9_]*
    f & g, f | g           conjunction / disjunction
    <> f, [] f             diamond / box
    <+> f, [+] f           closure diamond / box (reflexive variants)
    A f, E f               universal / existential modality
    mu x . f, nu x . f     least / greatest fixpoint, body extends maximally
                           to the right
    <*>{f1, f2}, [*]{..}   tangle operators, one or more arguments
    !f, f -> g             sugar, eliminated while parsing
    precedence: prefix > & > | > ->; parentheses override

``mu`` and ``nu`` are reserved words and cannot be used as atoms.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(ValueError):
    """Raised on malformed input; carries the offset and what was expected."""

    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        detail = f", found {found!r}" if found else ""
        super().__init__(f"at offset {position}: expected {expected}{detail}")


class PositivityError(ValueError):
    """A fixpoint binder's variable occurs negated in its body."""

    def __init__(self, var: str):
        self.var = var
        super().__init__(f"bound variable {var!r} occurs negated in its binder's body")


class Formula:
    """Base class of all syntax nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class DiaPlus(Formula):
    body: Formula


@dataclass(frozen=True)
class BoxPlus(Formula):
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    body: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class TangleDia(Formula):
    bodies: tuple[Formula, ...]

    def __post_init__(self):
        if not self.bodies:
            raise ValueError("tangle needs at least one argument")


@dataclass(frozen=True)
class TangleBox(Formula):
    bodies: tuple[Formula, ...]

    def __post_init__(self):
        if not self.bodies:
            raise ValueError("tangle needs at least one argument")


TOP = Top()
BOT = Bot()

_UNARY = (Dia, Box, DiaPlus, BoxPlus, Forall, Exists)
_BINARY = (And, Or)
_TANGLES = (TangleDia, TangleBox)


def size(f: Formula) -> int:
    """Number of nodes in the syntax tree.

    Literals and T/F count 1, binary connectives 1 + both sides, every
    unary operator and binder 1 + body, tangles 1 + the sum over their
    arguments.
    """
    if isinstance(f, (Top, Bot, Atom, NegAtom)):
        return 1
    if isinstance(f, _BINARY):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, _UNARY):
        return 1 + size(f.body)
    if isinstance(f, (Mu, Nu)):
        return 1 + size(f.body)
    if isinstance(f, _TANGLES):
        return 1 + sum(size(b) for b in f.bodies)
    raise TypeError(f"not a formula: {f!r}")


def dual(f: Formula) -> Formula:
    """Semantic negation, staying in negation normal form.

    Binders swap (mu <-> nu) and the bound variable keeps its polarity in
    the rewritten body, so duality preserves positivity.  ``dual`` is an
    involution and preserves ``size``.
    """
    return _dual(f, frozenset())


def _dual(f: Formula, flipped: frozenset[str]) -> Formula:
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Atom):
        return Atom(f.name) if f.name in flipped else NegAtom(f.name)
    if isinstance(f, NegAtom):
        return NegAtom(f.name) if f.name in flipped else Atom(f.name)
    if isinstance(f, And):
        return Or(_dual(f.left, flipped), _dual(f.right, flipped))
    if isinstance(f, Or):
        return And(_dual(f.left, flipped), _dual(f.right, flipped))
    if isinstance(f, Dia):
        return Box(_dual(f.body, flipped))
    if isinstance(f, Box):
        return Dia(_dual(f.body, flipped))
    if isinstance(f, DiaPlus):
        return BoxPlus(_dual(f.body, flipped))
    if isinstance(f, BoxPlus):
        return DiaPlus(_dual(f.body, flipped))
    if isinstance(f, Forall):
        return Exists(_dual(f.body, flipped))
    if isinstance(f, Exists):
        return Forall(_dual(f.body, flipped))
    if isinstance(f, Mu):
        return Nu(f.var, _dual(f.body, flipped | {f.var}))
    if isinstance(f, Nu):
        return Mu(f.var, _dual(f.body, flipped | {f.var}))
    if isinstance(f, TangleDia):
        return TangleBox(tuple(_dual(b, flipped) for b in f.bodies))
    if isinstance(f, TangleBox):
        return TangleDia(tuple(_dual(b, flipped) for b in f.bodies))
    raise TypeError(f"not a formula: {f!r}")


def free_atoms(f: Formula) -> frozenset[str]:
    """Atoms occurring outside the scope of a binder that binds them."""
    out: set[str] = set()
    _free_atoms(f, frozenset(), out)
    return frozenset(out)


def _free_atoms(f: Formula, bound: frozenset[str], out: set[str]):
    if isinstance(f, (Atom, NegAtom)):
        if f.name not in bound:
            out.add(f.name)
    elif isinstance(f, _BINARY):
        _free_atoms(f.left, bound, out)
        _free_atoms(f.right, bound, out)
    elif isinstance(f, _UNARY):
        _free_atoms(f.body, bound, out)
    elif isinstance(f, (Mu, Nu)):
        _free_atoms(f.body, bound | {f.var}, out)
    elif isinstance(f, _TANGLES):
        for b in f.bodies:
            _free_atoms(b, bound, out)


def atom_names(f: Formula) -> frozenset[str]:
    """Every atom-id appearing anywhere, free, bound or as a binder variable."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Atom, NegAtom)):
            out.add(g.name)
        elif isinstance(g, _BINARY):
            stack.append(g.left)
            stack.append(g.right)
        elif isinstance(g, _UNARY):
            stack.append(g.body)
        elif isinstance(g, (Mu, Nu)):
            out.add(g.var)
            stack.append(g.body)
        elif isinstance(g, _TANGLES):
            stack.extend(g.bodies)
    return frozenset(out)


def check_positivity(f: Formula):
    """Raise PositivityError if some binder's variable occurs negated in it.

    Occurrences shadowed by an inner rebinding of the same variable belong
    to the inner binder and are checked there.
    """
    if isinstance(f, _BINARY):
        check_positivity(f.left)
        check_positivity(f.right)
    elif isinstance(f, _UNARY):
        check_positivity(f.body)
    elif isinstance(f, (Mu, Nu)):
        if _occurs_negated(f.body, f.var):
            raise PositivityError(f.var)
        check_positivity(f.body)
    elif isinstance(f, _TANGLES):
        for b in f.bodies:
            check_positivity(b)


def _occurs_negated(f: Formula, var: str) -> bool:
    if isinstance(f, NegAtom):
        return f.name == var
    if isinstance(f, _BINARY):
        return _occurs_negated(f.left, var) or _occurs_negated(f.right, var)
    if isinstance(f, _UNARY):
        return _occurs_negated(f.body, var)
    if isinstance(f, (Mu, Nu)):
        if f.var == var:
            return False
        return _occurs_negated(f.body, var)
    if isinstance(f, _TANGLES):
        return any(_occurs_negated(b, var) for b in f.bodies)
    return False


# ---------------------------------------------------------------------------
# printing

def pretty(f: Formula) -> str:
    """Canonical text form.

    Binary connectives and binders are always parenthesized, prefix
    operators never are; this makes the output unambiguous under the
    maximal-right binder rule and round-trips through ``parse``.
    """
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "~" + f.name
    if isinstance(f, And):
        return f"({pretty(f.left)} & {pretty(f.right)})"
    if isinstance(f, Or):
        return f"({pretty(f.left)} | {pretty(f.right)})"
    if isinstance(f, Dia):
        return _prefix("<>", f.body)
    if isinstance(f, Box):
        return _prefix("[]", f.body)
    if isinstance(f, DiaPlus):
        return _prefix("<+>", f.body)
    if isinstance(f, BoxPlus):
        return _prefix("[+]", f.body)
    if isinstance(f, Forall):
        return _prefix("A", f.body)
    if isinstance(f, Exists):
        return _prefix("E", f.body)
    if isinstance(f, Mu):
        return f"(mu {f.var} . {pretty(f.body)})"
    if isinstance(f, Nu):
        return f"(nu {f.var} . {pretty(f.body)})"
    if isinstance(f, TangleDia):
        return "<*>{" + ", ".join(pretty(b) for b in f.bodies) + "}"
    if isinstance(f, TangleBox):
        return "[*]{" + ", ".join(pretty(b) for b in f.bodies) + "}"
    raise TypeError(f"not a formula: {f!r}")


def _prefix(op: str, body: Formula) -> str:
    s = pretty(body)
    return op + s if s.startswith("(") else op + " " + s


# ---------------------------------------------------------------------------
# parsing

_RESERVED = {"mu", "nu"}

_SINGLE = {
    "(": "LPAR", ")": "RPAR", "{": "LBRACE", "}": "RBRACE", ",": "COMMA",
    "&": "AMP", "|": "PIPE", ".": "DOT", "~": "TILDE", "!": "BANG",
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SINGLE:
            toks.append((_SINGLE[c], c, i))
            i += 1
            continue
        if c == "-":
            if text.startswith("->", i):
                toks.append(("ARROW", "->", i))
                i += 2
                continue
            raise ParseError(i, "'->'", text[i:i + 2])
        if c == "<":
            for lit, kind in (("<>", "DIA"), ("<+>", "DIAPLUS"), ("<*>", "TANGLEDIA")):
                if text.startswith(lit, i):
                    toks.append((kind, lit, i))
                    i += len(lit)
                    break
            else:
                raise ParseError(i, "'<>', '<+>' or '<*>'", text[i:i + 3])
            continue
        if c == "[":
            for lit, kind in (("[]", "BOX"), ("[+]", "BOXPLUS"), ("[*]", "TANGLEBOX")):
                if text.startswith(lit, i):
                    toks.append((kind, lit, i))
                    i += len(lit)
                    break
            else:
                raise ParseError(i, "'[]', '[+]' or '[*]'", text[i:i + 3])
            continue
        if c.isupper():
            kw = {"T": "TOP", "F": "BOT", "A": "FORALL", "E": "EXISTS"}.get(c)
            if kw is None:
                raise ParseError(i, "one of 'T', 'F', 'A', 'E'", c)
            toks.append((kw, c, i))
            i += 1
            continue
        if c.islower():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _RESERVED:
                toks.append((word.upper(), word, i))
            else:
                toks.append(("IDENT", word, i))
            i = j
            continue
        raise ParseError(i, "a formula token", c)
    toks.append(("EOF", "", n))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self, kind: str) -> str:
        k, text, pos = self.toks[self.i]
        if k != kind:
            raise ParseError(pos, kind, text or "end of input")
        self.i += 1
        return text

    def fail(self, expected: str):
        _, text, pos = self.toks[self.i]
        raise ParseError(pos, expected, text or "end of input")

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek() == "ARROW":
            self.take("ARROW")
            return Or(dual(left), self.implies())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek() == "PIPE":
            self.take("PIPE")
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek() == "AMP":
            self.take("AMP")
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        k = self.peek()
        if k == "DIA":
            self.take(k)
            return Dia(self.unary())
        if k == "BOX":
            self.take(k)
            return Box(self.unary())
        if k == "DIAPLUS":
            self.take(k)
            return DiaPlus(self.unary())
        if k == "BOXPLUS":
            self.take(k)
            return BoxPlus(self.unary())
        if k == "FORALL":
            self.take(k)
            return Forall(self.unary())
        if k == "EXISTS":
            self.take(k)
            return Exists(self.unary())
        if k == "BANG":
            self.take(k)
            return dual(self.unary())
        if k in ("MU", "NU"):
            self.take(k)
            var = self.take("IDENT")
            self.take("DOT")
            body = self.implies()
            return Mu(var, body) if k == "MU" else Nu(var, body)
        if k in ("TANGLEDIA", "TANGLEBOX"):
            self.take(k)
            self.take("LBRACE")
            bodies = [self.implies()]
            while self.peek() == "COMMA":
                self.take("COMMA")
                bodies.append(self.implies())
            self.take("RBRACE")
            cls = TangleDia if k == "TANGLEDIA" else TangleBox
            return cls(tuple(bodies))
        return self.atom()

    def atom(self) -> Formula:
        k = self.peek()
        if k == "TOP":
            self.take(k)
            return TOP
        if k == "BOT":
            self.take(k)
            return BOT
        if k == "IDENT":
            return Atom(self.take(k))
        if k == "TILDE":
            self.take(k)
            return NegAtom(self.take("IDENT"))
        if k == "LPAR":
            self.take(k)
            f = self.implies()
            self.take("RPAR")
            return f
        self.fail("a formula")


def parse(text: str) -> Formula:
    """Parse the concrete syntax into an AST.

    Sugar (``!``, ``->``) is eliminated via ``dual`` before returning, so
    the result is in negation normal form.  Raises ParseError on bad input
    and PositivityError when a bound variable ends up negated.
    """
    p = _Parser(_tokenize(text))
    f = p.implies()
    p.take("EOF")
    check_positivity(f)
    return f

"""Translations between fragments of the extended language.

Two of these are purely syntactic (closure expansion and the fixpoint
encoding of closure); the other three are model-relative and resolve
subterms innermost-first, so nested quantifiers and tangles are decided
bottom-up.  All translations commute with the operators they do not
eliminate and are idempotent on their own outputs.
"""

from __future__ import annotations

from itertools import count

from .formula import (
    And, Atom, Bot, Box, BoxPlus, Dia, DiaPlus, Exists, Forall, Formula, Mu,
    NegAtom, Nu, Or, TangleBox, TangleDia, Top, atom_names,
)
from .kripke import KripkeModel, PointedModel, infinity_world
from .semantics import evaluate, holds

TOP = Top()
BOT = Bot()


class UnsupportedFragment(ValueError):
    pass


class _Fresh:
    """Counter-based fresh variables v0, v1, ... avoiding a formula's atoms."""

    def __init__(self, f: Formula):
        self.taken = set(atom_names(f))
        self.counter = count()

    def next(self) -> str:
        while True:
            v = f"v{next(self.counter)}"
            if v not in self.taken:
                self.taken.add(v)
                return v


def _map_children(f: Formula, t) -> Formula:
    """Rebuild ``f`` with ``t`` applied to every immediate subformula."""
    if isinstance(f, (Top, Bot, Atom, NegAtom)):
        return f
    if isinstance(f, And):
        return And(t(f.left), t(f.right))
    if isinstance(f, Or):
        return Or(t(f.left), t(f.right))
    if isinstance(f, Dia):
        return Dia(t(f.body))
    if isinstance(f, Box):
        return Box(t(f.body))
    if isinstance(f, DiaPlus):
        return DiaPlus(t(f.body))
    if isinstance(f, BoxPlus):
        return BoxPlus(t(f.body))
    if isinstance(f, Forall):
        return Forall(t(f.body))
    if isinstance(f, Exists):
        return Exists(t(f.body))
    if isinstance(f, Mu):
        return Mu(f.var, t(f.body))
    if isinstance(f, Nu):
        return Nu(f.var, t(f.body))
    if isinstance(f, TangleDia):
        return TangleDia(tuple(t(b) for b in f.bodies))
    if isinstance(f, TangleBox):
        return TangleBox(tuple(t(b) for b in f.bodies))
    raise TypeError(f"not a formula: {f!r}")


def expand_closure(f: Formula) -> Formula:
    """Eliminate the closure operators by literal expansion.

    <+>g becomes t(g) | <> t(g) and [+]g becomes t(g) & [] t(g); the output
    can be exponentially larger than the input (never more than 2^|f|).
    """
    if isinstance(f, DiaPlus):
        body = expand_closure(f.body)
        return Or(body, Dia(body))
    if isinstance(f, BoxPlus):
        body = expand_closure(f.body)
        return And(body, Box(body))
    return _map_children(f, expand_closure)


def closure_to_mu(f: Formula) -> Formula:
    """Eliminate the closure operators through fixpoints.

    <+>g becomes mu q.(t(g) | <> q) with a fresh q per occurrence, dually
    [+]g becomes nu q.(t(g) & [] q).  Output size is at most 4|f|, and the
    result is equivalent on every transitive model.
    """
    fresh = _Fresh(f)

    def t(g: Formula) -> Formula:
        if isinstance(g, DiaPlus):
            q = fresh.next()
            return Mu(q, Or(t(g.body), Dia(Atom(q))))
        if isinstance(g, BoxPlus):
            q = fresh.next()
            return Nu(q, And(t(g.body), Box(Atom(q))))
        return _map_children(g, t)

    return t(f)


def scattered_eliminate_tangle(f: Formula) -> Formula:
    """Replace every diamond tangle by F and every box tangle by T.

    Sound wherever tangles collapse, i.e. on scattered models (finite GL
    frames).  Output is never larger than the input.
    """
    if isinstance(f, TangleDia):
        return BOT
    if isinstance(f, TangleBox):
        return TOP
    return _map_children(f, scattered_eliminate_tangle)


def hat_eliminate_tangle(f: Formula, m: KripkeModel) -> Formula:
    """Resolve tangles against a hatted model's point at infinity.

    On hat(k) with k a finite GL model, a diamond tangle holds anywhere iff
    its arguments all hold at infinity, so each tangle subterm is decided
    there (innermost first) and replaced by T or F.  Raises NotHattedModel
    when ``m`` has no infinity decomposition.
    """
    inf = infinity_world(m)
    at_inf = PointedModel(m, inf)

    def t(g: Formula) -> Formula:
        if isinstance(g, TangleDia):
            return TOP if all(holds(at_inf, t(b)) for b in g.bodies) else BOT
        if isinstance(g, TangleBox):
            return TOP if any(holds(at_inf, t(b)) for b in g.bodies) else BOT
        return _map_children(g, t)

    return t(f)


def eliminate_universal(f: Formula, m: KripkeModel) -> Formula:
    """Resolve A/E subterms by their global truth on ``m``, innermost first.

    Only defined on fixpoint-free input: under a binder the replacement
    would have to be re-evaluated per unfolding, which this translation
    does not do.
    """
    def t(g: Formula) -> Formula:
        if isinstance(g, (Mu, Nu)):
            raise UnsupportedFragment("eliminate_universal does not support fixpoints")
        if isinstance(g, Forall):
            return TOP if evaluate(m, t(g.body)).is_full() else BOT
        if isinstance(g, Exists):
            return BOT if evaluate(m, t(g.body)).is_empty() else TOP
        return _map_children(g, t)

    return t(f)

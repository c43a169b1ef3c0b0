"""Seeded random models and formulas for the property suites.

Everything here is driven by an explicit ``random.Random`` instance, so
identical seeds give identical streams of test cases.
"""

from __future__ import annotations

import random

from .formula import (
    And, Atom, Bot, Box, BoxPlus, Dia, DiaPlus, Exists, Forall, Formula, Mu,
    NegAtom, Nu, Or, TangleBox, TangleDia, Top,
)
from .kripke import KripkeModel, transitive_closure

DEFAULT_OPS = ("lit", "and", "or", "dia", "box")
CLOSURE_OPS = DEFAULT_OPS + ("diaplus", "boxplus")
FULL_OPS = CLOSURE_OPS + ("forall", "exists", "mu", "nu", "tangledia", "tanglebox")


def random_model(rng: random.Random, max_worlds: int = 6, atoms=("p", "q"),
                 kind: str = "k4", edge_prob: float = 0.35) -> KripkeModel:
    """Random finite model of the requested frame class.

    Kinds: "any" (raw digraph), "k4" (transitively closed), "gl" (acyclic,
    then closed: transitive and irreflexive), "s4" (reflexive k4),
    "kd4" (k4 with a self-loop patched onto every dead end).
    """
    n = rng.randint(1, max_worlds)
    worlds = [f"w{i}" for i in range(n)]
    rel = set()
    for i in range(n):
        for j in range(n):
            if kind == "gl" and j <= i:
                continue  # edges respect the world order, so no cycles
            if kind != "any" and i == j and kind not in ("s4",):
                if kind in ("k4", "kd4") and rng.random() < edge_prob / 2:
                    rel.add((worlds[i], worlds[j]))
                continue
            if rng.random() < edge_prob:
                rel.add((worlds[i], worlds[j]))
    val = {w: {p for p in atoms if rng.random() < 0.5} for w in worlds}
    m = KripkeModel(f"rand_{kind}", worlds, rel, val)
    if kind in ("k4", "gl", "s4", "kd4"):
        m = transitive_closure(m)
    if kind == "s4":
        m = KripkeModel(m.name, m.worlds, set(m.rel) | {(w, w) for w in m.worlds}, m.val)
    if kind == "kd4":
        extra = {(w, w) for w in m.worlds if not m.successors(w)}
        if extra:
            m = transitive_closure(
                KripkeModel(m.name, m.worlds, set(m.rel) | extra, m.val))
    return m


def random_formula(rng: random.Random, atoms=("p", "q"), max_depth: int = 4,
                   ops=DEFAULT_OPS, bound=()) -> Formula:
    """Random well-formed formula over the given operator menu.

    Bound fixpoint variables only ever occur positively, so the output
    always satisfies the binder positivity requirement.  ``bound`` seeds
    the positive-only variable pool, for generating binder bodies.
    """
    return _gen(rng, list(atoms), max_depth, tuple(ops), tuple(bound))


def _gen(rng, atoms, depth, ops, bound) -> Formula:
    if depth <= 0:
        return _literal(rng, atoms, bound)
    op = rng.choice(ops)
    if op == "lit":
        return _literal(rng, atoms, bound)
    if op == "and":
        return And(_gen(rng, atoms, depth - 1, ops, bound),
                   _gen(rng, atoms, depth - 1, ops, bound))
    if op == "or":
        return Or(_gen(rng, atoms, depth - 1, ops, bound),
                  _gen(rng, atoms, depth - 1, ops, bound))
    if op == "dia":
        return Dia(_gen(rng, atoms, depth - 1, ops, bound))
    if op == "box":
        return Box(_gen(rng, atoms, depth - 1, ops, bound))
    if op == "diaplus":
        return DiaPlus(_gen(rng, atoms, depth - 1, ops, bound))
    if op == "boxplus":
        return BoxPlus(_gen(rng, atoms, depth - 1, ops, bound))
    if op == "forall":
        return Forall(_gen(rng, atoms, depth - 1, ops, bound))
    if op == "exists":
        return Exists(_gen(rng, atoms, depth - 1, ops, bound))
    if op in ("mu", "nu"):
        var = f"x{len(bound)}"
        body = _gen(rng, atoms, depth - 1, ops, bound + (var,))
        return Mu(var, body) if op == "mu" else Nu(var, body)
    if op in ("tangledia", "tanglebox"):
        k = rng.randint(1, 3)
        bodies = tuple(_gen(rng, atoms, depth - 2, ops, bound) for _ in range(k))
        return TangleDia(bodies) if op == "tangledia" else TangleBox(bodies)
    raise ValueError(f"unknown op {op!r}")


def _literal(rng, atoms, bound) -> Formula:
    pool = list(atoms) + list(bound)
    roll = rng.random()
    if roll < 0.08:
        return Top()
    if roll < 0.16:
        return Bot()
    name = rng.choice(pool)
    if name in bound or rng.random() < 0.5:
        return Atom(name)  # bound variables stay positive
    return NegAtom(name)

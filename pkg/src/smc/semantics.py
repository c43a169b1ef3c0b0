"""Truth sets for the full extended language on finite Kripke models.

Evaluation is a pure function of (model, formula, valuation); truth sets
are bit vectors indexed by the model's world order.  Fixpoints are computed
by simultaneous iteration, which converges within |worlds| rounds because
binder bodies are positive in their variable.

The tangle operators get their direct semantics here: the diamond tangle is
the greatest S with S included in R^-1[S n [phi_i]] for every argument,
computed by shrinking from the full set.  (Encoding it into the fixpoint
language yields the greatest-fixpoint formula nu p. AND_i <>(p & phi_i);
the cross-check between the two routes is part of the test suite.)
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import (
    And, Atom, Bot, Box, BoxPlus, Dia, DiaPlus, Exists, Forall, Formula, Mu,
    NegAtom, Nu, Or, TangleBox, TangleDia, Top,
)
from .kripke import KripkeModel, PointedModel, _bit_indices


@dataclass(frozen=True)
class TruthSet:
    """Subset of a model's worlds as a bit vector over its world order."""

    model: KripkeModel
    bits: int

    def __post_init__(self):
        if self.bits & ~self.model.full_mask:
            raise ValueError("bits outside the model's world range")

    @classmethod
    def from_worlds(cls, model: KripkeModel, worlds) -> "TruthSet":
        bits = 0
        for w in worlds:
            bits |= 1 << model.index(w)
        return cls(model, bits)

    def worlds(self) -> tuple[str, ...]:
        return tuple(self.model.worlds[i] for i in _bit_indices(self.bits))

    def __contains__(self, w: str) -> bool:
        return self.bits >> self.model.index(w) & 1 == 1

    def __and__(self, other: "TruthSet") -> "TruthSet":
        self._same(other)
        return TruthSet(self.model, self.bits & other.bits)

    def __or__(self, other: "TruthSet") -> "TruthSet":
        self._same(other)
        return TruthSet(self.model, self.bits | other.bits)

    def complement(self) -> "TruthSet":
        return TruthSet(self.model, self.bits ^ self.model.full_mask)

    def is_full(self) -> bool:
        return self.bits == self.model.full_mask

    def is_empty(self) -> bool:
        return self.bits == 0

    def _same(self, other: "TruthSet"):
        if other.model is not self.model and other.model != self.model:
            raise ValueError("truth sets belong to different models")


class Valuation:
    """Overrides the model's valuation for selected atoms.

    Used both for free variables and, internally, for fixpoint iteration.
    """

    def __init__(self, assignments: dict[str, TruthSet] | None = None):
        self.assignments = dict(assignments or {})
        models = {id(ts.model) for ts in self.assignments.values()}
        if len(models) > 1:
            raise ValueError("valuation mixes truth sets of different models")

    def bits(self) -> dict[str, int]:
        return {p: ts.bits for p, ts in self.assignments.items()}


def _dia_bits(m: KripkeModel, x: int) -> int:
    out = 0
    for i in _bit_indices(x):
        out |= m.pred_masks[i]
    return out


def _box_bits(m: KripkeModel, x: int) -> int:
    return _dia_bits(m, x ^ m.full_mask) ^ m.full_mask


def evaluate(m: KripkeModel, f: Formula, valuation: Valuation | None = None) -> TruthSet:
    """Truth set of ``f`` on ``m``.

    Atoms no valuation covers resolve through the model's own valuation,
    and an atom true nowhere is simply false everywhere.
    """
    env = valuation.bits() if valuation else {}
    return TruthSet(m, _eval(m, f, env))


def holds(pm: PointedModel, f: Formula, valuation: Valuation | None = None) -> bool:
    return evaluate(pm.model, f, valuation).bits >> pm.model.index(pm.world) & 1 == 1


def _eval(m: KripkeModel, f: Formula, env: dict[str, int]) -> int:
    full = m.full_mask
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Atom):
        return env[f.name] if f.name in env else m.atom_mask(f.name)
    if isinstance(f, NegAtom):
        x = env[f.name] if f.name in env else m.atom_mask(f.name)
        return x ^ full
    if isinstance(f, And):
        return _eval(m, f.left, env) & _eval(m, f.right, env)
    if isinstance(f, Or):
        return _eval(m, f.left, env) | _eval(m, f.right, env)
    if isinstance(f, Dia):
        return _dia_bits(m, _eval(m, f.body, env))
    if isinstance(f, Box):
        return _box_bits(m, _eval(m, f.body, env))
    if isinstance(f, DiaPlus):
        x = _eval(m, f.body, env)
        return x | _dia_bits(m, x)
    if isinstance(f, BoxPlus):
        x = _eval(m, f.body, env)
        return x & _box_bits(m, x)
    if isinstance(f, Exists):
        return full if _eval(m, f.body, env) else 0
    if isinstance(f, Forall):
        return full if _eval(m, f.body, env) == full else 0
    if isinstance(f, Mu):
        x = 0
        while True:
            nxt = _eval(m, f.body, {**env, f.var: x})
            if nxt == x:
                return x
            x = nxt
    if isinstance(f, Nu):
        x = full
        while True:
            nxt = _eval(m, f.body, {**env, f.var: x})
            if nxt == x:
                return x
            x = nxt
    if isinstance(f, TangleDia):
        return _tangle_bits(m, [_eval(m, b, env) for b in f.bodies])
    if isinstance(f, TangleBox):
        inner = _tangle_bits(m, [_eval(m, b, env) ^ full for b in f.bodies])
        return inner ^ full
    raise TypeError(f"not a formula: {f!r}")


def _tangle_bits(m: KripkeModel, body_bits: list[int]) -> int:
    s = m.full_mask
    while True:
        nxt = m.full_mask
        for y in body_bits:
            nxt &= _dia_bits(m, s & y)
        if nxt == s:
            return s
        s = nxt


def tangle_direct(m: KripkeModel, bodies, valuation: Valuation | None = None) -> TruthSet:
    """Greatest S with S contained in R^-1[S n [phi]] for every body phi.

    Iterates S <- AND_i R^-1[S n [phi_i]] downward from the full set until
    stable.  On scattered (finite GL) models this is always empty.
    """
    bodies = list(bodies)
    if not bodies:
        raise ValueError("tangle needs at least one body")
    env = valuation.bits() if valuation else {}
    return TruthSet(m, _tangle_bits(m, [_eval(m, b, env) for b in bodies]))


def check_connectedness_axiom(m: KripkeModel, trials: int = 100, seed: int = 0):
    """Test validity of  A([+]p | [+]~p) -> (A p | A ~p)  on ``m``.

    Runs ``trials`` pseudorandom valuations of p (fixed seed, so the check
    is deterministic).  Returns (True, None) when the axiom held every
    time, else (False, witness) where witness is the failing truth set
    for p.
    """
    rng = random.Random(seed)
    n = len(m.worlds)
    full = m.full_mask
    for _ in range(trials):
        p_bits = rng.getrandbits(n) & full
        boxplus_p = p_bits & _box_bits(m, p_bits)
        np_bits = p_bits ^ full
        boxplus_np = np_bits & _box_bits(m, np_bits)
        antecedent = full if (boxplus_p | boxplus_np) == full else 0
        consequent = full if (p_bits == full or p_bits == 0) else 0
        if antecedent == full and consequent != full:
            return False, TruthSet(m, p_bits)
    return True, None

"""Exact minimal-separating-formula synthesis and game-tree verification.

Synthesis is a dynamic program over semantic signatures: the extension of
a candidate formula over a fixed, ordered universe of pointed models is a
bit vector, and two candidates with equal signatures are interchangeable
in any larger formula, so each signature is stored once at the first
(minimal) size it appears.  The size-1 layer holds verum, falsum and the
literals; layer a+b+1 intersects and unions stored layers a and b; layer
a+1 applies the modal preimage operators per model, and the all-or-nothing
global quantifier signatures when those operators are enabled.

Witnesses are canonical: layers are filled in a fixed operator order
(T < F < lit < dia < box < and < or < exists < forall), operands in stored
order, and the first derivation of each signature wins.  Runs are
therefore deterministic, and the memory cap is checked against a
deterministic byte estimate of the signature store rather than process
RSS, so capped runs reproduce exactly.

The game verifier replays a formula's syntax tree as a strategy against a
greedy opponent who always answers modal moves with every successor; a
closed tree has exactly one node per syntax node, which pins the
correspondence between winning-strategy length and formula size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .formula import (
    And, Atom, Bot, Box, Dia, Exists, Forall, Formula, NegAtom, Or, Top,
    pretty, size,
)
from .kripke import KripkeModel, PointedModel, _bit_indices, quotient_by_bisim
from .semantics import evaluate, holds

ALL_OPS = frozenset({"lit", "and", "or", "dia", "box", "forall", "exists"})
MODAL_ONLY_OPS = frozenset({"lit", "and", "or", "dia", "box"})
DEFAULT_MEM_CAP = 2 << 30  # 2 GiB of estimated signature storage


class UnsupportedOperator(ValueError):
    pass


@dataclass(frozen=True)
class SynthProblem:
    left: tuple[PointedModel, ...]
    right: tuple[PointedModel, ...]
    ops: frozenset[str] = MODAL_ONLY_OPS
    atoms: frozenset[str] | None = None  # None: every atom of a participating model
    max_size: int = 12

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        object.__setattr__(self, "ops", frozenset(self.ops))
        bad = self.ops - ALL_OPS
        if bad:
            raise ValueError(f"unknown synthesis ops: {sorted(bad)}")
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")


@dataclass
class SynthResult:
    status: str  # "found" | "infeasible" | "budget" | "memory"
    size: int | None = None
    witness: Formula | None = None
    bisimilar_pair: tuple[PointedModel, PointedModel] | None = None
    exhausted_through: int = 0  # every size up to this was fully enumerated
    signatures_stored: int = 0
    estimated_bytes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


class Universe:
    """Ordered pointed-model space all signatures are indexed against.

    Holds every world of every participating model (models in order of
    first appearance, worlds in model order) plus per-point predecessor
    masks and per-model masks for the global quantifiers.
    """

    def __init__(self, models: list[KripkeModel]):
        self.models = list(models)
        self.points: list[PointedModel] = []
        self.point_index: dict[tuple[int, str], int] = {}
        for mi, m in enumerate(self.models):
            for w in m.worlds:
                self.point_index[(mi, w)] = len(self.points)
                self.points.append(PointedModel(m, w))
        n = len(self.points)
        self.full_mask = (1 << n) - 1
        self.model_masks = []
        self.pred_masks = [0] * n
        base = 0
        for m in self.models:
            k = len(m.worlds)
            self.model_masks.append(((1 << k) - 1) << base)
            for local in range(k):
                self.pred_masks[base + local] = m.pred_masks[local] << base
            base += k
        self.atom_masks: dict[str, int] = {}
        for mi, m in enumerate(self.models):
            shift = self.model_masks[mi].bit_length() - len(m.worlds)
            for p in m.atoms():
                self.atom_masks[p] = self.atom_masks.get(p, 0) | (m.atom_mask(p) << shift)

    def index_of(self, pm: PointedModel) -> int:
        for mi, m in enumerate(self.models):
            if m is pm.model:
                return self.point_index[(mi, pm.world)]
        raise ValueError(f"{pm} is not part of this universe")

    def mask_of(self, points) -> int:
        bits = 0
        for pm in points:
            bits |= 1 << self.index_of(pm)
        return bits

    def dia(self, sig: int) -> int:
        out = 0
        for i in _bit_indices(sig):
            out |= self.pred_masks[i]
        return out

    def box(self, sig: int) -> int:
        return self.dia(sig ^ self.full_mask) ^ self.full_mask

    def forall(self, sig: int) -> int:
        out = 0
        for mm in self.model_masks:
            if sig & mm == mm:
                out |= mm
        return out

    def exists(self, sig: int) -> int:
        out = 0
        for mm in self.model_masks:
            if sig & mm:
                out |= mm
        return out

    def signature_of(self, f: Formula) -> int:
        """Extension of a formula over the universe, via the evaluator."""
        bits = 0
        base = 0
        for m in self.models:
            bits |= evaluate(m, f).bits << base
            base += len(m.worlds)
        return bits


def _participating_models(left, right) -> list[KripkeModel]:
    models: list[KripkeModel] = []
    for pm in list(left) + list(right):
        if not any(m is pm.model for m in models):
            models.append(pm.model)
    return models


def _bisimilar_cross_pair(left, right, models, atoms):
    from .bisim import max_bisimulation

    cache: dict[tuple[int, int], frozenset] = {}

    def pairs(ma, mb):
        key = (id(ma), id(mb))
        if key not in cache:
            cache[key] = max_bisimulation(ma, mb, atoms).pairs
        return cache[key]

    for lp in left:
        for rp in right:
            if (lp.world, rp.world) in pairs(lp.model, rp.model):
                return lp, rp
    return None


def min_separating_formula(problem: SynthProblem, *,
                           mem_cap_bytes: int = DEFAULT_MEM_CAP,
                           quotient: bool = False) -> SynthResult:
    """Least formula size over the problem's operator menu that is true on
    every left point and false on every right point, with a canonical
    witness.

    Outcomes: "found" with (size, witness); "infeasible" when some left
    point is locally bisimilar to a right point, so no separator exists in
    any bisimulation-invariant fragment; "budget" when every size up to
    max_size was exhausted; "memory" when the signature store outgrew the
    cap (reported distinctly so lower-bound claims are never silently
    weakened).
    """
    left, right = list(problem.left), list(problem.right)
    models = _participating_models(left, right)
    atoms = problem.atoms
    if atoms is None:
        atoms = frozenset().union(*(m.atoms() for m in models)) if models else frozenset()
    atoms = frozenset(atoms)

    # The bisimilarity verdict is definitive for the purely modal menu; with
    # the global quantifiers it stays sound only when every point lives in
    # one model, where global truth cannot tell bisimilar points apart.
    quantified = bool(problem.ops & {"forall", "exists"})
    if not quantified or len(models) <= 1:
        bisim_atoms = atoms if "lit" in problem.ops else frozenset()
        pair = _bisimilar_cross_pair(left, right, models, bisim_atoms)
        if pair is not None:
            return SynthResult(status="infeasible", bisimilar_pair=pair)

    if quotient:
        qmodels, qleft, qright = [], [], []
        qmap = {}
        for m in models:
            q, rep = quotient_by_bisim(m, atoms)
            qmodels.append(q)
            qmap[id(m)] = (q, rep)
        for pm in left:
            q, rep = qmap[id(pm.model)]
            qleft.append(PointedModel(q, rep[pm.world]))
        for pm in right:
            q, rep = qmap[id(pm.model)]
            qright.append(PointedModel(q, rep[pm.world]))
        models, left, right = qmodels, qleft, qright

    uni = Universe(models)
    lmask = uni.mask_of(left)
    rmask = uni.mask_of(right)

    store: dict[int, tuple] = {}
    by_size: dict[int, list[int]] = {}
    state = _DPState(store, by_size, lmask, rmask, mem_cap_bytes)

    layer1 = []
    state.offer(uni.full_mask, ("top",), layer1)
    state.offer(0, ("bot",), layer1)
    if "lit" in problem.ops:
        for p in sorted(atoms):
            state.offer(uni.atom_masks.get(p, 0), ("lit", p, True), layer1)
            state.offer(uni.atom_masks.get(p, 0) ^ uni.full_mask,
                        ("lit", p, False), layer1)
    by_size[1] = layer1
    if state.goal is not None:
        return _finish_found(state, 1)
    if state.over_cap:
        return _finish_memory(state, 0)

    ops = problem.ops
    for s in range(2, problem.max_size + 1):
        layer: list[int] = []
        by_size[s] = layer
        prev = by_size.get(s - 1, ())
        if "dia" in ops:
            for sub in prev:
                state.offer(uni.dia(sub), ("dia", sub), layer)
        if "box" in ops:
            for sub in prev:
                state.offer(uni.box(sub), ("box", sub), layer)
        if "and" in ops:
            for a in range(1, (s - 1) // 2 + 1):
                b = s - 1 - a
                xs, ys = by_size.get(a, ()), by_size.get(b, ())
                if a == b:
                    for i, x in enumerate(xs):
                        for y in ys[i:]:
                            state.offer(x & y, ("and", x, y), layer)
                else:
                    for x in xs:
                        for y in ys:
                            state.offer(x & y, ("and", x, y), layer)
        if "or" in ops:
            for a in range(1, (s - 1) // 2 + 1):
                b = s - 1 - a
                xs, ys = by_size.get(a, ()), by_size.get(b, ())
                if a == b:
                    for i, x in enumerate(xs):
                        for y in ys[i:]:
                            state.offer(x | y, ("or", x, y), layer)
                else:
                    for x in xs:
                        for y in ys:
                            state.offer(x | y, ("or", x, y), layer)
        if "exists" in ops:
            for sub in prev:
                state.offer(uni.exists(sub), ("ex", sub), layer)
        if "forall" in ops:
            for sub in prev:
                state.offer(uni.forall(sub), ("fa", sub), layer)
        if state.goal is not None:
            return _finish_found(state, s)
        if state.over_cap:
            return _finish_memory(state, s - 1)

    return SynthResult(status="budget", exhausted_through=problem.max_size,
                       signatures_stored=len(store),
                       estimated_bytes=state.bytes_estimate)


@dataclass
class _DPState:
    store: dict
    by_size: dict
    lmask: int
    rmask: int
    mem_cap: int
    bytes_estimate: int = 0
    goal: int | None = None
    over_cap: bool = False

    def offer(self, sig: int, deriv: tuple, layer: list):
        if self.goal is not None or self.over_cap or sig in self.store:
            return
        self.store[sig] = deriv
        layer.append(sig)
        self.bytes_estimate += 96 + (sig.bit_length() >> 3)
        if sig & self.lmask == self.lmask and not sig & self.rmask:
            self.goal = sig
        elif self.bytes_estimate > self.mem_cap:
            self.over_cap = True


def _finish_found(state: _DPState, s: int) -> SynthResult:
    witness = _reconstruct(state.store, state.goal)
    return SynthResult(status="found", size=s, witness=witness,
                       exhausted_through=s - 1,
                       signatures_stored=len(state.store),
                       estimated_bytes=state.bytes_estimate)


def _finish_memory(state: _DPState, complete_through: int) -> SynthResult:
    return SynthResult(status="memory", exhausted_through=complete_through,
                       signatures_stored=len(state.store),
                       estimated_bytes=state.bytes_estimate)


def _reconstruct(store: dict, sig: int) -> Formula:
    deriv = store[sig]
    kind = deriv[0]
    if kind == "top":
        return Top()
    if kind == "bot":
        return Bot()
    if kind == "lit":
        return Atom(deriv[1]) if deriv[2] else NegAtom(deriv[1])
    if kind == "dia":
        return Dia(_reconstruct(store, deriv[1]))
    if kind == "box":
        return Box(_reconstruct(store, deriv[1]))
    if kind == "and":
        return And(_reconstruct(store, deriv[1]), _reconstruct(store, deriv[2]))
    if kind == "or":
        return Or(_reconstruct(store, deriv[1]), _reconstruct(store, deriv[2]))
    if kind == "ex":
        return Exists(_reconstruct(store, deriv[1]))
    if kind == "fa":
        return Forall(_reconstruct(store, deriv[1]))
    raise ValueError(f"corrupt derivation {deriv!r}")


def verify_separator(f: Formula, left, right) -> bool:
    """True iff ``f`` holds at every left point and fails at every right one."""
    cache: dict[int, object] = {}

    def truth(pm: PointedModel) -> bool:
        ts = cache.get(id(pm.model))
        if ts is None:
            ts = evaluate(pm.model, f)
            cache[id(pm.model)] = ts
        return pm.world in ts

    return all(truth(pm) for pm in left) and not any(truth(pm) for pm in right)


# ---------------------------------------------------------------------------
# model equivalence game verification

_GAME_OPS = (Top, Bot, Atom, NegAtom, And, Or, Dia, Box)


@dataclass
class GameNode:
    id: int
    label: str
    left: tuple[PointedModel, ...]
    right: tuple[PointedModel, ...]
    stub: bool = False
    children: list["GameNode"] = field(default_factory=list)

    def count(self) -> int:
        return 1 + sum(c.count() for c in self.children)


@dataclass
class GameTree:
    root: GameNode
    closed: bool
    failure_node: GameNode | None = None
    reason: str = ""

    @property
    def node_count(self) -> int:
        return self.root.count()

    def to_json(self) -> dict:
        nodes = []

        def walk(node: GameNode, parent: int | None):
            nodes.append({
                "id": node.id,
                "label": node.label,
                "parent": parent,
                "left": [{"model": pm.model.name, "world": pm.world} for pm in node.left],
                "right": [{"model": pm.model.name, "world": pm.world} for pm in node.right],
                "stub": node.stub,
            })
            for c in node.children:
                walk(c, node.id)

        walk(self.root, None)
        failure = None
        if self.failure_node is not None:
            failure = {"node": self.failure_node.id, "reason": self.reason}
        return {"closed": self.closed, "nodes": nodes, "failure": failure}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


class _MegFailure(Exception):
    def __init__(self, node: GameNode, reason: str):
        self.node = node
        self.reason = reason


def meg_verify(f: Formula, left, right) -> GameTree:
    """Replay ``f``'s syntax tree as a strategy in the model equivalence
    game against a greedy opponent, starting from (left, right).

    Disjunctions split the left set by the truth of each disjunct and
    conjunctions split the right set dually.  A diamond move picks, for
    each left point, a successor satisfying the body, preferring the
    successor-map child when it qualifies and the first in world order
    otherwise; box moves pick falsifying successors on the right.  The
    greedy opponent answers every modal move with all successors of every
    point on the other side.

    Returns the closed tree, whose node count equals size(f), or a tree
    flagged with the first node where a move is impossible.  Only the
    basic modal operators are playable; anything else raises
    UnsupportedOperator.
    """
    _check_game_language(f)
    left = tuple(dict.fromkeys(left))
    right = tuple(dict.fromkeys(right))
    counter = iter(range(1 << 30))
    root_holder: list[GameNode] = []

    truth_cache: dict[tuple[int, Formula], object] = {}

    def sat(pm: PointedModel, g: Formula) -> bool:
        key = (id(pm.model), g)
        ts = truth_cache.get(key)
        if ts is None:
            ts = evaluate(pm.model, g)
            truth_cache[key] = ts
        return pm.world in ts

    def expand(pm: PointedModel):
        return [PointedModel(pm.model, v) for v in pm.model.successors(pm.world)]

    def play(g: Formula, lset, rset, parent: GameNode | None = None) -> GameNode:
        node = GameNode(next(counter), _label(g), tuple(lset), tuple(rset))
        if parent is None:
            root_holder.append(node)
        else:
            parent.children.append(node)
        if isinstance(g, (Top, Bot, Atom, NegAtom)):
            bad_left = [pm for pm in lset if not sat(pm, g)]
            bad_right = [pm for pm in rset if sat(pm, g)]
            if bad_left:
                raise _MegFailure(node, f"literal {node.label} fails on the left at {bad_left[0]}")
            if bad_right:
                raise _MegFailure(node, f"literal {node.label} holds on the right at {bad_right[0]}")
            node.stub = True
            return node
        if isinstance(g, Or):
            l1 = [pm for pm in lset if sat(pm, g.left)]
            l2 = [pm for pm in lset if sat(pm, g.right)]
            missed = [pm for pm in lset if pm not in l1 and pm not in l2]
            if missed:
                raise _MegFailure(node, f"no disjunct covers left point {missed[0]}")
            play(g.left, l1, rset, node)
            play(g.right, l2, rset, node)
            return node
        if isinstance(g, And):
            r1 = [pm for pm in rset if not sat(pm, g.left)]
            r2 = [pm for pm in rset if not sat(pm, g.right)]
            missed = [pm for pm in rset if pm not in r1 and pm not in r2]
            if missed:
                raise _MegFailure(node, f"no conjunct excludes right point {missed[0]}")
            play(g.left, lset, r1, node)
            play(g.right, lset, r2, node)
            return node
        if isinstance(g, Dia):
            new_left = []
            for pm in lset:
                choice = _dia_choice(pm, g.body, sat)
                if choice is None:
                    raise _MegFailure(node, f"no successor of {pm} satisfies the body")
                new_left.append(choice)
            new_right = []
            for pm in rset:
                new_right.extend(expand(pm))
            play(g.body, _dedup(new_left), _dedup(new_right), node)
            return node
        if isinstance(g, Box):
            new_right = []
            for pm in rset:
                choice = next((c for c in expand(pm) if not sat(c, g.body)), None)
                if choice is None:
                    raise _MegFailure(node, f"no successor of {pm} falsifies the body")
                new_right.append(choice)
            new_left = []
            for pm in lset:
                new_left.extend(expand(pm))
            play(g.body, _dedup(new_left), _dedup(new_right), node)
            return node
        raise UnsupportedOperator(_label(g))

    try:
        root = play(f, left, right)
        return GameTree(root, closed=True)
    except _MegFailure as fail:
        return GameTree(root_holder[0], closed=False,
                        failure_node=fail.node, reason=fail.reason)


def _dia_choice(pm: PointedModel, body: Formula, sat):
    mapped = pm.model.succ.get(pm.world)
    if mapped is not None:
        cand = PointedModel(pm.model, mapped)
        if sat(cand, body):
            return cand
    for v in pm.model.successors(pm.world):
        cand = PointedModel(pm.model, v)
        if sat(cand, body):
            return cand
    return None


def _dedup(points):
    return tuple(dict.fromkeys(points))


def _check_game_language(f: Formula):
    if isinstance(f, _GAME_OPS):
        if isinstance(f, (And, Or)):
            _check_game_language(f.left)
            _check_game_language(f.right)
        elif isinstance(f, (Dia, Box)):
            _check_game_language(f.body)
        return
    raise UnsupportedOperator(
        f"the game plays literals, booleans and plain modalities only, not {type(f).__name__}")


def _label(g: Formula) -> str:
    if isinstance(g, And):
        return "&"
    if isinstance(g, Or):
        return "|"
    if isinstance(g, Dia):
        return "<>"
    if isinstance(g, Box):
        return "[]"
    return pretty(g)

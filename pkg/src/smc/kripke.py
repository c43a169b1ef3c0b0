"""Finite Kripke models, frame-class predicates, and model constructions.

Models are immutable after construction: every construction here returns a
fresh model, so concurrent readers never need locks.  World identifiers are
plain strings; generators keep them deterministic so that runs are
reproducible and diffable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class UnknownWorld(KeyError):
    pass


class NotHattedModel(ValueError):
    """The model has no point-at-infinity decomposition."""


class KripkeModel:
    """Finite worlds, a binary relation, a valuation, and an optional
    partial successor map used by the generated model families.

    The relation is stored exactly as given; nothing is silently closed
    under transitivity.
    """

    def __init__(self, name, worlds, rel, val=None, succ=None):
        self.name = str(name)
        self.worlds = tuple(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("duplicate world ids")
        wset = set(self.worlds)
        self.rel = frozenset((a, b) for a, b in rel)
        for a, b in self.rel:
            if a not in wset or b not in wset:
                raise ValueError(f"relation edge ({a!r}, {b!r}) leaves the world set")
        val = val or {}
        self.val = {w: frozenset(val.get(w, ())) for w in self.worlds}
        for w in val:
            if w not in wset:
                raise ValueError(f"valuation for unknown world {w!r}")
        self.succ = dict(succ or {})
        for w, v in self.succ.items():
            if w not in wset or v not in wset:
                raise UnknownWorld(w if w not in wset else v)
            if (w, v) not in self.rel:
                raise ValueError(f"succ({w!r}) = {v!r} is not an R-successor")

        self._index = {w: i for i, w in enumerate(self.worlds)}
        n = len(self.worlds)
        succ_masks = [0] * n
        pred_masks = [0] * n
        succ_lists: list[list[str]] = [[] for _ in range(n)]
        for a, b in self.rel:
            ia, ib = self._index[a], self._index[b]
            succ_masks[ia] |= 1 << ib
            pred_masks[ib] |= 1 << ia
        for w in self.worlds:
            ia = self._index[w]
            m = succ_masks[ia]
            succ_lists[ia] = [self.worlds[i] for i in _bit_indices(m)]
        self.succ_masks = tuple(succ_masks)
        self.pred_masks = tuple(pred_masks)
        self._succ_lists = tuple(tuple(s) for s in succ_lists)
        self.full_mask = (1 << n) - 1
        self._atom_masks: dict[str, int] = {}
        for w in self.worlds:
            for p in self.val[w]:
                self._atom_masks[p] = self._atom_masks.get(p, 0) | (1 << self._index[w])
        self._hash = None

    def index(self, w: str) -> int:
        try:
            return self._index[w]
        except KeyError:
            raise UnknownWorld(w) from None

    def successors(self, w: str) -> tuple[str, ...]:
        return self._succ_lists[self.index(w)]

    def atoms(self) -> frozenset[str]:
        return frozenset(self._atom_masks)

    def atom_mask(self, p: str) -> int:
        return self._atom_masks.get(p, 0)

    def relabel(self, fn) -> "KripkeModel":
        """Fresh model with every world id mapped through ``fn``."""
        return KripkeModel(
            self.name,
            [fn(w) for w in self.worlds],
            [(fn(a), fn(b)) for a, b in self.rel],
            {fn(w): self.val[w] for w in self.worlds},
            {fn(w): fn(v) for w, v in self.succ.items()},
        )

    def rename(self, name: str) -> "KripkeModel":
        m = KripkeModel(name, self.worlds, self.rel, self.val, self.succ)
        return m

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (self.worlds == other.worlds and self.rel == other.rel
                and self.val == other.val and self.succ == other.succ)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.worlds, self.rel,
                               tuple(sorted((w, v) for w, v in self.succ.items())),
                               tuple(self.val[w] for w in self.worlds)))
        return self._hash

    def __repr__(self):
        return f"KripkeModel({self.name!r}, {len(self.worlds)} worlds, {len(self.rel)} edges)"

    # -- JSON interface ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "worlds": list(self.worlds),
            "rel": sorted([a, b] for a, b in self.rel),
            "val": {w: sorted(self.val[w]) for w in self.worlds if self.val[w]},
            "succ": {w: self.succ[w] for w in self.worlds if w in self.succ},
        }

    @classmethod
    def from_json(cls, data: dict) -> "KripkeModel":
        allowed = {"name", "worlds", "rel", "val", "succ"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown keys in model file: {sorted(unknown)}")
        return cls(
            data.get("name", "model"),
            data["worlds"],
            [tuple(e) for e in data.get("rel", [])],
            data.get("val", {}),
            data.get("succ", {}),
        )


def _bit_indices(mask: int):
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


def save_model(m: KripkeModel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(m.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> KripkeModel:
    with open(path, encoding="utf-8") as fh:
        return KripkeModel.from_json(json.load(fh))


@dataclass(frozen=True)
class PointedModel:
    """A model together with a designated world."""

    model: KripkeModel
    world: str

    def __post_init__(self):
        self.model.index(self.world)

    def __repr__(self):
        return f"({self.model.name}, {self.world})"


@dataclass(frozen=True)
class FrameClassReport:
    transitive: bool
    reflexive: bool
    irreflexive: bool
    serial: bool
    converse_wellfounded: bool
    connected: bool
    locally_connected: bool

    @property
    def k4(self) -> bool:
        return self.transitive

    @property
    def kd4(self) -> bool:
        return self.transitive and self.serial

    @property
    def s4(self) -> bool:
        return self.transitive and self.reflexive

    @property
    def gl(self) -> bool:
        return self.transitive and self.converse_wellfounded

    @property
    def tc(self) -> bool:
        return self.kd4 and self.connected and self.locally_connected


def classify(m: KripkeModel) -> FrameClassReport:
    """Compute every frame-class flag exactly.

    Connectedness is undirected R-reachability between every pair of
    worlds; local connectedness asks the same of R(a) under the induced
    relation, for every a.  Seriality means every world has at least one
    successor.
    """
    n = len(m.worlds)
    idx = range(n)
    smasks = m.succ_masks

    transitive = True
    for i in idx:
        reach2 = 0
        for j in _bit_indices(smasks[i]):
            reach2 |= smasks[j]
        if reach2 & ~smasks[i]:
            transitive = False
            break

    reflexive = all(smasks[i] >> i & 1 for i in idx)
    irreflexive = not any(smasks[i] >> i & 1 for i in idx)
    serial = all(smasks[i] for i in idx)
    converse_wellfounded = _acyclic(smasks)
    connected = _connected_subset(m, m.full_mask)
    locally_connected = all(_connected_subset(m, smasks[i]) for i in idx)

    return FrameClassReport(
        transitive=transitive,
        reflexive=reflexive,
        irreflexive=irreflexive,
        serial=serial,
        converse_wellfounded=converse_wellfounded,
        connected=connected,
        locally_connected=locally_connected,
    )


def _acyclic(smasks) -> bool:
    n = len(smasks)
    color = [0] * n  # 0 unvisited, 1 on stack, 2 done
    for start in range(n):
        if color[start]:
            continue
        stack = [(start, iter(_bit_indices(smasks[start])))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return False
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(_bit_indices(smasks[nxt]))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return True


def _connected_subset(m: KripkeModel, subset_mask: int) -> bool:
    # undirected reachability restricted to the subset
    if subset_mask == 0:
        return True
    undirected = [(m.succ_masks[i] | m.pred_masks[i]) & subset_mask
                  for i in range(len(m.worlds))]
    start = (subset_mask & -subset_mask).bit_length() - 1
    seen = 1 << start
    frontier = seen
    while frontier:
        new = 0
        for i in _bit_indices(frontier):
            new |= undirected[i]
        frontier = new & ~seen
        seen |= new
    return seen & subset_mask == subset_mask


def transitive_closure(m: KripkeModel) -> KripkeModel:
    """Helper for generators; classify never closes anything silently."""
    n = len(m.worlds)
    masks = list(m.succ_masks)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = masks[i]
            for j in _bit_indices(masks[i]):
                acc |= masks[j]
            if acc != masks[i]:
                masks[i] = acc
                changed = True
    rel = [(m.worlds[i], m.worlds[j]) for i in range(n) for j in _bit_indices(masks[i])]
    return KripkeModel(m.name, m.worlds, rel, m.val, m.succ)


def disjoint_union(models, tags=None, name=None) -> KripkeModel:
    """Coproduct of models; worlds are tagged to keep ids disjoint.

    Tags default to the component index.  Relations, valuations and
    successor maps are copied component-wise.
    """
    models = list(models)
    if not models:
        raise ValueError("disjoint_union of an empty family")
    if tags is None:
        tags = [str(i) for i in range(len(models))]
    if len(tags) != len(models) or len(set(tags)) != len(tags):
        raise ValueError("tags must be distinct and match the component count")
    worlds, rel, val, succ = [], [], {}, {}
    for tag, m in zip(tags, models):
        for w in m.worlds:
            tw = f"{tag}/{w}"
            worlds.append(tw)
            val[tw] = m.val[w]
        rel.extend((f"{tag}/{a}", f"{tag}/{b}") for a, b in m.rel)
        succ.update({f"{tag}/{w}": f"{tag}/{v}" for w, v in m.succ.items()})
    if name is None:
        name = " + ".join(m.name for m in models)
    return KripkeModel(name, worlds, rel, val, succ)


def generated_submodel(m: KripkeModel, w: str) -> KripkeModel:
    """Restriction to the reflexive-transitive R-cone of ``w``.

    The result is persistent: no R-edge leaves its domain.
    """
    start = m.index(w)
    seen = 1 << start
    frontier = seen
    while frontier:
        new = 0
        for i in _bit_indices(frontier):
            new |= m.succ_masks[i]
        frontier = new & ~seen
        seen |= new
    keep = {m.worlds[i] for i in _bit_indices(seen)}
    worlds = [u for u in m.worlds if u in keep]
    rel = [(a, b) for a, b in m.rel if a in keep and b in keep]
    val = {u: m.val[u] for u in worlds}
    succ = {u: v for u, v in m.succ.items() if u in keep and v in keep}
    return KripkeModel(f"{m.name}@{w}", worlds, rel, val, succ)


def hat(m: KripkeModel) -> KripkeModel:
    """Add a point at infinity seen by every world, itself included.

    The new world carries no atoms and the successor map is unchanged, so
    critical branches never enter it.
    """
    inf = "inf"
    taken = set(m.worlds)
    while inf in taken:
        inf += "'"
    worlds = list(m.worlds) + [inf]
    rel = list(m.rel) + [(w, inf) for w in worlds]
    val = dict(m.val)
    val[inf] = frozenset()
    return KripkeModel(f"{m.name}_hat", worlds, rel, val, m.succ)


def infinity_world(m: KripkeModel) -> str:
    """The designated point at infinity of a hatted model.

    Detected structurally: the unique reflexive world seen by every world
    whose removal leaves a transitive irreflexive (finite GL) model with
    no other edges into it.  Raises NotHattedModel otherwise.
    """
    n = len(m.worlds)
    full = m.full_mask
    candidates = [i for i in range(n)
                  if m.pred_masks[i] == full and m.succ_masks[i] >> i & 1]
    for i in candidates:
        w = m.worlds[i]
        if m.succ_masks[i] != 1 << i:
            continue
        rest = [u for u in m.worlds if u != w]
        rest_rel = [(a, b) for a, b in m.rel if a != w and b != w]
        base = KripkeModel(m.name, rest, rest_rel, {u: m.val[u] for u in rest})
        rep = classify(base)
        if rep.transitive and rep.irreflexive:
            return w
    raise NotHattedModel(f"{m.name} is not hat(k) for any finite GL model k")


def quotient_by_bisim(m: KripkeModel, atoms=None):
    """Collapse worlds along the maximal auto-bisimulation relative to ``atoms``.

    Returns (quotient model, world -> representative map).  Valuations are
    restricted to ``atoms``; the successor map is dropped.  Every world is
    locally bisimilar (relative to ``atoms``) to its representative, so
    truth of formulas over those atoms is preserved.
    """
    from .bisim import max_bisimulation

    if atoms is None:
        atoms = m.atoms()
    atoms = frozenset(atoms)
    pairs = max_bisimulation(m, m, atoms).pairs
    rep: dict[str, str] = {}
    for w in m.worlds:
        for u in m.worlds:
            if (w, u) in pairs:
                rep[w] = u  # first partner in world order is the class rep
                break
    reps = []
    for w in m.worlds:
        if rep[w] == w:
            reps.append(w)
    rel = sorted({(rep[a], rep[b]) for a, b in m.rel})
    val = {w: m.val[w] & atoms for w in reps}
    q = KripkeModel(f"{m.name}~", reps, rel, val)
    return q, rep


def isomorphic(m1: KripkeModel, m2: KripkeModel, ignore_atoms=frozenset()):
    """Search for a bijection preserving rel, val and succ.

    Returns the bijection as a dict, or None.  Backtracking with degree and
    valuation pruning; meant for desk-scale models only.  Atoms listed in
    ``ignore_atoms`` are excluded from the valuation comparison.
    """
    if len(m1.worlds) != len(m2.worlds) or len(m1.rel) != len(m2.rel):
        return None
    ignore = frozenset(ignore_atoms)

    def profile(m, w):
        i = m.index(w)
        return (m.val[w] - ignore,
                m.succ_masks[i].bit_count(),
                m.pred_masks[i].bit_count(),
                w in m.succ,
                sum(1 for v in m.succ.values() if v == w))

    prof2: dict = {}
    for w in m2.worlds:
        prof2.setdefault(profile(m2, w), []).append(w)

    candidates = []
    for w in m1.worlds:
        cs = prof2.get(profile(m1, w))
        if not cs:
            return None
        candidates.append(cs)

    order = sorted(range(len(m1.worlds)), key=lambda i: len(candidates[i]))
    fwd: dict[str, str] = {}
    used: set[str] = set()

    def consistent(w, v):
        for (a, b) in fwd.items():
            if ((w, a) in m1.rel) != ((v, b) in m2.rel):
                return False
            if ((a, w) in m1.rel) != ((b, v) in m2.rel):
                return False
        if ((w, w) in m1.rel) != ((v, v) in m2.rel):
            return False
        s1, s2 = m1.succ.get(w), m2.succ.get(v)
        if (s1 is None) != (s2 is None):
            return False
        if s1 is not None and s1 in fwd and fwd[s1] != s2:
            return False
        for a, b in fwd.items():
            t1, t2 = m1.succ.get(a), m2.succ.get(b)
            if t1 == w and t2 != v:
                return False
            if t2 == v and t1 != w:
                return False
        return True

    def search(k):
        if k == len(order):
            return True
        w = m1.worlds[order[k]]
        for v in candidates[order[k]]:
            if v in used or not consistent(w, v):
                continue
            fwd[w] = v
            used.add(v)
            if search(k + 1):
                return True
            del fwd[w]
            used.discard(v)
        return False

    if search(0):
        return dict(fwd)
    return None

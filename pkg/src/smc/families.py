"""Deterministic generators for the formula and model families.

The formulas: f(1) = <+> p1 and f(n+1) = <+>(p_{n+1} & f(n)), together with
their closure-free expansions g(n), which blow up exponentially.

The models: two families of finite transitive irreflexive trees, 2^n of
each at level n, built recursively.  Level n+1 keeps the first 2^n models
of each side as copies with p_{n+1} made true at the root, and builds the
second half by amalgamating successor-generated submodels with a fresh
root that sees everything.  A partial successor map marks one branch of
each model, the critical branch, along which the two sides stay hardest to
tell apart.

World ids are deterministic path names (``r``, ``B1/r``, ``SA2/A1/r``) so
generated files diff cleanly; memoized sub-builds are shared read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formula import And, Atom, DiaPlus, Formula
from .kripke import KripkeModel, PointedModel, disjoint_union, generated_submodel, hat
from .translate import expand_closure

ROOT = "r"


class NoRoot(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class FamilyIndex:
    side: str  # "A" or "B"
    n: int
    i: int
    hatted: bool = False

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise IndexOutOfRange(f"side must be 'A' or 'B', got {self.side!r}")
        if self.n < 1:
            raise IndexOutOfRange(f"level must be at least 1, got {self.n}")
        if not 1 <= self.i <= 2 ** self.n:
            raise IndexOutOfRange(
                f"index {self.i} outside [1, {2 ** self.n}] at level {self.n}")


@dataclass(frozen=True)
class CriticalBranch:
    worlds: tuple[str, ...]

    @property
    def height(self) -> int:
        return len(self.worlds) - 1


def phi(n: int) -> Formula:
    """The closure-language family, size 3n - 1."""
    if n < 1:
        raise IndexOutOfRange(f"level must be at least 1, got {n}")
    f: Formula = DiaPlus(Atom("p1"))
    for k in range(2, n + 1):
        f = DiaPlus(And(Atom(f"p{k}"), f))
    return f


def psi(n: int) -> Formula:
    """The closure-free expansion of phi(n); sizes follow s1 = 4,
    s_{n+1} = 2 s_n + 6, so they grow past 2^n."""
    return expand_closure(phi(n))


def build(idx: FamilyIndex) -> KripkeModel:
    m = _build(idx.side, idx.n, idx.i)
    return hat(m) if idx.hatted else m


@lru_cache(maxsize=None)
def _build(side: str, n: int, i: int) -> KripkeModel:
    FamilyIndex(side, n, i)  # validates
    name = f"{side}{n}_{i}"
    if n == 1 and i == 1:
        val = {ROOT: {"p1"}} if side == "A" else {}
        return KripkeModel(name, [ROOT], [], val)

    half = 2 ** (n - 1)
    if i <= half:
        # copy of the level-(n-1) model with p_n added at the root
        base = _build(side, n - 1, i)
        val = dict(base.val)
        val[ROOT] = val[ROOT] | {f"p{n}"}
        return KripkeModel(name, base.worlds, base.rel, val, base.succ)

    # amalgam: successor submodels of the first half, the matching B model,
    # and on the A side also the matching A model, under a fresh blank root
    j = i - half
    parts: list[tuple[str, KripkeModel]] = []
    for k in range(2, half + 1):
        ak = _build("A", n, k)
        parts.append((f"SA{k}", generated_submodel(ak, ak.succ[ROOT])))
    parts.append((f"B{j}", _build("B", n, j)))
    if side == "A":
        parts.append((f"A{j}", _build("A", n, j)))

    worlds = [ROOT]
    rel: list[tuple[str, str]] = []
    val: dict[str, frozenset] = {}
    for tag, part in parts:
        for w in part.worlds:
            tw = f"{tag}/{w}"
            worlds.append(tw)
            val[tw] = part.val[w]
        rel.extend((f"{tag}/{a}", f"{tag}/{b}") for a, b in part.rel)
    rel.extend((ROOT, w) for w in worlds[1:])  # root sees the whole amalgam

    succ_tag, succ_part = parts[-1]  # the model the critical branch descends into
    succ = {f"{succ_tag}/{w}": f"{succ_tag}/{v}" for w, v in succ_part.succ.items()}
    succ[ROOT] = f"{succ_tag}/{ROOT}"
    return KripkeModel(name, worlds, rel, val, succ)


def family(side: str, n: int, hatted: bool = False) -> list[KripkeModel]:
    return [build(FamilyIndex(side, n, i, hatted)) for i in range(1, 2 ** n + 1)]


def family_roots(side: str, n: int, hatted: bool = False) -> list[PointedModel]:
    return [PointedModel(m, ROOT) for m in family(side, n, hatted)]


def big_C(n: int, hatted: bool = False) -> KripkeModel:
    """Disjoint union of every level-n model from both sides, optionally
    with a single point at infinity added afterwards."""
    models = family("A", n) + family("B", n)
    tags = [f"A{i}" for i in range(1, 2 ** n + 1)]
    tags += [f"B{i}" for i in range(1, 2 ** n + 1)]
    u = disjoint_union(models, tags=tags, name=f"C{n}")
    return hat(u) if hatted else u


def amalgam_roots(n: int, hatted: bool = False):
    """(A-side roots, B-side roots) as pointed models inside big_C(n, hatted)."""
    m = big_C(n, hatted)
    lefts = [PointedModel(m, f"A{i}/{ROOT}") for i in range(1, 2 ** n + 1)]
    rights = [PointedModel(m, f"B{i}/{ROOT}") for i in range(1, 2 ** n + 1)]
    return lefts, rights


def root_of(m: KripkeModel) -> str:
    """The unique world whose cone {w} | R(w) is the whole model."""
    full = m.full_mask
    candidates = [w for w in m.worlds
                  if m.succ_masks[m.index(w)] | (1 << m.index(w)) == full]
    if len(candidates) != 1:
        raise NoRoot(f"{m.name} has {len(candidates)} root candidates")
    return candidates[0]


def critical_branch(m: KripkeModel) -> CriticalBranch:
    """Maximal successor-map chain from the root."""
    w = root_of(m)
    chain = [w]
    while w in m.succ:
        w = m.succ[w]
        chain.append(w)
    return CriticalBranch(tuple(chain))


def distinguishing_value(m1: KripkeModel, m2: KripkeModel) -> int | None:
    """Least depth along the two critical branches where the models
    disagree on some atom; None when they agree through the shorter one."""
    b1 = critical_branch(m1).worlds
    b2 = critical_branch(m2).worlds
    for r in range(min(len(b1), len(b2))):
        if m1.val[b1[r]] != m2.val[b2[r]]:
            return r
    return None

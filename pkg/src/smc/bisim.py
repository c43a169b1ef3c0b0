"""Bisimulations and confluence checks between finite Kripke models.

The maximal bisimulation is computed by iterated removal of violating
pairs from the atom-agreement relation; naive refinement is quadratic per
round, which is plenty at desk scale.  Confluence is checked through the
pointwise forth condition, which is sound and complete for Kripke frames
because the diamond operator distributes over unions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kripke import KripkeModel, PointedModel


@dataclass(frozen=True)
class Relation:
    left: KripkeModel
    right: KripkeModel
    pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        lw, rw = set(self.left.worlds), set(self.right.worlds)
        for a, b in self.pairs:
            if a not in lw or b not in rw:
                raise ValueError(f"pair ({a!r}, {b!r}) leaves the models' worlds")

    def converse(self) -> "Relation":
        return Relation(self.right, self.left, frozenset((b, a) for a, b in self.pairs))


def max_bisimulation(ma: KripkeModel, mb: KripkeModel, atoms=None) -> Relation:
    """The greatest bisimulation relative to ``atoms`` between two models.

    ``atoms`` defaults to every atom occurring in either model.  Pairs must
    agree on those atoms and satisfy both the forth and the back condition;
    violating pairs are removed until a fixed point is reached.
    """
    if atoms is None:
        atoms = ma.atoms() | mb.atoms()
    atoms = frozenset(atoms)

    pairs = {
        (a, b)
        for a in ma.worlds
        for b in mb.worlds
        if ma.val[a] & atoms == mb.val[b] & atoms
    }
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            ok = all(
                any((a2, b2) in pairs for b2 in mb.successors(b))
                for a2 in ma.successors(a)
            ) and all(
                any((a2, b2) in pairs for a2 in ma.successors(a))
                for b2 in mb.successors(b)
            )
            if not ok:
                pairs.discard((a, b))
                changed = True
    return Relation(ma, mb, frozenset(pairs))


def locally_bisimilar(pa: PointedModel, pb: PointedModel, atoms=None) -> bool:
    """Whether some bisimulation relative to ``atoms`` links the two points."""
    rel = max_bisimulation(pa.model, pb.model, atoms)
    return (pa.world, pb.world) in rel.pairs


def globally_bisimilar(ma: KripkeModel, mb: KripkeModel, atoms=None) -> bool:
    """True when the maximal bisimulation is total and surjective."""
    rel = max_bisimulation(ma, mb, atoms)
    left_covered = {a for a, _ in rel.pairs}
    right_covered = {b for _, b in rel.pairs}
    return left_covered == set(ma.worlds) and right_covered == set(mb.worlds)


def is_forward_confluent(r: Relation) -> bool:
    """Pointwise forth condition: a R a' and a r b give b' with b R b', a' r b'."""
    succ_images: dict[str, set[str]] = {}
    for a, b in r.pairs:
        succ_images.setdefault(a, set()).add(b)
    for a, b in r.pairs:
        for a2 in r.left.successors(a):
            image = succ_images.get(a2, ())
            if not any(b2 in image for b2 in r.right.successors(b)):
                return False
    return True


def is_backward_confluent(r: Relation) -> bool:
    return is_forward_confluent(r.converse())

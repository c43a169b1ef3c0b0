import random

from smc import randgen
from smc.bisim import (
    Relation, globally_bisimilar, is_backward_confluent, is_forward_confluent,
    locally_bisimilar, max_bisimulation,
)
from smc.families import FamilyIndex, build, phi
from smc.formula import free_atoms
from smc.kripke import (
    KripkeModel, PointedModel, disjoint_union, generated_submodel, hat,
    quotient_by_bisim,
)
from smc.semantics import holds


class TestMaxBisimulation:
    def test_identity_on_single_world(self):
        m = KripkeModel("m", ["w"], [], {"w": {"p"}})
        assert max_bisimulation(m, m).pairs == {("w", "w")}

    def test_hatted_infinities_are_linked(self):
        ma = hat(build(FamilyIndex("A", 1, 1)))
        mb = hat(build(FamilyIndex("B", 1, 2)))
        assert ("inf", "inf") in max_bisimulation(ma, mb).pairs

    def test_family_roots_never_cross_linked(self):
        for n in (1, 2, 3):
            for i in range(1, 2 ** n + 1):
                ma = build(FamilyIndex("A", n, i))
                mb = build(FamilyIndex("B", n, i))
                assert ("r", "r") not in max_bisimulation(ma, mb).pairs

    def test_fixed_point_of_refinement_and_confluent(self):
        rng = random.Random(0)
        for _ in range(60):
            ma = randgen.random_model(rng, kind="any")
            mb = randgen.random_model(rng, kind="any")
            rel = max_bisimulation(ma, mb)
            assert is_forward_confluent(rel)
            assert is_backward_confluent(rel)
            again = max_bisimulation(ma, mb)
            assert again.pairs == rel.pairs

    def test_symmetry(self):
        rng = random.Random(1)
        for _ in range(50):
            ma = randgen.random_model(rng, kind="any")
            mb = randgen.random_model(rng, kind="any")
            fwd = max_bisimulation(ma, mb).pairs
            bwd = max_bisimulation(mb, ma).pairs
            assert fwd == {(a, b) for b, a in bwd}

    def test_sound_against_semantics(self):
        rng = random.Random(2)
        for _ in range(40):
            ma = randgen.random_model(rng, kind="any")
            mb = randgen.random_model(rng, kind="any")
            pairs = max_bisimulation(ma, mb, {"p", "q"}).pairs
            for _ in range(5):
                f = randgen.random_formula(
                    rng, max_depth=3,
                    ops=randgen.CLOSURE_OPS + ("mu", "nu", "tangledia", "tanglebox"))
                if not free_atoms(f) <= {"p", "q"}:
                    continue
                for a, b in pairs:
                    assert holds(PointedModel(ma, a), f) == holds(PointedModel(mb, b), f)


class TestLocallyBisimilar:
    def test_successor_example(self):
        a22 = build(FamilyIndex("A", 2, 2))
        b23 = build(FamilyIndex("B", 2, 3))
        succ_point = PointedModel(a22, a22.succ["r"])
        assert locally_bisimilar(succ_point, PointedModel(b23, "SA2/A1/r"))

    def test_reflexivity(self):
        m = build(FamilyIndex("A", 2, 3))
        for w in m.worlds:
            assert locally_bisimilar(PointedModel(m, w), PointedModel(m, w))

    def test_atom_disagreement(self):
        a11 = build(FamilyIndex("A", 1, 1))
        b11 = build(FamilyIndex("B", 1, 1))
        assert not locally_bisimilar(PointedModel(a11, "r"), PointedModel(b11, "r"))


class TestGloballyBisimilar:
    def test_model_vs_doubled_copy(self):
        rng = random.Random(3)
        for _ in range(30):
            m = randgen.random_model(rng, kind="any")
            assert globally_bisimilar(m, disjoint_union([m, m]))

    def test_families_differ(self):
        assert not globally_bisimilar(build(FamilyIndex("A", 1, 1)),
                                      build(FamilyIndex("B", 1, 1)))

    def test_quotient_is_globally_bisimilar(self):
        rng = random.Random(4)
        for _ in range(100):
            m = randgen.random_model(rng, kind="any")
            q, _ = quotient_by_bisim(m)
            assert globally_bisimilar(m, q)


class TestConfluence:
    def test_identity_relation(self):
        rng = random.Random(5)
        for _ in range(30):
            m = randgen.random_model(rng, kind="any")
            r = Relation(m, m, frozenset((w, w) for w in m.worlds))
            assert is_forward_confluent(r)
            assert is_backward_confluent(r)

    def test_quotient_map_is_confluent(self):
        rng = random.Random(6)
        for _ in range(40):
            m = randgen.random_model(rng, kind="any")
            q, rep = quotient_by_bisim(m)
            r = Relation(m, q, frozenset(rep.items()))
            assert is_forward_confluent(r)
            assert is_backward_confluent(r)

    def test_vacuous_relation_between_leaves(self):
        # confluent because nothing has successors, yet not a bisimulation
        # (the two points disagree on p1)
        a11 = build(FamilyIndex("A", 1, 1))
        b11 = build(FamilyIndex("B", 1, 1))
        r = Relation(a11, b11, frozenset({("r", "r")}))
        assert is_forward_confluent(r)
        assert is_backward_confluent(r)
        assert ("r", "r") not in max_bisimulation(a11, b11).pairs

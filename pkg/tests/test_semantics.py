import random

import pytest

from smc import randgen
from smc.families import FamilyIndex, build, phi
from smc.formula import parse
from smc.kripke import KripkeModel, PointedModel, hat
from smc.semantics import (
    TruthSet, Valuation, check_connectedness_axiom, evaluate, holds,
    tangle_direct,
)


class TestEvaluate:
    def test_phi1_on_families(self):
        a11 = build(FamilyIndex("A", 1, 1))
        assert evaluate(a11, phi(1)).worlds() == ("r",)
        b12 = build(FamilyIndex("B", 1, 2))
        assert evaluate(b12, phi(1)).is_empty()

    def test_extremal_fixpoints(self):
        rng = random.Random(0)
        for _ in range(20):
            m = randgen.random_model(rng, kind="any")
            assert evaluate(m, parse("mu p . p")).is_empty()
            assert evaluate(m, parse("nu p . p")).is_full()

    def test_absent_atom_is_false_everywhere(self):
        b11 = build(FamilyIndex("B", 1, 1))
        assert not holds(PointedModel(b11, "r"), parse("p1"))

    def test_valuation_overrides_model(self):
        m = KripkeModel("m", ["a", "b"], [("a", "b")], {"a": {"p"}})
        v = Valuation({"p": TruthSet.from_worlds(m, ["b"])})
        assert evaluate(m, parse("p"), v).worlds() == ("b",)
        assert evaluate(m, parse("<> p"), v).worlds() == ("a",)

    def test_global_quantifiers_are_all_or_nothing(self):
        m = KripkeModel("m", ["a", "b"], [], {"a": {"p"}})
        assert evaluate(m, parse("E p")).is_full()
        assert evaluate(m, parse("A p")).is_empty()
        assert evaluate(m, parse("A (p | ~p)")).is_full()

    def test_closure_operators(self):
        m = KripkeModel("m", ["a", "b"], [("a", "b")], {"b": {"p"}})
        assert evaluate(m, parse("<+> p")).worlds() == ("a", "b")
        assert evaluate(m, parse("[+] p")).worlds() == ("b",)


class TestTangle:
    def test_empty_on_gl_models(self):
        rng = random.Random(1)
        for _ in range(40):
            m = randgen.random_model(rng, kind="gl")
            bodies = [randgen.random_formula(rng, max_depth=3)]
            assert tangle_direct(m, bodies).is_empty()

    def test_top_on_hatted_model(self):
        m = hat(build(FamilyIndex("B", 1, 1)))
        assert tangle_direct(m, [parse("T")]).is_full()

    def test_reflexive_point_sustains_itself(self):
        m = KripkeModel("m", ["w"], [("w", "w")], {"w": {"p"}})
        assert tangle_direct(m, [parse("p")]).worlds() == ("w",)

    def test_holds_at_infinity(self):
        m = hat(build(FamilyIndex("B", 1, 2)))
        assert holds(PointedModel(m, "inf"), parse("<*>{T}"))

    def test_box_tangle_is_dual(self):
        from smc.formula import TangleBox, TangleDia, dual
        rng = random.Random(2)
        for _ in range(60):
            m = randgen.random_model(rng, kind="k4")
            f = randgen.random_formula(rng, max_depth=2)
            td = evaluate(m, TangleDia((f,)))
            tb = evaluate(m, TangleBox((dual(f),)))
            assert tb == td.complement()

    def test_needs_a_body(self):
        m = KripkeModel("m", ["w"], [])
        with pytest.raises(ValueError):
            tangle_direct(m, [])


class TestHolds:
    def test_phi2_at_a24_root(self):
        assert holds(PointedModel(build(FamilyIndex("A", 2, 4)), "r"), phi(2))

    def test_phi2_fails_at_b24_root(self):
        assert not holds(PointedModel(build(FamilyIndex("B", 2, 4)), "r"), phi(2))


class TestConnectednessAxiom:
    def test_valid_on_hatted_models(self):
        rng = random.Random(3)
        for _ in range(20):
            m = hat(randgen.random_model(rng, kind="gl"))
            ok, witness = check_connectedness_axiom(m, trials=100, seed=0)
            assert ok and witness is None

    def test_disconnected_counterexample(self):
        m = KripkeModel("two", ["w1", "w2"], [("w1", "w1"), ("w2", "w2")])
        ok, witness = check_connectedness_axiom(m, trials=100, seed=0)
        assert not ok
        # the witness valuation itself must break the axiom: p holds on
        # exactly one of the two isolated points
        assert len(witness.worlds()) == 1

    def test_single_world_always_valid(self):
        for reflexive in (True, False):
            rel = [("w", "w")] if reflexive else []
            m = KripkeModel("one", ["w"], rel)
            ok, _ = check_connectedness_axiom(m, trials=100, seed=1)
            assert ok

    def test_deterministic(self):
        m = KripkeModel("two", ["w1", "w2"], [("w1", "w1"), ("w2", "w2")])
        a = check_connectedness_axiom(m, trials=50, seed=9)
        b = check_connectedness_axiom(m, trials=50, seed=9)
        assert a[0] == b[0] and a[1] == b[1]


class TestTruthSetAlgebra:
    def test_operations_stay_in_model(self):
        m1 = KripkeModel("m1", ["a"], [])
        m2 = KripkeModel("m2", ["a", "b"], [])
        with pytest.raises(ValueError):
            _ = TruthSet(m1, 1) & TruthSet(m2, 1)

    def test_bits_must_fit(self):
        m = KripkeModel("m", ["a"], [])
        with pytest.raises(ValueError):
            TruthSet(m, 0b10)

    def test_worlds_round_trip(self):
        m = KripkeModel("m", ["a", "b", "c"], [])
        ts = TruthSet.from_worlds(m, ["c", "a"])
        assert ts.worlds() == ("a", "c")
        assert "b" not in ts

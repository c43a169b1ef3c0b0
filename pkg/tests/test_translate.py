import random

import pytest

from smc import randgen
from smc.families import FamilyIndex, big_C, build, family, phi
from smc.formula import Mu, Nu, parse, pretty, size
from smc.kripke import NotHattedModel, hat
from smc.semantics import evaluate, tangle_direct
from smc.translate import (
    UnsupportedFragment, closure_to_mu, eliminate_universal, expand_closure,
    hat_eliminate_tangle, scattered_eliminate_tangle,
)


class TestExpandClosure:
    def test_single_clause(self):
        assert expand_closure(parse("<+> p1")) == parse("p1 | <> p1")

    def test_phi2_size(self):
        out = expand_closure(phi(2))
        assert size(out) == 14

    def test_no_closure_operators_remain(self):
        rng = random.Random(0)
        for _ in range(200):
            f = randgen.random_formula(rng, max_depth=4, ops=randgen.FULL_OPS)
            assert "<+>" not in pretty(expand_closure(f))
            assert "[+]" not in pretty(expand_closure(f))

    def test_equivalent_on_any_model(self):
        rng = random.Random(1)
        for _ in range(100):
            m = randgen.random_model(rng, max_worlds=8, kind="any")
            f = randgen.random_formula(rng, max_depth=4, ops=randgen.CLOSURE_OPS)
            assert evaluate(m, f) == evaluate(m, expand_closure(f))


class TestClosureToMu:
    def test_diamond_clause(self):
        out = closure_to_mu(parse("<+> p1"))
        assert isinstance(out, Mu)
        assert size(out) == 5
        q = out.var
        assert out == parse(f"mu {q} . p1 | <> {q}")

    def test_box_clause(self):
        out = closure_to_mu(parse("[+] p1"))
        assert isinstance(out, Nu)
        q = out.var
        assert out == parse(f"nu {q} . p1 & [] {q}")

    def test_fresh_variables_avoid_collisions(self):
        out = closure_to_mu(parse("<+> (v0 & <+> v1)"))
        text = pretty(out)
        assert "mu v2" in text or "mu v3" in text  # v0, v1 are taken

    def test_size_bound(self):
        rng = random.Random(2)
        for _ in range(300):
            f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
            assert size(closure_to_mu(f)) <= 4 * size(f)

    def test_equivalent_on_k4(self):
        rng = random.Random(3)
        for _ in range(100):
            m = randgen.random_model(rng, max_worlds=8, kind="k4")
            f = randgen.random_formula(rng, max_depth=4, ops=randgen.CLOSURE_OPS)
            assert evaluate(m, f) == evaluate(m, closure_to_mu(f))


class TestScatteredEliminateTangle:
    def test_basic_rewrite(self):
        assert scattered_eliminate_tangle(parse("<*>{p, q} & <> p")) == parse("F & <> p")
        assert scattered_eliminate_tangle(parse("[*]{p}")) == parse("T")

    def test_tangle_free_unchanged(self):
        f = parse("mu x . p | <> x")
        assert scattered_eliminate_tangle(f) == f

    def test_never_grows(self):
        rng = random.Random(4)
        for _ in range(300):
            f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
            assert size(scattered_eliminate_tangle(f)) <= size(f)

    def test_equivalent_on_gl_models(self):
        rng = random.Random(5)
        models = family("A", 2) + family("B", 2)
        for _ in range(100):
            f = randgen.random_formula(
                rng, max_depth=4,
                ops=randgen.CLOSURE_OPS + ("tangledia", "tanglebox"))
            m = models[rng.randrange(len(models))]
            assert evaluate(m, f) == evaluate(m, scattered_eliminate_tangle(f))


class TestHatEliminateTangle:
    def test_top_tangle(self):
        m = hat(build(FamilyIndex("B", 1, 1)))
        assert hat_eliminate_tangle(parse("<*>{T}"), m) == parse("T")

    def test_atom_tangle_fails_at_infinity(self):
        m = hat(build(FamilyIndex("B", 1, 1)))
        assert hat_eliminate_tangle(parse("<*>{p1}"), m) == parse("F")

    def test_requires_hatted_model(self):
        with pytest.raises(NotHattedModel):
            hat_eliminate_tangle(parse("<*>{T}"), build(FamilyIndex("B", 1, 1)))

    def test_equivalent_on_the_hatted_amalgam(self):
        rng = random.Random(6)
        m = big_C(2, hatted=True)
        for _ in range(50):
            f = randgen.random_formula(
                rng, atoms=("p1", "p2"), max_depth=4,
                ops=randgen.DEFAULT_OPS + ("forall", "exists", "tangledia", "tanglebox"))
            assert evaluate(m, f) == evaluate(m, hat_eliminate_tangle(f, m))


class TestEliminateUniversal:
    def test_forall_on_amalgam(self):
        c1 = big_C(1)
        assert eliminate_universal(parse("A p1"), c1) == parse("F")
        assert eliminate_universal(parse("E p1"), c1) == parse("T")

    def test_trivial_forall(self):
        rng = random.Random(7)
        m = randgen.random_model(rng)
        assert eliminate_universal(parse("A T"), m) == parse("T")

    def test_rejects_fixpoints(self):
        m = big_C(1)
        with pytest.raises(UnsupportedFragment):
            eliminate_universal(parse("mu x . A p1 | <> x"), m)

    def test_equivalent_and_never_grows(self):
        rng = random.Random(8)
        for _ in range(100):
            m = randgen.random_model(rng, max_worlds=7, kind="any")
            f = randgen.random_formula(
                rng, max_depth=4,
                ops=randgen.CLOSURE_OPS + ("forall", "exists"))
            out = eliminate_universal(f, m)
            assert size(out) <= size(f)
            assert evaluate(m, f) == evaluate(m, out)

    def test_nested_quantifiers_resolved_innermost_first(self):
        m = big_C(1)
        # E p1 is globally true, so A (E p1) reduces through T
        assert eliminate_universal(parse("A (E p1)"), m) == parse("T")


class TestIdempotence:
    def test_all_translations_idempotent_on_their_output(self):
        rng = random.Random(9)
        m = big_C(1, hatted=True)
        for _ in range(100):
            f = randgen.random_formula(rng, atoms=("p1",), max_depth=4, ops=randgen.FULL_OPS)
            e = expand_closure(f)
            assert expand_closure(e) == e
            c = closure_to_mu(f)
            assert closure_to_mu(c) == c
            s = scattered_eliminate_tangle(f)
            assert scattered_eliminate_tangle(s) == s
            h = hat_eliminate_tangle(f, m)
            assert hat_eliminate_tangle(h, m) == h


def test_tangle_nu_encoding_cross_oracle():
    # the direct greatest-set iteration against the explicit fixpoint formula
    from smc.formula import And, Atom, Dia
    rng = random.Random(10)
    for _ in range(100):
        m = randgen.random_model(rng, max_worlds=8, kind="k4")
        bodies = [randgen.random_formula(rng, max_depth=3) for _ in range(rng.randint(1, 3))]
        clauses = [Dia(And(Atom("tv"), b)) for b in bodies]
        enc = clauses[0]
        for c in clauses[1:]:
            enc = And(enc, c)
        assert tangle_direct(m, bodies) == evaluate(m, Nu("tv", enc))

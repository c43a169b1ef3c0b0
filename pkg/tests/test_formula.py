import random

import pytest

from smc import randgen
from smc.formula import (
    And, Atom, Bot, Box, Dia, DiaPlus, Mu, NegAtom, Nu, Or, ParseError,
    PositivityError, TangleBox, TangleDia, Top, atom_names, check_positivity,
    dual, free_atoms, parse, pretty, size,
)


class TestParse:
    def test_single_production(self):
        assert parse("<+> p1") == DiaPlus(Atom("p1"))

    def test_binder_extends_maximally_right(self):
        assert parse("mu q . p1 | <> q") == Mu("q", Or(Atom("p1"), Dia(Atom("q"))))

    def test_negated_binder_becomes_dual(self):
        assert parse("!(mu q . <> q)") == parse("nu q . [] q")
        assert parse("!(mu q . <> q)") == Nu("q", Box(Atom("q")))

    def test_sugar_implication(self):
        assert parse("p -> q") == Or(NegAtom("p"), Atom("q"))
        # right associative
        assert parse("p -> q -> r") == Or(NegAtom("p"), Or(NegAtom("q"), Atom("r")))

    def test_precedence(self):
        assert parse("p & q | r") == Or(And(Atom("p"), Atom("q")), Atom("r"))
        assert parse("<> p & q") == And(Dia(Atom("p")), Atom("q"))
        assert parse("p | q -> r") == Or(And(NegAtom("p"), NegAtom("q")), Atom("r"))

    def test_tangle(self):
        assert parse("<*>{p, q}") == TangleDia((Atom("p"), Atom("q")))
        assert parse("[*]{p}") == TangleBox((Atom("p"),))

    def test_constants_and_quantifiers(self):
        assert parse("T & F") == And(Top(), Bot())
        assert parse("A p | E q") is not None

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            parse("p1 & & q")
        assert exc.value.position == 5

    def test_unclosed_paren(self):
        with pytest.raises(ParseError):
            parse("(p1 | q")

    def test_positivity_error(self):
        with pytest.raises(PositivityError) as exc:
            parse("mu q . ! <> q")
        assert exc.value.var == "q"

    def test_positivity_direct_negation(self):
        with pytest.raises(PositivityError):
            parse("nu x . ~x")

    def test_shadowing_is_allowed(self):
        f = parse("mu x . p | <> (nu x . q & [] x)")
        check_positivity(f)

    def test_reserved_words(self):
        with pytest.raises(ParseError):
            parse("mu mu . p")


class TestSize:
    def test_closure_literal(self):
        assert size(parse("<+> p1")) == 2

    def test_phi3(self):
        # recurrence |phi_{n+1}| = |phi_n| + 3 with |phi_1| = 2
        from smc.families import phi
        assert size(phi(3)) == 8

    def test_figure_formula(self):
        assert size(parse("[] p | <> <> p")) == 6

    def test_tangle_counts_every_argument(self):
        assert size(parse("<*>{p, p, q}")) == 4

    def test_top_bot_count_one(self):
        assert size(parse("T")) == 1
        assert size(parse("F | T")) == 3


class TestDual:
    def test_de_morgan(self):
        assert dual(parse("p1 & <> p2")) == parse("~p1 | [] ~p2")

    def test_fixpoint_with_flip(self):
        assert dual(parse("mu q . p | <> q")) == parse("nu q . ~p & [] q")

    def test_tangle_elementwise(self):
        assert dual(parse("<*>{p}")) == parse("[*]{~p}")

    def test_dual_complements_truth_sets(self):
        # independent oracle: evaluate both sides on random models
        from smc.semantics import evaluate
        rng = random.Random(7)
        for _ in range(50):
            f = randgen.random_formula(rng, max_depth=4, ops=randgen.FULL_OPS)
            m = randgen.random_model(rng, kind="any")
            assert evaluate(m, dual(f)) == evaluate(m, f).complement()

    def test_involution_and_size_preservation(self):
        rng = random.Random(3)
        for _ in range(200):
            f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
            assert dual(dual(f)) == f
            assert size(dual(f)) == size(f)


class TestPretty:
    def test_prefix_spacing(self):
        assert pretty(DiaPlus(Atom("p1"))) == "<+> p1"

    def test_phi2(self):
        from smc.families import phi
        assert pretty(phi(2)) == "<+>(p2 & <+> p1)"

    def test_round_trip_seeded(self):
        rng = random.Random(0)
        for _ in range(1000):
            f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
            assert parse(pretty(f)) == f

    def test_binder_as_operand_round_trips(self):
        f = Or(Mu("q", Atom("p")), Atom("x"))
        assert parse(pretty(f)) == f


class TestFreeAtoms:
    def test_binder_hides_its_variable(self):
        assert free_atoms(parse("mu q . p | <> q")) == {"p"}

    def test_phi_n(self):
        from smc.families import phi
        assert free_atoms(phi(4)) == {"p1", "p2", "p3", "p4"}

    def test_top_has_none(self):
        assert free_atoms(parse("T")) == frozenset()

    def test_atom_names_include_binders(self):
        assert atom_names(parse("mu q . p")) == {"p", "q"}

"""Seeded randomized property suites.

Each check takes (seed, cases), draws its own deterministic stream of
random models and formulas, and returns (ok, detail).  The CLI's
``experiment properties`` subcommand runs the whole registry; the test
suite calls the same functions with the case counts the acceptance
criteria prescribe, so there is a single source of truth for what every
property means.
"""

from __future__ import annotations

import random

from . import randgen
from .bisim import Relation, is_backward_confluent, is_forward_confluent, max_bisimulation
from .formula import (
    And, Atom, Bot, Dia, DiaPlus, Mu, Nu, Or, dual, parse, pretty, size,
)
from .kripke import PointedModel, hat, quotient_by_bisim
from .semantics import TruthSet, Valuation, check_connectedness_axiom, evaluate, holds, tangle_direct
from .synth import MODAL_ONLY_OPS, SynthProblem, min_separating_formula
from .translate import closure_to_mu, expand_closure, scattered_eliminate_tangle


def prop_normality(seed: int = 0, cases: int = 500):
    """<> distributes over disjunction and kills falsum, on any model."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, kind="any")
        f = randgen.random_formula(rng, max_depth=3)
        g = randgen.random_formula(rng, max_depth=3)
        lhs = evaluate(m, Dia(Or(f, g)))
        rhs = evaluate(m, Dia(f)) | evaluate(m, Dia(g))
        if lhs != rhs:
            return False, f"case {k}: <>({f} | {g}) mismatch on {m.name}"
        if not evaluate(m, Dia(Bot())).is_empty():
            return False, f"case {k}: <>F nonempty on {m.name}"
    return True, f"{cases} cases"


def prop_k4_closure(seed: int = 0, cases: int = 200):
    """On transitive models <><>f implies <>f, and <+> is idempotent."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, kind="k4")
        f = randgen.random_formula(rng, max_depth=3)
        dd = evaluate(m, Dia(Dia(f)))
        d = evaluate(m, Dia(f))
        if dd.bits & ~d.bits:
            return False, f"case {k}: <><> not below <> on {m.name}"
        once = evaluate(m, DiaPlus(f))
        twice = evaluate(m, DiaPlus(DiaPlus(f)))
        if once != twice:
            return False, f"case {k}: <+> not idempotent on {m.name}"
    return True, f"{cases} cases"


def prop_closure_translations(seed: int = 0, cases: int = 300):
    """Both closure eliminations agree with the primitive semantics on K4."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=8, kind="k4")
        f = randgen.random_formula(rng, max_depth=4, ops=randgen.CLOSURE_OPS)
        direct = evaluate(m, f)
        if direct != evaluate(m, expand_closure(f)):
            return False, f"case {k}: expand_closure disagrees on {pretty(f)}"
        if direct != evaluate(m, closure_to_mu(f)):
            return False, f"case {k}: closure_to_mu disagrees on {pretty(f)}"
    return True, f"{cases} cases"


def prop_translation_size_bounds(seed: int = 0, cases: int = 1000):
    """Size bounds: |t_mu(f)| <= 4|f|, |t_exp(f)| <= 2^|f|, |t_bot(f)| <= |f|."""
    rng = random.Random(seed)
    for k in range(cases):
        f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
        n = size(f)
        if size(closure_to_mu(f)) > 4 * n:
            return False, f"case {k}: fixpoint encoding exceeds 4x on {pretty(f)}"
        if n <= 16 and size(expand_closure(f)) > 2 ** n:
            return False, f"case {k}: expansion exceeds 2^n on {pretty(f)}"
        if size(scattered_eliminate_tangle(f)) > n:
            return False, f"case {k}: tangle elimination grew {pretty(f)}"
    return True, f"{cases} cases"


def prop_tangle_nu_oracle(seed: int = 0, cases: int = 200):
    """Direct tangle iteration equals its greatest-fixpoint encoding on K4."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=8, kind="k4")
        nbodies = rng.randint(1, 3)
        bodies = [randgen.random_formula(rng, max_depth=3) for _ in range(nbodies)]
        direct = tangle_direct(m, bodies)
        var = "tq"
        clauses = [Dia(And(Atom(var), b)) for b in bodies]
        enc = clauses[0]
        for c in clauses[1:]:
            enc = And(enc, c)
        if direct != evaluate(m, Nu(var, enc)):
            return False, f"case {k}: tangle/nu mismatch on {m.name}"
    return True, f"{cases} cases"


def prop_tangle_scattered(seed: int = 0, cases: int = 100, phis_per_model: int = 20):
    """Diamond tangles are empty on transitive irreflexive models."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=7, kind="gl")
        for _ in range(phis_per_model):
            nbodies = rng.randint(1, 3)
            bodies = [randgen.random_formula(rng, max_depth=3) for _ in range(nbodies)]
            if not tangle_direct(m, bodies).is_empty():
                return False, f"case {k}: nonempty tangle on GL model {m.name}"
    return True, f"{cases} models x {phis_per_model} tangles"


def prop_bisim_invariance_local(seed: int = 0, cases: int = 500):
    """Quotient-paired points agree on every quantifier-free formula."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=7, kind="any", atoms=("p", "q"))
        q, rep = quotient_by_bisim(m, {"p", "q"})
        f = randgen.random_formula(
            rng, max_depth=4,
            ops=randgen.CLOSURE_OPS + ("mu", "nu", "tangledia", "tanglebox"))
        mt = evaluate(m, f)
        qt = evaluate(q, f)
        for w in m.worlds:
            if (w in mt) != (rep[w] in qt):
                return False, f"case {k}: {pretty(f)} differs at {w} vs {rep[w]}"
    return True, f"{cases} cases"


def prop_bisim_invariance_global(seed: int = 0, cases: int = 200):
    """Globally bisimilar pairs agree on quantified formulas as well."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=7, kind="any", atoms=("p", "q"))
        q, rep = quotient_by_bisim(m, {"p", "q"})
        f = randgen.random_formula(rng, max_depth=4, ops=randgen.FULL_OPS)
        mt = evaluate(m, f)
        qt = evaluate(q, f)
        for w in m.worlds:
            if (w in mt) != (rep[w] in qt):
                return False, f"case {k}: {pretty(f)} differs at {w} vs {rep[w]}"
    return True, f"{cases} cases"


def prop_quotient_map_confluent(seed: int = 0, cases: int = 100):
    """The graph of the quotient map is confluent in both directions."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=7, kind="any")
        q, rep = quotient_by_bisim(m)
        r = Relation(m, q, frozenset(rep.items()))
        if not (is_forward_confluent(r) and is_backward_confluent(r)):
            return False, f"case {k}: quotient map of {m.name} not confluent"
    return True, f"{cases} cases"


def prop_dual_involution(seed: int = 0, cases: int = 300):
    """dual is a size-preserving involution and complements truth sets."""
    rng = random.Random(seed)
    for k in range(cases):
        f = randgen.random_formula(rng, max_depth=4, ops=randgen.FULL_OPS)
        if dual(dual(f)) != f:
            return False, f"case {k}: double dual changed {pretty(f)}"
        if size(dual(f)) != size(f):
            return False, f"case {k}: dual changed the size of {pretty(f)}"
        m = randgen.random_model(rng, max_worlds=6, kind="any")
        if evaluate(m, dual(f)) != evaluate(m, f).complement():
            return False, f"case {k}: dual not complementary for {pretty(f)}"
    return True, f"{cases} cases"


def prop_roundtrip_print(seed: int = 0, cases: int = 1000):
    """parse(pretty(f)) rebuilds f exactly."""
    rng = random.Random(seed)
    for k in range(cases):
        f = randgen.random_formula(rng, max_depth=5, ops=randgen.FULL_OPS)
        if parse(pretty(f)) != f:
            return False, f"case {k}: round trip changed {pretty(f)}"
    return True, f"{cases} cases"


def prop_fixpoint_convergence(seed: int = 0, cases: int = 100):
    """Fixpoint iterations are inclusion-monotone and settle within |W| steps."""
    rng = random.Random(seed)
    for k in range(cases):
        m = randgen.random_model(rng, max_worlds=7, kind="any")
        body = randgen.random_formula(rng, atoms=("p", "q"), max_depth=3, bound=("z",))
        f = Mu("z", body) if rng.random() < 0.5 else Nu("z", body)
        descending = isinstance(f, Nu)
        x = m.full_mask if descending else 0
        steps = 0
        while True:
            nxt = evaluate(m, body, Valuation({"z": TruthSet(m, x)})).bits
            if descending and nxt & ~x:
                return False, f"case {k}: iteration not shrinking for {pretty(f)}"
            if not descending and x & ~nxt:
                return False, f"case {k}: iteration not growing for {pretty(f)}"
            if nxt == x:
                break
            x = nxt
            steps += 1
            if steps > len(m.worlds):
                return False, f"case {k}: {pretty(f)} took more than |W| rounds"
        if x != evaluate(m, f).bits:
            return False, f"case {k}: evaluator disagrees with manual iteration"
    return True, f"{cases} cases"


def prop_synth_infeasibility(seed: int = 0, cases: int = 100):
    """Synthesis reports infeasible exactly when a cross pair is bisimilar."""
    rng = random.Random(seed)
    for k in range(cases):
        ma = randgen.random_model(rng, max_worlds=4, atoms=("p",), kind="any")
        mb = randgen.random_model(rng, max_worlds=4, atoms=("p",), kind="any")
        lp = PointedModel(ma, rng.choice(ma.worlds))
        rp = PointedModel(mb, rng.choice(mb.worlds))
        expected_infeasible = (lp.world, rp.world) in max_bisimulation(ma, mb).pairs
        res = min_separating_formula(
            SynthProblem(left=(lp,), right=(rp,), ops=MODAL_ONLY_OPS, max_size=30))
        if expected_infeasible and res.status != "infeasible":
            return False, f"case {k}: bisimilar pair not reported infeasible"
        if not expected_infeasible and res.status != "found":
            return False, f"case {k}: separable pair got {res.status}"
    return True, f"{cases} cases"


def prop_connectedness_hat(seed: int = 0, cases: int = 50, trials: int = 100):
    """The connectedness axiom is valid on every hatted model."""
    rng = random.Random(seed)
    for k in range(cases):
        m = hat(randgen.random_model(rng, max_worlds=6, kind="gl"))
        ok, witness = check_connectedness_axiom(m, trials=trials, seed=seed + k)
        if not ok:
            return False, f"case {k}: axiom failed on {m.name} with p = {witness.worlds()}"
    return True, f"{cases} models x {trials} valuations"


REGISTRY = {
    "normality": prop_normality,
    "k4-closure": prop_k4_closure,
    "closure-translations": prop_closure_translations,
    "translation-size-bounds": prop_translation_size_bounds,
    "tangle-nu-oracle": prop_tangle_nu_oracle,
    "tangle-scattered": prop_tangle_scattered,
    "bisim-invariance-local": prop_bisim_invariance_local,
    "bisim-invariance-global": prop_bisim_invariance_global,
    "quotient-map-confluent": prop_quotient_map_confluent,
    "dual-involution": prop_dual_involution,
    "roundtrip-print": prop_roundtrip_print,
    "fixpoint-convergence": prop_fixpoint_convergence,
    "synth-infeasibility": prop_synth_infeasibility,
    "connectedness-hat": prop_connectedness_hat,
}


def run_all(seed: int = 0, cases: int | None = None):
    """Run every registered property; returns [(name, ok, detail)]."""
    results = []
    for name, fn in REGISTRY.items():
        if cases is None:
            ok, detail = fn(seed)
        else:
            ok, detail = fn(seed, cases)
        results.append((name, ok, detail))
    return results

"""Workbench for modal fixpoint logics on finite Kripke frames.

Model checking for the extended language (diamond, closure, global
quantifiers, fixpoints, tangles), bisimulation machinery, deterministic
model families, language translations, and exact minimal-separating-
formula synthesis backed by a formula-size game verifier.
"""

from .bisim import (
    Relation, globally_bisimilar, is_backward_confluent, is_forward_confluent,
    locally_bisimilar, max_bisimulation,
)
from .families import (
    CriticalBranch, FamilyIndex, IndexOutOfRange, NoRoot, amalgam_roots,
    big_C, build, critical_branch, distinguishing_value, family, family_roots,
    phi, psi, root_of,
)
from .formula import (
    And, Atom, Bot, Box, BoxPlus, Dia, DiaPlus, Exists, Forall, Formula, Mu,
    NegAtom, Nu, Or, ParseError, PositivityError, TangleBox, TangleDia, Top,
    atom_names, check_positivity, dual, free_atoms, parse, pretty, size,
)
from .kripke import (
    FrameClassReport, KripkeModel, NotHattedModel, PointedModel, UnknownWorld,
    classify, disjoint_union, generated_submodel, hat, infinity_world,
    isomorphic, load_model, quotient_by_bisim, save_model, transitive_closure,
)
from .semantics import (
    TruthSet, Valuation, check_connectedness_axiom, evaluate, holds,
    tangle_direct,
)
from .synth import (
    GameNode, GameTree, SynthProblem, SynthResult, Universe,
    UnsupportedOperator, meg_verify, min_separating_formula, verify_separator,
)
from .translate import (
    UnsupportedFragment, closure_to_mu, eliminate_universal, expand_closure,
    hat_eliminate_tangle, scattered_eliminate_tangle,
)

__version__ = "0.1.0"

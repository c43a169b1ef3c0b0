"""Command-line surface and experiment harness.

Exit codes: 0 success or PASS, 1 a checked property FAILED, 2 usage or
parse error, 3 a resource cap was hit.  All outputs are byte-stable given
identical inputs and seeds, except for the wall-clock ``elapsed`` column
of experiment reports.  The environment variable SMC_MEM_CAP (bytes)
overrides the synthesis memory cap.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

from . import families, properties
from .formula import ParseError, PositivityError, parse, pretty, size
from .kripke import KripkeModel, PointedModel, load_model, save_model
from .semantics import evaluate, holds
from .synth import (
    ALL_OPS, DEFAULT_MEM_CAP, SynthProblem, meg_verify, min_separating_formula,
    verify_separator,
)
from .translate import (
    closure_to_mu, eliminate_universal, expand_closure, hat_eliminate_tangle,
    scattered_eliminate_tangle,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _mem_cap() -> int:
    raw = os.environ.get("SMC_MEM_CAP")
    if raw is None:
        return DEFAULT_MEM_CAP
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"smc: SMC_MEM_CAP must be an integer, got {raw!r}")


def _parse_points(spec: str) -> list[PointedModel]:
    """Point-set spec: a family token (A1, B2, hatA1, C2, hatC2:A) or a
    model file with worlds, ``path.json:w1,w2``."""
    fam = spec
    hatted = fam.startswith("hat")
    if hatted:
        fam = fam[3:]
    if fam and fam[0] in "AB" and fam[1:].isdigit():
        return families.family_roots(fam[0], int(fam[1:]), hatted)
    if fam and fam[0] == "C":
        body = fam[1:]
        side = None
        if ":" in body:
            body, side = body.split(":", 1)
        if body.isdigit() and side in ("A", "B"):
            lefts, rights = families.amalgam_roots(int(body), hatted)
            return lefts if side == "A" else rights
    if ":" not in spec:
        raise ValueError(
            f"bad point spec {spec!r}: want a family token like A2, hatB1, C2:A "
            "or path.json:world[,world...]")
    path, _, worlds = spec.rpartition(":")
    m = load_model(path)
    return [PointedModel(m, w) for w in worlds.split(",")]


def cmd_check(args) -> int:
    m = load_model(args.model)
    f = parse(args.formula)
    ts = evaluate(m, f)
    if args.world is not None:
        print("true" if args.world in ts else "false")
    else:
        for w in ts.worlds():
            print(w)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.family == "C":
        m = families.big_C(args.n, args.hatted)
    else:
        if args.i is None:
            raise ValueError("--i is required for families A and B")
        m = families.build(families.FamilyIndex(args.family, args.n, args.i, args.hatted))
    save_model(m, args.out)
    print(f"{m.name}: {len(m.worlds)} worlds -> {args.out}")
    return EXIT_OK


def cmd_bisim(args) -> int:
    from .bisim import locally_bisimilar

    m1, m2 = load_model(args.model1), load_model(args.model2)
    atoms = frozenset(args.atoms.split(",")) if args.atoms else None
    same = locally_bisimilar(PointedModel(m1, args.world1),
                             PointedModel(m2, args.world2), atoms)
    print("bisimilar" if same else "not bisimilar")
    return EXIT_OK if same else EXIT_FAIL


def cmd_translate(args) -> int:
    f = parse(args.formula)
    if args.mode == "expand-closure":
        out = expand_closure(f)
    elif args.mode == "closure-to-mu":
        out = closure_to_mu(f)
    elif args.mode == "scattered":
        out = scattered_eliminate_tangle(f)
    elif args.mode == "hat":
        if not args.model:
            raise ValueError("--model is required for mode 'hat'")
        out = hat_eliminate_tangle(f, load_model(args.model))
    else:  # universal
        if not args.model:
            raise ValueError("--model is required for mode 'universal'")
        out = eliminate_universal(f, load_model(args.model))
    print(pretty(out))
    return EXIT_OK


def cmd_synth(args) -> int:
    left, right = [], []
    for spec in args.left:
        left.extend(_parse_points(spec))
    for spec in args.right:
        right.extend(_parse_points(spec))
    ops = frozenset(args.ops.split(","))
    atoms = frozenset(args.atoms.split(",")) if args.atoms else None
    problem = SynthProblem(left=tuple(left), right=tuple(right), ops=ops,
                           atoms=atoms, max_size=args.max_size)
    cap = args.mem_cap if args.mem_cap else _mem_cap()
    res = min_separating_formula(problem, mem_cap_bytes=cap, quotient=args.quotient)
    if res.status == "found":
        print(f"min={res.size} witness={pretty(res.witness)}")
        return EXIT_OK
    if res.status == "infeasible":
        lp, rp = res.bisimilar_pair
        print(f"infeasible: {lp} is bisimilar to {rp}")
        return EXIT_FAIL
    if res.status == "budget":
        print(f"no separator of size <= {res.exhausted_through}")
        return EXIT_FAIL
    print(f"memory cap exceeded after exhausting size {res.exhausted_through} "
          f"({res.signatures_stored} signatures, ~{res.estimated_bytes} bytes)")
    return EXIT_RESOURCE


def cmd_meg(args) -> int:
    f = parse(args.formula)
    left, right = [], []
    for spec in args.left:
        left.extend(_parse_points(spec))
    for spec in args.right:
        right.extend(_parse_points(spec))
    tree = meg_verify(f, left, right)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(tree.dumps())
            fh.write("\n")
    if tree.closed:
        print(f"closed: {tree.node_count} nodes")
        return EXIT_OK
    print(f"failure at node {tree.failure_node.id} ({tree.failure_node.label}): {tree.reason}")
    return EXIT_FAIL


def _auto_max_size(n: int) -> int:
    # deep enough to pin the exact minimum at small n, bound-check depth beyond
    return size(families.psi(n)) if n <= 2 else 2 ** n - 1


def _experiment_rows(args):
    lo, _, hi = args.n_range.partition(":")
    n_lo, n_hi = int(lo), int(hi or lo)
    classes = ["gl", "tc"] if args.family_class == "both" else [args.family_class]
    languages = (["dia", "dia_forall"] if args.language == "both"
                 else [args.language])
    for n in range(n_lo, n_hi + 1):
        for cls in classes:
            for lang in languages:
                yield n, cls, lang


def run_succinctness_row(n: int, cls: str, lang: str, max_size: int | None,
                         mem_cap: int, quotient: bool = False):
    """One experiment row: synthesize the minimal separator for the level-n
    families and check it against the exponential floor 2^n."""
    hatted = cls == "tc"
    if lang == "dia":
        left = families.family_roots("A", n, hatted)
        right = families.family_roots("B", n, hatted)
        ops = frozenset({"lit", "and", "or", "dia", "box"})
    else:
        left, right = families.amalgam_roots(n, hatted)
        ops = ALL_OPS
    if max_size is None:
        max_size = _auto_max_size(n)
    start = time.monotonic()
    res = min_separating_formula(
        SynthProblem(left=tuple(left), right=tuple(right), ops=ops, max_size=max_size),
        mem_cap_bytes=mem_cap, quotient=quotient)
    elapsed = time.monotonic() - start

    bound = 2 ** n
    psi_n = families.psi(n)
    psi_ok = verify_separator(psi_n, left, right)
    if res.status == "found":
        outcome = f"ExactMin {res.size}"
        witness = pretty(res.witness)
        row_ok = res.size >= bound
    elif res.status == "budget":
        outcome = f"NoSeparatorBelow {res.exhausted_through + 1}"
        witness = ""
        row_ok = res.exhausted_through + 1 >= bound
    elif res.status == "memory":
        outcome = "MemoryExceeded"
        witness = ""
        row_ok = True  # documented limitation, not a bound violation
    else:  # infeasible would mean the families collapsed; that is a failure
        outcome = "Infeasible"
        witness = ""
        row_ok = False
    return {
        "n": n,
        "family_class": cls,
        "language": lang,
        "lower_bound": bound,
        "outcome": outcome,
        "witness": witness,
        "elapsed": f"{elapsed:.2f}",
    }, row_ok, psi_ok, size(psi_n), res.status


def cmd_experiment_succinctness(args) -> int:
    cap = args.mem_cap if args.mem_cap else _mem_cap()
    rows = []
    all_ok = True
    capped = False
    for n, cls, lang in _experiment_rows(args):
        row, row_ok, psi_ok, psi_size, status = run_succinctness_row(
            n, cls, lang, args.max_size, cap, args.quotient)
        rows.append(row)
        all_ok = all_ok and row_ok and psi_ok
        capped = capped or status == "memory"
        print(f"n={n} class={cls} language={lang} bound={row['lower_bound']} "
              f"outcome='{row['outcome']}' psi_size={psi_size} "
              f"psi_separates={psi_ok} elapsed={row['elapsed']}s")
    rows.sort(key=lambda r: (r["n"], r["family_class"], r["language"]))
    fields = ["n", "family_class", "language", "lower_bound", "outcome",
              "witness", "elapsed"]
    with open(args.report, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    print("PASS" if all_ok else "FAIL")
    if not all_ok:
        return EXIT_FAIL
    return EXIT_RESOURCE if capped else EXIT_OK


def cmd_experiment_properties(args) -> int:
    results = properties.run_all(args.seed, args.cases)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name} ({detail})")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} properties passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="smc",
        description="Model checker and succinctness workbench for modal fixpoint logics")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula on a model")
    p.add_argument("--model", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--world")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("gen", help="generate a family model as JSON")
    p.add_argument("--family", choices=["A", "B", "C"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--hatted", action="store_true")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bisim", help="decide local bisimilarity of two pointed models")
    p.add_argument("model1")
    p.add_argument("world1")
    p.add_argument("model2")
    p.add_argument("world2")
    p.add_argument("--atoms")
    p.set_defaults(fn=cmd_bisim)

    p = sub.add_parser("translate", help="apply one of the language translations")
    p.add_argument("--mode", required=True,
                   choices=["expand-closure", "closure-to-mu", "scattered",
                            "hat", "universal"])
    p.add_argument("--formula", required=True)
    p.add_argument("--model", help="model file for the model-relative modes")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("synth", help="exact minimal separating formula")
    p.add_argument("--left", action="append", required=True,
                   help="family token (A1, hatB2, C2:A) or path.json:w1,w2; repeatable")
    p.add_argument("--right", action="append", required=True)
    p.add_argument("--ops", default="lit,and,or,dia,box")
    p.add_argument("--atoms")
    p.add_argument("--max-size", type=int, default=12)
    p.add_argument("--quotient", action="store_true",
                   help="collapse each model by bisimulation first")
    p.add_argument("--mem-cap", type=int, help="signature-store cap in bytes")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("meg", help="verify a formula as a game strategy")
    p.add_argument("--formula", required=True)
    p.add_argument("--left", action="append", required=True)
    p.add_argument("--right", action="append", required=True)
    p.add_argument("-o", "--out", help="write the game tree as JSON")
    p.set_defaults(fn=cmd_meg)

    p = sub.add_parser("experiment", help="experiment harness")
    esub = p.add_subparsers(dest="experiment", required=True)

    e = esub.add_parser("succinctness", help="empirical succinctness floor check")
    e.add_argument("--n-range", default="1:2", help="inclusive range, e.g. 1:3")
    e.add_argument("--family-class", dest="family_class", default="both",
                   choices=["gl", "tc", "both"])
    e.add_argument("--language", default="both",
                   choices=["dia", "dia_forall", "both"])
    e.add_argument("--max-size", type=int,
                   help="search ceiling; default pins exact minima for n<=2")
    e.add_argument("--report", required=True, help="CSV output path")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--quotient", action="store_true")
    e.add_argument("--mem-cap", type=int)
    e.set_defaults(fn=cmd_experiment_succinctness)

    e = esub.add_parser("properties", help="seeded randomized property suites")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--cases", type=int, default=None,
                   help="override the per-property case count")
    e.set_defaults(fn=cmd_experiment_properties)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, PositivityError) as exc:
        print(f"smc: formula error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as exc:
        print(f"smc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

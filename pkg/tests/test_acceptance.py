"""Acceptance sweep.

Ten checks, one per headline behavior of the toolchain, each printing
a single PASS/FAIL line (run with -s to see them).  These intentionally
retrace results that the per-module tests already cover, end to end
and against independent oracles, so a regression anywhere in the
pipeline surfaces here as a one-line verdict.
"""

import os
import random
import subprocess
import sys
import time

import pytest

from normlog.asp import (
    answer_sets,
    axiom_violations,
    emit_asp,
    legal_models,
    project_answer_set,
    verify_lemma4,
)
from normlog.correspond import check_model_correspondence
from normlog.inversion import check_syntactic_monotonicity, inversion_formula
from normlog.models import check_assertion
from normlog.parser import parse_expr, parse_module
from normlog.randgen import random_annotated_module, random_config
from normlog.syntax import print_expr, uncurry
from normlog.transform import TransformError, Variant, transform_module
from normlog.typecheck import Env, elaborate, typecheck_module

from conftest import CASES, ROOT, load_case
from oracles import equivalent
from test_asp import cfg_file

SIZES = {"Vehicle": 1, "Day": 1, "Road": 1}
INTS = (90, 130, 320)


def report(num: int, label: str, problems: list):
    status = "FAIL" if problems else "PASS"
    line = f"acceptance {num:02d} {status}: {label}"
    if problems:
        line += " [" + "; ".join(problems) + "]"
    print(line)
    assert not problems, line


def expect(problems: list, ok: bool, what: str):
    if not ok:
        problems.append(what)


# ---------------------------------------------------------------------------


def test_01_cycle_detection_and_repaired_order():
    problems = []
    try:
        transform_module(load_case("speedlimit_original.l4"), Variant.PRECOND)
        expect(problems, False, "cyclic module transformed without error")
    except TransformError as e:
        expect(
            problems,
            str(e)
            == "cyclic rule ordering: maxSpCarHighway < maxSpCarWorkday "
            "< maxSpSportsCar < maxSpCarHighway",
            f"unexpected cycle message: {e}",
        )

    res = transform_module(load_case("speedlimit_repaired.l4"), Variant.PRECOND)
    seq = list(res.order.sequence)
    expect(
        problems,
        set(seq[:3])
        == {"maxSpCarHighway'Orig", "maxSpCarWorkday", "maxSpSportsCar'Orig"}
        and seq[3:] == ["maxSpSportsCar", "maxSpCarHighway"],
        f"unexpected elaboration order: {seq}",
    )
    report(1, "speed-limit cycle detected, repaired ordering total", problems)


def test_02_precondition_expansion():
    problems = []
    res = transform_module(load_case("speedlimit_repaired.l4"), Variant.PRECOND)
    pre = {r.name: r.precond for r in res.module.user_rules()}

    goldens = {
        "maxSpCarWorkday": "isCar v && isWorkday d",
        "maxSpSportsCar": "isSportsCar v && isHighway r && not (isCar v && isWorkday d)",
        "maxSpCarHighway": (
            "isCar v && isHighway r"
            " && not (isSportsCar v && isHighway r && not (isCar v && isWorkday d))"
            " && not (isCar v && isWorkday d)"
        ),
    }
    for name, want in goldens.items():
        expect(
            problems,
            str(pre[name]) == want,
            f"{name} precondition is {pre[name]!r}",
        )

    # independent semantic check: evaluate both the produced and the
    # hand-derived expansions over all valuations of the four atoms,
    # honoring that a sports car is a car
    references = {
        "maxSpSportsCar": parse_expr(
            "isSportsCar v && isHighway r && not (isCar v && isWorkday d)"
        ),
        "maxSpCarHighway": parse_expr(
            "isCar v && isHighway r"
            " && not (isSportsCar v && isHighway r && not (isCar v && isWorkday d))"
            " && not (isCar v && isWorkday d)"
        ),
    }
    for name, ref in references.items():
        ok, val = equivalent(pre[name], ref, [("isSportsCar v", "isCar v")])
        expect(problems, ok, f"{name} diverges from the reference at {val}")
    report(2, "negated-precondition expansion exact and equivalent", problems)


def test_03_derivability_expansion():
    problems = []
    res = transform_module(load_case("speedlimit_repaired.l4"), Variant.DERIV)
    decls = {d.name: d.type for d in res.module.decls}
    expect(problems, "maxSp+" in decls, "lifted predicate maxSp+ missing")
    if "maxSp+" in decls:
        args, _ = uncurry(decls["maxSp+"])
        expect(problems, len(args) == 5, f"maxSp+ arity is {len(args)}")
        expect(
            problems,
            str(args[0]) == "Rulename_maxSp",
            f"first argument sort is {args[0]}",
        )
    pre = {r.name: str(r.precond) for r in res.module.user_rules()}
    expect(
        problems,
        "not maxSp+ maxSpCarWorkday v d r 90" in pre.get("maxSpSportsCar", ""),
        "sports-car rule lacks the negated workday conclusion",
    )
    for conjunct in (
        "not maxSp+ maxSpSportsCar v d r 320",
        "not maxSp+ maxSpCarWorkday v d r 90",
    ):
        expect(
            problems,
            conjunct in pre.get("maxSpCarHighway", ""),
            f"highway rule lacks {conjunct!r}",
        )
    typecheck_module(res.module)
    report(3, "derivability expansion lifts conclusions over rule names", problems)


def test_04_functionality_assertion():
    problems = []
    repaired = transform_module(
        load_case("speedlimit_repaired.l4"), Variant.PRECOND
    ).module

    out = check_assertion(repaired, "maxSpFunctional", SIZES, INTS)
    expect(problems, out.status == "valid", f"repaired+inversions: {out.status}")

    out = check_assertion(
        repaired, "maxSpFunctional", SIZES, INTS, include_inversions=False
    )
    expect(problems, out.status == "counter_model", f"no inversions: {out.status}")

    out = check_assertion(load_case("speedlimit_plain.l4"), "maxSpFunctional", SIZES, INTS)
    expect(problems, out.status == "counter_model", f"unrestricted rules: {out.status}")
    if out.model is not None:
        speeds = {args[-1] for args, v in out.model.tables["maxSp"].items() if v}
        expect(problems, speeds == {90, 130}, f"countermodel speeds {speeds}")
    else:
        expect(problems, False, "no countermodel returned")
    report(4, "uniqueness of the speed limit holds exactly when restricted and closed", problems)


def test_05_inversion_unit_facts():
    problems = []
    empty = elaborate(parse_module("decl P : Boolean"))
    env = Env.from_module(empty)
    expect(
        problems,
        print_expr(inversion_formula([], "P", env)) == "not P",
        "no-rule inversion is not the closed-world negation",
    )

    selfref = load_case("selfref.l4")
    env = Env.from_module(selfref)
    rules = [r for r in selfref.rules if not r.is_bodyless()]
    expect(
        problems,
        print_expr(inversion_formula(rules, "P", env)) == "P --> not P",
        "self-negating inversion formula wrong",
    )
    mono = check_syntactic_monotonicity(rules, "P")
    expect(problems, not mono.ok, "self-negating rule not flagged as non-monotone")

    out = check_assertion(selfref, "anything", {})
    expect(
        problems,
        out.status == "unsatisfiable" and not out.holds,
        f"closure of the self-negating rule: {out.status}",
    )
    report(5, "inversion formulas for empty and self-negating definitions", problems)


def test_06_correspondence_sweep():
    problems = []
    rng = random.Random(20260817)
    t0 = time.monotonic()
    violations = 0
    checked = 0
    for _ in range(200):
        sample = random_annotated_module(rng)
        rep = check_model_correspondence(sample.module, sample.sizes, sample.ints)
        violations += len(rep.violations)
        checked += rep.checked_precond + rep.checked_deriv
    elapsed = time.monotonic() - t0
    expect(problems, violations == 0, f"{violations} transfer violations")
    expect(problems, checked > 0, "sweep never checked a model")
    expect(problems, elapsed < 60, f"sweep took {elapsed:.1f}s")
    report(
        6,
        f"restriction semantics agree on 200 random modules ({checked} models, {elapsed:.1f}s)",
        problems,
    )


def valid_id_sets(models):
    return {frozenset(i for i, _ in m.legally_valid) for m in models}


def test_07_purchase_obligations():
    problems = []
    for name, want in [
        ("bob", {frozenset({1, 3}), frozenset({2, 3})}),
        ("bob_strong", {frozenset({2, 3})}),
        ("bob_extreme", {frozenset({1, 2, 4})}),
    ]:
        cfg = cfg_file(name)
        lm = legal_models(cfg)
        proj = [project_answer_set(s) for s in answer_sets(emit_asp(cfg))]
        expect(
            problems,
            len(lm) == len(want) and valid_id_sets(lm) == want,
            f"{name}: legal models {valid_id_sets(lm)}",
        )
        expect(
            problems,
            len(proj) == len(want) and valid_id_sets(proj) == want,
            f"{name}: answer sets {valid_id_sets(proj)}",
        )
    report(7, "both engines agree on the purchase-obligation family", problems)


def test_08_pathological_configurations():
    problems = []
    for name in ("selfdefeat", "chain"):
        cfg = cfg_file(name)
        expect(problems, legal_models(cfg) == [], f"{name} has a legal model")
        expect(
            problems,
            answer_sets(emit_asp(cfg)) == [],
            f"{name} has an answer set",
        )
    models = [m.to_json() for m in legal_models(cfg_file("nonminimal"))]
    expect(
        problems,
        models
        == [
            {"is_legal": ["a"], "legally_valid": [[3, "a"]]},
            {"is_legal": ["a", "c"], "legally_valid": [[1, "c"], [3, "a"]]},
        ],
        f"self-supporting config models: {models}",
    )
    report(8, "self-defeat and negation loops have no models, self-support two", problems)


def test_09_soundness_sweep():
    problems = []
    rng = random.Random(55)
    t0 = time.monotonic()
    bad = 0
    sets_seen = 0
    for _ in range(500):
        cfg = random_config(rng)
        for s in answer_sets(emit_asp(cfg)):
            sets_seen += 1
            if axiom_violations(cfg, project_answer_set(s)):
                bad += 1
    elapsed = time.monotonic() - t0
    expect(problems, bad == 0, f"{bad} projections violate the axioms")
    expect(problems, sets_seen >= 200, f"only {sets_seen} answer sets exercised")
    expect(problems, elapsed < 120, f"sweep took {elapsed:.1f}s")

    rep = verify_lemma4(cfg_file("convgap"))
    expect(
        problems,
        rep.sound
        and [m.to_json() for m in rep.uncovered]
        == [{"is_legal": ["a"], "legally_valid": [[1, "a"]]}],
        "self-supporting legal model not reported as uncovered",
    )
    report(
        9,
        f"every projection of 500 random configs is a legal model ({sets_seen} sets, {elapsed:.1f}s)",
        problems,
    )


GOLDEN_COMMANDS = [
    ("parse", "cases/speedlimit_repaired.l4"),
    ("transform", "cases/speedlimit_repaired.l4", "--variant", "deriv", "--json"),
    ("invert", "cases/speedlimit_repaired.l4"),
    ("emit-smt", "cases/speedlimit_repaired.l4", "--assert", "maxSpFunctional"),
    ("legal-models", "cases/bob.cfg", "--json"),
    ("answer-sets", "cases/bob.cfg", "--project"),
    ("verify-lemma4", "cases/convgap.cfg", "--json"),
]


def test_10_cli_determinism():
    problems = []
    for args in GOLDEN_COMMANDS:
        outputs = []
        for hashseed in ("0", "0", "1"):
            env = dict(os.environ, PYTHONHASHSEED=hashseed)
            p = subprocess.run(
                [sys.executable, "-m", "normlog.cli", *args],
                capture_output=True,
                text=True,
                cwd=ROOT,
                env=env,
            )
            outputs.append((p.returncode, p.stdout, p.stderr))
        expect(
            problems,
            outputs[0][0] == 0,
            f"{args[0]} exited {outputs[0][0]}",
        )
        expect(
            problems,
            outputs[0] == outputs[1] == outputs[2],
            f"{args[0]} output varies across runs",
        )
    report(10, "command line output byte-identical across runs and hash seeds", problems)

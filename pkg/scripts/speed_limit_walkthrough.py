#!/usr/bin/env python3
"""Walk the speed-limit example through the whole pipeline, narrated.

Covers: the cyclic annotation set and its failure, the repaired set's
elaboration order, both restriction semantics, predicate inversion,
and the functionality check with and without the closure formulas.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from normlog.inversion import inversion_formula, inversion_targets
from normlog.models import check_assertion
from normlog.parser import parse_module
from normlog.syntax import print_expr
from normlog.transform import TransformError, Variant, transform_module
from normlog.typecheck import Env, elaborate, typecheck_module

SIZES = {"Vehicle": 1, "Day": 1, "Road": 1}
INTS = (90, 130, 320)


def load(name):
    m = elaborate(parse_module((ROOT / "cases" / name).read_text()))
    typecheck_module(m)
    return m


def banner(text):
    print()
    print(f"== {text}")


def main() -> int:
    banner("the circular annotation set cannot be ordered")
    try:
        transform_module(load("speedlimit_original.l4"), Variant.PRECOND)
        print("unexpectedly transformed")
        return 1
    except TransformError as e:
        print(f"rejected: {e}")

    banner("the repaired set orders fine")
    res = transform_module(load("speedlimit_repaired.l4"), Variant.PRECOND)
    print("elaboration order:", " < ".join(res.order.sequence))
    for line in res.trace:
        print(f"  {line}")

    banner("restriction via negated preconditions")
    for r in res.module.user_rules():
        print(f"{r.name}: if {print_expr(r.precond)}")

    banner("the same, simplified")
    simp = transform_module(
        load("speedlimit_repaired.l4"), Variant.PRECOND, simplify_preconds=True
    )
    for r in simp.module.user_rules():
        print(f"{r.name}: if {print_expr(r.precond)}")

    banner("restriction via negated derivability")
    deriv = transform_module(load("speedlimit_repaired.l4"), Variant.DERIV)
    for r in deriv.module.user_rules():
        print(f"{r.name}: if {print_expr(r.precond)} then {print_expr(r.postcond)}")

    banner("closing the predicate: inversion formula")
    m = res.module
    env = Env.from_module(m)
    rules = [r for r in m.rules if not r.is_bodyless()]
    for p in inversion_targets(m):
        print(f"{p}: {print_expr(inversion_formula(rules, p, env))}")

    banner("at most one speed per situation?")
    out = check_assertion(m, "maxSpFunctional", SIZES, INTS)
    print(f"restricted rules + closure: {out.status}")
    out = check_assertion(m, "maxSpFunctional", SIZES, INTS, include_inversions=False)
    print(f"without the closure formulas: {out.status}")
    out = check_assertion(load("speedlimit_plain.l4"), "maxSpFunctional", SIZES, INTS)
    print(f"unrestricted rules: {out.status}")
    if out.model is not None:
        speeds = sorted(s for (*_, s), v in out.model.tables["maxSp"].items() if v)
        print(f"  the same situation admits speeds {speeds}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

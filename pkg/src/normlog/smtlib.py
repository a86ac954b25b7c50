"""SMT-LIB 2.6 emission, plus a small reader used to sanity-check that
emitted scripts are well-formed and self-contained.

The emitter writes one deterministic script per formula set: sort
declarations, symbol declarations, carrier axioms for rule-name sorts
(distinctness and exhaustiveness), the always-true axioms for sort
characteristic predicates, one assert per formula, and optionally a
goal.  A validity goal is asserted negated, so `sat` answers from a
solver mean "countermodel found" and `unsat` means "valid".

The reader is not a solver and does not try to be one.  It parses
s-expressions, tracks declarations and binders, and checks every
applied symbol is known with a consistent arity.  That is enough to
catch emitter regressions without an external dependency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .syntax import (
    VALID,
    And,
    App,
    BoolLit,
    BoolT,
    ClassT,
    Cmp,
    Eq,
    Exists,
    Expr,
    FloatLit,
    FloatT,
    Forall,
    FunT,
    IfThenElse,
    Implies,
    IntLit,
    IntT,
    Not,
    NormlogError,
    Or,
    StringLit,
    StrT,
    Var,
    atom_parts,
    uncurry,
)
from .models import FormulaSet


class SmtError(NormlogError):
    pass


_SIMPLE_EXTRA = set("~!@$%^&*_-+=<>.?/")


def smt_symbol(name: str) -> str:
    """Quote a symbol with |...| when it is not a simple symbol (our
    generated names with apostrophes need this)."""
    ok = name and not name[0].isdigit() and all(
        c.isalnum() or c in _SIMPLE_EXTRA for c in name
    )
    if ok:
        return name
    if "|" in name or "\\" in name:
        raise SmtError(f"symbol '{name}' cannot be represented in SMT-LIB")
    return f"|{name}|"


def smt_sort(t) -> str:
    if isinstance(t, BoolT):
        return "Bool"
    if isinstance(t, IntT):
        return "Int"
    if isinstance(t, FloatT):
        return "Real"
    if isinstance(t, StrT):
        return "String"
    if isinstance(t, ClassT):
        return smt_symbol(t.name)
    raise SmtError(f"type '{t}' has no SMT-LIB sort")


def _implies_spine(e: Expr) -> list[Expr]:
    if isinstance(e, Implies):
        return [e.left] + _implies_spine(e.right)
    return [e]


def _and_spine(e: Expr) -> list[Expr]:
    if isinstance(e, And):
        return _and_spine(e.left) + _and_spine(e.right)
    return [e]


def _or_spine(e: Expr) -> list[Expr]:
    if isinstance(e, Or):
        return _or_spine(e.left) + _or_spine(e.right)
    return [e]


def expr_to_sexp(e: Expr) -> str:
    if isinstance(e, Var):
        return smt_symbol(e.name)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, IntLit):
        return str(e.value) if e.value >= 0 else f"(- {-e.value})"
    if isinstance(e, FloatLit):
        v = e.value
        body = repr(abs(v)) if "." in repr(abs(v)) else f"{abs(v)}.0"
        return body if v >= 0 else f"(- {body})"
    if isinstance(e, StringLit):
        return '"' + e.value.replace('"', '""') + '"'
    if isinstance(e, Not):
        return f"(not {expr_to_sexp(e.arg)})"
    if isinstance(e, And):
        return "(and " + " ".join(expr_to_sexp(x) for x in _and_spine(e)) + ")"
    if isinstance(e, Or):
        return "(or " + " ".join(expr_to_sexp(x) for x in _or_spine(e)) + ")"
    if isinstance(e, Implies):
        return "(=> " + " ".join(expr_to_sexp(x) for x in _implies_spine(e)) + ")"
    if isinstance(e, Eq):
        return f"(= {expr_to_sexp(e.left)} {expr_to_sexp(e.right)})"
    if isinstance(e, Cmp):
        return f"({e.op} {expr_to_sexp(e.left)} {expr_to_sexp(e.right)})"
    if isinstance(e, App):
        parts = atom_parts(e)
        if parts is None:
            raise SmtError("cannot emit application of a non-symbol")
        head, args = parts
        return f"({smt_symbol(head)} " + " ".join(expr_to_sexp(a) for a in args) + ")"
    if isinstance(e, (Forall, Exists)):
        kind = "forall" if isinstance(e, Forall) else "exists"
        binders = []
        body = e
        while isinstance(body, type(e)):
            binders.append(f"({smt_symbol(body.var)} {smt_sort(body.var_type)})")
            body = body.body
        return f"({kind} (" + " ".join(binders) + f") {expr_to_sexp(body)})"
    if isinstance(e, IfThenElse):
        return f"(ite {expr_to_sexp(e.cond)} {expr_to_sexp(e.then)} {expr_to_sexp(e.other)})"
    raise SmtError(f"cannot emit {type(e).__name__} nodes to SMT-LIB")


def emit_smtlib(
    fs: FormulaSet, goal: Optional[tuple[str, str, Expr]] = None
) -> str:
    """Render a formula set as one SMT-LIB script.  `goal` is
    (assertion name, mode, formula); a validity goal is negated."""
    lines: list[str] = ["(set-logic ALL)"]

    if fs.sorts:
        lines.append("; sorts")
        for s in fs.sorts:
            lines.append(f"(declare-sort {smt_symbol(s)} 0)")

    lines.append("; symbols")
    char_sorts: dict[str, str] = {}
    for d in fs.decls:
        args, cod = uncurry(d.type)
        if d.name in fs.char_true and args:
            char_sorts[d.name] = smt_sort(args[0])
        if args:
            doms = " ".join(smt_sort(a) for a in args)
            lines.append(f"(declare-fun {smt_symbol(d.name)} ({doms}) {smt_sort(cod)})")
        else:
            lines.append(f"(declare-const {smt_symbol(d.name)} {smt_sort(cod)})")

    for sort, consts in fs.fixed:
        lines.append(f"; carrier of {sort}")
        names = [smt_symbol(c) for c in consts]
        if len(names) > 1:
            lines.append("(assert (distinct " + " ".join(names) + "))")
        eqs = [f"(= x {n})" for n in names]
        body = eqs[0] if len(eqs) == 1 else "(or " + " ".join(eqs) + ")"
        lines.append(f"(assert (forall ((x {smt_symbol(sort)})) {body}))")

    for p in fs.char_true:
        sort = char_sorts.get(p)
        if sort is None:
            continue
        lines.append(f"; {p} holds on all of {sort}")
        lines.append(f"(assert (forall ((x {sort})) ({smt_symbol(p)} x)))")

    for name, expr in fs.formulas:
        lines.append(f"; {name}")
        lines.append(f"(assert {expr_to_sexp(expr)})")

    if goal is not None:
        gname, mode, gexpr = goal
        if mode == VALID:
            lines.append(f"; goal {gname} (validity: negated, sat = countermodel)")
            lines.append(f"(assert (not {expr_to_sexp(gexpr)}))")
        else:
            lines.append(f"; goal {gname} (satisfiability)")
            lines.append(f"(assert {expr_to_sexp(gexpr)})")

    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reader / structural validation


Sexp = Union[str, int, float, tuple, list]


def _tokenize(text: str) -> list[str]:
    toks: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            toks.append(c)
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SmtError("unterminated |symbol|")
            toks.append(text[i : j + 1])
            i = j + 1
        elif c == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise SmtError("unterminated string literal")
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            toks.append('"' + "".join(buf) + '"')
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();|\"":
                j += 1
            toks.append(text[i:j])
            i = j
    return toks


def _parse_sexps(toks: list[str]) -> list[Sexp]:
    out: list[Sexp] = []
    stack: list[list] = []
    for t in toks:
        if t == "(":
            stack.append([])
        elif t == ")":
            if not stack:
                raise SmtError("unbalanced ')'")
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                out.append(done)
        else:
            atom = _atom(t)
            if stack:
                stack[-1].append(atom)
            else:
                out.append(atom)
    if stack:
        raise SmtError("unbalanced '('")
    return out


def _atom(t: str) -> Sexp:
    if t.startswith('"'):
        return ("string", t[1:-1])
    if t.startswith("|"):
        return t[1:-1]
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


_BUILTIN_SORTS = {"Bool", "Int", "Real", "String"}
_BUILTIN_OPS = {"and", "or", "not", "=>", "=", "distinct", "ite", "<", "<=", ">", ">=", "+", "-", "*"}


@dataclass(frozen=True)
class ScriptInfo:
    sorts: tuple[str, ...]
    symbols: dict[str, int]  # name -> arity
    assert_count: int
    has_check_sat: bool
    has_get_model: bool


def read_script(text: str) -> ScriptInfo:
    """Parse an SMT-LIB script and check that every sort and symbol is
    declared before use and applied at its declared arity."""
    forms = _parse_sexps(_tokenize(text))
    sorts: list[str] = []
    symbols: dict[str, int] = {}
    assert_count = 0
    has_check_sat = False
    has_get_model = False

    def check_sort(s: Sexp) -> None:
        if not isinstance(s, str) or (s not in _BUILTIN_SORTS and s not in sorts):
            raise SmtError(f"unknown sort {s!r}")

    def check_term(e: Sexp, bound: frozenset) -> None:
        if isinstance(e, (int, float)):
            return
        if isinstance(e, tuple):  # string literal
            return
        if isinstance(e, str):
            if e in ("true", "false") or e in bound:
                return
            if e in symbols:
                if symbols[e] != 0:
                    raise SmtError(f"symbol '{e}' of arity {symbols[e]} used without arguments")
                return
            raise SmtError(f"unknown symbol '{e}'")
        if not isinstance(e, list) or not e:
            raise SmtError(f"ill-formed term {e!r}")
        head = e[0]
        if head in ("forall", "exists"):
            if len(e) != 3 or not isinstance(e[1], list):
                raise SmtError(f"ill-formed {head}")
            names = []
            for b in e[1]:
                if not (isinstance(b, list) and len(b) == 2 and isinstance(b[0], str)):
                    raise SmtError(f"ill-formed binder in {head}")
                check_sort(b[1])
                names.append(b[0])
            check_term(e[2], bound | frozenset(names))
            return
        if isinstance(head, str) and head in _BUILTIN_OPS:
            for a in e[1:]:
                check_term(a, bound)
            return
        if isinstance(head, str):
            if head not in symbols:
                raise SmtError(f"unknown symbol '{head}'")
            if symbols[head] != len(e) - 1:
                raise SmtError(
                    f"symbol '{head}' declared with arity {symbols[head]}, applied to {len(e) - 1}"
                )
            for a in e[1:]:
                check_term(a, bound)
            return
        raise SmtError(f"ill-formed application {e!r}")

    for form in forms:
        if not isinstance(form, list) or not form or not isinstance(form[0], str):
            raise SmtError(f"ill-formed command {form!r}")
        cmd = form[0]
        if cmd == "set-logic":
            continue
        if cmd == "declare-sort":
            if len(form) != 3 or not isinstance(form[1], str) or form[2] != 0:
                raise SmtError("ill-formed declare-sort")
            sorts.append(form[1])
        elif cmd == "declare-fun":
            if len(form) != 4 or not isinstance(form[1], str) or not isinstance(form[2], list):
                raise SmtError("ill-formed declare-fun")
            for a in form[2]:
                check_sort(a)
            check_sort(form[3])
            symbols[form[1]] = len(form[2])
        elif cmd == "declare-const":
            if len(form) != 3 or not isinstance(form[1], str):
                raise SmtError("ill-formed declare-const")
            check_sort(form[2])
            symbols[form[1]] = 0
        elif cmd == "assert":
            if len(form) != 2:
                raise SmtError("ill-formed assert")
            check_term(form[1], frozenset())
            assert_count += 1
        elif cmd == "check-sat":
            has_check_sat = True
        elif cmd == "get-model":
            has_get_model = True
        else:
            raise SmtError(f"unsupported command '{cmd}'")

    return ScriptInfo(tuple(sorts), symbols, assert_count, has_check_sat, has_get_model)

"""Compilation of defeasibility modifiers into plain rules.

A rule may carry a ``{restrict: {subjectTo: ..., despite: ...}}``
annotation naming the rules that override it (subjectTo) and the rules
it overrides (despite).  Both reduce, in stages, to ordinary rules:

1. ``despite_elim`` re-expresses every despite entry as a subjectTo
   entry on the other rule, so only subjectTo remains.
2. ``subject_to_elim`` splits each subjectTo-annotated rule ``r`` into
   a frozen copy ``r'Orig`` marked ``{source}`` and a definition of
   ``r`` as ``{derived: {apply: {restrictSubjectTo r'Orig o1 ...}}}``.
3. Derived rules are then resolved in dependency order, either by
   strengthening the precondition with the negated preconditions of the
   overriding rules, or (after lifting predicates over rule-name index
   sorts) with their negated conclusions.  Source copies are dropped
   from the final rule set.

The two resolution strategies are the ``precond`` and ``deriv``
variants below.  They are not equivalent in general, which is exactly
why both exist; see the correspondence checker for the relation between
their model classes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .syntax import (
    BOOL,
    ROOT_CLASS,
    TRUE,
    And,
    App,
    Assertion,
    BoolLit,
    ClassDecl,
    ClassT,
    Cmp,
    Derived,
    Eq,
    Exists,
    Expr,
    FieldAccess,
    Forall,
    FunDecl,
    FunT,
    IfThenElse,
    Implies,
    IntLit,
    Lambda,
    LType,
    Not,
    NormlogError,
    Or,
    Remap,
    Restrict,
    RestrictSubjectTo,
    Rule,
    RuleModule,
    Source,
    Var,
    apply,
    atom_parts,
    char_pred_name,
    conj,
    conjuncts,
    free_vars,
    fresh_name,
    print_expr,
    substitute,
    uncurry,
)
from .typecheck import Env, LTypeError, is_subtype, type_of

SOURCE_SUFFIX = "'Orig"
LIFT_SUFFIX = "+"
RULENAME_CLASS_PREFIX = "Rulename_"


class TransformError(NormlogError):
    pass


class CycleError(TransformError):
    """The rule ordering constraints are unsatisfiable."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        pretty = " < ".join(self.cycle + (self.cycle[0],))
        super().__init__(f"cyclic rule ordering: {pretty}")


# ---------------------------------------------------------------------------
# stage 1: despite elimination


def despite_elim(rules: Sequence[Rule]) -> tuple[Rule, ...]:
    """Turn every ``despite`` entry into a ``subjectTo`` entry on the
    named rule, prepended to whatever that rule already lists.  One
    left-to-right pass suffices because the rewrite never creates new
    despite entries."""
    by_name = {r.name: r for r in rules}
    state: dict[str, tuple[list[str], list[str]]] = {}
    for r in rules:
        if isinstance(r.annotation, Restrict):
            state[r.name] = (list(r.annotation.subject_to), list(r.annotation.despite))

    for r in rules:
        if r.name not in state:
            continue
        _, despite = state[r.name]
        for target in despite:
            if target not in by_name:
                raise TransformError(f"rule '{r.name}': despite names unknown rule '{target}'")
            if target not in state:
                t = by_name[target]
                if t.annotation is not None:
                    raise TransformError(
                        f"rule '{r.name}': despite target '{target}' has a "
                        f"non-restrict annotation and cannot gain a subjectTo entry"
                    )
                state[target] = ([], [])
            state[target][0].insert(0, r.name)
        state[r.name] = (state[r.name][0], [])

    out = []
    for r in rules:
        if r.name not in state:
            out.append(r)
            continue
        subject_to, despite = state[r.name]
        assert not despite
        ann = Restrict(tuple(subject_to), ()) if subject_to else None
        out.append(replace(r, annotation=ann))
    return tuple(out)


# ---------------------------------------------------------------------------
# stage 2: subjectTo elimination


def subject_to_elim(rules: Sequence[Rule]) -> tuple[Rule, ...]:
    """Split every subjectTo-annotated rule into a {source} copy and a
    {derived} definition referring to it."""
    names = {r.name for r in rules}
    out: list[Rule] = []
    for r in rules:
        ann = r.annotation
        if not isinstance(ann, Restrict) or not ann.subject_to:
            out.append(r)
            continue
        if ann.despite:
            raise TransformError(
                f"rule '{r.name}' still has despite entries; run despite elimination first"
            )
        for t in ann.subject_to:
            if t not in names:
                raise TransformError(f"rule '{r.name}': subjectTo names unknown rule '{t}'")
        orig = r.name + SOURCE_SUFFIX
        if orig in names:
            raise TransformError(f"cannot split rule '{r.name}': name '{orig}' already taken")
        names.add(orig)
        out.append(replace(r, name=orig, annotation=Source()))
        out.append(
            Rule(
                name=r.name,
                params=(),
                precond=TRUE,
                postcond=TRUE,
                annotation=Derived(RestrictSubjectTo(orig, ann.subject_to)),
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# stage 3: rule ordering


@dataclass(frozen=True)
class RuleOrder:
    """Precedence constraints between rules, with a witnessing total
    order.  An edge (a, b) reads: a must be resolved before b."""

    edges: tuple[tuple[str, str], ...]
    sequence: tuple[str, ...]


def order_edges(rules: Sequence[Rule]) -> tuple[tuple[str, str], ...]:
    names = {r.name for r in rules}
    edges: list[tuple[str, str]] = []
    seen = set()

    def add(a: str, b: str) -> None:
        if a not in names:
            raise TransformError(f"rule '{b}' refers to unknown rule '{a}'")
        if a == b:
            raise CycleError([a])
        if (a, b) not in seen:
            seen.add((a, b))
            edges.append((a, b))

    for r in rules:
        if isinstance(r.annotation, Derived):
            t = r.annotation.apply
            if isinstance(t, RestrictSubjectTo):
                add(t.target, r.name)
                for o in t.overriders:
                    add(o, r.name)
            elif isinstance(t, Remap):
                add(t.target, r.name)
    return tuple(edges)


def rule_order(rules: Sequence[Rule]) -> RuleOrder:
    """Topologically sort the rules by their precedence constraints,
    breaking ties lexicographically.  Raises CycleError (listing one
    offending cycle) when no total order exists."""
    import heapq

    edges = order_edges(rules)
    names = [r.name for r in rules]
    succ: dict[str, list[str]] = {n: [] for n in names}
    indeg = {n: 0 for n in names}
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1

    heap = sorted(n for n in names if indeg[n] == 0)
    heapq.heapify(heap)
    sequence = []
    while heap:
        n = heapq.heappop(heap)
        sequence.append(n)
        for b in succ[n]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(heap, b)

    if len(sequence) < len(names):
        remaining = {n for n in names if n not in set(sequence)}
        raise CycleError(_find_cycle(remaining, succ))
    return RuleOrder(edges, tuple(sequence))


def _find_cycle(remaining: set[str], succ: dict[str, list[str]]) -> list[str]:
    start = min(remaining)
    path = [start]
    on_path = {start}
    while True:
        nxt = min(b for b in succ[path[-1]] if b in remaining)
        if nxt in on_path:
            return path[path.index(nxt):]
        path.append(nxt)
        on_path.add(nxt)


# ---------------------------------------------------------------------------
# restriction semantics


def _rename_positional(e: Expr, from_params, to_params) -> Expr:
    subst = {}
    for (fn, _), (tn, _) in zip(from_params, to_params):
        if fn != tn:
            subst[fn] = Var(tn)
    return substitute(e, subst) if subst else e


def _check_interface(rule: Rule, other: Rule, rule_params, other_params) -> None:
    ok = len(rule_params) == len(other_params) and all(
        a[1] == b[1] for a, b in zip(rule_params, other_params)
    )
    if not ok:
        raise TransformError(
            f"rules '{rule.name}' and '{other.name}' have different parameter "
            f"interfaces; bring them into agreement with a remap first"
        )


def restrict_subject_to_precond(rule: Rule, overriders: Sequence[Rule]) -> Rule:
    """Strengthen the rule's precondition with the negated precondition
    of each overriding rule, left to right.  All rules involved must
    share one parameter interface."""
    pre = rule.precond
    for o in overriders:
        _check_interface(rule, o, rule.params, o.params)
        pre = And(pre, Not(_rename_positional(o.precond, o.params, rule.params)))
    return replace(rule, precond=pre, annotation=None)


def _is_rulename_type(t: LType, env: Env) -> bool:
    return (
        isinstance(t, ClassT)
        and t.name in env.classes
        and env.classes[t.name].rulename_for is not None
    )


def restrict_subject_to_deriv(rule: Rule, overriders: Sequence[Rule], env: Env) -> Rule:
    """Strengthen the rule's precondition with the negated conclusion of
    each overriding rule.  Meant for lifted rules: parameters of
    rule-name type are bookkeeping and excluded from the interface
    check."""
    own = [(n, t) for n, t in rule.params if not _is_rulename_type(t, env)]
    pre = rule.precond
    for o in overriders:
        o_own = [(n, t) for n, t in o.params if not _is_rulename_type(t, env)]
        _check_interface(rule, o, own, o_own)
        pre = And(pre, Not(_rename_positional(o.postcond, o_own, own)))
    return replace(rule, precond=pre, annotation=None)


def remap(rule: Rule, new_params, subst: dict[str, Expr], env: Env) -> Rule:
    """Re-express a rule over a new parameter list, substituting the old
    parameters.  Every old parameter must be covered, and each
    replacement must typecheck against the parameter it replaces."""
    vars = dict(new_params)
    old = dict(rule.params)
    for n in old:
        if n not in subst:
            raise TransformError(f"remap of '{rule.name}' leaves parameter '{n}' unmapped")
    for n, e in subst.items():
        if n not in old:
            raise TransformError(f"remap of '{rule.name}' maps unknown parameter '{n}'")
        t = type_of(env, e, vars)
        if not is_subtype(t, old[n], env.classes):
            raise LTypeError(
                f"remap of '{rule.name}': replacement for '{n}' has type '{t}', "
                f"expected '{old[n]}'"
            )
    return Rule(
        name=rule.name,
        params=tuple(new_params),
        precond=substitute(rule.precond, subst),
        postcond=substitute(rule.postcond, subst),
    )


# ---------------------------------------------------------------------------
# predicate lifting (for the deriv variant)


def final_rule_name(r: Rule) -> str:
    """The name a rule will carry in the fully resolved set: a {source}
    copy answers to the name of the derived rule defined from it."""
    if isinstance(r.annotation, Source) and r.name.endswith(SOURCE_SUFFIX):
        return r.name[: -len(SOURCE_SUFFIX)]
    return r.name


def rulename_class(pred: str) -> str:
    return RULENAME_CLASS_PREFIX + pred


def lift_predicates(m: RuleModule) -> RuleModule:
    """Give every predicate concluded by a user rule an extra first
    argument naming the rule that derived it.

    For each such predicate P (say of type T1 -> ... -> Tn -> Boolean):

    * a class ``Rulename_P`` is added as a new sort, with one constant
      per concluding rule, named by the rule's final name;
    * P's declaration becomes ``P+ : Rulename_P -> T1 -> ... -> Boolean``;
    * a conclusion ``P e1 .. en`` of rule r becomes ``P+ r' e1 .. en``
      where r' is r's final name;
    * each occurrence of P in a precondition gets a fresh rule-name
      parameter, universally quantified by appending it to the rule's
      parameter list;
    * an occurrence ``P e1 .. en`` in an assertion formula becomes
      ``exists rn. P+ rn e1 .. en``, which says exactly that some rule
      derives it.

    System rules (class inclusions) neither count as concluding rules
    nor are rewritten, so characteristic predicates stay unlifted.
    """
    decl_types = {d.name: d.type for d in m.all_decls()}
    class_names = {c.name for c in m.classes}
    char_preds = {char_pred_name(c) for c in class_names}
    rule_like = [r for r in m.rules if not r.system and not r.is_bodyless()]

    concluders: dict[str, list[Rule]] = {}
    for r in rule_like:
        parts = atom_parts(r.postcond)
        if parts is None:
            continue
        head, _ = parts
        if head in char_preds:
            raise TransformError(
                f"rule '{r.name}' concludes characteristic predicate '{head}'; "
                f"lifting characteristic predicates is not supported"
            )
        if head in decl_types:
            concluders.setdefault(head, []).append(r)

    if not concluders:
        return m

    lifted: dict[str, str] = {}
    new_classes: list[ClassDecl] = []
    new_consts: list[FunDecl] = []
    for p, rs in concluders.items():
        cls = rulename_class(p)
        plus = p + LIFT_SUFFIX
        if cls in class_names:
            raise TransformError(f"cannot lift '{p}': class '{cls}' already exists")
        if plus in decl_types:
            raise TransformError(f"cannot lift '{p}': symbol '{plus}' already declared")
        lifted[p] = plus
        new_classes.append(ClassDecl(cls, parent=ROOT_CLASS, rulename_for=plus))
        seen = set()
        for r in rs:
            fname = final_rule_name(r)
            if fname in seen:
                raise TransformError(
                    f"two rules concluding '{p}' resolve to the same name '{fname}'"
                )
            seen.add(fname)
            if fname in decl_types:
                raise TransformError(
                    f"cannot lift '{p}': rule-name constant '{fname}' collides "
                    f"with an existing declaration"
                )
            new_consts.append(FunDecl(fname, ClassT(cls)))

    def lift_decl(d: FunDecl) -> FunDecl:
        if d.name not in lifted:
            return d
        args, cod = uncurry(d.type)
        cls = rulename_class(d.name)
        new_type = fun_type_over([ClassT(cls)] + list(args), cod)
        return FunDecl(lifted[d.name], new_type, system=d.system, loc=d.loc)

    const_names = {c.name for c in new_consts}

    def lift_rule(r: Rule) -> Rule:
        if r.system or r.is_bodyless():
            return r
        taken = set(n for n, _ in r.params) | set(decl_types) | set(lifted.values()) | const_names
        extra: list[tuple[str, LType]] = []

        def fresh_rn() -> str:
            name = fresh_name("rn", taken)
            taken.add(name)
            return name

        def rewrite(e: Expr) -> Expr:
            parts = atom_parts(e)
            if parts is not None and parts[0] in lifted:
                head, args = parts
                rn = fresh_rn()
                extra.append((rn, ClassT(rulename_class(head))))
                return apply(Var(lifted[head]), Var(rn), *[rewrite(a) for a in args])
            return _map_subexprs(e, rewrite)

        pre = rewrite(r.precond)
        parts = atom_parts(r.postcond)
        if parts is not None and parts[0] in lifted:
            head, args = parts
            post = apply(Var(lifted[head]), Var(final_rule_name(r)), *args)
        else:
            post = r.postcond
        return replace(r, params=r.params + tuple(extra), precond=pre, postcond=post)

    arity = {p: len(uncurry(decl_types[p])[0]) for p in lifted}

    def lift_assertion(a: Assertion) -> Assertion:
        taken = set(decl_types) | set(lifted.values()) | const_names | free_vars(a.formula)

        def rewrite(e: Expr) -> Expr:
            parts = atom_parts(e)
            if parts is not None and parts[0] in lifted:
                head, args = parts
                if len(args) != arity[head]:
                    raise TransformError(
                        f"assertion '{a.name}': lifted predicate '{head}' "
                        f"must be fully applied"
                    )
                rn = fresh_name("rn", taken)
                taken.add(rn)
                atom = apply(Var(lifted[head]), Var(rn), *[rewrite(x) for x in args])
                return Exists(rn, ClassT(rulename_class(head)), atom)
            return _map_subexprs(e, rewrite)

        return replace(a, formula=rewrite(a.formula))

    decls = tuple(lift_decl(d) for d in m.decls)
    globals_ = tuple(lift_decl(d) for d in m.globals) + tuple(new_consts)
    rules = tuple(lift_rule(r) for r in m.rules)
    return replace(
        m,
        classes=m.classes + tuple(new_classes),
        decls=decls,
        globals=globals_,
        rules=rules,
        assertions=tuple(lift_assertion(a) for a in m.assertions),
    )


def fun_type_over(args: Sequence[LType], cod: LType) -> LType:
    t = cod
    for a in reversed(args):
        t = FunT(a, t)
    return t


def _map_subexprs(e: Expr, f) -> Expr:
    if isinstance(e, Not):
        return replace(e, arg=f(e.arg))
    if isinstance(e, (And, Or, Implies, Eq, Cmp)):
        return replace(e, left=f(e.left), right=f(e.right))
    if isinstance(e, App):
        return replace(e, fn=f(e.fn), arg=f(e.arg))
    if isinstance(e, (Lambda, Forall, Exists)):
        return replace(e, body=f(e.body))
    if isinstance(e, IfThenElse):
        return replace(e, cond=f(e.cond), then=f(e.then), other=f(e.other))
    if isinstance(e, FieldAccess):
        return replace(e, obj=f(e.obj))
    return e


# ---------------------------------------------------------------------------
# stage 4: resolving derived rules


class Variant(enum.Enum):
    PRECOND = "precond"
    DERIV = "deriv"


def eval_derived(rules: Sequence[Rule], variant: Variant, env: Env) -> tuple[Rule, ...]:
    """Resolve every derived rule, in an order compatible with the
    precedence constraints, then drop the {source} copies.  The output
    preserves the input's rule order."""
    order = rule_order(rules)
    current: dict[str, Rule] = {r.name: r for r in rules}
    for name in order.sequence:
        r = current[name]
        if not isinstance(r.annotation, Derived):
            continue
        t = r.annotation.apply
        if isinstance(t, RestrictSubjectTo):
            target = current[t.target]
            overriders = [current[o] for o in t.overriders]
            if variant is Variant.PRECOND:
                resolved = restrict_subject_to_precond(target, overriders)
            else:
                resolved = restrict_subject_to_deriv(target, overriders, env)
        elif isinstance(t, Remap):
            resolved = remap(current[t.target], t.new_params, dict(t.subst), env)
        else:
            raise TransformError(f"rule '{name}': unknown transformer")
        current[name] = replace(resolved, name=name)
    return tuple(
        current[r.name] for r in rules if not isinstance(current[r.name].annotation, Source)
    )


# ---------------------------------------------------------------------------
# the whole pipeline


@dataclass(frozen=True)
class TransformResult:
    module: RuleModule
    order: RuleOrder
    trace: tuple[str, ...]


def transform_module(
    m: RuleModule, variant: Variant = Variant.PRECOND, simplify_preconds: bool = False
) -> TransformResult:
    """Run the full compilation: despite elimination, subjectTo
    elimination, predicate lifting (deriv variant only), and derived
    rule resolution.  System rules pass through untouched."""
    user = [r for r in m.rules if not r.system]
    system = [r for r in m.rules if r.system]

    trace: list[str] = []
    r1 = despite_elim(user)
    for old, new in zip(user, r1):
        if old.annotation != new.annotation and isinstance(new.annotation, Restrict):
            now = ", ".join(new.annotation.subject_to)
            trace.append(f"despite-elim: {old.name} subjectTo {now}")
    r2 = subject_to_elim(r1)
    for r in r2:
        if isinstance(r.annotation, Source):
            trace.append(f"subjectTo-elim: split off {r.name}")

    work = replace(m, rules=tuple(r2) + tuple(system))
    if variant is Variant.DERIV:
        work = lift_predicates(work)
        for c in work.classes:
            if c.rulename_for is not None:
                trace.append(f"lift: {c.rulename_for} indexed by {c.name}")
    env = Env.from_module(work)

    user2 = [r for r in work.rules if not r.system]
    order = rule_order(user2)
    resolved = eval_derived(user2, variant, env)
    derived_names = {r.name for r in user2 if isinstance(r.annotation, Derived)}
    for name in order.sequence:
        if name in derived_names:
            trace.append(f"resolve: {name}")

    if simplify_preconds:
        from .typecheck import inclusion_map

        inc = inclusion_map(env.classes)
        resolved = tuple(
            replace(r, precond=simplify(r.precond, inc)) if not r.is_bodyless() else r
            for r in resolved
        )

    out = replace(work, rules=tuple(resolved) + tuple(r for r in work.rules if r.system))
    return TransformResult(out, order, tuple(trace))


# ---------------------------------------------------------------------------
# precondition simplification


def simplify(e: Expr, inclusions: Optional[dict[str, frozenset[str]]] = None) -> Expr:
    """Boolean simplification with contextual assumptions.

    Inside a conjunction each conjunct is simplified under the
    assumption that its siblings hold; dually for disjunctions.  The
    optional inclusion map lets class membership propagate upward
    (isSportsCar x forces isCar x) and prune entailed or contradictory
    literals.  The result is logically equivalent to the input.
    """
    entails: dict[str, frozenset[str]] = inclusions or {}
    entailed_by: dict[str, set[str]] = {}
    for sub, sups in entails.items():
        for sup in sups:
            entailed_by.setdefault(sup, set()).add(sub)

    def assume(ctx: dict[Expr, bool], e: Expr, val: bool) -> None:
        if isinstance(e, BoolLit):
            return
        if isinstance(e, Not):
            assume(ctx, e.arg, not val)
            return
        ctx[e] = val
        if val and isinstance(e, And):
            assume(ctx, e.left, True)
            assume(ctx, e.right, True)
        if not val and isinstance(e, Or):
            assume(ctx, e.left, False)
            assume(ctx, e.right, False)
        parts = atom_parts(e)
        if parts is not None:
            head, args = parts
            if val:
                for sup in entails.get(head, ()):
                    ctx[apply(Var(sup), *args) if args else Var(sup)] = True
            else:
                for sub in entailed_by.get(head, ()):
                    ctx[apply(Var(sub), *args) if args else Var(sub)] = False

    def purge(ctx: dict[Expr, bool], var: str) -> dict[Expr, bool]:
        return {k: v for k, v in ctx.items() if var not in free_vars(k)}

    def go(e: Expr, ctx: dict[Expr, bool]) -> Expr:
        if e in ctx:
            return BoolLit(ctx[e])
        if isinstance(e, And):
            parts = list(conjuncts(e))
            done: list[Expr] = []
            for i, p in enumerate(parts):
                local = dict(ctx)
                for j in range(len(parts)):
                    if j != i:
                        assume(local, done[j] if j < i else parts[j], True)
                sp = go(p, local)
                if sp == BoolLit(False):
                    return BoolLit(False)
                done.append(sp)
            keep = [p for p in done if p != TRUE]
            return conj(keep)
        if isinstance(e, Or):
            parts = _disjuncts(e)
            done = []
            for i, p in enumerate(parts):
                local = dict(ctx)
                for j in range(len(parts)):
                    if j != i:
                        assume(local, done[j] if j < i else parts[j], False)
                sp = go(p, local)
                if sp == TRUE:
                    return TRUE
                done.append(sp)
            keep = [p for p in done if p != BoolLit(False)]
            if not keep:
                return BoolLit(False)
            out = keep[0]
            for p in keep[1:]:
                out = Or(out, p)
            return out
        if isinstance(e, Not):
            inner = go(e.arg, ctx)
            if isinstance(inner, BoolLit):
                return BoolLit(not inner.value)
            if isinstance(inner, Not):
                return inner.arg
            return Not(inner)
        if isinstance(e, Implies):
            left = go(e.left, ctx)
            if left == TRUE:
                return go(e.right, ctx)
            if left == BoolLit(False):
                return TRUE
            local = dict(ctx)
            assume(local, left, True)
            right = go(e.right, local)
            if right == TRUE:
                return TRUE
            if right == BoolLit(False):
                return go(Not(left), ctx)
            return Implies(left, right)
        if isinstance(e, IfThenElse):
            cond = go(e.cond, ctx)
            if cond == TRUE:
                return go(e.then, ctx)
            if cond == BoolLit(False):
                return go(e.other, ctx)
            then_ctx = dict(ctx)
            assume(then_ctx, cond, True)
            else_ctx = dict(ctx)
            assume(else_ctx, cond, False)
            return IfThenElse(cond, go(e.then, then_ctx), go(e.other, else_ctx))
        if isinstance(e, (Forall, Exists)):
            body = go(e.body, purge(ctx, e.var))
            if isinstance(body, BoolLit):
                # sound because carriers are never empty
                return body
            return replace(e, body=body)
        if isinstance(e, Eq):
            if e.left == e.right:
                return TRUE
            if isinstance(e.left, IntLit) and isinstance(e.right, IntLit):
                return BoolLit(e.left.value == e.right.value)
            return e
        if isinstance(e, Cmp):
            if isinstance(e.left, IntLit) and isinstance(e.right, IntLit):
                import operator

                ops = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}
                return BoolLit(ops[e.op](e.left.value, e.right.value))
            return e
        if isinstance(e, Lambda):
            return replace(e, body=go(e.body, purge(ctx, e.var)))
        return e

    prev = None
    cur = e
    for _ in range(12):
        if cur == prev:
            break
        prev, cur = cur, go(cur, {})
    return cur


def _disjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, Or):
        return _disjuncts(e.left) + _disjuncts(e.right)
    return [e]

"""Defeasible rule configurations, their legal models, and an answer
set encoding with a built-in stable-model search.

A configuration is propositional-with-terms: rules with atomic heads
and bodies of (possibly negated) atoms, facts, modifier declarations
between rule ids, and minimal inconsistent sets of atoms.  Modifier
argument order, fixed here once and used everywhere:

* ``despite(subordinate, dominating)``: if the dominating rule's
  precondition is satisfied, the subordinate rule is not valid.
* ``subject_to(dominating, subordinate)``: if the dominating rule is
  valid and an inconsistent set contains both conclusions and is fully
  legal apart from the subordinate conclusion, the subordinate rule is
  not valid.
* ``strong_subject_to(dominating, subordinate)``: if the dominating
  rule is valid, the subordinate rule is not valid, unconditionally.

Legal models are checked directly against the defining conditions (see
`axiom_violations`); they are deliberately NOT minimized, because
non-minimal legal models are part of the semantics.  The answer set
encoding (`emit_asp`) computes a subset of them; `verify_lemma4` holds
the two against each other.

The stable-model search grounds schematic clauses against the least
model of the negation-free relaxation (every stable model is contained
in it), then tries candidate assignments only for atoms that actually
occur negated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .syntax import NormlogError
from .models import ResourceCapError


class ConfigError(NormlogError):
    pass


# ---------------------------------------------------------------------------
# terms, atoms, rules


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[int, str, TVar, "Atom"]


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}(" + ",".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class DefRule:
    id: int
    head: Atom
    body: tuple = ()

    def __str__(self) -> str:
        if not self.body:
            return f"rule {self.id}: {self.head}."
        return f"rule {self.id}: {self.head} <- " + ", ".join(str(b) for b in self.body) + "."


DESPITE = "despite"
SUBJECT_TO = "subject_to"
STRONG_SUBJECT_TO = "strong_subject_to"
MODIFIER_KINDS = (DESPITE, SUBJECT_TO, STRONG_SUBJECT_TO)


@dataclass(frozen=True)
class Modifier:
    kind: str
    first: int
    second: int

    def __str__(self) -> str:
        return f"{self.kind}({self.first},{self.second})"


@dataclass(frozen=True)
class Config:
    rules: tuple = ()
    facts: tuple = ()
    modifiers: tuple = ()
    inconsistent: tuple = ()  # tuple of tuples of atoms

    def rule_map(self) -> dict:
        return {r.id: r for r in self.rules}

    def validate(self) -> None:
        seen = set()
        for r in self.rules:
            if r.id in seen:
                raise ConfigError(f"duplicate rule id {r.id}")
            seen.add(r.id)
        for m in self.modifiers:
            if m.kind not in MODIFIER_KINDS:
                raise ConfigError(f"unknown modifier kind '{m.kind}'")
            for i in (m.first, m.second):
                if i not in seen:
                    raise ConfigError(f"modifier {m} names unknown rule {i}")
        for k in self.inconsistent:
            if len(set(k)) < 2:
                raise ConfigError(
                    f"inconsistent set {{{', '.join(str(a) for a in k)}}} needs at "
                    f"least two distinct atoms"
                )

    def is_ground(self) -> bool:
        return not any(_term_vars(x) for x in self._all_atoms())

    def _all_atoms(self) -> Iterable[Atom]:
        for r in self.rules:
            yield r.head
            for lit in r.body:
                yield lit.atom
        yield from self.facts
        for k in self.inconsistent:
            yield from k


def _term_vars(t: Term) -> set:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, Atom):
        out: set = set()
        for a in t.args:
            out |= _term_vars(a)
        return out
    return set()


# ---------------------------------------------------------------------------
# configuration parser


_CFG_KEYWORDS = {"rule", "fact", "modifier", "inconsistent", "not"}


class _CfgParser:
    def __init__(self, text: str):
        self.toks = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str):
        toks = []
        line, col = 1, 1
        i, n = 0, len(text)
        while i < n:
            c = text[i]
            if c == "\n":
                line += 1
                col = 1
                i += 1
            elif c.isspace():
                col += 1
                i += 1
            elif c == "#":
                while i < n and text[i] != "\n":
                    i += 1
            elif c.isalpha() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(("ident", text[i:j], line, col))
                col += j - i
                i = j
            elif c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
                j = i + 1
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(("int", text[i:j], line, col))
                col += j - i
                i = j
            elif text.startswith("<-", i):
                toks.append(("sym", "<-", line, col))
                col += 2
                i += 2
            elif c in ":(){},.":
                toks.append(("sym", c, line, col))
                col += 1
                i += 1
            else:
                raise ConfigError(f"{line}:{col}: unexpected character {c!r}")
        return toks

    def _err(self, msg: str):
        if self.pos < len(self.toks):
            _, text, line, col = self.toks[self.pos]
            raise ConfigError(f"{line}:{col}: {msg}, found {text!r}")
        raise ConfigError(f"end of input: {msg}")

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        if self.pos >= len(self.toks):
            return False
        k, t, _, _ = self.toks[self.pos]
        return k == kind and (text is None or t == text)

    def accept(self, kind: str, text: Optional[str] = None) -> bool:
        if self.at(kind, text):
            self.pos += 1
            return True
        return False

    def expect(self, kind: str, text: Optional[str] = None) -> str:
        if not self.at(kind, text):
            self._err(f"expected {text or kind}")
        t = self.toks[self.pos][1]
        self.pos += 1
        return t

    def parse(self) -> Config:
        rules, facts, modifiers, inconsistent = [], [], [], []
        while self.pos < len(self.toks):
            if self.accept("ident", "rule"):
                rid = int(self.expect("int"))
                self.expect("sym", ":")
                head = self.atom()
                body = []
                if self.accept("sym", "<-"):
                    body.append(self.literal())
                    while self.accept("sym", ","):
                        body.append(self.literal())
                self.expect("sym", ".")
                rules.append(DefRule(rid, head, tuple(body)))
            elif self.accept("ident", "fact"):
                self.expect("sym", ":")
                facts.append(self.atom())
                self.expect("sym", ".")
            elif self.accept("ident", "modifier"):
                self.expect("sym", ":")
                kind = self.expect("ident")
                if kind not in MODIFIER_KINDS:
                    raise ConfigError(f"unknown modifier kind '{kind}'")
                self.expect("sym", "(")
                first = int(self.expect("int"))
                self.expect("sym", ",")
                second = int(self.expect("int"))
                self.expect("sym", ")")
                self.expect("sym", ".")
                modifiers.append(Modifier(kind, first, second))
            elif self.accept("ident", "inconsistent"):
                self.expect("sym", ":")
                self.expect("sym", "{")
                atoms = [self.atom()]
                while self.accept("sym", ","):
                    atoms.append(self.atom())
                self.expect("sym", "}")
                self.expect("sym", ".")
                inconsistent.append(tuple(atoms))
            else:
                self._err("expected 'rule', 'fact', 'modifier' or 'inconsistent'")
        cfg = Config(tuple(rules), tuple(facts), tuple(modifiers), tuple(inconsistent))
        cfg.validate()
        return cfg

    def literal(self) -> Literal:
        if self.accept("ident", "not"):
            return Literal(self.atom(), positive=False)
        return Literal(self.atom())

    def atom(self) -> Atom:
        name = self.expect("ident")
        if name in _CFG_KEYWORDS:
            self.pos -= 1
            self._err("keyword cannot start an atom")
        if name[0].isupper():
            self.pos -= 1
            self._err("atoms must start with a lowercase letter")
        args: list = []
        if self.accept("sym", "("):
            args.append(self.term())
            while self.accept("sym", ","):
                args.append(self.term())
            self.expect("sym", ")")
        return Atom(name, tuple(args))

    def term(self) -> Term:
        if self.at("int"):
            return int(self.expect("int"))
        name = self.expect("ident")
        if name[0].isupper() or name[0] == "_":
            return TVar(name)
        if self.at("sym", "("):
            self.pos -= 1
            return self.atom()
        return name


def parse_config(text: str) -> Config:
    return _CfgParser(text).parse()


# ---------------------------------------------------------------------------
# grounding a schematic configuration


def config_constants(cfg: Config) -> list[str]:
    """All constants appearing anywhere, in first-occurrence order."""
    out: list[str] = []
    seen = set()

    def walk(t: Term) -> None:
        if isinstance(t, str) and t not in seen:
            seen.add(t)
            out.append(t)
        elif isinstance(t, Atom):
            for a in t.args:
                walk(a)

    for a in cfg._all_atoms():
        for arg in a.args:
            walk(arg)
    return out


def _subst_term(t: Term, b: dict) -> Term:
    if isinstance(t, TVar):
        return b[t.name]
    if isinstance(t, Atom):
        return Atom(t.pred, tuple(_subst_term(a, b) for a in t.args))
    return t


def _subst_atom(a: Atom, b: dict) -> Atom:
    return Atom(a.pred, tuple(_subst_term(x, b) for x in a.args))


def ground(cfg: Config, constants: Optional[Sequence[str]] = None) -> Config:
    """Instantiate schematic rules over the given constants (default:
    every constant in the configuration).  Instance ids are
    ``id * 1000 + k`` in instantiation order; modifiers between
    schematic rules multiply out to all instance pairs."""
    consts = list(constants) if constants is not None else config_constants(cfg)
    for a in cfg.facts:
        if _term_vars(a):
            raise ConfigError(f"fact {a} must be ground")
    for k in cfg.inconsistent:
        for a in k:
            if _term_vars(a):
                raise ConfigError(f"inconsistent set atom {a} must be ground")

    instances: dict[int, list[int]] = {}
    rules: list[DefRule] = []
    used_ids = set()
    for r in cfg.rules:
        vars = sorted(
            set().union(
                _term_vars(r.head), *[_term_vars(l.atom) for l in r.body]
            )
        )
        if not vars:
            rules.append(r)
            instances[r.id] = [r.id]
            used_ids.add(r.id)
            continue
        if not consts:
            raise ConfigError(f"rule {r.id} has variables but there are no constants")
        ids = []
        for k, combo in enumerate(itertools.product(consts, repeat=len(vars))):
            b = dict(zip(vars, combo))
            new_id = r.id * 1000 + k
            ids.append(new_id)
            rules.append(
                DefRule(
                    new_id,
                    _subst_atom(r.head, b),
                    tuple(Literal(_subst_atom(l.atom, b), l.positive) for l in r.body),
                )
            )
        instances[r.id] = ids
        used_ids.update(ids)
    if len(used_ids) != len(rules):
        raise ConfigError("instance ids collide; renumber the schematic rules")

    modifiers = []
    for m in cfg.modifiers:
        for i in instances[m.first]:
            for j in instances[m.second]:
                modifiers.append(Modifier(m.kind, i, j))

    out = Config(tuple(rules), cfg.facts, tuple(modifiers), cfg.inconsistent)
    out.validate()
    return out


# ---------------------------------------------------------------------------
# legal models, checked directly against their defining conditions


@dataclass(frozen=True)
class LegalModel:
    is_legal: frozenset
    legally_valid: frozenset  # of (rule id, conclusion atom)

    def key(self):
        return (
            len(self.is_legal) + len(self.legally_valid),
            tuple(sorted(str(a) for a in self.is_legal)),
            tuple(sorted((i, str(a)) for i, a in self.legally_valid)),
        )

    def to_json(self) -> dict:
        return {
            "is_legal": sorted(str(a) for a in self.is_legal),
            "legally_valid": [
                [i, str(a)] for i, a in sorted(self.legally_valid, key=lambda p: (p[0], str(p[1])))
            ],
        }


def _precond_satisfied(r: DefRule, legal: frozenset) -> bool:
    return all((lit.atom in legal) == lit.positive for lit in r.body)


def axiom_violations(cfg: Config, model: LegalModel) -> list[str]:
    """Check one candidate against the defining conditions of legal
    models.  Returns a list of violation descriptions (empty = legal)."""
    if not cfg.is_ground():
        raise ConfigError("legal models are only defined for ground configurations")
    legal = model.is_legal
    valid = model.legally_valid
    rmap = cfg.rule_map()
    out: list[str] = []

    for i, c in valid:
        if i not in rmap:
            out.append(f"validity of unknown rule {i}")
        elif rmap[i].head != c:
            out.append(f"rule {i} held valid for {c}, but concludes {rmap[i].head}")

    # facts are legal
    for a in cfg.facts:
        if a not in legal:
            out.append(f"fact-legality: fact {a} is not legal")

    # valid rules have satisfied preconditions and legal conclusions
    for i, c in valid:
        r = rmap.get(i)
        if r is None:
            continue
        if not _precond_satisfied(r, legal):
            out.append(f"valid-rule-support: rule {i} is valid but its precondition fails")
        if c not in legal:
            out.append(f"valid-rule-support: rule {i} is valid but {c} is not legal")

    # every legal atom is a fact or the conclusion of a valid rule
    concluded = {c for _, c in valid}
    for a in legal:
        if a not in cfg.facts and a not in concluded:
            out.append(f"legality-support: {a} is legal but unsupported")

    # modifier exclusions
    for m in cfg.modifiers:
        if m.kind == DESPITE:
            sub, dom = m.first, m.second
            if _precond_satisfied(rmap[dom], legal) and (sub, rmap[sub].head) in valid:
                out.append(
                    f"despite-exclusion: rule {dom} applies, so rule {sub} must not be valid"
                )
        elif m.kind == STRONG_SUBJECT_TO:
            dom, sub = m.first, m.second
            if (dom, rmap[dom].head) in valid and (sub, rmap[sub].head) in valid:
                out.append(
                    f"strong-exclusion: rule {dom} is valid, so rule {sub} must not be valid"
                )
        elif m.kind == SUBJECT_TO:
            dom, sub = m.first, m.second
            if (dom, rmap[dom].head) in valid and _conflict_applies(cfg, legal, dom, sub, rmap):
                if (sub, rmap[sub].head) in valid:
                    out.append(
                        f"conflict-exclusion: rule {dom} is valid and prevails, so "
                        f"rule {sub} must not be valid"
                    )

    # every excluded rule owes its exclusion to some modifier instance
    for r in cfg.rules:
        if not _precond_satisfied(r, legal):
            continue
        if (r.id, r.head) in valid:
            continue
        if not _exclusion_justified(cfg, legal, valid, r, rmap):
            out.append(
                f"exclusion-justification: rule {r.id} applies and is not valid, "
                f"but nothing excludes it"
            )
    return out


def _conflict_applies(cfg: Config, legal: frozenset, dom: int, sub: int, rmap: dict) -> bool:
    cd, cs = rmap[dom].head, rmap[sub].head
    if cd == cs:
        return False
    for k in cfg.inconsistent:
        if cd in k and cs in k and all(a in legal for a in k if a != cs):
            return True
    return False


def _exclusion_justified(cfg: Config, legal, valid, r: DefRule, rmap: dict) -> bool:
    for m in cfg.modifiers:
        if m.kind == DESPITE and m.first == r.id:
            if _precond_satisfied(rmap[m.second], legal):
                return True
        elif m.kind == STRONG_SUBJECT_TO and m.second == r.id:
            dom = m.first
            if (dom, rmap[dom].head) in valid:
                return True
        elif m.kind == SUBJECT_TO and m.second == r.id:
            dom = m.first
            if (dom, rmap[dom].head) in valid and _conflict_applies(
                cfg, legal, dom, r.id, rmap
            ):
                return True
    return False


def legal_models(cfg: Config, cap_bits: int = 20) -> list[LegalModel]:
    """All legal models, by exhaustive candidate enumeration over the
    atoms that can possibly be legal (facts and rule conclusions) and
    the possible validity pairs."""
    if not cfg.is_ground():
        raise ConfigError("legal models are only defined for ground configurations")
    atoms: list[Atom] = []
    seen = set()
    for a in itertools.chain(cfg.facts, (r.head for r in cfg.rules)):
        if a not in seen:
            seen.add(a)
            atoms.append(a)
    pairs = [(r.id, r.head) for r in cfg.rules]
    bits = len(atoms) + len(pairs)
    if bits > cap_bits:
        raise ResourceCapError(
            f"legal model search needs 2^{bits} candidates, cap is 2^{cap_bits}"
        )

    out = []
    for mask in range(1 << bits):
        legal = frozenset(a for i, a in enumerate(atoms) if mask >> i & 1)
        valid = frozenset(
            p for i, p in enumerate(pairs) if mask >> (len(atoms) + i) & 1
        )
        model = LegalModel(legal, valid)
        if not axiom_violations(cfg, model):
            out.append(model)
    out.sort(key=LegalModel.key)
    return out


def minimal_only(models: Sequence[LegalModel]) -> list[LegalModel]:
    def combined(m: LegalModel) -> frozenset:
        return m.is_legal | {("v", p) for p in m.legally_valid}

    out = []
    for m in models:
        cm = combined(m)
        if not any(combined(o) < cm for o in models):
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# the answer set encoding


@dataclass(frozen=True)
class AspRule:
    head: Atom
    body: tuple = ()

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- " + ", ".join(str(b) for b in self.body) + "."


@dataclass(frozen=True)
class AspProgram:
    rules: tuple = ()

    def to_text(self) -> str:
        return "\n".join(str(r) for r in self.rules) + "\n"


def _il(a: Atom) -> Atom:
    return Atom("is_legal", (a,))


def emit_asp(cfg: Config) -> AspProgram:
    """The answer set program of a ground configuration.  Its stable
    models, projected to is_legal/legally_valid, are legal models."""
    if not cfg.is_ground():
        raise ConfigError("the answer set encoding needs a ground configuration")
    cfg.validate()
    out: list[AspRule] = []

    for a in cfg.facts:
        out.append(AspRule(_il(a)))

    for m in cfg.modifiers:
        out.append(AspRule(Atom(m.kind, (m.first, m.second))))

    for r in cfg.rules:
        body = tuple(Literal(_il(l.atom), l.positive) for l in r.body)
        out.append(AspRule(Atom("according_to", (r.id, r.head)), body))

    for k in cfg.inconsistent:
        for ai, aj in itertools.combinations(k, 2):
            rest = tuple(Literal(_il(a)) for a in k if a != ai and a != aj)
            out.append(AspRule(Atom("opposes", (ai, aj)), rest))
    out.append(
        AspRule(
            Atom("opposes", (TVar("X"), TVar("Y"))),
            (Literal(Atom("opposes", (TVar("Y"), TVar("X")))),),
        )
    )

    R1, C1, R2, C2 = TVar("R1"), TVar("C1"), TVar("R2"), TVar("C2")
    out.append(
        AspRule(
            Atom("defeated", (R2, C2)),
            (
                Literal(Atom(DESPITE, (R2, R1))),
                Literal(Atom("according_to", (R1, C1))),
                Literal(Atom("according_to", (R2, C2))),
            ),
        )
    )
    out.append(
        AspRule(
            Atom("defeated", (R2, C2)),
            (
                Literal(Atom(STRONG_SUBJECT_TO, (R1, R2))),
                Literal(Atom("legally_valid", (R1, C1))),
                Literal(Atom("according_to", (R2, C2))),
            ),
        )
    )
    out.append(
        AspRule(
            Atom("defeated", (R2, C2)),
            (
                Literal(Atom(SUBJECT_TO, (R1, R2))),
                Literal(Atom("legally_valid", (R1, C1))),
                Literal(Atom("opposes", (C1, C2))),
                Literal(Atom("according_to", (R2, C2))),
            ),
        )
    )

    R, C = TVar("R"), TVar("C")
    out.append(
        AspRule(
            Atom("not_legally_valid", (R,)),
            (Literal(Atom("defeated", (R, C))),),
        )
    )
    out.append(
        AspRule(
            Atom("legally_valid", (R, C)),
            (
                Literal(Atom("according_to", (R, C))),
                Literal(Atom("not_legally_valid", (R,)), positive=False),
            ),
        )
    )
    out.append(AspRule(_il(C), (Literal(Atom("legally_valid", (R, C))),)))

    return AspProgram(tuple(out))


# ---------------------------------------------------------------------------
# stable models


def _unify(pattern: Term, value: Term, b: dict) -> Optional[dict]:
    if isinstance(pattern, TVar):
        if pattern.name in b:
            return b if b[pattern.name] == value else None
        b2 = dict(b)
        b2[pattern.name] = value
        return b2
    if isinstance(pattern, Atom):
        if not isinstance(value, Atom) or pattern.pred != value.pred:
            return None
        if len(pattern.args) != len(value.args):
            return None
        for pa, va in zip(pattern.args, value.args):
            nb = _unify(pa, va, b)
            if nb is None:
                return None
            b = nb
        return b
    return b if pattern == value else None


def _match_atom(pattern: Atom, value: Atom, b: dict) -> Optional[dict]:
    return _unify(pattern, value, b)


@dataclass(frozen=True)
class GroundRule:
    head: Atom
    pos: tuple
    neg: tuple


def _ground_program(p: AspProgram, instance_cap: int = 1_000_000) -> list[GroundRule]:
    """Instantiate schematic clauses against the least model of the
    negation-free relaxation.  Every stable model is a subset of that
    least model, so instances pruned here cannot fire in any stable
    model.  Negative literals on atoms outside it are dropped as
    trivially true."""
    possible: set[Atom] = set()
    instances: set[GroundRule] = set()

    def body_matches(body, b, acc):
        if not body:
            yield b
            return
        lit, rest = body[0], body[1:]
        if not lit.positive:
            if _term_vars(lit.atom) - set(b):
                raise ConfigError(
                    f"unsafe clause: variable in negative literal {lit} not bound "
                    f"by a positive literal"
                )
            yield from body_matches(rest, b, acc)
            return
        for v in list(acc):
            nb = _match_atom(lit.atom, v, b)
            if nb is not None:
                yield from body_matches(rest, nb, acc)

    changed = True
    while changed:
        changed = False
        for r in p.rules:
            pos = [l for l in r.body if l.positive]
            order = pos + [l for l in r.body if not l.positive]
            for b in body_matches(tuple(order), {}, possible):
                if _term_vars(r.head) - set(b):
                    raise ConfigError(f"unsafe clause: unbound variable in head {r.head}")
                head = _subst_atom(r.head, b)
                gpos = tuple(_subst_atom(l.atom, b) for l in pos)
                gneg = tuple(
                    _subst_atom(l.atom, b) for l in r.body if not l.positive
                )
                g = GroundRule(head, gpos, gneg)
                if g not in instances:
                    instances.add(g)
                    if len(instances) > instance_cap:
                        raise ResourceCapError(
                            f"grounding exceeded {instance_cap} rule instances"
                        )
                    changed = True
                if head not in possible:
                    possible.add(head)
                    changed = True

    out = []
    for g in sorted(instances, key=lambda g: (str(g.head), g.pos and tuple(map(str, g.pos)) or (), tuple(map(str, g.neg)))):
        neg = tuple(a for a in g.neg if a in possible)
        out.append(GroundRule(g.head, g.pos, neg))
    return out


def _least_model(rules: Sequence[tuple[Atom, tuple]]) -> frozenset:
    known: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for head, pos in rules:
            if head not in known and all(a in known for a in pos):
                known.add(head)
                changed = True
    return frozenset(known)


def answer_sets(
    p: AspProgram, guess_cap_bits: int = 20, instance_cap: int = 1_000_000
) -> list[frozenset]:
    """All stable models.  Candidates are generated only over atoms
    that occur negated somewhere in the grounding: the reduct, and
    hence stability, depends on nothing else."""
    ground_rules = _ground_program(p, instance_cap)
    neg_atoms = sorted(
        {a for g in ground_rules for a in g.neg}, key=str
    )
    if len(neg_atoms) > guess_cap_bits:
        raise ResourceCapError(
            f"stable model search needs 2^{len(neg_atoms)} candidates, "
            f"cap is 2^{guess_cap_bits}"
        )
    neg_set = frozenset(neg_atoms)

    out = []
    for mask in range(1 << len(neg_atoms)):
        chosen = frozenset(a for i, a in enumerate(neg_atoms) if mask >> i & 1)
        reduct = [
            (g.head, g.pos) for g in ground_rules if not (set(g.neg) & chosen)
        ]
        lm = _least_model(reduct)
        if lm & neg_set == chosen:
            out.append(lm)
    out.sort(key=lambda s: (len(s), tuple(sorted(map(str, s)))))
    return out


def project_answer_set(s: frozenset) -> LegalModel:
    legal = frozenset(a.args[0] for a in s if a.pred == "is_legal")
    valid = frozenset(
        (a.args[0], a.args[1]) for a in s if a.pred == "legally_valid"
    )
    return LegalModel(legal, valid)


# ---------------------------------------------------------------------------
# holding the two semantics against each other


@dataclass(frozen=True)
class EncodingReport:
    answer_sets: int
    legal_models: Optional[int]
    unsound: tuple  # (projection json, violations) pairs
    uncovered: tuple  # legal models with no matching answer set

    @property
    def sound(self) -> bool:
        return not self.unsound

    def to_json(self) -> dict:
        return {
            "answer_sets": self.answer_sets,
            "legal_models": self.legal_models,
            "sound": self.sound,
            "unsound": [
                {"model": m, "violations": list(v)} for m, v in self.unsound
            ],
            "uncovered": [m.to_json() for m in self.uncovered],
        }


def verify_lemma4(
    cfg: Config,
    check_converse: bool = True,
    guess_cap_bits: int = 20,
    legal_cap_bits: int = 20,
) -> EncodingReport:
    """Check that every answer set of the encoding projects to a legal
    model (a violation here is a bug), and optionally report legal
    models no answer set covers (expected for self-supporting models:
    the encoding is sound, not complete)."""
    cfg.validate()
    sets = answer_sets(emit_asp(cfg), guess_cap_bits)
    unsound = []
    projections = []
    for s in sets:
        m = project_answer_set(s)
        projections.append(m)
        v = axiom_violations(cfg, m)
        if v:
            unsound.append((m.to_json(), tuple(v)))

    legal_count = None
    uncovered: list[LegalModel] = []
    if check_converse:
        legal = legal_models(cfg, legal_cap_bits)
        legal_count = len(legal)
        covered = {(m.is_legal, m.legally_valid) for m in projections}
        uncovered = [
            m for m in legal if (m.is_legal, m.legally_valid) not in covered
        ]
    return EncodingReport(len(sets), legal_count, tuple(unsound), tuple(uncovered))

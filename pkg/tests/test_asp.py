"""Defeasible rule configurations: parsing, grounding, and the legal
models checked directly against their defining conditions."""

import pathlib

import pytest

from normlog.asp import (
    Atom,
    Config,
    ConfigError,
    DefRule,
    LegalModel,
    Literal,
    Modifier,
    TVar,
    axiom_violations,
    config_constants,
    emit_asp,
    ground,
    legal_models,
    minimal_only,
    parse_config,
)
from normlog.models import ResourceCapError

from conftest import CASES


def cfg_file(name: str) -> Config:
    return parse_config((CASES / f"{name}.cfg").read_text())


def A(pred, *args):
    return Atom(pred, tuple(args))


# ---------------------------------------------------------------------------
# parsing


def test_parse_bob_structure():
    cfg = cfg_file("bob")
    assert [r.id for r in cfg.rules] == [1, 2, 3, 4]
    assert cfg.rules[0].head == A("must_buy", "rolls", "bob")
    assert cfg.rules[0].body == (Literal(A("wealthy", "bob")),)
    assert cfg.facts == (A("wealthy", "bob"),)
    assert cfg.modifiers == (
        Modifier("subject_to", 3, 1),
        Modifier("subject_to", 3, 2),
        Modifier("despite", 3, 4),
    )
    assert len(cfg.inconsistent) == 1 and len(cfg.inconsistent[0]) == 3
    assert cfg.is_ground()


def test_parse_variables_and_negation():
    cfg = parse_config("rule 2: p(X, _y) <- q(X), not r(_y, 7).")
    (r,) = cfg.rules
    assert r.head == A("p", TVar("X"), TVar("_y"))
    assert r.body[1] == Literal(A("r", TVar("_y"), 7), positive=False)
    assert not cfg.is_ground()


def test_parse_nested_terms_and_negative_ints():
    cfg = parse_config("fact: owes(debt(alice, -30), bob).")
    (f,) = cfg.facts
    assert f == A("owes", A("debt", "alice", -30), "bob")


def test_comments_and_blank_lines_ignored():
    cfg = parse_config("# header\n\nrule 1: p.  # trailing\n")
    assert [str(r) for r in cfg.rules] == ["rule 1: p."]


def test_rule_and_modifier_str_forms():
    cfg = parse_config("rule 1: p <- q, not r.\nmodifier: despite(1, 1).")
    assert str(cfg.rules[0]) == "rule 1: p <- q, not r."
    assert str(cfg.modifiers[0]) == "despite(1,1)"


def test_str_of_rule_reparses_to_equal_rule():
    cfg = parse_config("rule 4: buy(car, X) <- rich(X), not broke(X).")
    again = parse_config(str(cfg.rules[0]))
    assert again.rules == cfg.rules


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("rule 1: P(a).", "1:9: atoms must start with a lowercase letter, found 'P'"),
        ("fact: not.", "keyword cannot start an atom"),
        ("rule 1: p.\nrule 1: q.", "duplicate rule id 1"),
        ("rule 1: p.\nmodifier: shiny(1, 1).", "unknown modifier kind 'shiny'"),
        ("rule 1: p.\nmodifier: despite(1, 2).", "modifier despite(1,2) names unknown rule 2"),
        ("inconsistent: {p}.", "needs at least two distinct atoms"),
        ("inconsistent: {p, p}.", "needs at least two distinct atoms"),
        ("rule 1: p", "end of input: expected ."),
        ("wibble: p.", "expected 'rule', 'fact', 'modifier' or 'inconsistent'"),
        ("rule x: p.", "expected int"),
        ("rule 1: p <- .", "1:14: expected ident"),
        ("rule 1: p ? q.", "unexpected character '?'"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError, match=None) as exc:
        parse_config(text)
    assert fragment in str(exc.value)


def test_error_positions_count_lines():
    with pytest.raises(ConfigError) as exc:
        parse_config("rule 1: p.\nfact: Q.")
    assert str(exc.value).startswith("2:7:")


# ---------------------------------------------------------------------------
# grounding


def test_config_constants_first_occurrence_order():
    cfg = parse_config("rule 1: p(X) <- q(X, c).\nfact: q(a, b).")
    assert config_constants(cfg) == ["c", "a", "b"]


def test_ground_instance_ids():
    g = ground(parse_config("rule 1: p(X) <- q(X).\nfact: q(a).\nfact: q(b)."))
    assert [str(r) for r in g.rules] == [
        "rule 1000: p(a) <- q(a).",
        "rule 1001: p(b) <- q(b).",
    ]
    assert g.is_ground()


def test_ground_keeps_ground_rules_and_multiplies_modifiers():
    g = ground(
        parse_config(
            "rule 1: p(X) <- q(X).\n"
            "rule 2: r(X) <- q(X).\n"
            "rule 3: s.\n"
            "fact: q(a).\nfact: q(b).\n"
            "modifier: subject_to(1, 2).\n"
            "modifier: despite(3, 1)."
        )
    )
    assert [r.id for r in g.rules] == [1000, 1001, 2000, 2001, 3]
    assert set(map(str, g.modifiers)) == {
        "subject_to(1000,2000)",
        "subject_to(1000,2001)",
        "subject_to(1001,2000)",
        "subject_to(1001,2001)",
        "despite(3,1000)",
        "despite(3,1001)",
    }


def test_ground_explicit_constants():
    g = ground(parse_config("rule 1: p(X)."), constants=["u", "v"])
    assert [str(r.head) for r in g.rules] == ["p(u)", "p(v)"]


def test_ground_of_ground_config_is_identity_on_rules():
    cfg = cfg_file("bob")
    assert ground(cfg).rules == cfg.rules


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("rule 1: p(X).", "rule 1 has variables but there are no constants"),
        ("fact: p(X).", "fact p(X) must be ground"),
        ("inconsistent: {p(X), q}.", "inconsistent set atom p(X) must be ground"),
        (
            "rule 1: p(X) <- q(X).\nrule 1001: w.\nfact: q(a).\nfact: q(b).",
            "instance ids collide; renumber the schematic rules",
        ),
    ],
)
def test_ground_errors(text, fragment):
    with pytest.raises(ConfigError) as exc:
        ground(parse_config(text))
    assert fragment in str(exc.value)


# ---------------------------------------------------------------------------
# the axioms, one violation at a time


def triggers(cfg, legal, valid):
    return axiom_violations(cfg, LegalModel(frozenset(legal), frozenset(valid)))


def test_axiom_unknown_rule():
    assert triggers(Config(), [], [(7, A("p"))]) == ["validity of unknown rule 7"]


def test_axiom_wrong_conclusion():
    cfg = parse_config(
        "rule 1: p <- f.\nrule 2: g <- f.\nfact: f.\nmodifier: despite(1, 2)."
    )
    out = triggers(cfg, [A("f"), A("q"), A("g")], [(1, A("q")), (2, A("g"))])
    assert out == ["rule 1 held valid for q, but concludes p"]


def test_axiom_facts_are_legal():
    cfg = parse_config("fact: f.")
    assert triggers(cfg, [], []) == ["fact-legality: fact f is not legal"]


def test_axiom_valid_rule_needs_precondition():
    cfg = parse_config("rule 1: p <- f.")
    out = triggers(cfg, [A("p")], [(1, A("p"))])
    assert out == ["valid-rule-support: rule 1 is valid but its precondition fails"]


def test_axiom_valid_rule_needs_legal_conclusion():
    cfg = parse_config("rule 1: p.")
    out = triggers(cfg, [], [(1, A("p"))])
    assert out == ["valid-rule-support: rule 1 is valid but p is not legal"]


def test_axiom_legality_needs_support():
    assert triggers(Config(), [A("p")], []) == [
        "legality-support: p is legal but unsupported"
    ]


def test_axiom_despite_excludes():
    cfg = parse_config("rule 1: p.\nrule 2: q.\nmodifier: despite(1, 2).")
    out = triggers(cfg, [A("p"), A("q")], [(1, A("p")), (2, A("q"))])
    assert out == ["despite-exclusion: rule 2 applies, so rule 1 must not be valid"]


def test_axiom_strong_subjection_excludes():
    cfg = parse_config("rule 1: p.\nrule 2: q.\nmodifier: strong_subject_to(1, 2).")
    out = triggers(cfg, [A("p"), A("q")], [(1, A("p")), (2, A("q"))])
    assert out == ["strong-exclusion: rule 1 is valid, so rule 2 must not be valid"]


def test_axiom_subjection_excludes_on_conflict():
    cfg = parse_config(
        "rule 1: p.\nrule 2: q.\nmodifier: subject_to(1, 2).\ninconsistent: {p, q}."
    )
    out = triggers(cfg, [A("p"), A("q")], [(1, A("p")), (2, A("q"))])
    assert out == [
        "conflict-exclusion: rule 1 is valid and prevails, so rule 2 must not be valid"
    ]


def test_axiom_subjection_inert_without_conflict():
    cfg = parse_config("rule 1: p.\nrule 2: q.\nmodifier: subject_to(1, 2).")
    assert triggers(cfg, [A("p"), A("q")], [(1, A("p")), (2, A("q"))]) == []


def test_axiom_exclusion_needs_justification():
    cfg = parse_config("rule 1: p.")
    assert triggers(cfg, [], []) == [
        "exclusion-justification: rule 1 applies and is not valid, but nothing excludes it"
    ]


def test_axioms_accept_genuine_model():
    cfg = cfg_file("bob")
    model = LegalModel(
        frozenset(
            {
                A("wealthy", "bob"),
                A("must_buy", "merc", "bob"),
                A("may_spend_up_to_one_mill", "bob"),
            }
        ),
        frozenset(
            {
                (2, A("must_buy", "merc", "bob")),
                (3, A("may_spend_up_to_one_mill", "bob")),
            }
        ),
    )
    assert axiom_violations(cfg, model) == []


def test_axioms_require_ground_config():
    with pytest.raises(ConfigError, match="only defined for ground"):
        axiom_violations(parse_config("rule 1: p(X)."), LegalModel(frozenset(), frozenset()))


# ---------------------------------------------------------------------------
# conflict subtleties


def test_no_conflict_between_rules_with_same_conclusion():
    # subjection only bites on a genuine clash, and a rule never
    # clashes with a twin concluding the very same atom
    cfg = parse_config(
        "rule 1: p.\nrule 2: p.\nmodifier: subject_to(1, 2).\ninconsistent: {p, q}."
    )
    assert triggers(cfg, [A("p")], [(1, A("p")), (2, A("p"))]) == []


def test_conflict_needs_the_rest_of_the_set_legal():
    # in {p, q, r}, rules for p and q only clash once r is also legal
    base = (
        "rule 1: p <- f.\nrule 2: q <- f.\nfact: f.\n"
        "modifier: subject_to(1, 2).\ninconsistent: {p, q, r}."
    )
    without_r = triggers(
        parse_config(base), [A("f"), A("p"), A("q")], [(1, A("p")), (2, A("q"))]
    )
    assert without_r == []


# ---------------------------------------------------------------------------
# exhaustive legal model search


def model_jsons(name):
    return [m.to_json() for m in legal_models(cfg_file(name))]


def test_bob_has_two_legal_models():
    assert model_jsons("bob") == [
        {
            "is_legal": [
                "may_spend_up_to_one_mill(bob)",
                "must_buy(merc,bob)",
                "wealthy(bob)",
            ],
            "legally_valid": [[2, "must_buy(merc,bob)"], [3, "may_spend_up_to_one_mill(bob)"]],
        },
        {
            "is_legal": [
                "may_spend_up_to_one_mill(bob)",
                "must_buy(rolls,bob)",
                "wealthy(bob)",
            ],
            "legally_valid": [[1, "must_buy(rolls,bob)"], [3, "may_spend_up_to_one_mill(bob)"]],
        },
    ]


def test_strong_subjection_kills_the_rolls_model():
    models = model_jsons("bob_strong")
    assert len(models) == 1
    assert models[0]["legally_valid"] == [
        [2, "must_buy(merc,bob)"],
        [3, "may_spend_up_to_one_mill(bob)"],
    ]


def test_extreme_wealth_lifts_the_cap():
    models = model_jsons("bob_extreme")
    assert len(models) == 1
    assert models[0]["legally_valid"] == [
        [1, "must_buy(rolls,bob)"],
        [2, "must_buy(merc,bob)"],
        [4, "may_spend_up_to_ten_mill(bob)"],
    ]


def test_self_defeating_rule_leaves_no_model():
    assert legal_models(cfg_file("selfdefeat")) == []


def test_negation_loop_leaves_no_model():
    assert legal_models(cfg_file("chain")) == []


def test_self_supporting_rule_gives_nonminimal_model():
    models = model_jsons("nonminimal")
    assert models == [
        {"is_legal": ["a"], "legally_valid": [[3, "a"]]},
        {"is_legal": ["a", "c"], "legally_valid": [[1, "c"], [3, "a"]]},
    ]


def test_minimal_only_drops_the_superset():
    models = legal_models(cfg_file("nonminimal"))
    assert [m.to_json() for m in minimal_only(models)] == [
        {"is_legal": ["a"], "legally_valid": [[3, "a"]]}
    ]


def test_minimal_only_keeps_incomparable_models():
    models = legal_models(cfg_file("bob"))
    assert minimal_only(models) == models


def test_self_despite_leaves_the_empty_model():
    cfg = parse_config("rule 1: p.\nmodifier: despite(1, 1).")
    assert [m.to_json() for m in legal_models(cfg)] == [
        {"is_legal": [], "legally_valid": []}
    ]


def test_legal_models_cap():
    cfg = parse_config("\n".join(f"fact: a{i}." for i in range(25)))
    with pytest.raises(ResourceCapError) as exc:
        legal_models(cfg, cap_bits=10)
    assert str(exc.value) == "legal model search needs 2^25 candidates, cap is 2^10"


def test_legal_models_deterministic():
    a = legal_models(cfg_file("bob"))
    b = legal_models(cfg_file("bob"))
    assert a == b


# ---------------------------------------------------------------------------
# the answer set encoding text


BOB_PROGRAM = """\
is_legal(wealthy(bob)).
subject_to(3,1).
subject_to(3,2).
despite(3,4).
according_to(1,must_buy(rolls,bob)) :- is_legal(wealthy(bob)).
according_to(2,must_buy(merc,bob)) :- is_legal(wealthy(bob)).
according_to(3,may_spend_up_to_one_mill(bob)) :- is_legal(wealthy(bob)).
according_to(4,may_spend_up_to_ten_mill(bob)) :- is_legal(extremely_wealthy(bob)).
opposes(must_buy(rolls,bob),must_buy(merc,bob)) :- is_legal(may_spend_up_to_one_mill(bob)).
opposes(must_buy(rolls,bob),may_spend_up_to_one_mill(bob)) :- is_legal(must_buy(merc,bob)).
opposes(must_buy(merc,bob),may_spend_up_to_one_mill(bob)) :- is_legal(must_buy(rolls,bob)).
opposes(X,Y) :- opposes(Y,X).
defeated(R2,C2) :- despite(R2,R1), according_to(R1,C1), according_to(R2,C2).
defeated(R2,C2) :- strong_subject_to(R1,R2), legally_valid(R1,C1), according_to(R2,C2).
defeated(R2,C2) :- subject_to(R1,R2), legally_valid(R1,C1), opposes(C1,C2), according_to(R2,C2).
not_legally_valid(R) :- defeated(R,C).
legally_valid(R,C) :- according_to(R,C), not not_legally_valid(R).
is_legal(C) :- legally_valid(R,C).
"""


def test_emit_asp_bob_golden():
    assert emit_asp(cfg_file("bob")).to_text() == BOB_PROGRAM


def test_emit_asp_requires_ground_config():
    with pytest.raises(ConfigError, match="needs a ground configuration"):
        emit_asp(parse_config("rule 1: p(X) <- q(X).\nfact: q(a)."))

import pytest

from igact.modules import scripts
from igact.modules.errors import HypothesisError
from igact.modules.scripts import RULE_ORDER, RULES, Case, LemmaReplayer, Rule, parse_expr, resolve_rule


def verified(pipeline, rule, *values):
    cert = pipeline.replayer.replay(rule, *values)
    assert pipeline.engine.verify_certificate(cert), (rule, values)
    return cert


def test_parse_expr():
    assert parse_expr("row(inv(u), id)") == ("call", "row", (("call", "inv", (("name", "u"),)), ("name", "id")))
    assert parse_expr("2") == ("int", 2)
    with pytest.raises(ValueError):
        parse_expr("e(i;j)")


def test_every_rule_is_ordered():
    assert set(RULE_ORDER) == set(RULES)


def test_product_rule(z2):
    e = z2.rees.e
    cert = verified(z2, "product", 1, 1, 2, 2)
    assert cert.start == (e(1, 1), e(2, 2))
    assert cert.end == (e(1, 2),)
    assert len(cert.steps) == 3


def test_product_hypothesis_checked(z2):
    with pytest.raises(HypothesisError):
        z2.replayer.replay("product", 1, 2, 2, 3)


def test_inverse_rule(s3):
    e = s3.rees.e
    cert = verified(s3, "inverse", 20, 3)
    assert cert.end == (e(1, 1),)


def test_trivial_generator(z3):
    rees = z3.rees
    i, j = next((i, j) for i in rees.row_ids for j in (2, 3) if rees.p(j, i) == 0 and i > 1)
    cert = verified(z3, "trivial-generator", i, j)
    assert cert.end == (rees.e(1, 1),)


def test_trivial_generator_refuses_nontrivial_entry(z2):
    with pytest.raises(HypothesisError):
        z2.replayer.replay("trivial-generator", 3, 2)


def test_row_and_column_equality(z3):
    rees = z3.rees
    i, l = next((i, l) for i in rees.row_ids for l in rees.row_ids if i != l and rees.p(2, i) == rees.p(2, l))
    verified(z3, "row-equality", i, l, 2)
    i = next(i for i in rees.row_ids if rees.p(2, i) == rees.p(3, i) != 0)
    verified(z3, "column-equality", i, 2, 3)


def test_generator_equality(s3):
    rees = s3.rees
    cells = [(i, j) for i in rees.row_ids for j in rees.col_ids]
    (i, j), (i2, j2) = next((a, b) for a in cells for b in cells if a != b and rees.p(a[1], a[0]) == rees.p(b[1], b[0]) != 0)
    cert = verified(s3, "generator-equality", i, j, i2, j2)
    assert cert.end == (rees.e(1, 1), rees.e(i2, j2), rees.e(1, 1))


def test_generator_equality_same_cell_is_empty(z2):
    assert z2.replayer.replay("generator-equality", 3, 2, 3, 2).steps == ()


def test_factor_rule(s3):
    verified(s3, "factor", 2, 17, 3)


@pytest.mark.parametrize("a", range(6))
def test_canonical_rule(s3, a):
    rees, group = s3.rees, s3.group
    i, j = next((i, j) for i in rees.row_ids for j in rees.col_ids if rees.p(j, i) == group.inv(a))
    cert = verified(s3, "canonical", a, i, j)
    assert cert.start == s3.replayer.canonical_word(a)


def test_homomorphism_table_s3(s3):
    group = s3.group
    for u in group.elements():
        for v in group.elements():
            cert = verified(s3, "homomorphism", u, v)
            assert cert.end == s3.replayer.canonical_word(group.mul(u, v))


def test_homomorphism_needs_rank_three(z2_rank2):
    with pytest.raises(HypothesisError):
        z2_rank2.replayer.replay("homomorphism", 1, 1)


def test_bad_parameters(z2):
    with pytest.raises(ValueError):
        z2.replayer.replay("inverse", 9, 1)
    with pytest.raises(ValueError):
        z2.replayer.replay("inverse", 1)
    with pytest.raises(ValueError):
        z2.replayer.replay("no-such-rule", 1)


def test_stalled_script_falls_back_to_search(z2, monkeypatch):
    rule = Rule("square-e11", params=(), start=("e(1,1)", "e(1,1)"), end=("e(1,1)",), cases=(Case(()),))
    monkeypatch.setitem(scripts.RULES, rule.name, rule)
    cert = verified(z2, "square-e11")
    assert len(cert.steps) == 1


def test_replays_are_cached(z2):
    assert z2.replayer.replay("inverse", 2, 2) is z2.replayer.replay("inverse", 2, 2)


def test_replay_cache_is_bounded(z2):
    replayer = LemmaReplayer(z2.engine, z2.rees, cache_size=2)
    first = replayer.replay("inverse", 1, 1)
    replayer.replay("inverse", 1, 2)
    replayer.replay("inverse", 2, 1)
    assert len(replayer._cache) == 2
    again = replayer.replay("inverse", 1, 1)
    assert again == first and again is not first


def test_replay_cache_can_be_disabled(z2):
    replayer = LemmaReplayer(z2.engine, z2.rees, cache_size=0)
    assert replayer.replay("inverse", 2, 2) == replayer.replay("inverse", 2, 2)
    assert not replayer._cache


@pytest.mark.parametrize(
    "name, rule",
    [
        ("3.2", "product"),
        ("3.3", "product"),
        ("3.5", "inverse"),
        ("3.6", "trivial-generator"),
        ("3.7(i)", "row-equality"),
        ("3.7I", "row-equality"),
        ("3.7(ii)", "column-equality"),
        ("3.8", "generator-equality"),
        ("3.9", "homomorphism"),
        ("factor", "factor"),
    ],
)
def test_resolve_rule(name, rule):
    assert resolve_rule(name) == rule


@pytest.mark.parametrize("name", ["3.4", "3.10", "", "lemma"])
def test_resolve_rule_rejects(name):
    with pytest.raises(ValueError, match="unknown rule"):
        resolve_rule(name)


@pytest.mark.parametrize("rule", RULE_ORDER)
def test_families_replay_exhaustively_z2(z2, rule):
    result = z2.replayer.replay_family(rule, exhaustive_limit=10**6)
    assert result.passed
    assert result.replayed == result.instances > 0


def test_family_sampling(s3):
    result = s3.replayer.replay_family("product", seed=3, sample=25, exhaustive_limit=100)
    assert result.replayed == 25 < result.instances
    assert result.passed
    assert result.to_document()["pass"] is True

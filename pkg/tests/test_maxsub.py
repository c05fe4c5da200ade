import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from igact.config.config import RunConfig
from igact.modules.endomorphism import Endomorphism
from igact.modules.errors import VerificationError
from igact.modules.maxsub import MaximalSubgroup
from igact.modules.pipeline import Pipeline
from igact.modules.theorem import FALSIFIED, VERIFIED, Perturber, TheoremVerifier, sample_hbar_words, verify_theorem


def test_canonical_generator_z2(z2):
    sub, e = z2.subgroup, z2.rees.e
    w1 = sub.generator(1)
    assert w1.row == 3
    assert w1.word == (e(1, 1), e(3, 2), e(1, 1))
    image = z2.monoid.element(z2.engine.phi_id(w1.word))
    assert image == Endomorphism.parse("1,1,1|1,1,1", z2.group)
    assert sub.canonical_word(0) == (e(1, 1),)


def test_g_of(z2):
    sub = z2.subgroup
    assert sub.g_of(3, 2) == sub.generator(1)
    assert sub.g_of(3, 3).a == 0
    assert {sub.g_of(1, j).a for j in z2.rees.col_ids} == {0}
    assert {sub.g_of(i, 1).a for i in z2.rees.row_ids} == {0}


def test_g_of_depends_only_on_sandwich_entry(s3):
    sub, rees = s3.subgroup, s3.rees
    for i in rees.row_ids:
        for j in rees.col_ids:
            assert sub.g_of(i, j).a == s3.group.inv(rees.p(j, i))
            assert sub.g_of(i, j).word == sub.canonical_word(s3.group.inv(rees.p(j, i)))


def test_reduce_single_letter(z2):
    trace = z2.subgroup.reduce_to_w((z2.rees.e(1, 1),))
    assert trace.result == 0
    assert trace.certificate.steps == ()


def test_reduce_generator_word(s3):
    sub = s3.subgroup
    for a in s3.group.elements():
        trace = sub.reduce_to_w(sub.canonical_word(a))
        assert trace.result == a
        assert trace.certificate.end == sub.canonical_word(a)
        assert s3.engine.verify_certificate(trace.certificate)


def test_reduce_unsandwiched_word(z3):
    sub, e, rees = z3.subgroup, z3.rees.e, z3.rees
    word = (e(1, 2), e(5, 3), e(7, 2), e(4, 1))
    trace = sub.reduce_to_w(word)
    assert trace.factors == [(1, 2), (5, 3), (7, 2), (4, 1)]
    assert trace.result == rees.iso.psi(z3.engine.phi_id(word))
    assert z3.engine.verify_certificate(trace.certificate)
    assert trace.certificate.start == word


def test_reduce_without_certificate(z3):
    e = z3.rees.e
    trace = z3.subgroup.reduce_to_w((e(1, 1), e(6, 2), e(1, 1)), certify=False)
    assert trace.certificate is None
    assert trace.result == z3.subgroup.element_of(6, 2)


def test_reduce_rejects_words_outside_h11(z2):
    e = z2.rees.e
    with pytest.raises(ValueError, match="H_11"):
        z2.subgroup.reduce_to_w((e(1, 1), e(1, 2)))
    with pytest.raises(ValueError):
        z2.subgroup.reduce_to_w((z2.monoid.identity_id,))


def test_rank_two_refused(z2_rank2):
    with pytest.raises(ValueError, match="n >= 3"):
        MaximalSubgroup(z2_rank2.rees, z2_rank2.engine, z2_rank2.replayer)


def test_eval_is_phi_on_samples(s3):
    words = sample_hbar_words(s3, random.Random(1), 40, 6)
    check = s3.subgroup.eval_is_phi(words)
    assert check.agreed == check.words == 40
    assert not check.mismatches


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=1, max_value=20))
def test_perturbation_keeps_eval(z3, seed, steps):
    rng = random.Random(seed)
    word = sample_hbar_words(z3, rng, 1, 6)[0]
    walker = Perturber(z3)
    expected = z3.subgroup.eval_word(word)
    for _ in range(steps):
        word = walker.step(word, rng, 10)
        assert len(word) <= 10
        assert z3.subgroup.eval_word(word) == expected


def test_theorem_z2_small_sample(z2, tmp_path):
    pipeline = Pipeline(replace(z2.config, sample_words=40, perturbations=10), group=z2.group)
    report = TheoremVerifier(pipeline, out_dir=tmp_path).run()
    assert report.verdict == VERIFIED, report.failed()
    assert report.counts["monoid"] == 216
    assert report.counts["d_class"] == 24
    assert report.counts["singular"] == report.counts["rect_band"] == 96
    assert len(report.certificates) == 4
    assert (tmp_path / "certificates" / "homomorphism_1_1.json").exists()
    names = [a["name"] for a in report.to_document()["audits"]]
    assert names == sorted(names)
    assert "lemma:homomorphism" in names


def test_theorem_trivial_group():
    report = verify_theorem("cyclic:1", 3, RunConfig(sample_words=100, perturbations=10))
    assert report.verdict == VERIFIED
    assert report.counts["squares"] == report.counts["singular"] == 9


def test_theorem_refuses_rank_two():
    with pytest.raises(ValueError, match="n >= 3"):
        verify_theorem("cyclic:2", 2)


def test_failed_audit_falsifies(z2, monkeypatch):
    pipeline = Pipeline(replace(z2.config, sample_words=5, perturbations=2), group=z2.group)
    verifier = TheoremVerifier(pipeline)

    def broken(sub):
        raise VerificationError("forced")

    monkeypatch.setattr(verifier, "_check_surjective", broken)
    report = verifier.run()
    assert report.verdict == FALSIFIED
    assert [a.name for a in report.failed()] == ["surjectivity"]


@pytest.mark.slow
@pytest.mark.parametrize("group", ["cyclic:3", "cyclic:4", "sym:3"])
def test_theorem_default_sampling(group):
    assert verify_theorem(group, 3).verdict == VERIFIED

import pytest
from hypothesis import given, settings, strategies as st

from igact.modules.words import (
    CONTRACT,
    EQUAL,
    EXPAND,
    NOT_FOUND,
    UNEQUAL,
    CertificateBuilder,
    DerivationCertificate,
    RewriteStep,
)


def test_apply_step_contract_and_expand(z2):
    engine, e = z2.engine, z2.rees.e
    word = (e(1, 1), e(1, 2))
    contracted = engine.apply_step(word, RewriteStep(0, CONTRACT, e(1, 1), e(1, 2)))
    assert contracted == (e(1, 2),)
    assert engine.apply_step(contracted, RewriteStep(0, EXPAND, e(1, 1), e(1, 2))) == word


def test_apply_step_rejects_non_basic_pair(z2):
    e = z2.rees.e
    # e12 e21 = e11 is not a basic product
    with pytest.raises(ValueError, match="not basic"):
        z2.engine.apply_step((e(1, 1),), RewriteStep(0, EXPAND, e(1, 2), e(2, 1)))


def test_apply_step_rejects_wrong_letters(z2):
    e = z2.rees.e
    with pytest.raises(ValueError):
        z2.engine.apply_step((e(1, 1), e(1, 1)), RewriteStep(0, CONTRACT, e(1, 1), e(1, 2)))
    with pytest.raises(ValueError):
        z2.engine.apply_step((e(1, 1),), RewriteStep(3, EXPAND, e(1, 1), e(1, 1)))


def test_check_word(z2):
    with pytest.raises(ValueError):
        z2.engine.check_word([])
    with pytest.raises(ValueError):
        z2.engine.check_word([z2.monoid.size - 1])


def test_derive_equal_finds_certificate(z2):
    engine, e = z2.engine, z2.rees.e
    result = engine.derive_equal((e(1, 2), e(2, 2)), (e(1, 2),))
    assert result.verdict == EQUAL
    assert engine.verify_certificate(result.certificate)


def test_derive_equal_finds_inverse_words(z2):
    engine, rees = z2.engine, z2.rees
    e, e11 = rees.e, rees.e(1, 1)
    for i in rees.row_ids:
        for j in rees.col_ids:
            result = engine.derive_equal((e11, e(i, j), e11, e(1, j), e(i, 1)), (e11,))
            assert result.verdict == EQUAL, (i, j)
            assert result.certificate.end == (e11,)
            assert engine.verify_certificate(result.certificate)


def test_derive_equal_reports_unequal(z2):
    e = z2.rees.e
    assert z2.engine.derive_equal((e(1, 1),), (e(1, 2),)).verdict == UNEQUAL


def test_derive_equal_respects_state_bound(z2):
    e = z2.rees.e
    start = (e(1, 1), e(3, 2), e(1, 1))
    end = (e(1, 1), e(4, 2), e(1, 1))
    result = z2.engine.derive_equal(start, end, max_states=5)
    assert result.verdict in (EQUAL, NOT_FOUND)
    if result.verdict == NOT_FOUND:
        assert "state bound" in result.detail


def test_verify_certificate_flags_bad_step(z2):
    e = z2.rees.e
    cert = DerivationCertificate((e(1, 1), e(1, 2)), (RewriteStep(0, CONTRACT, e(1, 1), e(1, 1)),), (e(1, 1),))
    check = z2.engine.verify_certificate(cert)
    assert not check
    assert check.failed_step == 0


def test_verify_certificate_flags_wrong_end(z2):
    e = z2.rees.e
    cert = DerivationCertificate((e(1, 1), e(1, 2)), (RewriteStep(0, CONTRACT, e(1, 1), e(1, 2)),), (e(1, 1),))
    assert z2.engine.verify_certificate(cert).failed_step == 1


def test_certificate_document_and_reverse(z2):
    e = z2.rees.e
    builder = CertificateBuilder(z2.engine, (e(1, 1), e(1, 2)))
    cert = builder.contract(0).finish()
    again = DerivationCertificate.from_document(cert.to_document())
    assert again == cert
    assert z2.engine.verify_certificate(cert.reversed())
    with pytest.raises(ValueError):
        DerivationCertificate.from_document({"start": [1]})


def test_builder_splice_checks_subword(z2):
    e = z2.rees.e
    sub = CertificateBuilder(z2.engine, (e(1, 1), e(1, 2))).contract(0).finish()
    builder = CertificateBuilder(z2.engine, (e(2, 1), e(1, 1), e(1, 2)))
    builder.splice(1, sub)
    assert builder.word == (e(2, 1), e(1, 2))
    with pytest.raises(ValueError):
        builder.splice(0, sub)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_rewriting_preserves_phi(z2, data):
    engine, biorder = z2.engine, z2.biorder
    letters = list(biorder.ids)
    word = tuple(data.draw(st.lists(st.sampled_from(letters), min_size=1, max_size=5)))
    image = engine.phi_id(word)
    for _ in range(5):
        moves = list(engine.neighbors(word, max_len=8))
        if not moves:
            break
        step, new = data.draw(st.sampled_from(moves))
        assert engine.apply_step(word, step) == new
        assert engine.apply_step(new, step.inverse()) == word
        word = new
        assert engine.phi_id(word) == image

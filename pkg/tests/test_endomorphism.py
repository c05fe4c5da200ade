import pytest
from hypothesis import given, strategies as st

from igact.modules.endomorphism import (
    Endomorphism,
    act_elements,
    compose,
    decode,
    encode,
    image_key,
    kernel_congruence,
    kernel_key,
    rank,
)
from igact.modules.group import make_cyclic, make_symmetric


S3 = make_symmetric(3)
Z2 = make_cyclic(2)


def endos(group, n=3):
    return st.builds(
        lambda c, t: Endomorphism(n, tuple(c), tuple(t), group),
        st.lists(st.integers(0, group.order - 1), min_size=n, max_size=n),
        st.lists(st.integers(1, n), min_size=n, max_size=n),
    )


def test_parse_and_display():
    a = Endomorphism.parse("(0,1,0|1,1,1)", Z2)
    assert str(a) == "(0,1,0|1,1,1)"
    assert a.act(1, 2) == (0, 1)
    with pytest.raises(ValueError):
        Endomorphism.parse("0,1,0", Z2)
    with pytest.raises(ValueError):
        Endomorphism.parse("0,1,0|1,4,1", Z2)


def test_compose_applies_left_factor_first():
    a = Endomorphism.parse("1,0,0|2,2,3", Z2)
    b = Endomorphism.parse("0,1,0|1,1,1", Z2)
    # x1 -> 1 x2 -> 1*1 x1
    assert compose(a, b) == Endomorphism.parse("0,1,0|1,1,1", Z2)


def test_compose_rejects_rank_mismatch():
    with pytest.raises(ValueError):
        compose(Endomorphism.identity(Z2, 2), Endomorphism.identity(Z2, 3))


def test_canonical_id_orders_coefficients_first():
    assert encode(2, 3, (0, 0, 0), (1, 1, 1)) == 0
    assert encode(2, 3, (0, 0, 0), (3, 3, 3)) == 26
    assert encode(2, 3, (0, 0, 1), (1, 1, 1)) == 27
    assert decode(2, 3, 27) == ((0, 0, 1), (1, 1, 1))


@given(endos(S3), endos(S3), endos(S3))
def test_composition_is_associative(a, b, c):
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


@given(endos(S3))
def test_identity_is_neutral(a):
    e = Endomorphism.identity(S3, 3)
    assert compose(a, e) == a == compose(e, a)


@given(endos(S3))
def test_canonical_id_decodes(a):
    assert decode(S3.order, 3, a.canonical_id) == (a.coeffs, a.targets)


@given(endos(S3), endos(S3))
def test_kernel_key_matches_brute_force_congruence(a, b):
    assert (kernel_key(a) == kernel_key(b)) == (kernel_congruence(a) == kernel_congruence(b))


@given(endos(S3))
def test_rank_is_image_size(a):
    assert rank(a) == len(image_key(a)) == len(set(a.targets))


def test_act_elements_count():
    assert len(list(act_elements(S3, 3))) == 18


def test_idempotent_example():
    assert Endomorphism.parse("1,0,1|2,2,2", Z2).is_idempotent()
    assert not Endomorphism.parse("1,1,1|1,1,1", Z2).is_idempotent()

import random

import pytest

from fgl.coeffring import CoeffElem, CoeffRingSpec, reduce_from_exact
from fgl.errors import ModeError, NotAUnit, NotDivisible, SpecMismatch

Z2_4 = CoeffRingSpec(p=2, p_precision=4)
Z3_2_U = CoeffRingSpec(p=3, p_precision=2, deformation_params=1, u_degree_cap=2)
Z2_3 = CoeffRingSpec(p=2, p_precision=3)
ZEXACT2 = CoeffRingSpec(p=2, p_precision=None)
ZEXACT3 = CoeffRingSpec(p=3, p_precision=None)


def C(spec, v):
    return CoeffElem.from_int(spec, v)


def test_spec_validation():
    with pytest.raises(ValueError):
        CoeffRingSpec(p=4, p_precision=2)
    with pytest.raises(ValueError):
        CoeffRingSpec(p=2, p_precision=0)
    with pytest.raises(ValueError):
        CoeffRingSpec(p=2, p_precision=None, deformation_params=1, u_degree_cap=2)


def test_add_reduces_mod_p_power():
    assert C(Z2_4, 7) + C(Z2_4, 11) == C(Z2_4, 2)  # 18 mod 16


def test_add_identity():
    a = C(Z2_4, 13)
    assert a + CoeffElem.zero(Z2_4) == a


def test_add_u_coefficients_cancel_mod_9():
    u = CoeffElem.u_var(Z3_2_U, 1)
    assert u.scale(4) + u.scale(5) == CoeffElem.zero(Z3_2_U)


def test_mul_identity():
    a = CoeffElem(Z3_2_U, {(0,): 5, (1,): 7})
    assert CoeffElem.one(Z3_2_U) * a == a


def test_mul_degree_cap_drops_u_squared():
    u = CoeffElem.u_var(Z3_2_U, 1)
    assert u * u == CoeffElem.zero(Z3_2_U)


def test_mul_mod_8():
    assert C(Z2_3, 3) * C(Z2_3, 5) == C(Z2_3, 7)  # 15 mod 8


def test_invert_one():
    assert CoeffElem.one(Z2_4).invert() == CoeffElem.one(Z2_4)


def test_invert_three_mod_16_against_search():
    # oracle: brute-force search for b with 3b = 1 mod 16
    expected = next(b for b in range(16) if (3 * b) % 16 == 1)
    assert expected == 11
    assert C(Z2_4, 3).invert() == C(Z2_4, expected)


def test_invert_one_plus_u_geometric():
    one = CoeffElem.one(Z3_2_U)
    u = CoeffElem.u_var(Z3_2_U, 1)
    assert (one + u).invert() == one - u


def test_invert_nonunit_rejected():
    with pytest.raises(NotAUnit):
        C(Z2_4, 6).invert()
    with pytest.raises(NotAUnit):
        C(ZEXACT2, 3).invert()


def test_invert_random_units():
    rng = random.Random(7)
    for spec in (Z2_4, Z3_2_U, Z2_3):
        one = CoeffElem.one(spec)
        count = 0
        while count < 200:
            terms = {}
            for _ in range(rng.randrange(1, 4)):
                mono = tuple(
                    rng.randrange(0, spec.u_degree_cap)
                    for _ in range(spec.deformation_params)
                )
                terms[mono] = rng.randrange(0, spec.modulus)
            a = CoeffElem(spec, terms)
            if not a.is_unit():
                continue
            count += 1
            assert a.invert() * a == one


def test_exact_divide_by_p():
    assert CoeffElem.zero(ZEXACT2).exact_divide_by_p() == CoeffElem.zero(ZEXACT2)
    assert C(ZEXACT2, 6).exact_divide_by_p() == C(ZEXACT2, 3)
    with pytest.raises(NotDivisible):
        C(ZEXACT3, 4).exact_divide_by_p()
    with pytest.raises(ModeError):
        C(Z2_4, 4).exact_divide_by_p()


def test_spec_mismatch_raises():
    with pytest.raises(SpecMismatch):
        C(Z2_4, 1) + C(Z2_3, 1)


def test_ring_axioms_random_triples():
    rng = random.Random(11)
    for spec in (Z2_4, Z3_2_U, ZEXACT2):
        for _ in range(50):
            vals = []
            for _ in range(3):
                terms = {}
                for _ in range(rng.randrange(0, 4)):
                    mono = tuple(
                        rng.randrange(0, spec.u_degree_cap)
                        for _ in range(spec.deformation_params)
                    )
                    hi = spec.modulus or 10 ** 6
                    terms[mono] = rng.randrange(-hi, hi)
                vals.append(CoeffElem(spec, terms))
            a, b, c = vals
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a
            assert a * (b + c) == a * b + a * c


def test_truncated_ops_commute_with_reduction_from_exact():
    rng = random.Random(13)
    spec_t = Z2_4
    for _ in range(100):
        x = rng.randrange(-10 ** 6, 10 ** 6)
        y = rng.randrange(-10 ** 6, 10 ** 6)
        ax, ay = C(ZEXACT2, x), C(ZEXACT2, y)
        assert reduce_from_exact(spec_t, ax + ay) == \
            reduce_from_exact(spec_t, ax) + reduce_from_exact(spec_t, ay)
        assert reduce_from_exact(spec_t, ax * ay) == \
            reduce_from_exact(spec_t, ax) * reduce_from_exact(spec_t, ay)


def test_json_round_trip():
    a = CoeffElem(Z3_2_U, {(0,): 8, (1,): 5})
    assert CoeffElem.from_json(Z3_2_U, a.to_json()) == a
    big = C(ZEXACT2, 2 ** 300 + 1)
    data = big.to_json()
    assert data["monomials"][0]["coeff"] == str(2 ** 300 + 1)
    assert CoeffElem.from_json(ZEXACT2, data) == big


def test_canonical_representatives():
    a = CoeffElem(Z2_4, {(): -1})
    assert a.constant_part() == 15
    assert C(Z2_4, 15) == a

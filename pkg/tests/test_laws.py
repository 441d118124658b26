import random
from fractions import Fraction

import pytest

from fgl.coeffring import CoeffElem, CoeffRingSpec
from fgl.errors import NonNilpotentArgument, SpecMismatch, TruncationTooSmall
from fgl.laws import (
    additive_law,
    honda_law,
    lubin_tate_height2_law,
    multiplicative_law,
)
from fgl.series import TruncSeries

ZX2 = CoeffRingSpec(p=2, p_precision=None)
ZX3 = CoeffRingSpec(p=3, p_precision=None)
Z2_4 = CoeffRingSpec(p=2, p_precision=4)
F2 = CoeffRingSpec(p=2, p_precision=1)
F3 = CoeffRingSpec(p=3, p_precision=1)
LT2_SPEC = CoeffRingSpec(p=2, p_precision=8, deformation_params=1, u_degree_cap=6)


def poly(spec, variables, cap, terms):
    return TruncSeries(
        spec, variables, cap,
        {expo: CoeffElem.from_int(spec, c) for expo, c in terms.items()},
    )


def test_multiplicative_has_exactly_three_terms():
    law = multiplicative_law(Z2_4, 8)
    assert law.F == poly(Z2_4, ("x", "y"), 8, {(1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert len(law.F.terms) == 3


def test_multiplicative_axioms_exact():
    for law in (multiplicative_law(Z2_4, 8), multiplicative_law(ZX3, 6)):
        assert law.check_axioms() == {
            "unit": True, "commutative": True, "associative": True,
        }


def test_multiplicative_needs_height_one_ring():
    with pytest.raises(SpecMismatch):
        multiplicative_law(LT2_SPEC, 8)


def test_formal_sum_unit_law():
    law = multiplicative_law(ZX2, 8)
    x = law.x()
    zero = TruncSeries.zero(ZX2, ("x",), 8)
    assert law.formal_sum(x, zero) == x


def test_formal_sum_doubling_multiplicative():
    # (1+x)^2 - 1 = 2x + x^2
    law = multiplicative_law(ZX2, 8)
    x = law.x()
    assert law.formal_sum(x, x) == poly(ZX2, ("x",), 8, {(1,): 2, (2,): 1})


def test_formal_sum_rejects_constant_terms():
    law = multiplicative_law(ZX2, 8)
    bad = poly(ZX2, ("x",), 8, {(0,): 1, (1,): 1})
    with pytest.raises(NonNilpotentArgument):
        law.formal_sum(bad, law.x())


def test_formal_inverse_multiplicative_is_alternating_geometric():
    # 1/(1+x) - 1 = -x + x^2 - x^3 + ...
    law = multiplicative_law(ZX2, 6)
    expected = poly(ZX2, ("x",), 6, {(1,): -1, (2,): 1, (3,): -1, (4,): 1, (5,): -1})
    assert law.formal_inverse(law.x()) == expected


def test_formal_inverse_additive_mod_p():
    law = additive_law(F3, 6)
    assert law.formal_inverse(law.x()) == poly(F3, ("x",), 6, {(1,): 2})


def test_formal_inverse_cancels():
    for law in (multiplicative_law(ZX2, 8), honda_law(F3, 1, 8)):
        x = law.x()
        inv = law.formal_inverse(x)
        assert law.formal_sum(x, inv).is_zero()
    assert multiplicative_law(ZX2, 8).formal_inverse(
        TruncSeries.zero(ZX2, ("x",), 8)
    ).is_zero()


def test_n_series_basics():
    law = multiplicative_law(ZX2, 8)
    assert law.n_series(1).series == law.x()
    assert law.n_series(0).series.is_zero()
    # (1+x)^4 - 1
    assert law.n_series(4).series == poly(ZX2, ("x",), 8, {(1,): 4, (2,): 6, (3,): 4, (4,): 1})


def test_n_series_additive_p_fold_vanishes():
    law = additive_law(F3, 6)
    assert law.n_series(3).series.is_zero()


def test_n_series_against_binomial_oracle():
    # oracle: [m](x) = (1+x)^m - 1, exact binomial coefficients
    from math import comb

    law = multiplicative_law(ZX3, 15)
    for m in (2, 3, 5, 7, 11):
        expected = poly(ZX3, ("x",), 15, {(k,): comb(m, k) for k in range(1, min(m, 14) + 1)})
        assert law.n_series(m).series == expected


def test_n_series_homomorphism_random_pairs():
    rng = random.Random(23)
    law = multiplicative_law(ZX2, 10)
    for _ in range(20):
        a, b = rng.randrange(0, 50), rng.randrange(0, 50)
        sa, sb = law.n_series(a).series, law.n_series(b).series
        assert law.formal_sum(sa, sb) == law.n_series(a + b).series
        assert law.n_series(b).series.subst({"x": sa}) == law.n_series(a * b).series


def test_honda_height_one_p_series():
    law = honda_law(F2, 1, 8)
    assert law.n_series(2).series == poly(F2, ("x",), 8, {(2,): 1})


def test_honda_height_two_p_series_p3():
    law = honda_law(F3, 2, 10)
    assert law.check_axioms() == {"unit": True, "commutative": True, "associative": True}
    assert law.n_series(3).series == poly(F3, ("x",), 10, {(9,): 1})


def test_honda_validation():
    with pytest.raises(TruncationTooSmall):
        honda_law(F2, 1, 2)
    with pytest.raises(SpecMismatch):
        honda_law(Z2_4, 1, 8)


def test_lubin_tate_axioms():
    law = lubin_tate_height2_law(LT2_SPEC, 10)
    assert law.check_axioms() == {"unit": True, "commutative": True, "associative": True}
    assert law.F.subst({
        "x": law.x(), "y": TruncSeries.zero(LT2_SPEC, ("x",), 10),
    }) == law.x()


def test_lubin_tate_two_series_low_coefficients():
    # oracle: [2](x) = E(2 l(x)) with l2 = u/2 and E = l^{-1}, so e2 = -u/2;
    # the x coefficient is 2 and the x^2 coefficient is 2*l2 + 4*e2 = -u.
    l2 = Fraction(1, 2)  # u-part of the x^2 log coefficient
    e2 = -l2
    x2_u_part = 2 * l2 + 4 * e2
    assert x2_u_part == -1

    law = lubin_tate_height2_law(LT2_SPEC, 10)
    two = law.n_series(2).series
    assert two.coefficient_of_degree(1) == CoeffElem.from_int(LT2_SPEC, 2)
    assert two.coefficient_of_degree(2) == CoeffElem(LT2_SPEC, {(1,): -1})


def test_lubin_tate_reduces_to_honda():
    t = 10
    law2 = lubin_tate_height2_law(LT2_SPEC, t)
    hon = honda_law(F2, 2, t)
    reduced = {}
    for expo, c in law2.F.terms.items():
        v = c.constant_part() % 2  # kill u1 and reduce mod 2
        if v:
            reduced[expo] = v
    expected = {expo: c.constant_part() for expo, c in hon.F.terms.items()}
    assert reduced == expected


def test_lubin_tate_validation():
    with pytest.raises(SpecMismatch):
        lubin_tate_height2_law(Z2_4, 10)
    with pytest.raises(TruncationTooSmall):
        lubin_tate_height2_law(LT2_SPEC, 4)

import random

import pytest
import sympy

from fgl.coeffring import CoeffElem, CoeffRingSpec
from fgl.errors import NonExactDivision, TruncationTooSmall, UnsupportedGroupType
from fgl.grouprings import (
    AbelianPType,
    AlgebraMap,
    group_cohomology_ring,
    level_ring,
    quotient_to_level,
    restriction_map,
)
from fgl.laws import lubin_tate_height2_law, multiplicative_law
from fgl.series import TruncSeries

ZX2 = CoeffRingSpec(p=2, p_precision=None)
ZX3 = CoeffRingSpec(p=3, p_precision=None)
# precision chosen so every triangular division is exact: the maximal ideal
# has nilpotency degree N+D-1 = 4, so x1^12 = 0 in the stage-1 quotient and a
# cap of 24 pushes all truncation tails to zero
LT2_SMALL = CoeffRingSpec(p=2, p_precision=3, deformation_params=1, u_degree_cap=2)


def shifted_cyclotomic(order: int) -> dict[int, int]:
    """Oracle: integer coefficients of Phi_order(1 + x), via sympy."""
    x = sympy.symbols("x")
    poly = sympy.expand(sympy.cyclotomic_poly(order, 1 + x))
    out = {}
    for k in range(sympy.degree(poly, x) + 1):
        c = int(poly.coeff(x, k))
        if c:
            out[k] = c
    return out


def series_terms(s: TruncSeries) -> dict[int, int]:
    return {expo[0]: c.constant_part() for expo, c in s.terms.items()}


def test_abelian_p_type_validation():
    with pytest.raises(UnsupportedGroupType):
        AbelianPType(())
    with pytest.raises(UnsupportedGroupType):
        AbelianPType((0,))
    with pytest.raises(UnsupportedGroupType):
        AbelianPType((1, 2))
    t = AbelianPType.parse("2,1,1")
    assert t.rank == 3 and t.order_exponent == 4 and t.order(2) == 16


def test_group_ring_c2_multiplicative():
    law = multiplicative_law(ZX2, 6)
    alg = group_cohomology_ring(law, AbelianPType((1,)))
    assert alg.rank == 2
    assert series_terms(alg.relations[0]) == {1: 2, 2: 1}


def test_group_ring_rank_p_power():
    for spec, p in ((ZX2, 2), (ZX3, 3)):
        for m in (1, 2):
            law = multiplicative_law(spec, p ** m + 2)
            alg = group_cohomology_ring(law, AbelianPType((m,)))
            assert alg.rank == p ** m


def test_group_ring_height2_rank():
    law = lubin_tate_height2_law(LT2_SMALL, 8)
    alg = group_cohomology_ring(law, AbelianPType((1,)))
    assert alg.rank == 4  # p^2 at height 2


def test_group_ring_truncation_guard():
    law = multiplicative_law(ZX2, 6)
    with pytest.raises(TruncationTooSmall):
        group_cohomology_ring(law, AbelianPType((3,)))


def test_reduce_element_examples():
    law = multiplicative_law(ZX2, 6)
    alg = group_cohomology_ring(law, AbelianPType((1,)))  # Z[x]/(x^2 + 2x)
    x = alg.var(0)
    sq = alg.reduce(x * x)
    assert alg.coordinates(sq) == [CoeffElem.from_int(ZX2, 0), CoeffElem.from_int(ZX2, -2)]
    assert alg.reduce(alg.relations[0]).is_zero()
    assert alg.reduce(alg.one()) == alg.one()


def test_algebra_multiplication_associative_commutative():
    rng = random.Random(41)
    law = multiplicative_law(ZX3, 12)
    alg = group_cohomology_ring(law, AbelianPType((2,)))
    basis = alg.basis()
    for _ in range(50):
        elems = []
        for _ in range(3):
            terms = {}
            for expo in rng.sample(basis, k=3):
                terms[expo] = CoeffElem.from_int(ZX3, rng.randrange(-9, 10))
            elems.append(TruncSeries(ZX3, alg.variables, None, terms))
        a, b, c = elems
        assert alg.mul(alg.mul(a, b), c) == alg.mul(a, alg.mul(b, c))
        assert alg.mul(a, b) == alg.mul(b, a)


def test_level_ring_is_shifted_cyclotomic():
    # oracle: independent cyclotomic expansion Phi_{p^m}(1 + x)
    for spec, p in ((ZX2, 2), (ZX3, 3)):
        for m in (1, 2, 3):
            law = multiplicative_law(spec, p ** m + 2)
            alg = level_ring(law, AbelianPType((m,)))
            expected = shifted_cyclotomic(p ** m)
            assert series_terms(alg.relations[0]) == expected
            assert alg.rank == p ** m - p ** (m - 1)


def test_level_ring_height2_cyclic():
    law = lubin_tate_height2_law(LT2_SMALL, 8)
    alg = level_ring(law, AbelianPType((1,)))
    assert alg.rank == 2 ** 2 - 1 == 3


def test_level_ring_height2_elementary_abelian():
    law = lubin_tate_height2_law(LT2_SMALL, 24)
    alg = level_ring(law, AbelianPType((1, 1)))
    assert alg.rank == (2 ** 2 - 1) * (2 ** 2 - 2) == 6
    assert alg.lead_degrees == (3, 2)


def test_level_ring_rejects_rank_above_height():
    law = multiplicative_law(ZX2, 8)
    with pytest.raises(UnsupportedGroupType):
        level_ring(law, AbelianPType((1, 1)))


def test_level_ring_rejects_mixed_types():
    law = lubin_tate_height2_law(LT2_SMALL, 24)
    with pytest.raises(UnsupportedGroupType):
        level_ring(law, AbelianPType((2, 1)))


def test_quotient_to_level_multiplicative():
    for spec, p in ((ZX2, 2), (ZX3, 3)):
        for m in (1, 2):
            law = multiplicative_law(spec, p ** m + 2)
            qmap = quotient_to_level(law, AbelianPType((m,)))
            assert qmap.source.rank == p ** m
            assert qmap.target.rank == p ** m - p ** (m - 1)
            for rel in qmap.source.relations:
                assert qmap.apply(rel).is_zero()


def test_quotient_to_level_height2():
    law = lubin_tate_height2_law(LT2_SMALL, 24)
    for gtype in (AbelianPType((1,)), AbelianPType((1, 1))):
        qmap = quotient_to_level(law, gtype)
        for rel in qmap.source.relations:
            assert qmap.apply(rel).is_zero()


def test_restriction_c2_in_c4():
    law = multiplicative_law(ZX2, 8)
    maps = restriction_map(law, 1, 2)
    res = maps["restriction"]
    assert res.source.rank == 4 and res.target.rank == 2
    # x -> x is well-defined because [4](x) dies in Z[x]/([2](x))
    assert res.apply(res.source.var(0)) == res.target.var(0)


def test_inflation_c4_onto_c2():
    law = multiplicative_law(ZX2, 8)
    inf = restriction_map(law, 1, 2)["inflation"]
    assert inf.source.rank == 2 and inf.target.rank == 4
    image = inf.images["x1"]
    assert series_terms(image) == {1: 2, 2: 1}  # [2](x) = x^2 + 2x


def test_restriction_identity():
    law = multiplicative_law(ZX2, 8)
    maps = restriction_map(law, 2, 2)
    ident = maps["restriction"]
    assert ident.apply(ident.source.var(0)) == ident.source.var(0)


def test_restriction_rejects_distant_pairs():
    law = multiplicative_law(ZX2, 20)
    with pytest.raises(UnsupportedGroupType):
        restriction_map(law, 1, 3)


def test_divisibility_shadow_order_p_points():
    # each stage's denominator divides [p](x_j) exactly; re-verify the
    # stage-2 division of the elementary abelian case by remultiplying
    law = lubin_tate_height2_law(LT2_SMALL, 24)
    alg = level_ring(law, AbelianPType((1, 1)))
    # relation g2 is monic of degree 2 in x2 over the stage-1 quotient;
    # multiplying back by the denominator must land in the ideal of [2](x2):
    # equivalently, [2](x2) reduces to zero in the full level algebra
    two = law.n_series(2).series
    x2 = TruncSeries.variable(LT2_SMALL, alg.variables, law.cap, "x2")
    two_at_x2 = two.subst({"x": x2})
    assert alg.reduce_series(two_at_x2).is_zero()

from fractions import Fraction

import pytest

from fgl.coeffring import CoeffElem, CoeffRingSpec
from fgl.errors import ModeError, UnsupportedGroupType
from fgl.grouprings import AbelianPType, group_cohomology_ring
from fgl.laws import lubin_tate_height2_law, multiplicative_law
from fgl.series import TruncSeries
from fgl.tate import (
    euler_class,
    euler_image_in_level,
    factor_invertibility_check,
    level_to_tate_map,
    localization_kernel,
)

ZX2 = CoeffRingSpec(p=2, p_precision=None)
ZX3 = CoeffRingSpec(p=3, p_precision=None)
ZX5 = CoeffRingSpec(p=5, p_precision=None)
LT2_SMALL = CoeffRingSpec(p=2, p_precision=3, deformation_params=1, u_degree_cap=2)


def law_for(spec, p, m):
    return multiplicative_law(spec, p ** m + 2)


def test_euler_class_c2():
    law = law_for(ZX2, 2, 1)
    ec = euler_class(law, AbelianPType((1,)))
    assert len(ec.factors) == 1
    assert ec.product == ec.ambient.var(0)  # single factor x


def test_euler_class_factor_count():
    for spec, p, gtype in ((ZX2, 2, (2,)), (ZX3, 3, (1,)), (ZX3, 3, (2,))):
        law = law_for(spec, p, max(gtype))
        ec = euler_class(law, AbelianPType(gtype))
        assert len(ec.factors) == p ** sum(gtype) - 1


def test_euler_class_cp_is_product_of_character_classes():
    # oracle: e = prod_{i=1..p-1} ((1+x)^i - 1) reduced mod (1+x)^p - 1
    p = 3
    law = law_for(ZX3, 3, 1)
    ec = euler_class(law, AbelianPType((1,)))
    ambient = ec.ambient
    expect = ambient.one()
    x = ambient.var(0)
    for i in range(1, p):
        term = ambient.zero()
        # (1+x)^i - 1 expanded by hand
        from math import comb
        for k in range(1, i + 1):
            mono = TruncSeries(ZX3, ambient.variables, None,
                               {(k,): CoeffElem.from_int(ZX3, comb(i, k))})
            term = term + mono
        expect = ambient.mul(expect, term)
    assert ec.product == expect


def test_localization_by_one_and_zero():
    law = law_for(ZX2, 2, 1)
    alg = group_cohomology_ring(law, AbelianPType((1,)))
    loc1 = localization_kernel(alg, alg.one())
    assert loc1.quotient_rank == alg.rank
    assert loc1.kernel_pivots == []
    loc0 = localization_kernel(alg, alg.zero())
    assert loc0.quotient_rank == 0


def test_localization_quotient_rank_cp():
    # Q[x]/((1+x)^p - 1) = Q x Q(zeta_p); e vanishes exactly on the trivial part
    for spec, p in ((ZX2, 2), (ZX3, 3)):
        law = law_for(spec, p, 1)
        ec = euler_class(law, AbelianPType((1,)))
        loc = localization_kernel(ec.ambient, ec.product)
        assert loc.quotient_rank == p - 1
        assert loc.iterations <= ec.ambient.rank


def test_localization_needs_exact_mode():
    law = lubin_tate_height2_law(LT2_SMALL, 8)
    alg = group_cohomology_ring(law, AbelianPType((1,)))
    with pytest.raises(ModeError):
        localization_kernel(alg, alg.one())


def test_level_to_tate_ranks_and_bijectivity():
    # both sides are Q(zeta_{p^m}) of dimension p^m - p^(m-1)
    for spec, p in ((ZX2, 2), (ZX3, 3)):
        for m in (1, 2, 3):
            law = law_for(spec, p, m)
            report = level_to_tate_map(law, AbelianPType((m,)))
            expected = p ** m - p ** (m - 1)
            assert report.source_rank == expected
            assert report.target_rank == expected
            assert report.bijective


def test_level_to_tate_c2_is_rank_one():
    report = level_to_tate_map(law_for(ZX2, 2, 1), AbelianPType((1,)))
    assert report.source_rank == report.target_rank == 1
    assert report.bijective


def test_level_to_tate_needs_exact_mode():
    law = lubin_tate_height2_law(LT2_SMALL, 8)
    with pytest.raises(ModeError):
        level_to_tate_map(law, AbelianPType((1,)))


def test_factor_invertibility_cp_and_c4():
    for spec, p, m in ((ZX2, 2, 1), (ZX3, 3, 1), (ZX2, 2, 2), (ZX3, 3, 2)):
        law = law_for(spec, p, m)
        report = factor_invertibility_check(law, AbelianPType((m,)))
        assert report.factors_checked == p ** m - 1
        assert report.all_invertible


def test_euler_image_in_level():
    # oracle: prod_{i=1..p-1} (zeta^i - 1) = (-1)^(p-1) Phi_p(1) = p for odd p,
    # and -2 for p = 2
    img2 = euler_image_in_level(law_for(ZX2, 2, 1), AbelianPType((1,)))
    assert img2 == TruncSeries.constant(
        ZX2, ("x1",), None, CoeffElem.from_int(ZX2, -2))
    for spec, p in ((ZX3, 3), (ZX5, 5)):
        law = multiplicative_law(spec, p + 2)
        img = euler_image_in_level(law, AbelianPType((1,)))
        assert img == TruncSeries.constant(
            spec, ("x1",), None, CoeffElem.from_int(spec, p))


def test_euler_image_rejects_larger_groups():
    with pytest.raises(UnsupportedGroupType):
        euler_image_in_level(law_for(ZX2, 2, 2), AbelianPType((2,)))


def test_euler_class_height2_structural():
    # at height 2 only structural facts are machine-checkable (the rational
    # coefficient ring is infinite-dimensional): the factor count is |A| - 1
    # and no factor collapses to zero in the ambient or level ring
    from fgl.grouprings import level_ring
    from fgl.laws import lubin_tate_height2_law

    law = lubin_tate_height2_law(LT2_SMALL, 24)
    for gtype in (AbelianPType((1,)), AbelianPType((1, 1))):
        ec = euler_class(law, gtype)
        assert len(ec.factors) == 2 ** gtype.order_exponent - 1
        assert all(not f.is_zero() for f in ec.factors)
        assert not ec.product.is_zero()
        level = level_ring(law, gtype)
        for f in ec.factors:
            assert not level.reduce(f.rename(level.variables, cap=None)).is_zero()

"""Euler classes, localization kernels and the level-versus-localized
comparison over the rationals.

The Euler class of A = C_{p^m1} x ... x C_{p^mk} in its ambient ring is

    e = prod over (i_1..i_k) != (0..0), 0 <= i_j < p^mj
        of  [i_1](x_1) +_F ... +_F [i_k](x_k),

one factor per nonzero character of A, so |A| - 1 factors in total.

Localization at e is modeled on the rational ambient algebra: multiplication
by e is a linear endomorphism of a finite-dimensional Q-vector space, its
kernels ker(e) <= ker(e^2) <= ... stabilize, and A_Q[1/e] = A_Q / ker(e^oo)
because e becomes injective, hence bijective, on the quotient. This is only
honest over exact (rational) coefficients: inverting a p-adically small
element at finite p-precision is ill-posed, so truncated rings are refused.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffring import CoeffElem
from .errors import ModeError, RelationNotKilled, UnsupportedGroupType
from .grouprings import AbelianPType, FiniteAlgebra, group_cohomology_ring, level_ring
from .laws import FormalGroupLaw
from .linalg import Matrix, mat_mul, nullspace, rank, rref
from .series import TruncSeries


@dataclass
class EulerClassData:
    """The factored Euler class of the reduced regular representation."""

    ambient: FiniteAlgebra
    factors: list[TruncSeries]
    product: TruncSeries


def euler_class(law: FormalGroupLaw, gtype: AbelianPType) -> EulerClassData:
    ambient = group_cohomology_ring(law, gtype)
    p = law.spec.p
    spec = law.spec
    cap = law.cap
    variables = ambient.variables
    xs = [TruncSeries.variable(spec, variables, cap, v) for v in variables]

    # [a](x_j) for every needed multiple, reused across index tuples
    multiples: list[list[TruncSeries]] = []
    for j, m in enumerate(gtype.exponents):
        row = []
        for a in range(p ** m):
            row.append(law.n_series(a).series.subst({"x": xs[j]}))
        multiples.append(row)

    factors = []
    product = ambient.one()
    for combo in _index_tuples(p, gtype.exponents):
        if not any(combo):
            continue
        s = TruncSeries.zero(spec, variables, cap)
        for j, a in enumerate(combo):
            s = law.formal_sum(s, multiples[j][a])
        factor = ambient.reduce_series(s)
        factors.append(factor)
        product = ambient.mul(product, factor)
    assert len(factors) == gtype.order(p) - 1
    return EulerClassData(ambient=ambient, factors=factors, product=product)


def _index_tuples(p: int, exponents: tuple[int, ...]):
    if not exponents:
        yield ()
        return
    for rest in _index_tuples(p, exponents[:-1]):
        for a in range(p ** exponents[-1]):
            yield rest + (a,)


@dataclass
class LocalizedRing:
    """ambient tensor Q modulo the eventual kernel of multiplication by e."""

    ambient: FiniteAlgebra
    inverted: TruncSeries
    kernel_rref: Matrix
    kernel_pivots: list[int]
    quotient_rank: int
    iterations: int

    @property
    def free_coords(self) -> list[int]:
        pivots = set(self.kernel_pivots)
        return [i for i in range(self.ambient.rank) if i not in pivots]

    def project(self, vec: list[Fraction]) -> list[Fraction]:
        """Canonical quotient coordinates: eliminate kernel pivot columns."""
        v = list(vec)
        for row, c in zip(self.kernel_rref, self.kernel_pivots):
            f = v[c]
            if f != 0:
                v = [x - f * y for x, y in zip(v, row)]
        return [v[i] for i in self.free_coords]

    def project_element(self, elem: TruncSeries) -> list[Fraction]:
        return self.project(_rational_coordinates(self.ambient, elem))

    def multiplication_matrix(self, elem: TruncSeries) -> Matrix:
        """The induced action of ``elem`` on the quotient, as a q x q matrix."""
        basis = self.ambient.basis()
        cols = []
        for i in self.free_coords:
            mono = TruncSeries(
                self.ambient.spec, self.ambient.variables, None,
                {basis[i]: CoeffElem.one(self.ambient.spec)},
            )
            prod = self.ambient.mul(elem, mono)
            cols.append(self.project_element(prod))
        q = len(self.free_coords)
        return [[cols[j][i] for j in range(q)] for i in range(q)]


def _rational_coordinates(alg: FiniteAlgebra, elem: TruncSeries) -> list[Fraction]:
    if not alg.spec.exact:
        raise ModeError("rational localization needs exact integer coefficients")
    return [Fraction(c.constant_part()) for c in alg.coordinates(elem)]


def localization_kernel(alg: FiniteAlgebra, e: TruncSeries) -> LocalizedRing:
    """Stabilized kernel of multiplication by e and the quotient data."""
    if not alg.spec.exact:
        raise ModeError("rational localization needs exact integer coefficients")
    n = alg.rank
    basis = alg.basis()
    cols = []
    for expo in basis:
        mono = TruncSeries(alg.spec, alg.variables, None,
                           {expo: CoeffElem.one(alg.spec)})
        cols.append(_rational_coordinates(alg, alg.mul(e, mono)))
    M: Matrix = [[cols[j][i] for j in range(n)] for i in range(n)]

    power = M
    prev_dim = -1
    iterations = 0
    kernel: Matrix = []
    while True:
        kernel = nullspace(power)
        iterations += 1
        if len(kernel) == prev_dim:
            iterations -= 1  # the last power only confirmed stabilization
            break
        prev_dim = len(kernel)
        if iterations > n:
            raise RuntimeError("kernel chain failed to stabilize within rank steps")
        power = mat_mul(power, M)
    kernel_rref, pivots = rref(kernel) if kernel else ([], [])
    loc = LocalizedRing(
        ambient=alg, inverted=e, kernel_rref=kernel_rref,
        kernel_pivots=pivots, quotient_rank=n - len(pivots),
        iterations=max(iterations, 1),
    )
    # multiplication by e must be injective (so bijective) on the quotient
    if loc.quotient_rank and rank(loc.multiplication_matrix(e)) != loc.quotient_rank:
        raise RuntimeError("multiplication by e is not injective on the quotient")
    return loc


@dataclass
class LevelToTateReport:
    """Comparison of the level ring with the rational localized quotient."""

    level: FiniteAlgebra
    localized: LocalizedRing
    matrix: Matrix
    source_rank: int
    target_rank: int
    bijective: bool


def level_to_tate_map(law: FormalGroupLaw, gtype: AbelianPType) -> LevelToTateReport:
    """The x -> x map from the level ring into ambient/(eventual kernel).

    Well-definedness is checked (the level relation must project to zero)
    and the induced rational linear map is tested for bijectivity; no
    tolerances are involved.
    """
    if not law.spec.exact:
        raise ModeError("the rationalized comparison needs exact coefficients")
    if not gtype.is_cyclic:
        raise UnsupportedGroupType("the rationalized comparison handles cyclic groups")
    ec = euler_class(law, gtype)
    ambient = ec.ambient
    loc = localization_kernel(ambient, ec.product)
    level = level_ring(law, gtype)

    for rel in level.relations:
        image = loc.project_element(ambient.reduce(rel.rename(ambient.variables, cap=None)))
        if any(c != 0 for c in image):
            raise RelationNotKilled("level relation does not vanish in the localization")

    basis = level.basis()
    cols = []
    for expo in basis:
        mono = TruncSeries(ambient.spec, ambient.variables, None,
                           {expo: CoeffElem.one(ambient.spec)})
        cols.append(loc.project_element(mono))
    q = loc.quotient_rank
    matrix = [[cols[j][i] for j in range(len(basis))] for i in range(q)]
    bijective = (level.rank == q) and (rank(matrix) == q)
    return LevelToTateReport(
        level=level, localized=loc, matrix=matrix,
        source_rank=level.rank, target_rank=q, bijective=bijective,
    )


@dataclass
class FactorReport:
    factors_checked: int
    invertible: list[bool]

    @property
    def all_invertible(self) -> bool:
        return all(self.invertible)


def factor_invertibility_check(law: FormalGroupLaw, gtype: AbelianPType) -> FactorReport:
    """Each Euler factor must act invertibly on the localized quotient.

    This is the finite-rank shadow of 'inverting the product inverts each
    factor': on ambient/(eventual kernel) every factor's multiplication
    matrix must have full rank.
    """
    if not law.spec.exact:
        raise ModeError("the factor check needs exact coefficients")
    ec = euler_class(law, gtype)
    loc = localization_kernel(ec.ambient, ec.product)
    results = []
    for factor in ec.factors:
        m = loc.multiplication_matrix(factor)
        results.append(rank(m) == loc.quotient_rank)
    return FactorReport(factors_checked=len(ec.factors), invertible=results)


def euler_image_in_level(law: FormalGroupLaw, gtype: AbelianPType) -> TruncSeries:
    """The Euler class reduced into the level ring of C_p.

    For odd p this is the constant p (the product of the nonzero p-torsion
    coordinates has the same norm as 1 - zeta_p); for p = 2 it is -2.
    """
    if not gtype.is_cyclic or gtype.exponents[0] != 1:
        raise UnsupportedGroupType("the Euler image is computed for C_p only")
    level = level_ring(law, gtype)
    p = law.spec.p
    x1 = TruncSeries.variable(law.spec, level.variables, law.cap, "x1")
    product = level.one()
    for i in range(1, p):
        factor = law.n_series(i).series.subst({"x": x1})
        product = level.mul(product, level.reduce_series(factor))
    return level.reduce(product)

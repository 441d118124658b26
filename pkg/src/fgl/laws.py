"""Formal group laws over a coefficient ring.

A law is a bivariate series F(x, y) with F(x,0) = x, F(0,y) = y,
F(x,y) = F(y,x) and F(F(x,y),z) = F(x,F(y,z)), all up to the degree cap.
Constructors:

* ``multiplicative_law``  -- F = x + y + xy over Z or Z/p^N (height 1).
* ``additive_law``        -- F = x + y.
* ``honda_law``           -- the height-n p-typical law over F_p, built from
  the logarithm l(x) = sum_i x^(p^(n i)) / p^i with exact rationals and
  reduced mod p.
* ``lubin_tate_height2_law`` -- a height-2 law over Z/p^N[u1]/(u1^D) whose
  logarithm solves the functional equation
  l(x) = x + (u1/p) l^s(x^p) + (1/p) l^(s s)(x^(p^2)),
  s being the coefficient twist u1 -> u1^p (required for p-integrality).

The logarithm constructions run over exact rationals; every coefficient of
the resulting law must have denominator prime to p (this is checked, and a
failure is a bug, not a user error) before being reduced into the target
ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffring import CoeffElem, CoeffRingSpec
from .errors import (
    IntegralityFailure,
    NonNilpotentArgument,
    SpecMismatch,
    TruncationTooSmall,
)
from .series import TruncSeries


class _QU:
    """Dense polynomial in the deformation parameter over Q, mod u^width."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, width: int) -> "_QU":
        return cls((Fraction(0),) * width)

    @classmethod
    def const(cls, width: int, value: Fraction) -> "_QU":
        return cls((Fraction(value),) + (Fraction(0),) * (width - 1))

    @classmethod
    def u(cls, width: int) -> "_QU":
        if width < 2:
            return cls.zero(width)
        return cls((Fraction(0), Fraction(1)) + (Fraction(0),) * (width - 2))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "_QU") -> "_QU":
        return _QU(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __mul__(self, other: "_QU") -> "_QU":
        w = len(self.coeffs)
        out = [Fraction(0)] * w
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j >= w:
                    break
                if b != 0:
                    out[i + j] += a * b
        return _QU(out)

    def scale(self, k: Fraction) -> "_QU":
        return _QU(c * k for c in self.coeffs)

    def frobenius_twist(self, p: int) -> "_QU":
        """Apply u -> u^p to the coefficients (truncated at the width)."""
        w = len(self.coeffs)
        out = [Fraction(0)] * w
        for i, c in enumerate(self.coeffs):
            if c != 0 and i * p < w:
                out[i * p] += c
        return _QU(out)

    def to_coeff(self, spec: CoeffRingSpec) -> CoeffElem:
        """Reduce into the target ring; denominators must be prime to p."""
        terms = {}
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if c.denominator % spec.p == 0:
                raise IntegralityFailure(f"coefficient {c} is not {spec.p}-integral")
            if spec.exact:
                if c.denominator != 1:
                    raise IntegralityFailure(f"coefficient {c} is not an integer")
                value = c.numerator
            else:
                value = c.numerator * pow(c.denominator, -1, spec.modulus) % spec.modulus
            if spec.deformation_params:
                mono = (j,) + (0,) * (spec.deformation_params - 1)
            else:
                mono = ()
            terms[mono] = value
        return CoeffElem(spec, terms)


@dataclass(frozen=True)
class NSeries:
    """The m-th formal multiple of x: [0](x) = 0, [m](x) = F(x, [m-1](x))."""

    m: int
    series: TruncSeries


class FormalGroupLaw:
    """A formal group law F(x, y) with its coefficient ring and metadata."""

    def __init__(self, spec: CoeffRingSpec, F: TruncSeries, height_hint: int | None, name: str):
        self.spec = spec
        self.F = F
        self.height_hint = height_hint
        self.name = name
        self._nseries_cache: dict[int, TruncSeries] = {}

    @property
    def cap(self) -> int:
        return self.F.cap

    def x(self) -> TruncSeries:
        """The coordinate x as a univariate series in this law's ring."""
        return TruncSeries.variable(self.spec, ("x",), self.cap, "x")

    # -- group operations ---------------------------------------------------

    def formal_sum(self, a: TruncSeries, b: TruncSeries) -> TruncSeries:
        """F(a, b) for series with zero constant term."""
        if not a.constant_term().is_zero() or not b.constant_term().is_zero():
            raise NonNilpotentArgument("formal sum needs zero constant terms")
        if a.variables != b.variables or a.cap != b.cap or a.spec != b.spec:
            raise SpecMismatch("formal sum arguments live in different rings")
        return self.F.subst({"x": a, "y": b})

    def formal_inverse(self, a: TruncSeries) -> TruncSeries:
        """The series i(a) with F(a, i(a)) = 0, found degree by degree.

        F(u,v) = u + v + (higher), so the degree-t part of the unknown is
        determined by all lower parts; each round fixes one degree.
        """
        if not a.constant_term().is_zero():
            raise NonNilpotentArgument("formal inverse needs a zero constant term")
        cap = a.cap
        if cap is None:
            raise SpecMismatch("formal inverse needs a finite degree cap")
        inv = TruncSeries.zero(a.spec, a.variables, cap)
        for t in range(1, cap):
            defect = self.formal_sum(a, inv).homogeneous_part(t)
            if not defect.is_zero():
                inv = inv - defect
        return inv

    def n_series(self, m: int) -> NSeries:
        """[m](x), via a binary addition chain on the formal sum."""
        if m < 0:
            return NSeries(m, self.formal_inverse(self.n_series(-m).series))
        return NSeries(m, self._n_series_pos(m))

    def _n_series_pos(self, m: int) -> TruncSeries:
        cached = self._nseries_cache.get(m)
        if cached is not None:
            return cached
        x = self.x()
        if m == 0:
            out = TruncSeries.zero(self.spec, ("x",), self.cap)
        elif m == 1:
            out = x
        elif m % 2 == 0:
            half = self._n_series_pos(m // 2)
            out = self.formal_sum(half, half)
        else:
            out = self.formal_sum(x, self._n_series_pos(m - 1))
        self._nseries_cache[m] = out
        return out

    # -- axiom checks ---------------------------------------------------------

    def check_axioms(self) -> dict[str, bool]:
        """Verify unit, commutativity and associativity up to the cap."""
        spec, cap = self.spec, self.cap
        x = TruncSeries.variable(spec, ("x", "y"), cap, "x")
        y = TruncSeries.variable(spec, ("x", "y"), cap, "y")
        zero2 = TruncSeries.zero(spec, ("x", "y"), cap)
        unit_ok = self.F.subst({"x": x, "y": zero2}) == x and \
            self.F.subst({"x": zero2, "y": y}) == y
        comm_ok = self.F.subst({"x": y, "y": x}) == self.F
        tri = ("x", "y", "z")
        tx = TruncSeries.variable(spec, tri, cap, "x")
        ty = TruncSeries.variable(spec, tri, cap, "y")
        tz = TruncSeries.variable(spec, tri, cap, "z")
        xy = self.F.subst({"x": tx, "y": ty})
        yz = self.F.subst({"x": ty, "y": tz})
        assoc_ok = self.F.subst({"x": xy, "y": tz}) == self.F.subst({"x": tx, "y": yz})
        return {"unit": unit_ok, "commutative": comm_ok, "associative": assoc_ok}

    def __repr__(self) -> str:
        return f"FormalGroupLaw({self.name}, p={self.spec.p}, cap={self.cap})"


# -- constructors --------------------------------------------------------------


def multiplicative_law(spec: CoeffRingSpec, cap: int) -> FormalGroupLaw:
    """F(x, y) = x + y + xy. Height 1; exact at any cap >= 3."""
    if spec.deformation_params != 0:
        raise SpecMismatch("multiplicative law needs deformation_params = 0")
    if cap < 3:
        raise TruncationTooSmall("multiplicative law needs cap >= 3")
    one = CoeffElem.one(spec)
    F = TruncSeries(spec, ("x", "y"), cap, {(1, 0): one, (0, 1): one, (1, 1): one})
    return FormalGroupLaw(spec, F, 1, "multiplicative")


def additive_law(spec: CoeffRingSpec, cap: int) -> FormalGroupLaw:
    """F(x, y) = x + y."""
    if cap < 2:
        raise TruncationTooSmall("additive law needs cap >= 2")
    one = CoeffElem.one(spec)
    F = TruncSeries(spec, ("x", "y"), cap, {(1, 0): one, (0, 1): one})
    return FormalGroupLaw(spec, F, None, "additive")


def _law_from_log(spec: CoeffRingSpec, cap: int, log_coeffs: dict[int, _QU],
                  width: int, height: int, name: str) -> FormalGroupLaw:
    """Build F = l^{-1}(l(x) + l(y)) from a sparse logarithm.

    The compositional inverse E of l is found degree by degree from
    l(E(z)) = z; F is then the Horner evaluation of E at l(x) + l(y),
    carried out over exact rationals and reduced into ``spec`` at the end.
    """
    # Reversion: E = l^{-1}, dense list of _QU indexed by degree. At round k
    # the z^k coefficient of sum_{j>=2} l_j E(z)^j only involves e_i with
    # i < k, so each round pins down one new coefficient.
    E = [_QU.zero(width), _QU.const(width, Fraction(1))]
    js = sorted(j for j in log_coeffs if j > 1 and j < cap)
    for k in range(2, cap):
        total = _QU.zero(width)
        base = E + [_QU.zero(width)] * (cap - len(E))
        acc = base
        prev = 1
        for j in js:
            if j > k:
                break
            for _ in range(j - prev):
                acc = _poly_mul(acc, base, cap)
            prev = j
            total = total + (log_coeffs[j] * acc[k])
        E.append(total.scale(Fraction(-1)))

    # S = l(x) + l(y) as a sparse bivariate polynomial over _QU.
    S: dict[tuple[int, int], _QU] = {}
    for k, c in log_coeffs.items():
        if k < cap and not c.is_zero():
            S[(k, 0)] = c
            S[(0, k)] = c

    # Horner: (((e_{cap-1}) S + e_{cap-2}) S + ... + e_1) S = sum_k e_k S^k.
    acc_bi: dict[tuple[int, int], _QU] = {}
    for k in range(cap - 1, 0, -1):
        acc_bi = _bi_mul(acc_bi, S, width, cap)
        ek = E[k]
        if not ek.is_zero():
            cur = acc_bi.get((0, 0), _QU.zero(width))
            acc_bi[(0, 0)] = cur + ek
    acc_bi = _bi_mul(acc_bi, S, width, cap)
    F_terms: dict[tuple[int, int], CoeffElem] = {}
    for expo, q in acc_bi.items():
        c = q.to_coeff(spec)
        if not c.is_zero():
            F_terms[expo] = c
    F = TruncSeries(spec, ("x", "y"), cap, F_terms)
    return FormalGroupLaw(spec, F, height, name)


def _poly_mul(a: list[_QU], b: list[_QU], cap: int) -> list[_QU]:
    width = len(a[0].coeffs) if a else len(b[0].coeffs)
    out = [_QU.zero(width) for _ in range(cap)]
    for i, ai in enumerate(a):
        if i >= cap or ai.is_zero():
            continue
        for j, bj in enumerate(b):
            if i + j >= cap:
                break
            if not bj.is_zero():
                out[i + j] = out[i + j] + ai * bj
    return out


def _bi_mul(a: dict, s: dict, width: int, cap: int) -> dict:
    """Multiply a (dense-ish dict) bivariate poly by the sparse poly s."""
    if not a:
        return {}
    out: dict[tuple[int, int], _QU] = {}
    for (i1, j1), c1 in a.items():
        if c1.is_zero():
            continue
        for (i2, j2), c2 in s.items():
            if i1 + i2 + j1 + j2 >= cap:
                continue
            key = (i1 + i2, j1 + j2)
            prod = c1 * c2
            if key in out:
                out[key] = out[key] + prod
            else:
                out[key] = prod
    return out


def honda_law(spec: CoeffRingSpec, n: int, cap: int) -> FormalGroupLaw:
    """The p-typical height-n law over F_p; [p](x) = x^(p^n) mod p."""
    if spec.exact or spec.p_precision != 1:
        raise SpecMismatch("honda law needs coefficients mod p (p_precision = 1)")
    if spec.deformation_params != 0:
        raise SpecMismatch("honda law needs deformation_params = 0")
    if cap <= spec.p ** n:
        raise TruncationTooSmall(f"cap must exceed p^n = {spec.p ** n}")
    log_coeffs: dict[int, _QU] = {}
    k = 1
    i = 0
    while k < cap:
        log_coeffs[k] = _QU.const(1, Fraction(1, spec.p ** i))
        k *= spec.p ** n
        i += 1
    return _law_from_log(spec, cap, log_coeffs, 1, n, f"honda({n})")


def lubin_tate_height2_law(spec: CoeffRingSpec, cap: int) -> FormalGroupLaw:
    """A height-2 deformation over Z/p^N[u1]/(u1^D).

    Logarithm solved from l(x) = x + (u1/p) l~(x^p) + (1/p) l~~(x^(p^2)),
    where ~ twists coefficients by u1 -> u1^p; the twist is what makes the
    functional-equation lemma apply, so the resulting law is p-integral.
    Reducing mod (p, u1) recovers the height-2 Honda law.
    """
    if spec.deformation_params != 1:
        raise SpecMismatch("height-2 law needs exactly one deformation parameter")
    if cap <= spec.p ** 2:
        raise TruncationTooSmall(f"cap must exceed p^2 = {spec.p ** 2}")
    p = spec.p
    width = spec.u_degree_cap
    u = _QU.u(width)
    inv_p = Fraction(1, p)
    log_coeffs: dict[int, _QU] = {1: _QU.const(width, Fraction(1))}
    k = p
    while k < cap:
        prev = log_coeffs.get(k // p, _QU.zero(width))
        prev2 = log_coeffs.get(k // (p * p), _QU.zero(width)) if k % (p * p) == 0 \
            else _QU.zero(width)
        log_coeffs[k] = (u * prev.frobenius_twist(p)
                         + prev2.frobenius_twist(p).frobenius_twist(p)).scale(inv_p)
        k *= p
    return _law_from_log(spec, cap, log_coeffs, width, 2, "lubinTate(2)")

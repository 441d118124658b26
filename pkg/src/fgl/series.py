"""Multivariate power series truncated at a total degree cap.

A :class:`TruncSeries` is a finite map from exponent vectors to coefficient
ring elements; every stored exponent vector has total degree < cap. All
arithmetic silently drops terms of total degree >= cap, which makes the
representation a genuine quotient ring of the full power series ring:
identities computed here are exact images of identities over the untruncated
ring. ``cap=None`` disables degree truncation and is used where elements are
honest polynomials (finite algebras, delta-rings).
"""

from __future__ import annotations

from .coeffring import CoeffElem, CoeffRingSpec
from .errors import NotAUnit, SpecMismatch

Expo = tuple[int, ...]


class TruncSeries:
    __slots__ = ("spec", "variables", "cap", "terms")

    def __init__(
        self,
        spec: CoeffRingSpec,
        variables: tuple[str, ...],
        cap: int | None,
        terms: dict[Expo, CoeffElem] | None = None,
        *,
        _clean: bool = False,
    ):
        self.spec = spec
        self.variables = tuple(variables)
        self.cap = cap
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            clean: dict[Expo, CoeffElem] = {}
            for expo, c in terms.items():
                if len(expo) != len(self.variables):
                    raise ValueError(f"exponent {expo} has wrong arity")
                if cap is not None and sum(expo) >= cap:
                    continue
                if not c.is_zero():
                    clean[expo] = c
            self.terms = clean

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, spec, variables, cap) -> "TruncSeries":
        return cls(spec, variables, cap, {}, _clean=True)

    @classmethod
    def constant(cls, spec, variables, cap, value: CoeffElem) -> "TruncSeries":
        zero_expo = (0,) * len(variables)
        if value.is_zero():
            return cls.zero(spec, variables, cap)
        return cls(spec, variables, cap, {zero_expo: value}, _clean=True)

    @classmethod
    def one(cls, spec, variables, cap) -> "TruncSeries":
        return cls.constant(spec, variables, cap, CoeffElem.one(spec))

    @classmethod
    def variable(cls, spec, variables, cap, name: str) -> "TruncSeries":
        i = tuple(variables).index(name)
        expo = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(spec, variables, cap, {expo: CoeffElem.one(spec)}, _clean=True)

    # -- views -----------------------------------------------------------

    def _compat(self, other: "TruncSeries") -> None:
        if self.spec != other.spec:
            raise SpecMismatch("coefficient rings differ")
        if self.variables != other.variables or self.cap != other.cap:
            raise SpecMismatch(
                f"series rings differ: {self.variables}/{self.cap} vs "
                f"{other.variables}/{other.cap}"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> CoeffElem:
        expo = (0,) * len(self.variables)
        return self.terms.get(expo, CoeffElem.zero(self.spec))

    def coefficient(self, expo: Expo) -> CoeffElem:
        return self.terms.get(tuple(expo), CoeffElem.zero(self.spec))

    def coefficient_of_degree(self, degree: int) -> CoeffElem:
        """Univariate only: the coefficient of x^degree."""
        if len(self.variables) != 1:
            raise ValueError("coefficient_of_degree needs a univariate series")
        return self.terms.get((degree,), CoeffElem.zero(self.spec))

    def degree(self) -> int:
        """Total degree of the highest stored term (-1 for zero)."""
        return max((sum(e) for e in self.terms), default=-1)

    def valuation(self) -> int | None:
        """Total degree of the lowest stored term (None for zero)."""
        return min((sum(e) for e in self.terms), default=None)

    def homogeneous_part(self, degree: int) -> "TruncSeries":
        terms = {e: c for e, c in self.terms.items() if sum(e) == degree}
        return TruncSeries(self.spec, self.variables, self.cap, terms, _clean=True)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._compat(other)
        terms = dict(self.terms)
        for expo, c in other.terms.items():
            v = terms.get(expo)
            s = c if v is None else v + c
            if s.is_zero():
                terms.pop(expo, None)
            else:
                terms[expo] = s
        return TruncSeries(self.spec, self.variables, self.cap, terms, _clean=True)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(
            self.spec, self.variables, self.cap,
            {e: -c for e, c in self.terms.items()}, _clean=True,
        )

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._compat(other)
        cap = self.cap
        acc: dict[Expo, CoeffElem] = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if cap is not None and d1 + sum(e2) >= cap:
                    continue
                expo = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                if prod.is_zero():
                    continue
                v = acc.get(expo)
                s = prod if v is None else v + prod
                if s.is_zero():
                    acc.pop(expo, None)
                else:
                    acc[expo] = s
        return TruncSeries(self.spec, self.variables, self.cap, acc, _clean=True)

    def scale(self, value: CoeffElem) -> "TruncSeries":
        terms = {}
        for expo, c in self.terms.items():
            v = c * value
            if not v.is_zero():
                terms[expo] = v
        return TruncSeries(self.spec, self.variables, self.cap, terms, _clean=True)

    def shift_down(self, var_index: int, amount: int) -> "TruncSeries":
        """Divide by x_i^amount, assuming every term is divisible."""
        terms = {}
        for expo, c in self.terms.items():
            if expo[var_index] < amount:
                raise ValueError("series not divisible by the requested power")
            new = list(expo)
            new[var_index] -= amount
            terms[tuple(new)] = c
        return TruncSeries(self.spec, self.variables, self.cap, terms, _clean=True)

    def invert(self) -> "TruncSeries":
        """Inverse of a series whose constant term is a unit.

        Geometric series on the positive-degree part; terminates because
        that part is nilpotent modulo the degree cap.
        """
        if self.cap is None:
            raise NotAUnit("series inversion needs a finite degree cap")
        c0 = self.constant_term()
        c0_inv = c0.invert()  # raises NotAUnit when appropriate
        one = TruncSeries.one(self.spec, self.variables, self.cap)
        w = one - self.scale(c0_inv)
        acc = one
        power = one
        for _ in range(1, self.cap):
            power = power * w
            if power.is_zero():
                break
            acc = acc + power
        return acc.scale(c0_inv)

    # -- substitution -------------------------------------------------------

    def subst(self, images: dict[str, "TruncSeries"]) -> "TruncSeries":
        """Substitute series for variables.

        Every variable of ``self`` must be given an image; the images must
        live in one common series ring, and any image substituted into a
        positive power must have zero constant term whenever a degree cap
        is in force (otherwise truncation would not commute with
        substitution).
        """
        missing = [v for v in self.variables if v not in images]
        if missing:
            raise ValueError(f"no image for variables {missing}")
        model = images[self.variables[0]]
        target_spec = model.spec
        target_vars = model.variables
        target_cap = model.cap

        pow_cache: dict[tuple[str, int], TruncSeries] = {}

        def power(name: str, k: int) -> TruncSeries:
            if k == 0:
                return TruncSeries.one(target_spec, target_vars, target_cap)
            got = pow_cache.get((name, k))
            if got is None:
                got = power(name, k - 1) * images[name]
                pow_cache[(name, k)] = got
            return got

        out = TruncSeries.zero(target_spec, target_vars, target_cap)
        for expo, c in sorted(self.terms.items()):
            term = TruncSeries.constant(target_spec, target_vars, target_cap, c)
            for name, k in zip(self.variables, expo):
                if k:
                    term = term * power(name, k)
            out = out + term
        return out

    def rename(self, variables: tuple[str, ...], cap: int | None = None) -> "TruncSeries":
        """Reinterpret in a (possibly larger) variable list, by name."""
        variables = tuple(variables)
        idx = [variables.index(v) for v in self.variables]
        new_cap = self.cap if cap is None else cap
        terms: dict[Expo, CoeffElem] = {}
        for expo, c in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(idx, expo):
                new[pos] = e
            terms[tuple(new)] = c
        return TruncSeries(self.spec, variables, new_cap, terms)

    # -- comparisons / display ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.variables == other.variables
            and self.cap == other.cap
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.variables, self.cap, tuple(sorted(self.terms))))

    def sorted_terms(self) -> list[tuple[Expo, CoeffElem]]:
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        bits = []
        for expo, c in self.sorted_terms():
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.variables, expo)
                if e
            )
            cs = repr(c)
            if "+" in cs:
                cs = f"({cs})"
            bits.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(bits)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "cap": self.cap,
            "terms": [
                {"exps": list(expo), "coeff": c.to_json()} for expo, c in self.sorted_terms()
            ],
        }

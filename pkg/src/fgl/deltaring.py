"""Delta-rings: Frobenius lifts on torsion-free polynomial rings.

A ring here is Z[g_1..g_k] (exact integer coefficients, so p-torsion free)
together with a ring endomorphism psi given on generators and required to
satisfy psi(g) = g^p mod p. The derived operation

    delta(a) = (psi(a) - a^p) / p

is then well defined with exact integer division, and the usual sum and
product rules for delta are theorems, checked here on random samples rather
than assumed.

The sheaf evaluation realizes, for a base ring S and a Frobenius power r,
the completed tensor A (x) S with the map psi^r (x) Id_S; composing two
evaluations multiplies the Frobenius powers, which is the functoriality this
module exists to exhibit.
"""

from __future__ import annotations

import ast
import random
from dataclasses import dataclass

from .coeffring import CoeffElem, CoeffRingSpec
from .errors import NotAFrobeniusLift, TruncationTooSmall
from .grouprings import FiniteAlgebra
from .series import TruncSeries


class DeltaRing:
    """Z[generators] with a Frobenius lift psi."""

    def __init__(self, generators: tuple[str, ...], psi_images: dict[str, TruncSeries], p: int):
        self.p = p
        self.spec = CoeffRingSpec(p=p, p_precision=None)
        self.generators = tuple(generators)
        self.psi_images = {}
        for g in self.generators:
            img = psi_images[g]
            if img.variables != self.generators:
                img = img.rename(self.generators, cap=None)
            self.psi_images[g] = img
        for g in self.generators:
            gen = self.var(g)
            defect = self.psi_images[g] - _power(gen, p)
            if not _all_divisible(defect, p):
                raise NotAFrobeniusLift(
                    f"psi({g}) is not congruent to {g}^{p} mod {p}"
                )

    # -- element constructors -------------------------------------------

    def var(self, name: str) -> TruncSeries:
        return TruncSeries.variable(self.spec, self.generators, None, name)

    def constant(self, value: int) -> TruncSeries:
        return TruncSeries.constant(
            self.spec, self.generators, None, CoeffElem.from_int(self.spec, value)
        )

    def random_element(self, rng: random.Random, max_degree: int = 3,
                       max_terms: int = 4, coeff_bound: int = 9) -> TruncSeries:
        terms = {}
        k = len(self.generators)
        for _ in range(rng.randrange(1, max_terms + 1)):
            expo = tuple(rng.randrange(0, max_degree + 1) for _ in range(k))
            terms[expo] = CoeffElem.from_int(self.spec, rng.randrange(-coeff_bound, coeff_bound + 1))
        return TruncSeries(self.spec, self.generators, None, terms)

    # -- operations ---------------------------------------------------------

    def psi(self, a: TruncSeries) -> TruncSeries:
        if not self.generators:
            return a  # psi is the identity on Z
        return a.subst(self.psi_images)

    def psi_power(self, a: TruncSeries, r: int) -> TruncSeries:
        out = a
        for _ in range(r):
            out = self.psi(out)
        return out

    def delta(self, a: TruncSeries) -> TruncSeries:
        diff = self.psi(a) - _power(a, self.p)
        return _divide_terms_by_p(diff)

    def check_axioms(self, sample_pairs: list[tuple[TruncSeries, TruncSeries]]) -> dict:
        """Verify the delta-ring laws on the given pairs; returns a report."""
        p = self.p
        failures = []
        if not self.delta(self.constant(1)).is_zero():
            failures.append("delta(1) != 0")
        for i, (a, b) in enumerate(sample_pairs):
            da, db = self.delta(a), self.delta(b)
            prod_rule = self.delta(a * b) == \
                da * _power(b, p) + _power(a, p) * db + (da * db).scale(
                    CoeffElem.from_int(self.spec, p))
            binom = _divide_terms_by_p(_power(a, p) + _power(b, p) - _power(a + b, p))
            sum_rule = self.delta(a + b) == da + db + binom
            hom_add = self.psi(a + b) == self.psi(a) + self.psi(b)
            hom_mul = self.psi(a * b) == self.psi(a) * self.psi(b)
            lift = _all_divisible(self.psi(a) - _power(a, p), p)
            for name, ok in (("product rule", prod_rule), ("sum rule", sum_rule),
                             ("psi additive", hom_add), ("psi multiplicative", hom_mul),
                             ("frobenius lift", lift)):
                if not ok:
                    failures.append(f"pair {i}: {name}")
        return {"passed": not failures, "checked": len(sample_pairs), "failures": failures}

    def __repr__(self) -> str:
        gens = ",".join(self.generators) or ""
        return f"DeltaRing(Z[{gens}], p={self.p})"


def _power(a: TruncSeries, n: int) -> TruncSeries:
    out = TruncSeries.one(a.spec, a.variables, a.cap)
    for _ in range(n):
        out = out * a
    return out


def _all_divisible(a: TruncSeries, p: int) -> bool:
    return all(c % p == 0 for elem in a.terms.values() for c in elem.terms.values())


def _divide_terms_by_p(a: TruncSeries) -> TruncSeries:
    terms = {expo: c.exact_divide_by_p() for expo, c in a.terms.items()}
    return TruncSeries(a.spec, a.variables, a.cap, terms)


def parse_delta_ring(text: str, default_p: int | None = None) -> DeltaRing:
    """Parse e.g. "Z[t]; psi t -> t^2; p 2" or "Z; psi id" with default_p.

    The polynomial expressions allow integers, generators, + - * and ^.
    """
    parts = [part.strip() for part in text.split(";") if part.strip()]
    if not parts or not parts[0].startswith("Z"):
        raise ValueError("ring description must start with Z or Z[gens]")
    head = parts[0]
    if "[" in head:
        inner = head[head.index("[") + 1: head.rindex("]")]
        generators = tuple(g.strip() for g in inner.split(",") if g.strip())
    else:
        generators = ()
    p = default_p
    images_text: dict[str, str] = {}
    for part in parts[1:]:
        if part.startswith("p "):
            p = int(part[2:])
        elif part.startswith("psi"):
            body = part[3:].strip()
            if body == "id" or not body:
                continue
            lhs, rhs = body.split("->")
            images_text[lhs.strip()] = rhs.strip()
    if p is None:
        raise ValueError("missing 'p <prime>' clause (or pass --p)")
    spec = CoeffRingSpec(p=p, p_precision=None)
    images = {}
    for g in generators:
        if g in images_text:
            images[g] = _parse_poly(images_text[g], generators, spec)
        else:
            images[g] = TruncSeries.variable(spec, generators, None, g)
    return DeltaRing(generators, images, p)


def _parse_poly(text: str, generators: tuple[str, ...], spec: CoeffRingSpec) -> TruncSeries:
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node) -> TruncSeries:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant):
                    raise ValueError("exponent must be a literal integer")
                return _power(left, int(node.right.value))
            raise ValueError(f"unsupported operator {node.op}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.Constant):
            return TruncSeries.constant(
                spec, generators, None, CoeffElem.from_int(spec, int(node.value)))
        if isinstance(node, ast.Name):
            if node.id not in generators:
                raise ValueError(f"unknown generator {node.id}")
            return TruncSeries.variable(spec, generators, None, node.id)
        raise ValueError(f"unsupported syntax {ast.dump(node)}")

    return ev(tree)


# -- sheaf evaluation ------------------------------------------------------------


@dataclass
class SheafValue:
    """A (x) S with the map psi^r (x) Id_S, given by generator images."""

    ring: DeltaRing
    base: object  # FiniteAlgebra or CoeffRingSpec
    frobenius_power: int
    degree_bound: int | None
    generator_images: dict[str, TruncSeries]

    def base_rank(self) -> int:
        return self.base.rank if isinstance(self.base, FiniteAlgebra) else 1

    def tensor_basis_size(self) -> int | None:
        if self.degree_bound is None:
            return None
        k = len(self.ring.generators)
        monos = _count_monomials(k, self.degree_bound)
        return monos * self.base_rank()

    def apply_to_generator(self, g: str) -> TruncSeries:
        return self.generator_images[g]

    def compose(self, other: "SheafValue") -> "SheafValue":
        """self after other: Frobenius powers add."""
        images = {g: self.ring.psi_power(img, self.frobenius_power)
                  for g, img in other.generator_images.items()}
        return SheafValue(
            ring=self.ring, base=self.base,
            frobenius_power=self.frobenius_power + other.frobenius_power,
            degree_bound=self.degree_bound, generator_images=images,
        )


def _count_monomials(k: int, bound: int) -> int:
    if k == 0:
        return 1
    total = 0
    from math import comb
    for d in range(bound + 1):
        total += comb(d + k - 1, k - 1)
    return total


def sheaf_eval(ring: DeltaRing, base, r: int, degree_bound: int | None = None) -> SheafValue:
    """Evaluate the deformation sheaf of ``ring`` on (base, Frob^r)."""
    if r < 0:
        raise ValueError("Frobenius power must be >= 0")
    images = {}
    for g in ring.generators:
        img = ring.psi_power(ring.var(g), r)
        if degree_bound is not None and img.degree() > degree_bound:
            raise TruncationTooSmall(
                f"psi^{r}({g}) has degree {img.degree()} > bound {degree_bound}"
            )
        images[g] = img
    return SheafValue(ring=ring, base=base, frobenius_power=r,
                      degree_bound=degree_bound, generator_images=images)


def congruence_check(ring: DeltaRing, base_spec: CoeffRingSpec,
                     samples: list[TruncSeries], r: int = 1) -> dict:
    """Over a characteristic-p base, psi^r (x) Id must equal a -> a^(p^r).

    Realized on elementary tensors: for every sample a and every base element
    s, psi^r(a) (x) s = a^(p^r) (x) s because the coefficientwise difference
    is divisible by p and pS = 0.
    """
    if base_spec.exact or base_spec.p_precision != 1:
        raise ValueError("congruence check needs a characteristic-p base")
    p = ring.p
    failures = []
    for i, a in enumerate(samples):
        lhs = ring.psi_power(a, r)
        rhs = _power(a, p ** r)
        diff = lhs - rhs
        # a (x) s mod p only sees coefficients mod p, uniformly in s
        for expo, c in diff.terms.items():
            if any(v % p for v in c.terms.values()):
                failures.append(f"sample {i} at monomial {expo}")
                break
    return {"passed": not failures, "checked": len(samples),
            "frobenius_power": r, "failures": failures}


def frobenius_chain_check(ring: DeltaRing, order_exponent: int,
                          chains: dict[str, int] | list) -> dict:
    """Every index-p chain from the trivial group assigns psi^m, m = order exp.

    A chain is a sequence of index-p steps; each step contributes one psi.
    The composite is evaluated by honest map composition on generators and
    compared against the directly constructed psi^m.
    """
    if isinstance(chains, dict):
        chain_items = list(chains.items())
    else:
        chain_items = [(f"chain{i}", c) for i, c in enumerate(chains)]
    expected = {g: ring.psi_power(ring.var(g), order_exponent)
                for g in ring.generators}
    failures = []
    results = {}
    for name, chain in chain_items:
        steps = chain if isinstance(chain, int) else len(chain)
        if steps != order_exponent:
            failures.append(f"{name}: {steps} steps for order exponent {order_exponent}")
            results[name] = False
            continue
        images = {g: ring.var(g) for g in ring.generators}
        for _ in range(steps):
            images = {g: ring.psi(img) for g, img in images.items()}
        ok = all(images[g] == expected[g] for g in ring.generators)
        results[name] = ok
        if not ok:
            failures.append(f"{name}: composite differs from psi^{order_exponent}")
    return {"passed": not failures, "chains": results, "failures": failures}


def cyclic_chains(exponent: int) -> dict[str, list[str]]:
    """The unique maximal subgroup chain of C_{p^exponent}."""
    chain = [f"C^{i - 1} < C^{i}" for i in range(1, exponent + 1)]
    return {f"cyclic({exponent})": chain}


def elementary_rank2_chains(p: int) -> dict[str, list[str]]:
    """All maximal chains of C_p x C_p: one per order-p subgroup (p + 1)."""
    out = {}
    lines = [f"span(0,1)"] + [f"span(1,{a})" for a in range(p)]
    for line in lines:
        out[f"via {line}"] = [f"1 < {line}", f"{line} < full"]
    return out

from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import FrozenSet, Iterable, List, Sequence, Tuple
import logging

from django.conf import settings
from sympy.polys.domains import GF
from sympy.polys.groebnertools import groebner
from sympy.polys.orderings import grevlex, grlex, lex
from sympy.polys.rings import PolyElement, PolyRing

from core.errors import InvalidParameter, SpecMismatch, UnsupportedRing
from rings.dataclasses import RingKind, RingSpec, RingTowerElement

logger = logging.getLogger(__name__)

ORDERS = {"grevlex": grevlex, "grlex": grlex, "lex": lex}

Monomial = Tuple[int, ...]


#-------- sympy bridge --------

def check_graded(spec: RingSpec):
    if spec.kind != RingKind.GRADED:
        raise UnsupportedRing(f"{spec} is not a graded polynomial ring")
    if not 1 <= spec.q <= settings.MAX_GRADED_VARIABLES:
        raise InvalidParameter(
            f"graded computations need 1 <= q <= {settings.MAX_GRADED_VARIABLES}, got q = {spec.q}"
        )


@lru_cache(maxsize=64)
def _poly_ring(p: int, q: int, order: str) -> PolyRing:
    names = ",".join(f"T{j + 1}" for j in range(q))
    return PolyRing(names, GF(p), ORDERS[order])


def poly_ring(spec: RingSpec, order: str = "grevlex") -> PolyRing:
    """
    sympy's F_p[T_1..T_q] for a graded spec, in the given monomial order.
    """
    check_graded(spec)
    if order not in ORDERS:
        raise InvalidParameter(f"unknown monomial order {order!r}; use one of {sorted(ORDERS)}")
    return _poly_ring(spec.p, spec.q, order)


def to_poly(element: RingTowerElement, ring: PolyRing) -> PolyElement:
    return ring.from_dict({exponent: coefficient for exponent, coefficient in element.coeffs})


def from_poly(polynomial: PolyElement, spec: RingSpec) -> RingTowerElement:
    return RingTowerElement.from_terms(spec, [(monom, int(c) % spec.p) for monom, c in polynomial.terms()])


#-------- Ideals --------

def groebner_basis(generators: Sequence[RingTowerElement], spec: RingSpec, order: str = "grevlex") -> List[RingTowerElement]:
    """
    Reduced Groebner basis of the ideal generated by the given polynomials,
    monic and sorted by leading monomial (largest first). Empty input gives
    the empty basis.
    """
    ring = poly_ring(spec, order)
    for element in generators:
        if element.spec != spec:
            raise SpecMismatch(f"generator over {element.spec}, expected {spec}")
    basis = ideal_basis([to_poly(element, ring) for element in generators], ring)
    return [from_poly(g, spec) for g in basis]


def ideal_basis(polynomials: Iterable[PolyElement], ring: PolyRing) -> List[PolyElement]:
    polynomials = [f for f in polynomials if f]
    if not polynomials:
        return []
    basis = groebner(polynomials, ring)
    basis.sort(key=lambda g: ring.order(g.LM), reverse=True)
    logger.debug("Groebner basis of %d polynomials has %d elements", len(polynomials), len(basis))
    return basis


def is_unit_ideal(basis: Sequence[PolyElement]) -> bool:
    return any(g.is_ground and g for g in basis)


def same_ideal(first: Sequence[PolyElement], second: Sequence[PolyElement]) -> bool:
    """
    Compares reduced Groebner bases, which are unique for the ring's order.
    """
    return sorted(g.terms() for g in first) == sorted(g.terms() for g in second)


def minimal_variable_cover(monomials: Sequence[Monomial], q: int) -> int:
    """
    Size of the smallest set of variables meeting the support of every monomial.
    """
    supports = [frozenset(j for j, a in enumerate(monom) if a) for monom in monomials]
    for size in range(q + 1):
        for subset in combinations(range(q), size):
            chosen = set(subset)
            if all(support & chosen for support in supports):
                return size
    return q


def quotient_dimension(basis: Sequence[PolyElement], q: int) -> int:
    """
    Krull dimension of R/I from a Groebner basis of I; -1 for the unit ideal.
    """
    if is_unit_ideal(basis):
        return -1
    return q - minimal_variable_cover([g.LM for g in basis], q)


def monomials_of_degree(q: int, degree: int) -> List[Monomial]:
    if degree < 0:
        return []
    result = []
    for choice in combinations_with_replacement(range(q), degree):
        exponent = [0] * q
        for j in choice:
            exponent[j] += 1
        result.append(tuple(exponent))
    return result


#-------- Monomial oracle --------

def monomial_minimal_primes(generators: Sequence[Monomial], q: int) -> List[FrozenSet[int]]:
    """
    Minimal primes of a monomial ideal by exhaustive search: the inclusion
    minimal sets of variables meeting every generator's support. The zero
    ideal gives [frozenset()], the unit ideal gives [].
    """
    supports = [frozenset(j for j, a in enumerate(monom) if a) for monom in generators]
    if any(not support for support in supports):
        return []
    covers = []
    for size in range(q + 1):
        for subset in combinations(range(q), size):
            chosen = frozenset(subset)
            if all(support & chosen for support in supports) and not any(cover <= chosen for cover in covers):
                covers.append(chosen)
    return covers

from typing import Dict, List, Optional, Sequence, Tuple
import logging

from sympy.polys.monomials import monomial_divides
from sympy.polys.rings import PolyElement, PolyRing

from complexes.dataclasses import FreeComplex
from core.errors import NotHomogeneous
from graded.dataclasses import GradedModule
from graded.groebner import ModuleBasis, Vector, minimal_generators, syzygy_projection, unit_vector
from graded.polynomials import (
    from_poly, ideal_basis, is_unit_ideal, monomials_of_degree, poly_ring, quotient_dimension,
    same_ideal, to_poly,
)
from rings.dataclasses import RingSpec

logger = logging.getLogger(__name__)

Ideal = List[PolyElement]


#-------- Presentations --------

def relation_vectors(M: GradedModule) -> List[Vector]:
    ring = poly_ring(M.spec)
    return M.cached("relation_vectors", lambda: [
        tuple(to_poly(entry, ring) for entry in relation) for relation in M.relations if any(relation)
    ])


def relation_basis(M: GradedModule) -> ModuleBasis:
    return M.cached("relation_basis", lambda: ModuleBasis(poly_ring(M.spec), M.rank, relation_vectors(M)))


def module_from_vectors(spec: RingSpec, degrees: Sequence[int], vectors: Sequence[Vector]) -> GradedModule:
    return GradedModule(
        spec, tuple(degrees), tuple(tuple(from_poly(f, spec) for f in vector) for vector in vectors if any(vector)),
    )


def is_zero_module(M: GradedModule) -> bool:
    leads = relation_basis(M).leading_monomials()
    unit = (0,) * M.spec.q
    return all(unit in leads[pos] for pos in range(M.rank))


def hilbert_function(M: GradedModule, degree: int) -> int:
    """
    dim_k M_t, counted as standard monomials of the initial module.
    """
    leads = relation_basis(M).leading_monomials()
    count = 0
    for pos, shift in enumerate(M.generator_degrees):
        for monom in monomials_of_degree(M.spec.q, degree - shift):
            if not any(monomial_divides(lead, monom) for lead in leads[pos]):
                count += 1
    return count


def hilbert_window(M: GradedModule, start: int, length: int) -> Dict[int, int]:
    return {t: hilbert_function(M, t) for t in range(start, start + length + 1)}


def krull_dimension(M: GradedModule) -> int:
    """
    max over generator positions of dim R/J_i, J_i the initial ideal at
    position i; -1 for the zero module.
    """
    ring = poly_ring(M.spec)
    leads = relation_basis(M).leading_monomials()
    dimension = -1
    for pos in range(M.rank):
        basis = [ring.from_dict({monom: 1}) for monom in leads[pos]]
        dimension = max(dimension, quotient_dimension(basis, M.spec.q))
    return dimension


def standard_basis(M: GradedModule, degree: int) -> List[Tuple[int, tuple]]:
    """
    (position, monomial) pairs spanning M_t over F_p, in a fixed order.
    """
    leads = relation_basis(M).leading_monomials()
    result = []
    for pos, shift in enumerate(M.generator_degrees):
        for monom in monomials_of_degree(M.spec.q, degree - shift):
            if not any(monomial_divides(lead, monom) for lead in leads[pos]):
                result.append((pos, monom))
    return result


#-------- Ideals --------

def ideal_colon(ring: PolyRing, ideal: Ideal, element: PolyElement) -> Ideal:
    """
    I : f = {c : c f in I}.
    """
    if not element:
        return [ring.one]
    found = syzygy_projection(ring, [(element,)], [(g,) for g in ideal if g], 1)
    return ideal_basis([vector[0] for vector in found], ring)


def ideal_intersection(ring: PolyRing, first: Ideal, second: Ideal) -> Ideal:
    """
    I ∩ J as {c : c (1, 1) in I ⊕ J}.
    """
    ambient = [(f, ring.zero) for f in first if f] + [(ring.zero, g) for g in second if g]
    found = syzygy_projection(ring, [(ring.one, ring.one)], ambient, 2)
    return ideal_basis([vector[0] for vector in found], ring)


def ideal_quotient(ring: PolyRing, ideal: Ideal, other: Ideal) -> Ideal:
    result: Optional[Ideal] = None
    for g in other:
        colon = ideal_colon(ring, ideal, g)
        result = colon if result is None else ideal_intersection(ring, result, colon)
    return result if result is not None else [ring.one]


def saturation(ring: PolyRing, ideal: Ideal, other: Ideal) -> Ideal:
    """
    I : J^∞, iterating I : J until the ideal stabilizes.
    """
    current = ideal_basis(ideal, ring)
    if is_unit_ideal(ideal_basis(other, ring)):
        return current
    while True:
        following = ideal_quotient(ring, current, other)
        if same_ideal(following, current):
            return current
        current = following


def ideal_sum(ring: PolyRing, first: Ideal, second: Ideal) -> Ideal:
    return ideal_basis(list(first) + list(second), ring)


def annihilator(M: GradedModule) -> Ideal:
    """
    Ann M = intersection over generators e_i of (N : e_i).
    """
    def compute():
        ring = poly_ring(M.spec)
        relations = relation_vectors(M)
        result: Optional[Ideal] = None
        for i in range(M.rank):
            found = syzygy_projection(ring, [unit_vector(ring, M.rank, i)], relations, M.rank)
            colon = ideal_basis([vector[0] for vector in found], ring)
            result = colon if result is None else ideal_intersection(ring, result, colon)
        return result if result is not None else [ring.one]
    return M.cached("annihilator", compute)


#-------- Graded complexes --------

def complex_degrees(C: FreeComplex) -> List[Tuple[int, ...]]:
    """
    Basis degrees making every differential degree preserving:
    deg d^i[a][b] = deg e_a - deg f_b. Each linked group of basis vectors is
    anchored at 0 on its first vector in the lowest degree.
    """
    nodes = [(i, a) for i in C.degrees() for a in range(C.rank(i))]
    edges: Dict[Tuple[int, int], List[Tuple[Tuple[int, int], int]]] = {node: [] for node in nodes}
    for i in C.degrees():
        delta = C.differential(i)
        for a in range(delta.rows):
            for b in range(delta.cols):
                entry = delta.entry(a, b)
                if not entry:
                    continue
                if not entry.is_homogeneous():
                    raise NotHomogeneous(f"d^{i}[{a}][{b}] = {entry} is not homogeneous")
                edges[(i, a)].append(((i + 1, b), -entry.degree()))
                edges[(i + 1, b)].append(((i, a), entry.degree()))
    degrees: Dict[Tuple[int, int], int] = {}
    for start in nodes:
        if start in degrees:
            continue
        degrees[start] = 0
        stack = [start]
        while stack:
            node = stack.pop()
            for other, offset in edges[node]:
                if other not in degrees:
                    degrees[other] = degrees[node] + offset
                    stack.append(other)
                elif degrees[other] != degrees[node] + offset:
                    raise NotHomogeneous(f"no grading makes {C} degree preserving")
    return [tuple(degrees[(i, a)] for a in range(C.rank(i))) for i in C.degrees()]


def dual_degrees(degrees: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    return [tuple(-d for d in terms) for terms in reversed(degrees)]


def differential_rows(C: FreeComplex, i: int, ring: PolyRing) -> List[Vector]:
    delta = C.differential(i)
    return [tuple(to_poly(entry, ring) for entry in delta.row(a)) for a in range(delta.rows)]


def graded_cohomology(C: FreeComplex, j: int, degrees: Optional[Sequence[Sequence[int]]] = None) -> GradedModule:
    """
    H^j of a graded free complex: minimal generators K of ker d^j, presented
    by {c : c K in im d^(j-1)}.
    """
    ring = poly_ring(C.spec)
    if degrees is None:
        degrees = complex_degrees(C)
    rank = C.rank(j)
    if rank == 0:
        return GradedModule.free(C.spec, ())
    position_degrees = degrees[j - C.lo]
    outgoing = differential_rows(C, j, ring)
    if C.rank(j + 1) == 0:
        cocycles = [unit_vector(ring, rank, a) for a in range(rank)]
    else:
        cocycles = syzygy_projection(ring, outgoing, [], C.rank(j + 1))
    generators = minimal_generators(ring, cocycles, position_degrees)
    boundaries = [row for row in differential_rows(C, j - 1, ring) if any(row)] if C.rank(j - 1) else []
    relations = syzygy_projection(ring, [vector for vector, _ in generators], boundaries, rank)
    logger.debug("H^%d: %d generators, %d relations", j, len(generators), len(relations))
    return module_from_vectors(C.spec, [degree for _, degree in generators], relations)

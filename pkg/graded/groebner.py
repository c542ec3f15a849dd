from heapq import heappop, heappush
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple
import logging

from sympy.polys.monomials import monomial_div, monomial_divides, monomial_lcm
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, PolyRing

from core.errors import NotHomogeneous

logger = logging.getLogger(__name__)

# A vector of the free module R^rank, one polynomial per position
Vector = Tuple[PolyElement, ...]


class Lead(NamedTuple):
    vector: Vector
    pos: int
    monom: Tuple[int, ...]
    coeff: object


class ModuleOrder:
    """
    Term-over-position order on R^rank (grevlex, ties broken towards lower
    positions). With split > 0 the positions below split form a block that
    dominates every other position, which eliminates it.
    """

    def __init__(self, split: int = 0):
        self.split = split

    def key(self, pos: int, monom) -> tuple:
        return (0 if pos < self.split else -1, grevlex(monom), -pos)


def zero_vector(ring: PolyRing, rank: int) -> Vector:
    return (ring.zero,) * rank


def unit_vector(ring: PolyRing, rank: int, index: int) -> Vector:
    return tuple(ring.one if k == index else ring.zero for k in range(rank))


def is_zero_vector(vector: Vector) -> bool:
    return not any(vector)


def leading_term(vector: Vector, order: ModuleOrder) -> Optional[Tuple[int, tuple, object]]:
    best = None
    for pos, f in enumerate(vector):
        if f:
            monom = f.LM
            key = order.key(pos, monom)
            if best is None or key > best[0]:
                best = (key, pos, monom, f.LC)
    return best[1:] if best else None


def _subtract_multiple(vector: Vector, coeff, monom, other: Vector) -> Vector:
    return tuple(f - g.mul_term((monom, coeff)) if g else f for f, g in zip(vector, other))


def _s_vector(ring: PolyRing, first: Lead, second: Lead) -> Vector:
    lcm = monomial_lcm(first.monom, second.monom)
    domain = ring.domain
    a = (monomial_div(lcm, first.monom), domain.quo(domain.one, first.coeff))
    b = (monomial_div(lcm, second.monom), domain.quo(domain.one, second.coeff))
    return tuple(f.mul_term(a) - g.mul_term(b) for f, g in zip(first.vector, second.vector))


class ModuleBasis:
    """
    Reduced Groebner basis of a submodule of R^rank, by Buchberger's
    algorithm with the normal selection strategy.
    """

    def __init__(self, ring: PolyRing, rank: int, vectors: Sequence[Vector] = (), split: int = 0):
        self.ring = ring
        self.rank = rank
        self.order = ModuleOrder(split)
        self.leads: List[Lead] = []
        self._complete([tuple(v) for v in vectors])

    @property
    def vectors(self) -> List[Vector]:
        return [lead.vector for lead in self.leads]

    def _lead(self, vector: Vector) -> Lead:
        pos, monom, coeff = leading_term(vector, self.order)
        return Lead(vector, pos, monom, coeff)

    def _reduce_against(self, vector: Vector, basis: Sequence[Lead]) -> Vector:
        domain = self.ring.domain
        remainder = list(zero_vector(self.ring, self.rank))
        vector = tuple(vector)
        while True:
            lt = leading_term(vector, self.order)
            if lt is None:
                return tuple(remainder)
            pos, monom, coeff = lt
            for lead in basis:
                if lead.pos == pos and monomial_divides(lead.monom, monom):
                    factor = monomial_div(monom, lead.monom)
                    vector = _subtract_multiple(vector, domain.quo(coeff, lead.coeff), factor, lead.vector)
                    break
            else:
                term = self.ring.from_dict({monom: coeff})
                remainder[pos] += term
                vector = vector[:pos] + (vector[pos] - term,) + vector[pos + 1:]

    def reduce(self, vector: Vector) -> Vector:
        """
        Full normal form; zero exactly on members of the submodule.
        """
        return self._reduce_against(tuple(vector), self.leads)

    def contains(self, vector: Vector) -> bool:
        return is_zero_vector(self.reduce(vector))

    def _complete(self, vectors: List[Vector]):
        basis: List[Lead] = []
        pairs: List[tuple] = []

        def add(vector: Vector):
            lead = self._lead(vector)
            index = len(basis)
            for other_index, other in enumerate(basis):
                if other.pos == lead.pos:
                    lcm = monomial_lcm(other.monom, lead.monom)
                    heappush(pairs, (sum(lcm), other_index, index))
            basis.append(lead)

        for vector in vectors:
            vector = self._reduce_against(vector, basis)
            if not is_zero_vector(vector):
                add(vector)
        pair_count = 0
        while pairs:
            _, i, j = heappop(pairs)
            pair_count += 1
            remainder = self._reduce_against(_s_vector(self.ring, basis[i], basis[j]), basis)
            if not is_zero_vector(remainder):
                add(remainder)
        self.leads = self._interreduce(basis)
        logger.debug("module Groebner basis in rank %d: %d pairs, %d elements", self.rank, pair_count, len(self.leads))

    def _interreduce(self, basis: List[Lead]) -> List[Lead]:
        minimal: List[Lead] = []
        for lead in sorted(basis, key=lambda g: self.order.key(g.pos, g.monom)):
            if not any(other.pos == lead.pos and monomial_divides(other.monom, lead.monom) for other in minimal):
                minimal.append(lead)
        domain = self.ring.domain
        reduced = []
        for lead in minimal:
            others = [other for other in minimal if other is not lead]
            vector = self._reduce_against(lead.vector, others)
            scale = domain.quo(domain.one, lead.coeff)
            reduced.append(self._lead(tuple(f.mul_ground(scale) for f in vector)))
        reduced.sort(key=lambda g: self.order.key(g.pos, g.monom), reverse=True)
        return reduced

    def leading_monomials(self) -> Dict[int, List[tuple]]:
        """
        Initial module, as the generating monomials at each position.
        """
        by_position: Dict[int, List[tuple]] = {pos: [] for pos in range(self.rank)}
        for lead in self.leads:
            by_position[lead.pos].append(lead.monom)
        return by_position


#-------- Syzygies and generators --------

def syzygy_projection(ring: PolyRing, rows: Sequence[Vector], ambient: Sequence[Vector], width: int) -> List[Vector]:
    """
    Generators of {c in R^len(rows) : sum c_a rows[a] lies in <ambient>},
    where rows and ambient live in R^width. Uses the vectors (row_a | e_a)
    and (ambient_b | 0) and eliminates the first block. With ambient empty
    this is the syzygy module of the rows.
    """
    count = len(rows)
    if count == 0:
        return []
    if width == 0:
        return [unit_vector(ring, count, a) for a in range(count)]
    extended = [tuple(row) + unit_vector(ring, count, a) for a, row in enumerate(rows)]
    extended += [tuple(vector) + zero_vector(ring, count) for vector in ambient]
    basis = ModuleBasis(ring, width + count, extended, split=width)
    return [lead.vector[width:] for lead in basis.leads if lead.pos >= width]


def vector_degree(vector: Vector, position_degrees: Sequence[int]) -> Optional[int]:
    """
    Degree of a homogeneous vector whose basis vector at position i has
    degree position_degrees[i]; None for zero. Raises NotHomogeneous.
    """
    degrees = {
        sum(monom) + position_degrees[pos]
        for pos, f in enumerate(vector) for monom in f.monoms()
    } if any(vector) else set()
    if len(degrees) > 1:
        raise NotHomogeneous(f"vector mixes degrees {sorted(degrees)}")
    return degrees.pop() if degrees else None


def minimal_generators(ring: PolyRing, vectors: Sequence[Vector], position_degrees: Sequence[int]) -> List[Tuple[Vector, int]]:
    """
    A minimal homogeneous generating set of <vectors>: candidates are taken
    by increasing degree and kept when not in the span of those kept before.
    """
    rank = len(position_degrees)
    candidates = []
    for index, vector in enumerate(vectors):
        degree = vector_degree(vector, position_degrees)
        if degree is not None:
            candidates.append((degree, index, tuple(vector)))
    candidates.sort(key=lambda item: (item[0], item[1]))
    kept: List[Tuple[Vector, int]] = []
    basis: Optional[ModuleBasis] = None
    for degree, _, vector in candidates:
        if basis is not None and basis.contains(vector):
            continue
        kept.append((vector, degree))
        basis = ModuleBasis(ring, rank, (basis.vectors if basis else []) + [vector])
    return kept

from itertools import combinations
from typing import Dict, List, Optional, Tuple
import logging

import numpy as np

from complexes.operations import tau_profile
from graded.dataclasses import GradedModule, ModuleInvariants
from graded.groebner import Vector
from graded.modules import (
    annihilator, is_zero_module, krull_dimension, relation_basis, saturation, standard_basis,
)
from graded.polynomials import ideal_basis, poly_ring, quotient_dimension
from graded.resolution import ext_module, minimal_graded_resolution
from linalg.howell import span_exponent_array

logger = logging.getLogger(__name__)


#-------- Koszul homology --------

class KoszulHomology:
    """
    H_k(T_1..T_q; M) degree by degree, as F_p vector spaces built on the
    standard monomials of M.
    """

    def __init__(self, M: GradedModule):
        self.M = M
        self.q = M.spec.q
        self.p = M.spec.p
        self.ring = poly_ring(M.spec)
        self.basis = relation_basis(M)
        self._standard: Dict[int, List[Tuple[int, tuple]]] = {}
        self._index: Dict[int, Dict[Tuple[int, tuple], int]] = {}

    def standard(self, degree: int) -> List[Tuple[int, tuple]]:
        if degree not in self._standard:
            self._standard[degree] = standard_basis(self.M, degree)
            self._index[degree] = {item: k for k, item in enumerate(self._standard[degree])}
        return self._standard[degree]

    def _times_variable(self, pos: int, monom: tuple, j: int) -> Vector:
        shifted = tuple(a + (1 if k == j else 0) for k, a in enumerate(monom))
        vector = tuple(
            self.ring.from_dict({shifted: 1}) if k == pos else self.ring.zero for k in range(self.M.rank)
        )
        return self.basis.reduce(vector)

    def _coordinates(self, vector: Vector, degree: int) -> np.ndarray:
        self.standard(degree)
        index = self._index[degree]
        row = np.zeros(len(index), dtype=np.int64)
        for pos, f in enumerate(vector):
            for monom, c in f.terms():
                row[index[(pos, monom)]] = int(c) % self.p
        return row

    def boundary(self, k: int, t: int) -> np.ndarray:
        """
        d_k : (K_k)_t -> (K_(k-1))_t, with e_S -> sum_u (-1)^u T_(s_u) e_(S - s_u).
        """
        sources = list(combinations(range(self.q), k))
        targets = list(combinations(range(self.q), k - 1))
        target_offsets = {}
        width = len(self.standard(t - k + 1))
        for n, subset in enumerate(targets):
            target_offsets[subset] = n * width
        source_basis = self.standard(t - k)
        array = np.zeros((len(sources) * len(source_basis), len(targets) * width), dtype=np.int64)
        for s, subset in enumerate(sources):
            for b, (pos, monom) in enumerate(source_basis):
                row = s * len(source_basis) + b
                for u, j in enumerate(subset):
                    face = subset[:u] + subset[u + 1:]
                    image = self._coordinates(self._times_variable(pos, monom, j), t - k + 1)
                    offset = target_offsets[face]
                    array[row, offset:offset + width] += (-1) ** u * image
        return np.mod(array, self.p)

    def _rank(self, k: int, t: int) -> int:
        if k < 1 or k > self.q:
            return 0
        array = self.boundary(k, t)
        if array.size == 0:
            return 0
        return span_exponent_array(array, self.p, 1)

    def dimension(self, k: int, t: int) -> int:
        chain_dimension = len(list(combinations(range(self.q), k))) * len(self.standard(t - k))
        return chain_dimension - self._rank(k, t) - self._rank(k + 1, t)


def koszul_depth(M: GradedModule) -> Optional[int]:
    """
    q minus the largest k with H_k(T; M) != 0. The degrees examined are
    bounded by the graded Betti numbers, where Tor_k(k, M) lives.
    """
    if is_zero_module(M):
        return None
    table = minimal_graded_resolution(M).betti
    degrees = [degree for row in table.graded for degree in row]
    low, high = min(M.generator_degrees), max(degrees)
    homology = KoszulHomology(M)
    q = M.spec.q
    for k in range(q, -1, -1):
        for t in range(low + k, high + 1):
            if homology.dimension(k, t):
                logger.debug("H_%d(T; %s) is nonzero in degree %d", k, M, t)
                return q - k
    return q


#-------- Invariants --------

def grade(M: GradedModule) -> Optional[int]:
    if is_zero_module(M):
        return None
    for i in range(M.spec.q + 1):
        if not is_zero_module(ext_module(M, i)):
            return i
    return None


def module_invariants(M: GradedModule) -> ModuleInvariants:
    if is_zero_module(M):
        return ModuleInvariants(dim=-1, depth=None, grade=None, projdim=None, perfect=None, amplitude=None)
    resolution = minimal_graded_resolution(M)
    projdim = resolution.length
    module_grade = grade(M)
    return ModuleInvariants(
        dim=krull_dimension(M),
        depth=koszul_depth(M),
        grade=module_grade,
        projdim=projdim,
        perfect=module_grade == projdim,
        amplitude=tau_profile(resolution.complex).amplitude,
    )


#-------- Support heights --------

def top_component_ideal(M: GradedModule, h: int) -> Optional[List]:
    """
    Ann Ext^h(M, R) saturated by the annihilators of the nonzero lower Ext
    modules. Its height-h components are the height-h minimal primes of
    Supp M. None when Ext^h has no component of dimension q - h.
    """
    q = M.spec.q
    ring = poly_ring(M.spec)
    ext = ext_module(M, h)
    if is_zero_module(ext) or krull_dimension(ext) != q - h:
        return None
    ideal = annihilator(ext)
    for lower in range(h):
        lower_ext = ext_module(M, lower)
        if not is_zero_module(lower_ext):
            ideal = saturation(ring, ideal, annihilator(lower_ext))
    if quotient_dimension(ideal_basis(ideal, ring), q) != q - h:
        return None
    return ideal


def support_height_profile(M: GradedModule) -> Tuple[int, ...]:
    """
    Heights of the minimal primes of Supp M; empty for the zero module.
    """
    def compute():
        if is_zero_module(M):
            return ()
        profile = tuple(h for h in range(M.spec.q + 1) if top_component_ideal(M, h) is not None)
        logger.debug("support heights of %s: %s", M, profile)
        return profile
    return M.cached("height_profile", compute)

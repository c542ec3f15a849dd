from typing import List, Tuple
import logging

from complexes.dataclasses import FreeComplex
from complexes.operations import dual, minimize_with_maps
from core.errors import ComputationError
from graded.dataclasses import GradedModule, GradedResolution
from graded.groebner import Vector, minimal_generators, syzygy_projection
from graded.modules import dual_degrees, graded_cohomology, relation_vectors
from graded.polynomials import from_poly, poly_ring
from linalg.dataclasses import Matrix

logger = logging.getLogger(__name__)


def minimal_graded_resolution(M: GradedModule) -> GradedResolution:
    """
    Minimal generators of the relations, then of their syzygies, and so on;
    Hilbert's syzygy theorem bounds the length by q. Redundant generators of
    the presentation are cancelled afterwards by unit-pivot minimization.
    """
    return M.cached("resolution", lambda: _resolve(M))


def _resolve(M: GradedModule) -> GradedResolution:
    spec = M.spec
    ring = poly_ring(spec)
    term_degrees: List[Tuple[int, ...]] = [M.generator_degrees]
    maps: List[List[Vector]] = []
    current = minimal_generators(ring, relation_vectors(M), M.generator_degrees)
    while current:
        if len(maps) == spec.q:
            raise ComputationError(f"resolution of {M} is longer than q = {spec.q}")
        maps.append([vector for vector, _ in current])
        term_degrees.append(tuple(degree for _, degree in current))
        syzygies = syzygy_projection(ring, maps[-1], [], len(term_degrees[-2]))
        current = minimal_generators(ring, syzygies, term_degrees[-1])
    length = len(maps)
    differentials = tuple(
        Matrix.from_rows(spec, [[from_poly(f, spec) for f in vector] for vector in maps[k - 1]], len(term_degrees[k - 1]))
        for k in range(length, 0, -1)
    )
    ranks = tuple(len(term_degrees[k]) for k in range(length, -1, -1))
    minimization = minimize_with_maps(FreeComplex(spec, -length, ranks, differentials))
    ordered = [term_degrees[k] for k in range(length, -1, -1)]
    kept = [tuple(terms[index] for index in indices) for terms, indices in zip(ordered, minimization.kept)]
    logger.debug("resolved %s: ranks %s", M, [len(terms) for terms in reversed(kept)])
    return GradedResolution(complex=minimization.complex, degrees=tuple(reversed(kept)))


def ext_module(M: GradedModule, i: int) -> GradedModule:
    """
    Ext^i(M, R) as the cohomology of the dualized minimal resolution.
    """
    return M.cached(f"ext{i}", lambda: _ext(M, i))


def _ext(M: GradedModule, i: int) -> GradedModule:
    resolution = minimal_graded_resolution(M)
    dualized = dual(resolution.complex)
    if dualized.rank(i) == 0:
        return GradedModule.free(M.spec, ())
    return graded_cohomology(dualized, i, dual_degrees(list(reversed(resolution.degrees))))

"""
Local answers at the origin for complexes over F_p[T_1..T_q] whose entries
admit no grading.

The complex is homogenized with an extra variable, stored first, so that its
differentials all have the same degree. The origin of F_p[T_1..T_q] becomes
the prime P = (T_1..T_q) of F_p[T_0..T_q], and localizing the homogenized
complex at P computes the original one localized at the origin, up to the
field extension F_p(T_0).
"""
from typing import Tuple
import logging

from django.conf import settings
from sympy.polys.rings import PolyElement, PolyRing

from complexes.dataclasses import FreeComplex
from complexes.operations import make_complex
from core.errors import InvalidParameter, NotHomogeneous
from graded.dataclasses import GradedModule, ModuleInvariants
from graded.invariants import module_invariants, top_component_ideal
from graded.modules import Ideal, annihilator, graded_cohomology, is_zero_module, saturation
from graded.polynomials import check_graded, ideal_basis, is_unit_ideal, poly_ring, quotient_dimension
from graded.resolution import ext_module
from rings.arithmetic import graded_ring
from rings.dataclasses import RingTowerElement

logger = logging.getLogger(__name__)


def homogenize(C: FreeComplex) -> FreeComplex:
    """
    Every entry f becomes T_0^D f(T / T_0), with D the largest entry degree
    (at least 1). All entries share the degree D, so d∘d = 0 survives.
    """
    check_graded(C.spec)
    if C.spec.q + 1 > settings.MAX_GRADED_VARIABLES:
        raise InvalidParameter(
            f"homogenizing needs q + 1 <= {settings.MAX_GRADED_VARIABLES} variables, got q = {C.spec.q}",
        )
    spec = graded_ring(C.spec.p, C.spec.q + 1)
    top = max((entry.degree() for matrix in C.differentials for row in matrix.entries for entry in row), default=0)
    top = max(top, 1)

    def lift(entry: RingTowerElement) -> RingTowerElement:
        return RingTowerElement.from_terms(spec, [
            ((top - sum(exponent),) + tuple(exponent), coefficient) for exponent, coefficient in entry.coeffs
        ])

    logger.debug("homogenizing %s in degree %d", C, top)
    return make_complex(spec, C.lo, [matrix.apply(lift, spec) for matrix in C.differentials], C.ranks)


def off_origin(polynomial: PolyElement) -> bool:
    """
    True when the polynomial is outside P, i.e. has a term in T_0 alone.
    """
    return any(not any(monom[1:]) for monom in polynomial.monoms())


def local_dimension(ring: PolyRing, ideal: Ideal) -> int:
    """
    dim (A/I)_P for a homogeneous ideal I of A = F_p[T_0..T_q]; -1 when I is
    not contained in P.

    Dehomogenizing gives an ideal at the origin of F_p[T_1..T_q]. Its tangent
    cone is the flat limit of the scaled family f(s T) with s = T_0: saturate
    by T_0, then set T_0 = 0.
    """
    q = ring.ngens - 1
    scaled = []
    for g in ideal:
        terms = {}
        for monom, c in g.terms():
            key = (sum(monom[1:]),) + tuple(monom[1:])
            terms[key] = terms.get(key, 0) + c
        scaled.append(ring.from_dict(terms))
    family = saturation(ring, ideal_basis(scaled, ring), [ring.gens[0]])
    cone = ideal_basis([
        ring.from_dict({monom: c for monom, c in g.terms() if monom[0] == 0}) for g in family
    ], ring)
    if is_unit_ideal(cone):
        return -1
    # T_0 is free in the cone
    return quotient_dimension(cone, q + 1) - 1


def vanishes_locally(M: GradedModule) -> bool:
    return any(off_origin(g) for g in annihilator(M))


def local_support_heights(M: GradedModule) -> Tuple[int, ...]:
    """
    Heights of the minimal primes of Supp M inside P, for M over the
    homogenized ring.
    """
    def compute():
        if vanishes_locally(M):
            return ()
        q = M.spec.q - 1
        ring = poly_ring(M.spec)
        heights = []
        for h in range(q + 1):
            ideal = top_component_ideal(M, h)
            if ideal is not None and local_dimension(ring, ideal) == q - h:
                heights.append(h)
        logger.debug("local support heights of %s: %s", M, heights)
        return tuple(heights)
    return M.cached("local_height_profile", compute)


def local_invariants(M: GradedModule) -> ModuleInvariants:
    """
    Invariants of M_P over the regular local ring A_P of dimension q, read
    off the Ext modules that survive at P. Auslander-Buchsbaum gives the depth.
    """
    if vanishes_locally(M):
        return ModuleInvariants(dim=-1, depth=None, grade=None, projdim=None, perfect=None, amplitude=None)
    q = M.spec.q - 1
    present = [i for i in range(M.spec.q + 1) if not vanishes_locally(ext_module(M, i))]
    projdim, module_grade = max(present), min(present)
    return ModuleInvariants(
        dim=local_dimension(poly_ring(M.spec), annihilator(M)),
        depth=q - projdim,
        grade=module_grade,
        projdim=projdim,
        perfect=module_grade == projdim,
        amplitude=projdim,
    )


#-------- At the origin of any complex --------

def cohomology_at_origin(C: FreeComplex, j: int) -> Tuple[GradedModule, bool]:
    """
    H^j of C, or of its homogenization when C admits no grading; the flag
    says which.
    """
    try:
        return graded_cohomology(C, j), False
    except NotHomogeneous:
        return graded_cohomology(homogenize(C), j), True


def vanishes_at_origin(C: FreeComplex, j: int) -> bool:
    H, homogenized = cohomology_at_origin(C, j)
    return vanishes_locally(H) if homogenized else is_zero_module(H)


def invariants_at_origin(C: FreeComplex, j: int) -> ModuleInvariants:
    H, homogenized = cohomology_at_origin(C, j)
    return local_invariants(H) if homogenized else module_invariants(H)

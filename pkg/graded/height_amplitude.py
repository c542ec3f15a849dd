from typing import Optional
import logging

from django.conf import settings

from complexes.dataclasses import FreeComplex
from complexes.operations import dual, tau_profile
from core.errors import NotHomogeneous, NotMinimalInput
from graded.dataclasses import GradedModule, HAReport, PartIII
from graded.invariants import module_invariants, support_height_profile, top_component_ideal
from graded.local import homogenize, local_dimension, local_invariants, local_support_heights, vanishes_locally
from graded.modules import (
    annihilator, complex_degrees, dual_degrees, graded_cohomology, hilbert_window, ideal_intersection, ideal_sum,
    is_zero_module,
)
from graded.polynomials import check_graded, poly_ring, quotient_dimension
from graded.resolution import ext_module

logger = logging.getLogger(__name__)


def check_minimal(C: FreeComplex):
    for k, matrix in enumerate(C.differentials):
        for a in range(matrix.rows):
            for b in range(matrix.cols):
                if matrix.entry(a, b).is_unit():
                    raise NotMinimalInput(
                        f"d^{C.lo + k}[{a}][{b}] = {matrix.entry(a, b)} has a unit constant term; minimize first",
                        degree=C.lo + k, row=a, col=b,
                    )


def window_start(*modules: GradedModule) -> int:
    degrees = [d for M in modules for d in M.generator_degrees]
    return min(degrees) if degrees else 0


def verify_height_amplitude(C: FreeComplex) -> HAReport:
    """
    Computes the cohomology of a minimal graded complex and checks:
    i   every minimal prime of the support has height <= amplitude;
    ii  the components of height = amplitude avoid Supp H^j for j != d+;
    iii when all heights equal the amplitude, H^j = 0 below d+ and H^d+ is
        perfect, with the top cohomology of the dual matching
        Ext^am(H^d+, R) on Hilbert functions.
    Complexes whose entries admit no grading are answered at the origin by
    local_height_amplitude.
    """
    check_graded(C.spec)
    check_minimal(C)
    q = C.spec.q
    ring = poly_ring(C.spec)
    span = settings.HILBERT_TRUNCATION_DEGREE
    try:
        degrees = complex_degrees(C)
    except NotHomogeneous:
        logger.info("%s admits no grading; reading it at the origin of its homogenization", C)
        return local_height_amplitude(C)
    profile_of_taus = tau_profile(C)
    amplitude, d_plus, d_minus = profile_of_taus.amplitude, profile_of_taus.d_plus, profile_of_taus.d_minus

    cohomology = {j: graded_cohomology(C, j, degrees) for j in C.degrees()}
    nonzero = {j: H for j, H in cohomology.items() if not is_zero_module(H)}
    total = GradedModule.free(C.spec, ())
    for H in nonzero.values():
        total = total.direct_sum(H)
    heights = support_height_profile(total)
    logger.info("%s: amplitude %s, support heights %s", C, amplitude, heights)

    witnesses = tuple(h for h in heights if amplitude is None or h > amplitude)

    part_ii = "not_applicable"
    if amplitude is not None and amplitude in heights:
        top_ideal = top_component_ideal(total, amplitude)
        others: Optional[list] = None
        for j, H in nonzero.items():
            if j != d_plus:
                others = annihilator(H) if others is None else ideal_intersection(ring, others, annihilator(H))
        if others is None:
            part_ii = "pass"
        else:
            overlap = quotient_dimension(ideal_sum(ring, top_ideal, others), q)
            part_ii = "pass" if overlap < q - amplitude else "fail"

    if heights and all(h == amplitude for h in heights):
        top = cohomology[d_plus]
        invariants = module_invariants(top)
        lower_vanishing = all(j >= d_plus for j in nonzero)
        dual_degree_list = dual_degrees(degrees)
        dual_top = graded_cohomology(dual(C), -d_minus, dual_degree_list)
        ext = ext_module(top, amplitude)
        start = window_start(dual_top, ext)
        duality = hilbert_window(dual_top, start, span) == hilbert_window(ext, start, span)
        part_iii = PartIII(
            applicable=True,
            lower_vanishing=lower_vanishing,
            top_perfect=bool(invariants.perfect),
            duality=duality,
        )
    else:
        part_iii = PartIII(applicable=False)

    return HAReport(
        amplitude=amplitude,
        d_plus=d_plus,
        d_minus=d_minus,
        height_profile=heights,
        part_i_witnesses=witnesses,
        part_ii=part_ii,
        part_iii=part_iii,
        cohomology={j: hilbert_window(H, window_start(H), span) for j, H in cohomology.items()},
    )


def local_height_amplitude(C: FreeComplex) -> HAReport:
    """
    The same verdicts for a minimal complex with inhomogeneous entries, read
    at the origin through the homogenized complex. Duality is not compared
    and the Hilbert functions are those of the homogenized cohomology.
    """
    q = C.spec.q
    span = settings.HILBERT_TRUNCATION_DEGREE
    model = homogenize(C)
    ring = poly_ring(model.spec)
    profile_of_taus = tau_profile(C)
    amplitude, d_plus = profile_of_taus.amplitude, profile_of_taus.d_plus

    cohomology = {j: graded_cohomology(model, j) for j in model.degrees()}
    nonzero = {j: H for j, H in cohomology.items() if not vanishes_locally(H)}
    total = GradedModule.free(model.spec, ())
    for H in nonzero.values():
        total = total.direct_sum(H)
    heights = local_support_heights(total)
    logger.info("%s at the origin: amplitude %s, support heights %s", C, amplitude, heights)

    part_ii = "not_applicable"
    if amplitude is not None and amplitude in heights:
        top_ideal = top_component_ideal(total, amplitude)
        others: Optional[list] = None
        for j, H in nonzero.items():
            if j != d_plus:
                others = annihilator(H) if others is None else ideal_intersection(ring, others, annihilator(H))
        if others is None:
            part_ii = "pass"
        else:
            overlap = local_dimension(ring, ideal_sum(ring, top_ideal, others))
            part_ii = "pass" if overlap < q - amplitude else "fail"

    if heights and all(h == amplitude for h in heights):
        part_iii = PartIII(
            applicable=True,
            lower_vanishing=all(j >= d_plus for j in nonzero),
            top_perfect=bool(local_invariants(cohomology[d_plus]).perfect),
        )
    else:
        part_iii = PartIII(applicable=False)

    return HAReport(
        amplitude=amplitude,
        d_plus=d_plus,
        d_minus=profile_of_taus.d_minus,
        height_profile=heights,
        part_i_witnesses=tuple(h for h in heights if amplitude is None or h > amplitude),
        part_ii=part_ii,
        part_iii=part_iii,
        cohomology={j: hilbert_window(H, window_start(H), span) for j, H in cohomology.items()},
        model="homogenized",
    )

from typing import Dict
import logging

import numpy as np

from complexes.dataclasses import FreeComplex
from complexes.operations import cohomology, cohomology_exponent, tau_profile, tensor_along
from core.errors import BaseMismatch, ConcentrationFailed, HeightAmplitudeViolated, SurjectionNotIso
from graded.height_amplitude import verify_height_amplitude
from graded.local import invariants_at_origin, vanishes_at_origin
from linalg.expansion import regular_block
from linalg.howell import span_exponent_array
from patcher.dataclasses import BaseData, FreenessCertificate, PatchingTower, PatchResult
from patcher.hypotheses import failed_names, witness_checks
from rings.arithmetic import augmentation_map, coordinates, graded_ring, substitute
from rings.dataclasses import RingTowerElement

logger = logging.getLogger(__name__)


def fiber_model(C: FreeComplex) -> FreeComplex:
    """
    C read over F_p[T_1..T_q]: coefficients reduced mod p, exponents kept.
    """
    spec = graded_ring(C.spec.p, C.spec.q)
    return FreeComplex(spec, C.lo, C.ranks, tuple(
        matrix.apply(lambda entry: RingTowerElement.from_terms(spec, entry.coeffs), spec)
        for matrix in C.differentials
    ))


def surjection_checks(base: BaseData, limit: PatchResult) -> Dict[str, bool]:
    """
    R_inf / i_inf(a) -> R at precision N: phi_inf kills i_inf(a), is onto,
    and both sides have the same size.
    """
    N = limit.precision
    model = base.model.at_precision(N).spec
    p = model.p
    blocks = [regular_block(image) for image in limit.i_images if image]
    ideal = np.vstack(blocks) if blocks else np.zeros((0, model.rank), dtype=np.int64)
    quotient_exponent = model.rank * N - span_exponent_array(ideal, p, N)
    phi = limit.phi_images
    well_defined = all(base.in_ideal(substitute(image, phi, model)) for image in limit.i_images)
    images = np.array([
        coordinates(substitute(RingTowerElement.from_terms(model, {exponent: 1}), phi, model))
        for exponent in model.basis()
    ], dtype=np.int64)
    onto = span_exponent_array(np.vstack([images, base.ideal_rows(N)]), p, N) == model.rank * N
    return {
        "well_defined": well_defined,
        "onto": onto,
        "cardinality": quotient_exponent == base.ring_exponent(N),
    }


def free_rank(limit: PatchResult, base: BaseData, d: int):
    """
    Read off H^d of the limit: rank = dim_k H^d / m H^d, counted on the
    generators modulo p, the relations and the variable actions. Free when
    H^d(limit / a), the R-module side, has |R|^rank elements at precision N.
    """
    C = limit.limit
    p = C.spec.p
    top = cohomology(C, d)
    count = top.generators.shape[0]
    rows = np.vstack([top.relations, *top.actions]) if top.actions else top.relations
    rank = count - span_exponent_array(np.mod(rows, p), p, 1) if count else 0
    reduced = cohomology(tensor_along(C, augmentation_map(C.spec)), d, with_actions=False)
    return rank, reduced.size_exponent == rank * base.ring_exponent(limit.precision)


def certify(T: PatchingTower, limit: PatchResult) -> FreenessCertificate:
    """
    Runs the certificate checks in order; the first failure raises with the
    partial certificate in its details.
    """
    params = T.params
    q, r, d = params.q, params.r, params.d
    N = limit.precision
    checks: Dict[str, bool] = {}
    found = {}

    def current() -> FreenessCertificate:
        return FreenessCertificate(precision=N, limit=limit, rank=None, free=None, checks=dict(checks), **found)

    def fail(error, message: str):
        logger.warning("certificate check failed: %s", message)
        raise error(message, certificate=current().to_dict())

    low, high = params.tau_window
    taus = tau_profile(limit.limit)
    checks["tau_concentrated"] = bool(taus.taus) and all(low <= i <= high for i in taus.taus)
    if not checks["tau_concentrated"]:
        fail(ConcentrationFailed, f"tau of the limit {taus.to_dict()['taus']} leaves [{low}, {high}]")

    fiber = fiber_model(limit.limit)
    report = verify_height_amplitude(fiber)
    found["ha_report"] = report
    found["lower_cohomology"] = tuple(
        {
            "level": index,
            "n": T.levels[index].n,
            "precision": T.levels[index].precision,
            "exponent": cohomology_exponent(T.levels[index].complex, d - 1),
        }
        for index in limit.chain
    )
    found["fiber_lower_vanishes"] = vanishes_at_origin(fiber, d - 1)
    if any(h != r for h in report.height_profile):
        fail(HeightAmplitudeViolated, f"fiber support heights {list(report.height_profile)} differ from r = {r}")
    checks["fiber_vanishing_below_top"] = bool(report.height_profile) and report.d_plus == d and bool(report.part_iii.passed)
    if not checks["fiber_vanishing_below_top"]:
        fail(ConcentrationFailed, f"the fiber cohomology is not concentrated in degree {d} with perfect top")

    invariants = invariants_at_origin(fiber, d)
    found["invariants"] = invariants
    checks["projdim_eq_r"] = invariants.projdim == r
    if not checks["projdim_eq_r"]:
        fail(ConcentrationFailed, f"projdim of the top cohomology is {invariants.projdim}, expected {r}")
    # depth over S_inf is one more than over its fiber
    checks["depth_eq_budget"] = invariants.depth == q - r
    if not checks["depth_eq_budget"]:
        fail(ConcentrationFailed, f"depth of the top cohomology is {invariants.depth}, expected {q - r}")

    detail = witness_checks(limit.limit, d, limit.witness, T.base.module, limit.x_actions)
    checks["base_iso"] = all(detail.values())
    if not checks["base_iso"]:
        fail(BaseMismatch, f"the limit witness fails: {failed_names(detail)}")

    detail = surjection_checks(T.base, limit)
    checks["surjection_iso"] = all(detail.values())
    if not checks["surjection_iso"]:
        fail(SurjectionNotIso, f"R_inf / i_inf(a) -> R fails: {failed_names(detail)}")

    rank, free = free_rank(limit, T.base, d)
    logger.info("certified rank %d at precision %d (free: %s)", rank, N, free)
    return FreenessCertificate(precision=N, limit=limit, rank=rank, free=free, checks=checks, **found)

from itertools import combinations
from typing import Dict, Sequence
import logging

import numpy as np

from complexes.dataclasses import FreeComplex
from complexes.operations import check_shapes, cohomology, tau_profile, tensor_along
from core.errors import (
    ActionMismatch, AugmentationNotKilled, BaseMismatch, InsufficientTower, InvalidParameter, ShapeMismatch,
    TauNotConstant, TauOutOfRange,
)
from linalg.dataclasses import Matrix
from linalg.expansion import expand_array
from linalg.howell import in_span_array, span_exponent_array
from patcher.dataclasses import BaseData, CheckResult, HModule, Maps, PatchingTower, TowerLevel, ValidationReport
from rings.arithmetic import augmentation_map, substitute
from rings.dataclasses import RingTowerElement

logger = logging.getLogger(__name__)


def validate_hypotheses(T: PatchingTower) -> ValidationReport:
    """
    Checks the three patching hypotheses level by level and returns the
    report. The first failed check raises, in the order tau constant, tau
    window, augmentation, action, base; the error carries the report so far.
    """
    if len(T.levels) < 2:
        raise InsufficientTower(f"a patching tower needs at least 2 levels, got {len(T.levels)}")
    report = ValidationReport()
    for index, level in enumerate(T.levels):
        check_maximal_ideal(level, index)

    profiles = [tau_profile(level.complex) for level in T.levels]
    report.taus = profiles[0]
    for index, profile in enumerate(profiles):
        check = report.add(CheckResult(
            "i", "tau_constant", index, profile == profiles[0], {"taus": profile.to_dict()["taus"]},
        ))
        if not check.passed:
            raise TauNotConstant(
                f"tau of level {index} differs from level 0", level=index, report=report.to_dict(),
            )
    low, high = T.params.tau_window
    outside = sorted(i for i in profiles[0].taus if not low <= i <= high)
    check = report.add(CheckResult("i", "tau_window", None, not outside, {"window": [low, high], "outside": outside}))
    if not check.passed:
        raise TauOutOfRange(f"tau is nonzero in degrees {outside}, outside [{low}, {high}]", report=report.to_dict())

    for index, level in enumerate(T.levels):
        failures = augmentation_failures(level, T.base)
        check = report.add(CheckResult("ii", "augmentation", index, not failures, {"failing_variables": failures}))
        if not check.passed:
            raise AugmentationNotKilled(
                f"phi(i(T_k)) is not zero in R for k in {failures} at level {index}", report=report.to_dict(),
            )

    for index, level in enumerate(T.levels):
        detail = action_checks(level)
        check = report.add(CheckResult("ii", "action", index, all(detail.values()), detail))
        if not check.passed:
            raise ActionMismatch(f"x actions at level {index} fail: {failed_names(detail)}", report=report.to_dict())

    for index, level in enumerate(T.levels):
        detail = witness_checks(level.complex, T.params.d, level.witness, T.base.module, level.x_actions)
        check = report.add(CheckResult("iii", "base", index, all(detail.values()), detail))
        if not check.passed:
            raise BaseMismatch(f"witness at level {index} fails: {failed_names(detail)}", report=report.to_dict())

    logger.info("tower with %d levels satisfies the patching hypotheses", len(T.levels))
    return report


def failed_names(detail: Dict[str, bool]) -> str:
    return ", ".join(name for name, passed in detail.items() if not passed)


def check_maximal_ideal(level: TowerLevel, index: int):
    for image in level.i_images + level.phi_images:
        if image.constant_term() % image.spec.p:
            raise InvalidParameter(
                f"level {index}: structure map image {image} is outside the maximal ideal", level=index,
            )


#-------- Hypothesis ii --------

def augmentation_failures(level: TowerLevel, base: BaseData) -> list:
    """
    Variables T_k with (phi_n o i_n)(T_k) outside the relation ideal of R.
    """
    model = base.model.at_precision(level.precision).spec
    phi = tuple(RingTowerElement.from_terms(model, image.coeffs) for image in level.phi_images)
    failures = []
    for k, image in enumerate(level.i_images):
        if not base.in_ideal(substitute(image, phi, model)):
            failures.append(k + 1)
    return failures


def evaluate_at_actions(element: RingTowerElement, actions: Sequence[Maps], C: FreeComplex) -> Maps:
    """
    element(X_1..X_g) degree by degree, for an element of the R_inf model
    and commuting chain endomorphisms X_j of C.
    """
    result = []
    for position, i in enumerate(C.degrees()):
        total = Matrix.zero(C.spec, C.rank(i), C.rank(i))
        for exponent, coefficient in element.coeffs:
            term = Matrix.identity(C.spec, C.rank(i))
            for j, a in enumerate(exponent):
                for _ in range(a):
                    term = term @ actions[j][position]
            total = total + term.scale(coefficient)
        result.append(total)
    return tuple(result)


def action_checks(level: TowerLevel) -> Dict[str, bool]:
    C = level.complex
    for maps in level.x_actions:
        check_shapes(maps, C)
    chain_maps = all(
        C.differential(i) @ maps[i + 1 - C.lo] == maps[i - C.lo] @ C.differential(i)
        for maps in level.x_actions for i in range(C.lo, C.hi)
    )
    commuting = all(
        first[position] @ second[position] == second[position] @ first[position]
        for first, second in combinations(level.x_actions, 2) for position in range(len(C.ranks))
    )
    if not chain_maps or not commuting:
        return {"chain_maps": chain_maps, "commuting": commuting, "through_i": False}
    through_i = True
    for k, image in enumerate(level.i_images):
        variable = RingTowerElement.variable(C.spec, k)
        induced = evaluate_at_actions(image, level.x_actions, C)
        difference = tuple(
            Matrix.identity(C.spec, C.rank(i)).scale(variable) - induced[i - C.lo] for i in C.degrees()
        )
        homotopy = level.homotopies[k]
        if homotopy is not None:
            ok = is_null_homotopic(C, difference, homotopy)
        else:
            ok = acts_as_zero(C, difference)
        if not ok:
            logger.warning("T_%d does not act through i_n at level %d", k + 1, level.n)
            through_i = False
    return {"chain_maps": chain_maps, "commuting": commuting, "through_i": through_i}


def is_null_homotopic(C: FreeComplex, E: Maps, h: Maps) -> bool:
    """
    E^i = h^i d^(i-1) + d^i h^(i+1) in every degree.
    """
    check_shapes(h, C, -1)
    for position, i in enumerate(C.degrees()):
        following = h[position + 1] if i < C.hi else Matrix.zero(C.spec, 0, C.rank(i))
        if h[position] @ C.differential(i - 1) + C.differential(i) @ following != E[position]:
            return False
    return True


def acts_as_zero(C: FreeComplex, E: Maps) -> bool:
    """
    E sends every cocycle to a coboundary, checked on the underlying free
    Z/p^m-modules.
    """
    spec = C.spec
    p, m = spec.p, spec.m
    for position, i in enumerate(C.degrees()):
        presentation = cohomology(C, i, with_actions=False)
        if not presentation.generators.size:
            continue
        images = np.mod(presentation.generators @ expand_array(E[position]), spec.modulus)
        boundaries = expand_array(C.differential(i - 1))
        for image in images:
            if image.any() and not (boundaries.size and in_span_array(boundaries, image, p, m)):
                return False
    return True


#-------- Hypothesis iii --------

def witness_checks(C: FreeComplex, d: int, witness: np.ndarray, module: HModule, actions: Sequence[Maps]) -> Dict[str, bool]:
    """
    The witness W : F^d -> H, on C / a = C tensored along the augmentation:
    coboundaries land in the relations of H, cocycles map onto H, both sides
    have the same size and W intertwines X_j with the action of x_j on H.
    """
    spec = C.spec
    p, m = spec.p, spec.m
    modulus = spec.modulus
    augmentation = augmentation_map(spec)
    reduced = tensor_along(C, augmentation)
    H = module.at_precision(m)
    k = H.generators
    if witness.shape != (reduced.rank(d), k):
        raise ShapeMismatch(f"witness is {witness.shape[0]}x{witness.shape[1]}, expected {reduced.rank(d)}x{k}")
    W = np.mod(witness, modulus)

    def in_relations(vector: np.ndarray) -> bool:
        return not vector.any() or bool(H.relations.size and in_span_array(H.relations, vector, p, m))

    presentation = cohomology(reduced, d, with_actions=False)
    cocycles = presentation.generators
    if not cocycles.size:
        cocycles = np.zeros((0, reduced.rank(d)), dtype=np.int64)
    boundaries = reduced.differential(d - 1).to_array()
    well_defined = all(in_relations(np.mod(row @ W, modulus)) for row in boundaries)
    images = np.mod(cocycles @ W, modulus)
    surjective = span_exponent_array(np.vstack([images, H.relations]), p, m) == k * m
    cardinality = presentation.size_exponent == H.size_exponent
    equivariant = True
    if C.lo <= d <= C.hi:
        for maps, action in zip(actions, H.actions):
            X = maps[d - C.lo].apply_map(augmentation).to_array()
            for row in cocycles:
                if not in_relations(np.mod(row @ X @ W - row @ W @ action, modulus)):
                    equivariant = False
    return {
        "well_defined": well_defined,
        "surjective": surjective,
        "cardinality": cardinality,
        "equivariant": equivariant,
    }

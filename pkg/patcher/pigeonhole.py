from dataclasses import dataclass, replace
from itertools import islice, permutations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np
from django.conf import settings

from complexes.dataclasses import FreeComplex
from complexes.operations import minimize_with_maps, tensor_along
from core.errors import InsufficientTower, InvalidParameter, NoCompatibleChain
from linalg.dataclasses import Matrix
from patcher.dataclasses import Maps, PatchingTower, PatchResult, TowerLevel
from patcher.hypotheses import validate_hypotheses
from rings.arithmetic import augmentation_map, make_patch_ring, reduction_map
from rings.dataclasses import RingSpec, RingTowerElement

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StepData:
    """
    A minimized level read at one precision step m, over S_m^(m).
    """
    index: int
    m: int
    complex: FreeComplex
    i_images: Tuple[RingTowerElement, ...]
    phi_images: Tuple[RingTowerElement, ...]
    x_actions: Tuple[Maps, ...]
    witness: np.ndarray

    def reduce(self, m: int) -> "StepData":
        spec = self.complex.spec
        target = make_patch_ring(spec.p, m, m, spec.q)
        reduce = reduction_map(spec, target)
        return StepData(
            index=self.index,
            m=m,
            complex=tensor_along(self.complex, reduce),
            i_images=tuple(at_precision(image, m) for image in self.i_images),
            phi_images=tuple(at_precision(image, m) for image in self.phi_images),
            x_actions=tuple(tuple(matrix.apply_map(reduce) for matrix in maps) for maps in self.x_actions),
            witness=np.mod(self.witness, spec.p ** m),
        )


def at_precision(element: RingTowerElement, m: int) -> RingTowerElement:
    return RingTowerElement.from_terms(element.spec.at_precision(m), element.coeffs)


def minimize_level(level: TowerLevel, index: int, d: int) -> StepData:
    """
    Minimal model of C_n with the x actions and the witness carried along
    the comparison maps.
    """
    C = level.complex
    minimization = minimize_with_maps(C)
    actions = tuple(tuple(minimization.transport_endomorphism(list(maps), C.lo)) for maps in level.x_actions)
    rank = minimization.complex.rank(d)
    if C.lo <= d <= C.hi:
        include = minimization.include(d).apply_map(augmentation_map(C.spec)).to_array()
        witness = np.mod(include @ level.witness, C.spec.modulus)
    else:
        witness = np.zeros((rank, level.witness.shape[1]), dtype=np.int64)
    return StepData(index, level.precision, minimization.complex, level.i_images, level.phi_images, actions, witness)


#-------- Basis changes --------

def signed_permutation(spec: RingSpec, order: Sequence[int], signs: Sequence[int]) -> Matrix:
    """
    Rows are the new basis vectors: row a is signs[a] e_(order[a]).
    """
    rank = len(order)
    return Matrix.from_rows(spec, [
        [signs[a] if b == order[a] else 0 for b in range(rank)] for a in range(rank)
    ], rank)


def basis_changes(ranks: Sequence[int]) -> Iterator[Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]]:
    """
    Every nontrivial signed permutation of every term, degree by degree.
    """
    per_degree = [
        list(product(permutations(range(rank)), product((1, -1), repeat=rank))) for rank in ranks
    ]
    identity = tuple((tuple(range(rank)), (1,) * rank) for rank in ranks)
    for choice in product(*per_degree):
        if choice != identity:
            yield choice


def change_basis(step: StepData, choice, d: int) -> StepData:
    """
    d' = B_i d B_(i+1)^-1, X' = B X B^-1 and W' = B_d W for the signed
    permutations B, whose inverses are their transposes.
    """
    C = step.complex
    spec = C.spec
    B = [signed_permutation(spec, order, signs) for order, signs in choice]
    differentials = tuple(
        B[k] @ matrix @ B[k + 1].transpose() for k, matrix in enumerate(C.differentials)
    )
    actions = tuple(
        tuple(B[k] @ matrix @ B[k].transpose() for k, matrix in enumerate(maps)) for maps in step.x_actions
    )
    witness = step.witness
    if C.lo <= d <= C.hi:
        order, signs = choice[d - C.lo]
        witness = np.mod(np.array([signs[a] * step.witness[order[a]] for a in range(len(order))], dtype=np.int64)
                         .reshape(step.witness.shape), spec.modulus)
    return replace(step, complex=FreeComplex(spec, C.lo, C.ranks, differentials), x_actions=actions, witness=witness)


class ChainSearch:
    """
    Depth-first selection of levels j_1 < j_2 < ... whose step data reduce
    onto each other exactly. When the reductions differ only by a basis
    change, signed permutations are tried until the budget runs out.
    """

    def __init__(self, T: PatchingTower, N: int):
        self.T = T
        self.N = N
        self.d = T.params.d
        self.budget = settings.BASIS_CHANGE_BUDGET
        self.tried = 0
        self.changes = 0
        self._minimal: Dict[int, StepData] = {}
        self._steps: Dict[Tuple[int, int], StepData] = {}

    def eligible(self, m: int) -> List[int]:
        return [index for index, level in enumerate(self.T.levels) if level.n >= m and level.precision >= m]

    def feasible(self) -> bool:
        after = -1
        for m in range(1, self.N + 1):
            candidates = [index for index in self.eligible(m) if index > after]
            if not candidates:
                return False
            after = candidates[0]
        return True

    def step(self, index: int, m: int) -> StepData:
        if index not in self._minimal:
            self._minimal[index] = minimize_level(self.T.levels[index], index, self.d)
        if (index, m) not in self._steps:
            self._steps[(index, m)] = self._minimal[index].reduce(m)
        return self._steps[(index, m)]

    def match(self, previous: StepData, candidate: StepData) -> Optional[StepData]:
        reduced = candidate.reduce(previous.m)
        if reduced.i_images != previous.i_images or reduced.phi_images != previous.phi_images:
            return None
        if reduced.complex == previous.complex:
            return candidate
        C = candidate.complex
        if (C.lo, C.ranks) != (previous.complex.lo, previous.complex.ranks):
            return None
        remaining = self.budget - self.tried
        for choice in islice(basis_changes(C.ranks), max(remaining, 0)):
            self.tried += 1
            changed = change_basis(candidate, choice, self.d)
            if changed.reduce(previous.m).complex == previous.complex:
                self.changes += 1
                logger.info("level %d matches after a signed permutation", candidate.index)
                return changed
        return None

    def search(self, m: int = 1, after: int = -1, previous: Optional[StepData] = None) -> Optional[List[StepData]]:
        if m > self.N:
            return []
        for index in self.eligible(m):
            if index <= after:
                continue
            candidate = self.step(index, m)
            if previous is not None:
                candidate = self.match(previous, candidate)
                if candidate is None:
                    continue
            rest = self.search(m + 1, index, candidate)
            if rest is not None:
                return [candidate] + rest
        return None


def patch(T: PatchingTower, N: int) -> PatchResult:
    """
    Validates T, minimizes its levels and selects a compatible chain of
    reductions up to precision N. The last step is the limit complex
    over S_N^(N).
    """
    if N < 1:
        raise InvalidParameter(f"target precision N = {N} must be at least 1")
    if len(T.levels) < 2:
        raise InsufficientTower(f"a patching tower needs at least 2 levels, got {len(T.levels)}")
    report = validate_hypotheses(T)
    search = ChainSearch(T, N)
    if not search.feasible():
        raise InsufficientTower(
            f"no increasing choice of levels covers precisions 1..{N}",
            levels=[[level.n, level.precision] for level in T.levels],
        )
    chain = search.search()
    if chain is None:
        raise NoCompatibleChain(
            f"no compatible chain up to precision {N}",
            basis_changes_tried=search.tried, budget=search.budget, report=report.to_dict(),
        )
    limit = chain[-1]
    logger.info("patched to precision %d along levels %s", N, [step.index for step in chain])
    return PatchResult(
        precision=N,
        chain=tuple(step.index for step in chain),
        steps=tuple(step.complex for step in chain),
        limit=limit.complex,
        i_images=limit.i_images,
        phi_images=limit.phi_images,
        x_actions=limit.x_actions,
        witness=limit.witness,
        basis_changes=search.changes,
        report=report,
    )

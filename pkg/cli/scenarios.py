from dataclasses import dataclass, replace
from enum import Enum
from math import comb
from pathlib import Path
from typing import Dict, List, Optional, Tuple
import logging
import random

import numpy as np
from django.conf import settings

from complexes.dataclasses import FreeComplex
from complexes.operations import direct_sum, koszul_complex, koszul_homotopy, minimize, zero_complex
from core.errors import InvalidParams
from core.serialization import write_json
from linalg.dataclasses import Matrix
from patcher.dataclasses import BaseData, HModule, PatchingTower, RInfinityModel, TowerLevel, TowerParams
from rings.arithmetic import make_patch_ring
from rings.dataclasses import RingSpec, RingTowerElement

logger = logging.getLogger(__name__)

TEMPLATES = ("koszul",)
I_TEMPLATES = ("identity", "scaled")


class Perturbation(Enum):
    NONE = "none"
    TAU_VARIES = "tau_varies"
    TAU_OUT_OF_RANGE = "tau_out_of_range"
    ACTION_MISMATCH = "action_mismatch"
    AUGMENTATION_NOT_KILLED = "augmentation_not_killed"
    BASE_MISMATCH = "base_mismatch"

    def expected_error(self) -> Optional[str]:
        """
        Name of the error validation must raise on the perturbed tower.
        """
        return {
            Perturbation.NONE: None,
            Perturbation.TAU_VARIES: "TauNotConstant",
            Perturbation.TAU_OUT_OF_RANGE: "TauOutOfRange",
            Perturbation.ACTION_MISMATCH: "ActionMismatch",
            Perturbation.AUGMENTATION_NOT_KILLED: "AugmentationNotKilled",
            Perturbation.BASE_MISMATCH: "BaseMismatch",
        }[self]


@dataclass(frozen=True)
class ScenarioParams:
    """
    A ground-truth tower: F_inf = Koszul(T_(g+1)..T_q) ending in degree d,
    `rank` copies of it, level n over S_n^(precisions[n-1]).

    i_template "identity" sends T_j to x_j (j <= g), "scaled" to (1+p) x_j.
    padding adds that many contractible pieces [S -1-> S] in degrees
    [d-r, d), mixed into the Koszul basis by a seeded change of basis.
    """
    p: int
    q: int
    r: int
    d: Optional[int] = None
    levels: int = 3
    precisions: Optional[Tuple[int, ...]] = None
    seed: Optional[int] = None
    rank: int = 1
    template: str = "koszul"
    i_template: str = "identity"
    padding: int = 0
    truncation: Optional[int] = None
    target: int = 2

    def __post_init__(self):
        if not 0 <= self.r <= self.q:
            raise InvalidParams(f"need 0 <= r <= q, got r = {self.r}, q = {self.q}")
        if self.levels < 2:
            raise InvalidParams(f"a tower needs at least 2 levels, got {self.levels}")
        if self.precisions is not None and len(self.precisions) != self.levels:
            raise InvalidParams(f"{self.levels} levels need {self.levels} precisions, got {len(self.precisions)}")
        if self.rank < 1 or self.padding < 0 or self.target < 1:
            raise InvalidParams("rank and target precision must be positive, padding nonnegative")
        if self.template not in TEMPLATES:
            raise InvalidParams(f"unknown complex template {self.template!r}")
        if self.i_template not in I_TEMPLATES:
            raise InvalidParams(f"unknown i template {self.i_template!r}")

    @property
    def g(self) -> int:
        return self.q - self.r

    @property
    def top(self) -> int:
        return self.q if self.d is None else self.d

    @property
    def schedule(self) -> Tuple[int, ...]:
        return self.precisions if self.precisions is not None else (2,) * self.levels

    @property
    def base_precision(self) -> int:
        return max(self.schedule)

    @property
    def truncation_degree(self) -> int:
        return settings.DEFAULT_TRUNCATION_DEGREE if self.truncation is None else self.truncation

    @property
    def random_seed(self) -> int:
        return settings.DEFAULT_SEED if self.seed is None else self.seed

    @property
    def scale(self) -> int:
        return 1 if self.i_template == "identity" else 1 + self.p

    def tower_params(self) -> TowerParams:
        return TowerParams(self.p, self.q, self.r, self.top, self.schedule, self.truncation_degree)

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "d": self.top,
            "levels": self.levels,
            "precisions": list(self.schedule),
            "seed": self.random_seed,
            "rank": self.rank,
            "template": self.template,
            "i_template": self.i_template,
            "padding": self.padding,
            "truncation": self.truncation_degree,
            "target": self.target,
        }


@dataclass(frozen=True)
class Pad:
    degree: int
    mixed_into: int
    coefficient: int


@dataclass(frozen=True, eq=False)
class ScenarioFiles:
    tower: PatchingTower
    sidecar: Dict

    def write(self, out_dir: Path) -> Tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        tower_path, sidecar_path = out_dir / "tower.json", out_dir / "sidecar.json"
        write_json(tower_path, self.tower.to_dict())
        write_json(sidecar_path, self.sidecar)
        return tower_path, sidecar_path


class TowerBuilder:
    """
    Builds the levels of one scenario. The padding layout is drawn from the
    seed once, so every level carries the same change of basis.
    """

    def __init__(self, params: ScenarioParams):
        self.params = params
        rng = random.Random(params.random_seed)
        r, d = params.r, params.top
        self.pads: List[Pad] = []
        if r:
            for _ in range(params.padding):
                degree = rng.randrange(d - r, d)
                main_rank = params.rank * comb(r, d - degree)
                self.pads.append(Pad(degree, rng.randrange(main_rank), rng.randrange(1, params.p)))

    def model(self, m: int) -> RInfinityModel:
        return RInfinityModel(self.params.p, m, self.params.g, self.params.truncation_degree)

    def base(self) -> BaseData:
        params = self.params
        model = self.model(params.base_precision)
        k = params.rank
        module = HModule(
            p=params.p,
            precision=model.m,
            generators=k,
            relations=np.zeros((0, k), dtype=np.int64),
            actions=tuple(np.zeros((k, k), dtype=np.int64) for _ in range(params.g)),
        )
        relations = tuple(RingTowerElement.variable(model.spec, j) for j in range(params.g))
        return BaseData(model, relations, module)

    def i_images(self, m: int) -> Tuple[RingTowerElement, ...]:
        spec = self.model(m).spec
        return tuple(
            RingTowerElement.variable(spec, j).scale(self.params.scale) if j < self.params.g
            else RingTowerElement.zero(spec)
            for j in range(self.params.q)
        )

    def phi_images(self) -> Tuple[RingTowerElement, ...]:
        spec = self.model(self.params.base_precision).spec
        return tuple(RingTowerElement.variable(spec, j) for j in range(self.params.g))

    #-------- Complexes --------

    def unmixed(self, spec: RingSpec, copies: int, extra_top: bool = False) -> Tuple[FreeComplex, FreeComplex]:
        """
        (Koszul part, whole complex) before the change of basis; the Koszul
        copies come first in every degree, then the pads, then the extra top term.
        """
        params = self.params
        variables = [RingTowerElement.variable(spec, j) for j in range(params.q)]
        K = koszul_complex(spec, variables[params.g:], params.top)
        main = zero_complex(spec)
        for _ in range(copies):
            main = direct_sum(main, K)
        C = main
        for pad in self.pads:
            C = direct_sum(C, FreeComplex(spec, pad.degree, (1, 1), (Matrix.identity(spec, 1),)))
        if extra_top:
            C = direct_sum(C, FreeComplex(spec, params.top + 1, (1,), ()))
        return main, C

    def pad_position(self, main: FreeComplex, t: int, degree: int) -> int:
        earlier = sum(1 for pad in self.pads[:t] if degree in (pad.degree, pad.degree + 1))
        return main.rank(degree) + earlier

    def mixing(self, main: FreeComplex, C: FreeComplex, sign: int) -> List[Matrix]:
        """
        B in every degree (sign = 1) or its inverse (sign = -1): the Koszul
        vector pad.mixed_into picks up coefficient * e_pad.
        """
        spec = C.spec
        result = []
        for i in C.degrees():
            rows = [[1 if a == b else 0 for b in range(C.rank(i))] for a in range(C.rank(i))]
            for t, pad in enumerate(self.pads):
                if pad.degree == i:
                    rows[pad.mixed_into][self.pad_position(main, t, i)] = sign * pad.coefficient
            result.append(Matrix.from_rows(spec, rows, C.rank(i)))
        return result

    def homotopy(self, main: FreeComplex, C: FreeComplex, k: int, copies: int) -> List[Matrix]:
        """
        h with T_k = h d + d h on the unmixed complex: the Koszul wedge on the
        Koszul copies, T_k e_i <- e_(i+1) on each pad.
        """
        params = self.params
        spec = C.spec
        zero = RingTowerElement.zero(spec)
        wedge = koszul_homotopy(spec, params.r, k - params.g, params.top)
        variable = RingTowerElement.variable(spec, k)
        maps = []
        for i in C.degrees():
            rows = [[zero] * C.rank(i - 1) for _ in range(C.rank(i))]
            if params.top - params.r <= i <= params.top:
                block = Matrix.block_diagonal([wedge[i - params.top + params.r]] * copies, spec)
                for a in range(block.rows):
                    for b in range(block.cols):
                        rows[a][b] = block.entry(a, b)
            for t, pad in enumerate(self.pads):
                if pad.degree + 1 == i:
                    rows[self.pad_position(main, t, i)][self.pad_position(main, t, i - 1)] = variable
            maps.append(Matrix.from_rows(spec, rows, C.rank(i - 1)))
        return maps

    def complex_at(self, spec: RingSpec, copies: int, extra_top: bool = False):
        main, C = self.unmixed(spec, copies, extra_top)
        B, B_inverse = self.mixing(main, C, 1), self.mixing(main, C, -1)
        differentials = tuple(
            B[k] @ matrix @ B_inverse[k + 1] for k, matrix in enumerate(C.differentials)
        )
        return main, C, B, B_inverse, FreeComplex(spec, C.lo, C.ranks, differentials)

    def limit(self, N: int) -> FreeComplex:
        spec = make_patch_ring(self.params.p, N, N, self.params.q)
        return minimize(self.complex_at(spec, self.params.rank)[-1])

    def level(self, n: int, m: int, copies: Optional[int] = None, extra_top: bool = False) -> TowerLevel:
        params = self.params
        spec = make_patch_ring(params.p, m, n, params.q)
        copies = params.rank if copies is None else copies
        main, C, B, B_inverse, mixed = self.complex_at(spec, copies, extra_top)
        inverse_scale = RingTowerElement.constant(spec, params.scale).inverse()
        actions = tuple(
            tuple(Matrix.identity(spec, C.rank(i)).scale(RingTowerElement.variable(spec, j) * inverse_scale)
                  for i in C.degrees())
            for j in range(params.g)
        )
        homotopies = []
        for k in range(params.q):
            if k < params.g:
                homotopies.append(tuple(Matrix.zero(spec, C.rank(i), C.rank(i - 1)) for i in C.degrees()))
                continue
            h = self.homotopy(main, C, k, copies)
            homotopies.append(tuple(
                B[position] @ matrix @ (B_inverse[position - 1] if position else Matrix.identity(spec, 0))
                for position, matrix in enumerate(h)
            ))
        witness = np.zeros((C.rank(params.top), params.rank), dtype=np.int64)
        for copy in range(params.rank):
            witness[copy, copy] = 1
        # B is the identity in degree d, pads only mix below it
        return TowerLevel(
            n=n,
            precision=m,
            complex=mixed,
            i_images=self.i_images(m),
            phi_images=self.phi_images(),
            x_actions=actions,
            homotopies=tuple(homotopies),
            witness=witness,
        )


def gen_scenario(params: ScenarioParams, perturbation: Perturbation = Perturbation.NONE) -> ScenarioFiles:
    """
    A tower built from a known F_inf, with a sidecar recording what patching
    must recover: rank, tau, the minimized limit at the target precision and
    the error a perturbation should trigger.
    """
    builder = TowerBuilder(params)
    levels = []
    for index, m in enumerate(params.schedule):
        n = index + 1
        if perturbation == Perturbation.TAU_VARIES and index == 1:
            level = builder.level(n, m, copies=2 * params.rank)
        else:
            level = builder.level(n, m, extra_top=perturbation == Perturbation.TAU_OUT_OF_RANGE)
        if index == 1:
            level = perturb(level, perturbation, params)
        levels.append(level)
    tower = PatchingTower(params.tower_params(), builder.base(), tuple(levels))

    taus = {str(i): params.rank * comb(params.r, params.top - i) for i in range(params.top - params.r, params.top + 1)}
    sidecar = {
        "params": params.to_dict(),
        "perturbation": perturbation.value,
        "expected_error": perturbation.expected_error(),
        "rank": params.rank,
        "tau": taus,
        "delta_inf": builder.limit(params.target).to_dict(),
        "i_inf": [image.to_list() for image in builder.i_images(params.target)],
    }
    logger.info("generated %s scenario p=%s q=%s r=%s", perturbation.value, params.p, params.q, params.r)
    return ScenarioFiles(tower, sidecar)


def perturb(level: TowerLevel, perturbation: Perturbation, params: ScenarioParams) -> TowerLevel:
    """
    Breaks one hypothesis on a level.
    """
    spec = level.spec
    if perturbation == Perturbation.ACTION_MISMATCH:
        if params.g:
            shifted = tuple(matrix + Matrix.identity(spec, matrix.rows) for matrix in level.x_actions[0])
            return replace(level, x_actions=(shifted,) + level.x_actions[1:])
        C = level.complex
        zeroed = tuple(Matrix.zero(spec, C.rank(i), C.rank(i - 1)) for i in C.degrees())
        return replace(level, homotopies=(zeroed,) + level.homotopies[1:])
    if perturbation == Perturbation.AUGMENTATION_NOT_KILLED:
        if level.precision < 2:
            raise InvalidParams("p = 0 at precision 1, so the augmentation cannot be broken there")
        if params.g:
            model = level.phi_images[0].spec
            return replace(level, phi_images=(RingTowerElement.constant(model, params.p),) + level.phi_images[1:])
        model = level.i_images[0].spec
        return replace(level, i_images=(RingTowerElement.constant(model, params.p),) + level.i_images[1:])
    if perturbation == Perturbation.BASE_MISMATCH:
        return replace(level, witness=np.zeros_like(level.witness))
    return level


from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import json

import numpy as np

from complexes.dataclasses import FreeComplex, TauProfile
from core.errors import InvalidParams, MalformedInput, ShapeMismatch, SpecMismatch
from core.serialization import require_keys
from graded.dataclasses import HAReport, ModuleInvariants
from linalg.dataclasses import Matrix
from linalg.expansion import regular_block
from linalg.howell import in_span_array, span_exponent_array
from rings.arithmetic import coordinates, truncated_ring
from rings.dataclasses import RingKind, RingSpec, RingTowerElement

Maps = Tuple[Matrix, ...]


@dataclass(frozen=True)
class RInfinityModel:
    """
    Schema for the finite model (Z/p^m)[x_1..x_g]/(x_1..x_g)^{truncation+1}
    of the power series ring R_inf. Its Krull dimension 1 + g is recorded
    with the model; the truncation only bounds what is computable.
    """
    p: int
    m: int
    g: int
    truncation: int

    @property
    def spec(self) -> RingSpec:
        return truncated_ring(self.p, self.m, self.g, self.truncation)

    @property
    def dimension(self) -> int:
        return 1 + self.g

    def at_precision(self, m: int) -> "RInfinityModel":
        return RInfinityModel(self.p, m, self.g, self.truncation)

    def to_dict(self) -> Dict:
        return self.spec.to_dict()

    @staticmethod
    def from_dict(data: Dict) -> "RInfinityModel":
        spec = RingSpec.from_dict(data)
        if spec.kind != RingKind.TRUNCATED:
            raise MalformedInput(f"the R_inf model must be a truncated ring, got {spec}")
        return RInfinityModel(spec.p, spec.m, spec.q, spec.truncation)


@dataclass(frozen=True)
class TowerParams:
    """
    p, q, r and the top degree d; precisions[k] is the precision of level k.
    """
    p: int
    q: int
    r: int
    d: int
    precisions: Tuple[int, ...]
    truncation: int

    def __post_init__(self):
        if not 0 <= self.r <= self.q:
            raise InvalidParams(f"need 0 <= r <= q, got r = {self.r}, q = {self.q}")
        if any(m < 1 for m in self.precisions):
            raise InvalidParams("level precisions must be at least 1")

    @property
    def g(self) -> int:
        return self.q - self.r

    @property
    def tau_window(self) -> Tuple[int, int]:
        return self.d - self.r, self.d

    def to_dict(self) -> Dict:
        return {
            "p": self.p,
            "q": self.q,
            "r": self.r,
            "d": self.d,
            "precisions": list(self.precisions),
            "truncation": self.truncation,
        }

    @staticmethod
    def from_dict(data: Dict) -> "TowerParams":
        require_keys(data, ("p", "q", "r", "d", "precisions"), "params")
        try:
            return TowerParams(
                p=int(data["p"]),
                q=int(data["q"]),
                r=int(data["r"]),
                d=int(data["d"]),
                precisions=tuple(int(m) for m in data["precisions"]),
                truncation=int(data.get("truncation", 1)),
            )
        except (TypeError, ValueError) as e:
            raise MalformedInput(f"bad tower params: {e}")


@dataclass(frozen=True, eq=False)
class HModule:
    """
    Schema for a finite Z/p^m-module given by k generators and integer
    relation rows, with one k x k action matrix per variable x_j (row
    vectors: generator a goes to row a).
    """
    p: int
    precision: int
    generators: int
    relations: np.ndarray
    actions: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.relations.ndim != 2 or self.relations.shape[1] != self.generators:
            raise ShapeMismatch(f"relations of H must have {self.generators} columns")
        for action in self.actions:
            if action.shape != (self.generators, self.generators):
                raise ShapeMismatch(f"actions on H must be {self.generators}x{self.generators}")

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def at_precision(self, m: int) -> "HModule":
        """
        H / p^m H.
        """
        modulus = self.p ** m
        return HModule(
            self.p, m, self.generators, np.mod(self.relations, modulus),
            tuple(np.mod(action, modulus) for action in self.actions),
        )

    @property
    def size_exponent(self) -> int:
        return self.generators * self.precision - span_exponent_array(self.relations, self.p, self.precision)

    def to_dict(self) -> Dict:
        return {
            "precision": self.precision,
            "generators": self.generators,
            "relations": self.relations.tolist(),
            "actions": [action.tolist() for action in self.actions],
        }

    @staticmethod
    def from_dict(p: int, data: Dict) -> "HModule":
        require_keys(data, ("precision", "generators", "relations", "actions"), "module")
        k = int(data["generators"])
        try:
            relations = np.array(data["relations"], dtype=np.int64).reshape(-1, k)
            actions = tuple(np.array(action, dtype=np.int64).reshape(k, k) for action in data["actions"])
        except (TypeError, ValueError) as e:
            raise MalformedInput(f"bad module data: {e}")
        return HModule(p, int(data["precision"]), k, relations, actions)


@dataclass(frozen=True)
class BaseData:
    """
    Schema for R = model / (relations) and the R-module H.
    """
    model: RInfinityModel
    relations: Tuple[RingTowerElement, ...]
    module: HModule

    def __post_init__(self):
        for relation in self.relations:
            if relation.spec != self.model.spec:
                raise SpecMismatch(f"relation {relation} does not live in {self.model.spec}")
        if len(self.module.actions) != self.model.g:
            raise ShapeMismatch(f"H needs one action per x variable ({self.model.g}), got {len(self.module.actions)}")
        if self.module.precision != self.model.m:
            raise SpecMismatch("H and R must share their precision")

    def ideal_rows(self, m: int) -> np.ndarray:
        """
        Z/p^m-span of the relation ideal inside the model at precision m.
        """
        spec = self.model.spec.at_precision(m)
        modulus = spec.modulus
        blocks = [
            np.mod(regular_block(RingTowerElement.from_terms(spec, relation.coeffs)), modulus)
            for relation in self.relations
        ]
        if not blocks:
            return np.zeros((0, spec.rank), dtype=np.int64)
        return np.vstack(blocks)

    def in_ideal(self, element: RingTowerElement) -> bool:
        spec = element.spec
        vector = np.array(coordinates(element), dtype=np.int64)
        if not vector.any():
            return True
        rows = self.ideal_rows(spec.m)
        return rows.size > 0 and in_span_array(rows, vector, spec.p, spec.m)

    def ring_exponent(self, m: int) -> int:
        """
        log_p |R / p^m R|.
        """
        spec = self.model.spec.at_precision(m)
        return spec.rank * m - span_exponent_array(self.ideal_rows(m), spec.p, m)

    def to_dict(self) -> Dict:
        return {
            "ring": self.model.to_dict(),
            "relations": [relation.to_list() for relation in self.relations],
            "module": self.module.to_dict(),
        }

    @staticmethod
    def from_dict(data: Dict) -> "BaseData":
        require_keys(data, ("ring", "relations", "module"), "base")
        model = RInfinityModel.from_dict(data["ring"])
        return BaseData(
            model=model,
            relations=tuple(RingTowerElement.from_list(model.spec, relation) for relation in data["relations"]),
            module=HModule.from_dict(model.p, data["module"]),
        )


@dataclass(frozen=True, eq=False)
class TowerLevel:
    """
    Schema for one level of a patching tower.

    complex:     C_n over S_n^(precision)
    i_images:    i_n(T_1..T_q) in the R_inf model at this precision
    phi_images:  phi_n(x_1..x_g) in the R_inf model at base precision, read modulo the relations of R
    x_actions:   per x_j, one endomorphism of C_n per degree
    homotopies:  per T_k, maps h^i : F^i -> F^(i-1) with T_k - i_n(T_k)(X) = h d + d h,
                 or None to check the action on cohomology instead
    witness:     rank_d x k integer matrix sending H^d(C_n / a) onto H
    """
    n: int
    precision: int
    complex: FreeComplex
    i_images: Tuple[RingTowerElement, ...]
    phi_images: Tuple[RingTowerElement, ...]
    x_actions: Tuple[Maps, ...]
    homotopies: Tuple[Optional[Maps], ...]
    witness: np.ndarray

    def __post_init__(self):
        spec = self.complex.spec
        if spec.kind != RingKind.PATCH or (spec.n, spec.m) != (self.n, self.precision):
            raise SpecMismatch(f"level {self.n} at precision {self.precision} carries a complex over {spec}")
        if len(self.i_images) != spec.q or len(self.homotopies) != spec.q:
            raise ShapeMismatch(f"a level needs one i image and one homotopy slot per T variable ({spec.q})")
        if len(self.x_actions) != len(self.phi_images):
            raise ShapeMismatch("a level needs one action per x variable")

    @property
    def spec(self) -> RingSpec:
        return self.complex.spec

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "precision": self.precision,
            "complex": self.complex.to_dict(),
            "i_images": [image.to_list() for image in self.i_images],
            "phi_images": [image.to_list() for image in self.phi_images],
            "x_actions": [[matrix.to_list() for matrix in maps] for maps in self.x_actions],
            "homotopies": [
                None if maps is None else [matrix.to_list() for matrix in maps] for maps in self.homotopies
            ],
            "witness": self.witness.tolist(),
        }

    @staticmethod
    def from_dict(data: Dict, params: TowerParams, model: RInfinityModel, k: int) -> "TowerLevel":
        require_keys(data, ("n", "precision", "complex", "i_images", "phi_images", "x_actions", "witness"), "level")
        C = FreeComplex.from_dict(data["complex"])
        spec = C.spec
        source = model.at_precision(int(data["precision"])).spec

        def maps_from(lists, offset: int) -> Maps:
            if len(lists) != len(C.ranks):
                raise MalformedInput(f"level {data['n']}: expected one map per degree of the complex")
            return tuple(
                Matrix.from_list(spec, matrix, C.rank(C.lo + position + offset))
                for position, matrix in enumerate(lists)
            )

        homotopies = data.get("homotopies") or [None] * spec.q
        try:
            witness = np.array(data["witness"], dtype=np.int64).reshape(C.rank(params.d), k)
        except ValueError:
            raise MalformedInput(f"level {data['n']}: witness must be {C.rank(params.d)}x{k}")
        return TowerLevel(
            n=int(data["n"]),
            precision=int(data["precision"]),
            complex=C,
            i_images=tuple(RingTowerElement.from_list(source, image) for image in data["i_images"]),
            phi_images=tuple(RingTowerElement.from_list(model.spec, image) for image in data["phi_images"]),
            x_actions=tuple(maps_from(maps, 0) for maps in data["x_actions"]),
            homotopies=tuple(None if maps is None else maps_from(maps, -1) for maps in homotopies),
            witness=witness,
        )


@dataclass(frozen=True)
class PatchingTower:
    params: TowerParams
    base: BaseData
    levels: Tuple[TowerLevel, ...]

    def to_dict(self) -> Dict:
        return {
            "params": self.params.to_dict(),
            "base": self.base.to_dict(),
            "levels": [level.to_dict() for level in self.levels],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(data: Dict) -> "PatchingTower":
        """
        Parses the tower file format {"params", "base", "levels"}.
        """
        require_keys(data, ("params", "base", "levels"), "tower")
        params = TowerParams.from_dict(data["params"])
        base = BaseData.from_dict(data["base"])
        if base.model.g != params.g or base.model.p != params.p:
            raise SpecMismatch(f"the R_inf model {base.model.spec} does not fit p = {params.p}, q - r = {params.g}")
        if not isinstance(data["levels"], list):
            raise MalformedInput("tower: levels must be a list")
        if len(data["levels"]) != len(params.precisions):
            raise MalformedInput("tower: one precision per level is required")
        levels = tuple(
            TowerLevel.from_dict(level, params, base.model, base.module.generators) for level in data["levels"]
        )
        return PatchingTower(params, base, levels)

    @staticmethod
    def deserialize(data: str) -> "PatchingTower":
        return PatchingTower.from_dict(json.loads(data))


#-------- Reports --------

@dataclass(frozen=True)
class CheckResult:
    hypothesis: str
    name: str
    level: Optional[int]
    passed: bool
    detail: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "hypothesis": self.hypothesis,
            "name": self.name,
            "level": self.level,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class ValidationReport:
    """
    Checks in the order they ran; validation stops at the first failure.
    """
    checks: List[CheckResult] = field(default_factory=list)
    taus: Optional[TauProfile] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "taus": self.taus.to_dict() if self.taus is not None else None,
            "checks": [check.to_dict() for check in self.checks],
        }


@dataclass(frozen=True, eq=False)
class PatchResult:
    """
    Schema for the output of the chain selection.

    chain:  indices of the selected levels, one per precision step 1..precision
    steps:  the step complexes over S_m^(m)
    limit:  the limit complex over S_N^(N), N = precision
    """
    precision: int
    chain: Tuple[int, ...]
    steps: Tuple[FreeComplex, ...]
    limit: FreeComplex
    i_images: Tuple[RingTowerElement, ...]
    phi_images: Tuple[RingTowerElement, ...]
    x_actions: Tuple[Maps, ...]
    witness: np.ndarray
    basis_changes: int
    report: ValidationReport

    def to_dict(self) -> Dict:
        return {
            "precision": self.precision,
            "chain": list(self.chain),
            "limit": self.limit.to_dict(),
            "i_inf": [image.to_list() for image in self.i_images],
            "phi_inf": [image.to_list() for image in self.phi_images],
            "basis_changes": self.basis_changes,
        }


@dataclass(frozen=True, eq=False)
class FreenessCertificate:
    """
    Schema for the verdict on a patched limit. Valid only when every
    check passed.

    lower_cohomology: per chain level, log_p |H^(d-1)(C_n)|, next to whether
                      the fiber model has H^(d-1) = 0
    """
    precision: int
    limit: PatchResult
    rank: Optional[int]
    free: Optional[bool]
    checks: Dict[str, bool]
    lower_cohomology: Tuple[Dict, ...] = ()
    fiber_lower_vanishes: Optional[bool] = None
    ha_report: Optional[HAReport] = None
    invariants: Optional[ModuleInvariants] = None

    @property
    def valid(self) -> bool:
        return len(self.checks) == len(CERTIFICATE_CHECKS) and all(self.checks.values())

    def to_dict(self) -> Dict:
        return {
            "precision": self.precision,
            "valid": self.valid,
            "rank": self.rank,
            "free": self.free,
            "checks": {name: self.checks.get(name) for name in CERTIFICATE_CHECKS},
            "limit": self.limit.to_dict(),
            "lower_cohomology": {
                "levels": list(self.lower_cohomology),
                "fiber_vanishes": self.fiber_lower_vanishes,
            },
            "height_amplitude": self.ha_report.to_dict() if self.ha_report is not None else None,
            "top_invariants": self.invariants.to_dict() if self.invariants is not None else None,
        }

    def __str__(self) -> str:
        lines = [f"precision {self.precision}, chain {list(self.limit.chain)}"]
        for name in CERTIFICATE_CHECKS:
            verdict = self.checks.get(name)
            lines.append(f"  {name}: {'not run' if verdict is None else 'pass' if verdict else 'fail'}")
        lines.append(f"rank {self.rank}, free {self.free}")
        for entry in self.lower_cohomology:
            lines.append(f"  level {entry['n']}: log_p |H^(d-1)| = {entry['exponent']}")
        if self.fiber_lower_vanishes is not None:
            lines.append(f"fiber H^(d-1) vanishes: {self.fiber_lower_vanishes}")
        return "\n".join(lines)


CERTIFICATE_CHECKS = (
    "tau_concentrated",
    "fiber_vanishing_below_top",
    "projdim_eq_r",
    "depth_eq_budget",
    "base_iso",
    "surjection_iso",
)

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import json

from core.errors import MalformedInput, NotHomogeneous, ShapeMismatch, SpecMismatch
from core.serialization import require_keys
from rings.dataclasses import RingSpec, RingTowerElement

Relation = Tuple[RingTowerElement, ...]


@dataclass(frozen=True, eq=False)
class GradedModule:
    """
    Schema for the cokernel of R^s -> R^r over F_p[T_1..T_q].

    relations holds the s relations as rows of length r; the file format
    stores the r x s presentation matrix whose columns are the relations.
    generator_degrees makes every relation homogeneous.
    """
    spec: RingSpec
    generator_degrees: Tuple[int, ...]
    relations: Tuple[Relation, ...]
    _cache: Dict[str, Any] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for relation in self.relations:
            if len(relation) != self.rank:
                raise ShapeMismatch(f"relation of length {len(relation)} in a module with {self.rank} generators")
            for entry in relation:
                if entry.spec != self.spec:
                    raise SpecMismatch(f"relation entry over {entry.spec}, module over {self.spec}")
        check_homogeneous(self.relations, self.generator_degrees)

    @property
    def rank(self) -> int:
        return len(self.generator_degrees)

    def cached(self, key: str, compute: Callable[[], Any]) -> Any:
        """
        Write-once cache: compute runs at most once per key.
        """
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    @staticmethod
    def free(spec: RingSpec, degrees: Sequence[int]) -> "GradedModule":
        return GradedModule(spec, tuple(degrees), ())

    @staticmethod
    def from_relations(spec: RingSpec, rank: int, relations: Sequence[Sequence[RingTowerElement]],
                       degrees: Optional[Sequence[int]] = None) -> "GradedModule":
        relations = tuple(tuple(relation) for relation in relations)
        if degrees is None:
            degrees = infer_degrees(rank, relations)
        return GradedModule(spec, tuple(degrees), relations)

    def direct_sum(self, other: "GradedModule") -> "GradedModule":
        zero = RingTowerElement.zero(self.spec)
        relations = [relation + (zero,) * other.rank for relation in self.relations]
        relations += [(zero,) * self.rank + relation for relation in other.relations]
        return GradedModule(self.spec, self.generator_degrees + other.generator_degrees, tuple(relations))

    #-------- Serialization --------

    def to_dict(self) -> Dict:
        return {
            "ring": self.spec.to_dict(),
            "gens": self.rank,
            "degrees": list(self.generator_degrees),
            "relations": [
                [relation[i].to_list() for relation in self.relations] for i in range(self.rank)
            ],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data: Dict) -> "GradedModule":
        require_keys(data, ("ring", "gens", "relations"), "module")
        spec = RingSpec.from_dict(data["ring"])
        rank = data["gens"]
        matrix = data["relations"]
        if not isinstance(rank, int) or rank < 0:
            raise MalformedInput("module: gens must be a nonnegative integer")
        if not isinstance(matrix, list) or len(matrix) != rank:
            raise MalformedInput(f"module: relations must have one row per generator ({rank})")
        widths = {len(row) for row in matrix}
        if len(widths) > 1:
            raise MalformedInput("module: ragged relation matrix")
        width = widths.pop() if widths else 0
        relations = [
            tuple(RingTowerElement.from_list(spec, matrix[i][k]) for i in range(rank)) for k in range(width)
        ]
        return GradedModule.from_relations(spec, rank, relations, data.get("degrees"))

    @staticmethod
    def deserialize(data: str) -> "GradedModule":
        return GradedModule.from_dict(json.loads(data))

    def __str__(self) -> str:
        return f"coker(R^{len(self.relations)} -> R^{self.rank}) over {self.spec}"


def check_homogeneous(relations: Sequence[Relation], degrees: Sequence[int]):
    for relation in relations:
        found = {
            sum(exponent) + degrees[i]
            for i, entry in enumerate(relation) for exponent, _ in entry.coeffs
        }
        if len(found) > 1:
            raise NotHomogeneous(f"relation mixes degrees {sorted(found)} for generator degrees {list(degrees)}")


def infer_degrees(rank: int, relations: Sequence[Relation]) -> Tuple[int, ...]:
    """
    Generator degrees making every relation homogeneous, normalized so that
    the first generator of each linked group has degree 0.
    """
    edges: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(rank)}
    for relation in relations:
        support = [(i, entry) for i, entry in enumerate(relation) if entry]
        for i, entry in support:
            if not entry.is_homogeneous():
                raise NotHomogeneous(f"entry {entry} is not homogeneous")
        for (i, a), (j, b) in zip(support, support[1:]):
            # deg(a) + d_i = deg(b) + d_j
            edges[i].append((j, a.degree() - b.degree()))
            edges[j].append((i, b.degree() - a.degree()))
    degrees: Dict[int, int] = {}
    for start in range(rank):
        if start in degrees:
            continue
        degrees[start] = 0
        stack = [start]
        while stack:
            i = stack.pop()
            for j, offset in edges[i]:
                if j not in degrees:
                    degrees[j] = degrees[i] + offset
                    stack.append(j)
                elif degrees[j] != degrees[i] + offset:
                    raise NotHomogeneous("no grading of the generators makes the relations homogeneous")
    return tuple(degrees[i] for i in range(rank))


@dataclass(frozen=True)
class BettiTable:
    """
    Schema for Betti numbers: betti[i] = rank F_i, graded[i] maps a degree
    to the number of generators of F_i in that degree.
    """
    betti: Tuple[int, ...]
    graded: Tuple[Dict[int, int], ...]

    def to_dict(self) -> Dict:
        return {
            "betti": list(self.betti),
            "graded": [{str(degree): count for degree, count in sorted(row.items())} for row in self.graded],
        }

    def __str__(self) -> str:
        lines = ["  ".join(f"{b:>3}" for b in self.betti)]
        for i, row in enumerate(self.graded):
            lines.append(f"F_{i}: " + ", ".join(f"{count}x({-degree})" for degree, count in sorted(row.items())))
        return "\n".join(lines)


@dataclass(frozen=True)
class GradedResolution:
    """
    Schema for a minimal graded free resolution F_L -> ... -> F_0 -> M.
    The complex sits in cohomological degrees -L..0; degrees[k] lists the
    generator degrees of F_k.
    """
    complex: Any
    degrees: Tuple[Tuple[int, ...], ...]

    @property
    def length(self) -> Optional[int]:
        nonzero = [k for k, terms in enumerate(self.degrees) if terms]
        return max(nonzero) if nonzero else None

    @property
    def betti(self) -> BettiTable:
        graded = []
        for terms in self.degrees:
            row: Dict[int, int] = {}
            for degree in terms:
                row[degree] = row.get(degree, 0) + 1
            graded.append(row)
        return BettiTable(tuple(len(terms) for terms in self.degrees), tuple(graded))


@dataclass(frozen=True)
class ModuleInvariants:
    """
    Zero module: dim is -1 and the other invariants are None.
    """
    dim: int
    depth: Optional[int]
    grade: Optional[int]
    projdim: Optional[int]
    perfect: Optional[bool]
    amplitude: Optional[int]

    def to_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "depth": self.depth,
            "grade": self.grade,
            "projdim": self.projdim,
            "perfect": "not_applicable" if self.perfect is None else self.perfect,
            "amplitude": self.amplitude,
        }


@dataclass(frozen=True)
class PartIII:
    applicable: bool
    lower_vanishing: Optional[bool] = None
    top_perfect: Optional[bool] = None
    duality: Optional[bool] = None

    @property
    def passed(self) -> Optional[bool]:
        if not self.applicable:
            return None
        # duality is None when it was not compared
        return bool(self.lower_vanishing and self.top_perfect and self.duality is not False)

    def to_dict(self) -> Dict:
        return {
            "applicable": self.applicable,
            "lower_vanishing": self.lower_vanishing,
            "top_perfect": self.top_perfect,
            "duality": self.duality,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class HAReport:
    """
    Schema for the height/amplitude verdicts on one graded complex.

    part_i_witnesses: profile heights exceeding the amplitude
    part_ii:          "pass", "fail" or "not_applicable"
    cohomology:       per degree, the Hilbert function of H^j on the comparison window
    model:            "graded", or "homogenized" when the entries admit no grading
                      and the verdicts are read at the origin of the homogenized complex
    """
    amplitude: Optional[int]
    d_plus: Optional[int]
    d_minus: Optional[int]
    height_profile: Tuple[int, ...]
    part_i_witnesses: Tuple[int, ...]
    part_ii: str
    part_iii: PartIII
    cohomology: Dict[int, Dict[int, int]]
    model: str = "graded"

    @property
    def part_i(self) -> bool:
        return not self.part_i_witnesses

    def to_dict(self) -> Dict:
        return {
            "model": self.model,
            "amplitude": self.amplitude,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
            "height_profile": list(self.height_profile),
            "part_i": {"passed": self.part_i, "witnesses": list(self.part_i_witnesses)},
            "part_ii": self.part_ii,
            "part_iii": self.part_iii.to_dict(),
            "cohomology": {
                str(j): {str(t): value for t, value in sorted(hilbert.items())}
                for j, hilbert in sorted(self.cohomology.items())
            },
        }

    def __str__(self) -> str:
        profile = ", ".join(str(h) for h in self.height_profile) or "empty"
        lines = [
            f"model: {self.model}",
            f"amplitude {self.amplitude} (d- = {self.d_minus}, d+ = {self.d_plus})",
            f"support heights: {profile}",
            f"part i:   {'pass' if self.part_i else 'fail, heights ' + str(list(self.part_i_witnesses))}",
            f"part ii:  {self.part_ii}",
        ]
        if self.part_iii.applicable:
            lines.append(
                f"part iii: {'pass' if self.part_iii.passed else 'fail'} (lower vanishing "
                f"{self.part_iii.lower_vanishing}, top perfect {self.part_iii.top_perfect}, "
                f"duality {'not compared' if self.part_iii.duality is None else self.part_iii.duality})"
            )
        else:
            lines.append("part iii: not applicable")
        return "\n".join(lines)

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import json

import numpy as np

from core.errors import MalformedInput, ShapeMismatch, SpecMismatch
from core.serialization import require_keys
from linalg.dataclasses import Matrix
from rings.dataclasses import RingSpec


@dataclass(frozen=True)
class FreeComplex:
    """
    Schema for a bounded cochain complex of free modules
    F^lo -> F^(lo+1) -> ... -> F^hi over one ring.

    differentials[k] is the rank(lo+k) x rank(lo+k+1) matrix of d^(lo+k),
    acting on row vectors. Build through `complexes.operations.make_complex`
    to get the d∘d = 0 check.
    """
    spec: RingSpec
    lo: int
    ranks: Tuple[int, ...]
    differentials: Tuple[Matrix, ...]

    def __post_init__(self):
        if any(rank < 0 for rank in self.ranks):
            raise ShapeMismatch("ranks must be nonnegative")
        if len(self.differentials) != max(len(self.ranks) - 1, 0):
            raise ShapeMismatch(
                f"{len(self.ranks)} terms need {max(len(self.ranks) - 1, 0)} differentials, got {len(self.differentials)}"
            )
        for k, matrix in enumerate(self.differentials):
            if matrix.spec != self.spec:
                raise SpecMismatch(f"d^{self.lo + k} lives over {matrix.spec}, complex over {self.spec}")
            if (matrix.rows, matrix.cols) != (self.ranks[k], self.ranks[k + 1]):
                raise ShapeMismatch(
                    f"d^{self.lo + k} is {matrix.rows}x{matrix.cols}, expected {self.ranks[k]}x{self.ranks[k + 1]}"
                )

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, i: int) -> int:
        if self.lo <= i <= self.hi:
            return self.ranks[i - self.lo]
        return 0

    def differential(self, i: int) -> Matrix:
        """
        d^i : F^i -> F^(i+1); a zero matrix of the right shape outside the stored range.
        """
        if self.lo <= i < self.hi:
            return self.differentials[i - self.lo]
        return Matrix.zero(self.spec, self.rank(i), self.rank(i + 1))

    def is_zero(self) -> bool:
        return all(rank == 0 for rank in self.ranks)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * self.rank(i) for i in self.degrees())

    def has_unit_entry(self) -> bool:
        return any(matrix.has_unit_entry() for matrix in self.differentials)

    #-------- Serialization --------

    def to_dict(self) -> Dict:
        return {
            "ring": self.spec.to_dict(),
            "lo": self.lo,
            "ranks": list(self.ranks),
            "differentials": [matrix.to_list() for matrix in self.differentials],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data: Dict) -> "FreeComplex":
        """
        Parses the complex file format without the d∘d check.
        """
        require_keys(data, ("ring", "lo", "ranks", "differentials"), "complex")
        spec = RingSpec.from_dict(data["ring"])
        ranks = data["ranks"]
        if not isinstance(ranks, list) or not all(isinstance(rank, int) for rank in ranks):
            raise MalformedInput("complex: ranks must be a list of integers")
        differentials = data["differentials"]
        if not isinstance(differentials, list) or len(differentials) != max(len(ranks) - 1, 0):
            raise MalformedInput("complex: need one differential between each pair of adjacent terms")
        return FreeComplex(
            spec=spec,
            lo=int(data["lo"]),
            ranks=tuple(ranks),
            differentials=tuple(
                Matrix.from_list(spec, matrix, ranks[k + 1]) for k, matrix in enumerate(differentials)
            ),
        )

    @staticmethod
    def deserialize(data: str) -> "FreeComplex":
        return FreeComplex.from_dict(json.loads(data))

    def __str__(self) -> str:
        terms = " -> ".join(f"R^{rank}" for rank in self.ranks) or "0"
        return f"{terms} over {self.spec}, degrees {self.lo}..{self.hi}"


@dataclass(frozen=True)
class TauProfile:
    """
    Schema for the ranks of the minimal model of a complex, i.e. tau^i = dim_k H^i(C ⊗ k).
    Only degrees with nonzero tau are stored.
    """
    taus: Dict[int, int]

    @property
    def is_empty(self) -> bool:
        return not self.taus

    @property
    def d_plus(self) -> Optional[int]:
        return max(self.taus) if self.taus else None

    @property
    def d_minus(self) -> Optional[int]:
        return min(self.taus) if self.taus else None

    @property
    def amplitude(self) -> Optional[int]:
        if not self.taus:
            return None
        return self.d_plus - self.d_minus

    def to_dict(self) -> Dict:
        return {
            "taus": {str(degree): tau for degree, tau in sorted(self.taus.items())},
            "amplitude": self.amplitude,
            "d_plus": self.d_plus,
            "d_minus": self.d_minus,
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, TauProfile) and self.taus == other.taus

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.taus.items())))


@dataclass(frozen=True, eq=False)
class FiniteModulePresentation:
    """
    Schema for H^i of a complex over a finite ring, as a subquotient of the
    underlying free Z/p^m-module of F^i.

    generators: Howell rows spanning the cocycles, in expanded coordinates
    relations:  rows r with r @ generators a coboundary
    actions:    one matrix per ring variable, the action on generators
                (well defined modulo relations)
    """
    spec: RingSpec
    degree: int
    ambient_rank: int
    generators: np.ndarray
    relations: np.ndarray
    size_exponent: int
    elementary_divisors: Tuple[int, ...]
    actions: Tuple[np.ndarray, ...] = field(default=())

    @property
    def cardinality(self) -> int:
        return self.spec.p ** self.size_exponent

    def is_zero(self) -> bool:
        return self.size_exponent == 0

    def to_dict(self) -> Dict:
        return {
            "ring": self.spec.to_dict(),
            "degree": self.degree,
            "cardinality": self.cardinality,
            "size_exponent": self.size_exponent,
            "elementary_divisors": list(self.elementary_divisors),
            "generators": self.generators.tolist(),
            "relations": self.relations.tolist(),
            "actions": [action.tolist() for action in self.actions],
        }


@dataclass(frozen=True)
class Minimization:
    """
    Schema for a minimized complex with its comparison maps.

    inclusion[k]:  rank_min x rank matrix of the chain map minimized -> input in degree lo+k
    projection[k]: rank x rank_min matrix of the chain map input -> minimized
    kept[k]:       indices of the input basis vectors surviving in degree lo+k
    """
    complex: FreeComplex
    inclusion: Tuple[Matrix, ...]
    projection: Tuple[Matrix, ...]
    kept: Tuple[Tuple[int, ...], ...]

    def include(self, i: int) -> Matrix:
        return self.inclusion[i - self.complex.lo]

    def project(self, i: int) -> Matrix:
        return self.projection[i - self.complex.lo]

    def transport_endomorphism(self, maps: List[Matrix], lo: int) -> List[Matrix]:
        """
        X -> inclusion X projection, degreewise, for a chain endomorphism given from degree lo.
        """
        return [
            self.include(lo + k) @ matrix @ self.project(lo + k) for k, matrix in enumerate(maps)
        ]

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from math import comb
from typing import Dict, Iterable, List, Tuple
import json

from sympy import isprime

from core.errors import (
    InvalidParameter, MalformedInput, NonPrime, NotAUnit, SpecMismatch, UnsupportedRing, ComputationError,
)

Exponent = Tuple[int, ...]
Term = Tuple[Exponent, int]


class RingKind(Enum):
    COEFFICIENT = "coefficient"
    PATCH = "patch"
    GRADED = "graded"
    TRUNCATED = "truncated"

    def variable_prefix(self) -> str:
        """
        Variables of the R_inf model are x_j, every other ring uses T_j.
        """
        return "x" if self == RingKind.TRUNCATED else "T"


@dataclass(frozen=True)
class RingSpec:
    """
    Schema for one ring of the tower family.

    coefficient: Z/p^m
    patch:       S_n^(m) = (Z/p^m)[T_1..T_q]/((1+T_i)^{p^n} - 1)
    graded:      F_p[T_1..T_q]
    truncated:   (Z/p^m)[x_1..x_q]/(x_1..x_q)^{truncation+1}, the R_inf model
    """
    p: int
    m: int
    n: int
    q: int
    kind: RingKind
    truncation: int = 0

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise NonPrime(f"p = {self.p} is not prime")
        if self.m < 1:
            raise InvalidParameter(f"precision m = {self.m} must be at least 1")
        if self.q < 0 or self.n < 0:
            raise InvalidParameter("level and variable count must be nonnegative")
        if self.kind == RingKind.COEFFICIENT and (self.n != 0 or self.q != 0):
            raise InvalidParameter("a coefficient ring has no level and no variables")
        if self.kind == RingKind.PATCH and self.n < 1:
            raise InvalidParameter(f"patch level n = {self.n} must be at least 1")
        if self.kind == RingKind.GRADED and (self.m != 1 or self.n != 0):
            raise InvalidParameter("the graded ring lives over F_p (m = 1, n = 0)")
        if self.kind == RingKind.TRUNCATED and self.truncation < 1:
            raise InvalidParameter(f"truncation degree {self.truncation} must be at least 1")
        if self.kind != RingKind.TRUNCATED and self.truncation != 0:
            raise InvalidParameter("only the R_inf model carries a truncation degree")

    @property
    def modulus(self) -> int:
        return self.p ** self.m

    @property
    def relation_degree(self) -> int:
        """
        N = p^n, the exponent rewritten by the tower relation.
        """
        return self.p ** self.n

    @property
    def is_finite(self) -> bool:
        return self.kind != RingKind.GRADED

    @property
    def is_scalar(self) -> bool:
        """
        True for rings equal to Z/p^m itself (no variables).
        """
        return self.is_finite and self.q == 0

    @property
    def rank(self) -> int:
        """
        Rank of the ring as a free Z/p^m-module.
        """
        if self.kind == RingKind.GRADED:
            raise UnsupportedRing("the polynomial ring has infinite rank over F_p")
        if self.kind == RingKind.TRUNCATED:
            return comb(self.q + self.truncation, self.truncation)
        if self.kind == RingKind.PATCH:
            return self.relation_degree ** self.q
        return 1

    def basis(self) -> Tuple[Exponent, ...]:
        """
        Monomial basis in lexicographic order.
        """
        return _basis(self)

    def basis_index(self) -> Dict[Exponent, int]:
        return _basis_index(self)

    def variable_names(self) -> List[str]:
        prefix = self.kind.variable_prefix()
        return [f"{prefix}{j + 1}" for j in range(self.q)]

    def at_precision(self, m: int) -> "RingSpec":
        """
        Same ring with coefficients in Z/p^m.
        """
        if self.kind == RingKind.GRADED:
            raise UnsupportedRing("the graded ring has fixed precision 1")
        return RingSpec(self.p, m, self.n, self.q, self.kind, self.truncation)

    def to_dict(self) -> Dict:
        data = {"p": self.p, "m": self.m, "n": self.n, "q": self.q, "kind": self.kind.value}
        if self.kind == RingKind.TRUNCATED:
            data["truncation"] = self.truncation
        return data

    def serialize(self) -> str:
        """
        Converts a ring spec to its JSON descriptor.
        """
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(data: Dict) -> "RingSpec":
        if not isinstance(data, dict):
            raise MalformedInput("ring descriptor must be an object")
        try:
            kind = RingKind(data.get("kind", "patch"))
            return RingSpec(
                p=int(data["p"]),
                m=int(data.get("m", 1)),
                n=int(data.get("n", 0)),
                q=int(data.get("q", 0)),
                kind=kind,
                truncation=int(data.get("truncation", 0)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"bad ring descriptor {data!r}: {e}")

    @staticmethod
    def deserialize(data: str) -> "RingSpec":
        """
        Converts a JSON descriptor back into a ring spec.
        """
        return RingSpec.from_dict(json.loads(data))

    def __str__(self) -> str:
        if self.kind == RingKind.COEFFICIENT:
            return f"Z/{self.modulus}"
        names = ",".join(self.variable_names())
        if self.kind == RingKind.GRADED:
            return f"F_{self.p}[{names}]"
        if self.kind == RingKind.TRUNCATED:
            return f"Z/{self.modulus}[{names}]/(x)^{self.truncation + 1}"
        return f"S_{self.n}^({self.m})[{names}]"


@dataclass(frozen=True)
class RingTowerElement:
    """
    Schema for an element in canonical normal form: sorted (exponent, residue)
    pairs, no zero residues, exponents inside the basis of the ring.
    Build elements through `RingTowerElement.from_terms`, never directly.
    """
    spec: RingSpec
    coeffs: Tuple[Term, ...]

    @staticmethod
    def from_terms(spec: RingSpec, terms) -> "RingTowerElement":
        """
        Normalizes an iterable of (exponent, coefficient) pairs, or a dict,
        into an element.
        """
        items = terms.items() if isinstance(terms, dict) else terms
        raw: Dict[Exponent, int] = {}
        for exponent, coefficient in items:
            exponent = tuple(int(a) for a in exponent)
            if len(exponent) != spec.q or any(a < 0 for a in exponent):
                raise MalformedInput(f"exponent {exponent} does not fit {spec}")
            raw[exponent] = raw.get(exponent, 0) + int(coefficient)
        return RingTowerElement(spec, _normal_form(spec, raw))

    @staticmethod
    def constant(spec: RingSpec, value: int) -> "RingTowerElement":
        return RingTowerElement.from_terms(spec, {(0,) * spec.q: value})

    @staticmethod
    def zero(spec: RingSpec) -> "RingTowerElement":
        return RingTowerElement(spec, ())

    @staticmethod
    def one(spec: RingSpec) -> "RingTowerElement":
        return RingTowerElement.constant(spec, 1)

    @staticmethod
    def variable(spec: RingSpec, index: int) -> "RingTowerElement":
        """
        The variable T_{index+1} (x_{index+1} in the R_inf model).
        """
        if not 0 <= index < spec.q:
            raise InvalidParameter(f"{spec} has no variable number {index + 1}")
        exponent = tuple(1 if j == index else 0 for j in range(spec.q))
        return RingTowerElement.from_terms(spec, {exponent: 1})

    #-------- Queries --------

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def as_dict(self) -> Dict[Exponent, int]:
        return dict(self.coeffs)

    def constant_term(self) -> int:
        zero_exponent = (0,) * self.spec.q
        for exponent, coefficient in self.coeffs:
            if exponent == zero_exponent:
                return coefficient
        return 0

    def is_unit(self) -> bool:
        """
        Local-ring criterion: units are exactly the elements whose constant
        term is prime to p.
        """
        return self.constant_term() % self.spec.p != 0

    def is_constant(self) -> bool:
        zero_exponent = (0,) * self.spec.q
        return all(exponent == zero_exponent for exponent, _ in self.coeffs)

    def degree(self) -> int:
        """
        Total degree; -1 for zero.
        """
        return max((sum(exponent) for exponent, _ in self.coeffs), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(exponent) for exponent, _ in self.coeffs}) <= 1

    #-------- Arithmetic --------

    def _check(self, other: "RingTowerElement"):
        if not isinstance(other, RingTowerElement) or other.spec != self.spec:
            raise SpecMismatch(f"cannot combine elements of {self.spec} and {getattr(other, 'spec', other)}")

    def _coerce(self, other) -> "RingTowerElement":
        if isinstance(other, int):
            return RingTowerElement.constant(self.spec, other)
        self._check(other)
        return other

    def __add__(self, other) -> "RingTowerElement":
        other = self._coerce(other)
        raw = dict(self.coeffs)
        for exponent, coefficient in other.coeffs:
            raw[exponent] = raw.get(exponent, 0) + coefficient
        return RingTowerElement(self.spec, _normal_form(self.spec, raw, reduced=True))

    __radd__ = __add__

    def __neg__(self) -> "RingTowerElement":
        return self.scale(-1)

    def __sub__(self, other) -> "RingTowerElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RingTowerElement":
        return self._coerce(other) - self

    def scale(self, factor: int) -> "RingTowerElement":
        raw = {exponent: coefficient * factor for exponent, coefficient in self.coeffs}
        return RingTowerElement(self.spec, _normal_form(self.spec, raw, reduced=True))

    def __mul__(self, other) -> "RingTowerElement":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return RingTowerElement.zero(self.spec)
        spec = self.spec
        bound = spec.truncation if spec.kind == RingKind.TRUNCATED else None
        raw: Dict[Exponent, int] = {}
        for a, c in self.coeffs:
            for b, d in other.coeffs:
                exponent = tuple(x + y for x, y in zip(a, b))
                if bound is not None and sum(exponent) > bound:
                    continue
                raw[exponent] = raw.get(exponent, 0) + c * d
        return RingTowerElement(spec, _normal_form(spec, raw))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RingTowerElement":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = RingTowerElement.one(self.spec)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "RingTowerElement":
        """
        Two-sided inverse of a unit. The constant part is inverted mod p^m and
        the nilpotent remainder is absorbed by Newton iteration z <- z(2 - xz),
        which squares the error 1 - xz each round.
        """
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit of {self.spec}")
        spec = self.spec
        constant_inverse = pow(self.constant_term(), -1, spec.modulus)
        if self.is_constant():
            return RingTowerElement.constant(spec, constant_inverse)
        if spec.kind == RingKind.GRADED:
            raise UnsupportedRing(f"{self} is a local unit whose inverse is a power series, not a polynomial")
        one = RingTowerElement.one(spec)
        z = RingTowerElement.constant(spec, constant_inverse)
        for _ in range(64):
            error = one - self * z
            if not error:
                return z
            z = z * (one + error)
        raise ComputationError(f"inverse of {self} did not converge")

    #-------- Serialization --------

    def to_list(self) -> List:
        return [[list(exponent), coefficient] for exponent, coefficient in self.coeffs]

    def serialize(self) -> str:
        """
        Converts an element to its canonical JSON array.
        """
        return json.dumps(self.to_list())

    @staticmethod
    def from_list(spec: RingSpec, data) -> "RingTowerElement":
        if isinstance(data, int):
            return RingTowerElement.constant(spec, data)
        if not isinstance(data, list):
            raise MalformedInput(f"element must be a list of [exponents, coefficient] pairs, got {data!r}")
        try:
            return RingTowerElement.from_terms(spec, [(tuple(exponent), int(coefficient)) for exponent, coefficient in data])
        except (TypeError, ValueError) as e:
            raise MalformedInput(f"bad element {data!r}: {e}")

    @staticmethod
    def deserialize(spec: RingSpec, data: str) -> "RingTowerElement":
        """
        Converts a JSON array back into an element of spec.
        """
        return RingTowerElement.from_list(spec, json.loads(data))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        names = self.spec.variable_names()
        parts = []
        for exponent, coefficient in self.coeffs:
            monomial = "*".join(
                name if a == 1 else f"{name}^{a}" for name, a in zip(names, exponent) if a
            )
            if not monomial:
                parts.append(str(coefficient))
            elif coefficient == 1:
                parts.append(monomial)
            else:
                parts.append(f"{coefficient}*{monomial}")
        return " + ".join(parts)


@dataclass(frozen=True)
class RingMap:
    """
    Schema for a ring homomorphism given by the images of T_1..T_q.
    Coefficients go through the residue map Z/p^m -> Z/p^m'. Construction
    checks that every relation of the source maps to zero.
    """
    source: RingSpec
    target: RingSpec
    images: Tuple[RingTowerElement, ...]

    def __post_init__(self):
        if self.source.p != self.target.p:
            raise SpecMismatch("ring maps must preserve the prime")
        if len(self.images) != self.source.q:
            raise SpecMismatch(f"{self.source} needs {self.source.q} images, got {len(self.images)}")
        for image in self.images:
            if image.spec != self.target:
                raise SpecMismatch(f"image {image} does not live in {self.target}")
        if self.target.m > self.source.m:
            raise SpecMismatch(f"p^{self.source.m} = 0 in {self.source} but not in {self.target}")
        for relation in _source_relations(self.source):
            if evaluate(relation, self.images, self.target):
                raise SpecMismatch(f"a defining relation of {self.source} does not map to zero in {self.target}")

    def __call__(self, element: RingTowerElement) -> RingTowerElement:
        if element.spec != self.source:
            raise SpecMismatch(f"{element} is not an element of {self.source}")
        return evaluate(element.coeffs, self.images, self.target)

    def compose(self, first: "RingMap") -> "RingMap":
        """
        self ∘ first.
        """
        if first.target != self.source:
            raise SpecMismatch("maps are not composable")
        return RingMap(first.source, self.target, tuple(self(image) for image in first.images))

    def to_dict(self) -> Dict:
        return {
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "images": [image.to_list() for image in self.images],
        }


#-------- Helper Functions --------

@lru_cache(maxsize=None)
def _basis(spec: RingSpec) -> Tuple[Exponent, ...]:
    """
    Lexicographically sorted monomial basis of a finite ring.
    """
    if spec.kind == RingKind.GRADED:
        raise UnsupportedRing("the polynomial ring has no finite monomial basis")
    if spec.kind == RingKind.TRUNCATED:
        return tuple(
            exponent for exponent in product(range(spec.truncation + 1), repeat=spec.q)
            if sum(exponent) <= spec.truncation
        )
    if spec.kind == RingKind.PATCH:
        return tuple(product(range(spec.relation_degree), repeat=spec.q))
    return ((),)


@lru_cache(maxsize=None)
def _basis_index(spec: RingSpec) -> Dict[Exponent, int]:
    return {exponent: index for index, exponent in enumerate(_basis(spec))}


_POWER_TABLES: Dict[Tuple[int, int, int], List[Tuple[int, ...]]] = {}


def _reduced_power(p: int, m: int, n: int, e: int) -> Tuple[int, ...]:
    """
    Coefficients c_0..c_{N-1} with T^e = sum c_k T^k in (Z/p^m)[T]/((1+T)^N - 1), N = p^n.
    Built by multiplying by T and rewriting T^N = -sum_{0<k<N} C(N,k) T^k.
    """
    N = p ** n
    modulus = p ** m
    table = _POWER_TABLES.setdefault((p, m, n), [])
    if not table:
        tail = tuple((-comb(N, k)) % modulus if k else 0 for k in range(N))
        table.append(tail)
    # table[j] holds T^{N+j}
    while len(table) <= e - N:
        previous = table[-1]
        overflow = previous[-1]
        shifted = (0,) + previous[:-1]
        table.append(tuple((shifted[k] + overflow * table[0][k]) % modulus for k in range(N)))
    return table[e - N]


def _normal_form(spec: RingSpec, raw: Dict[Exponent, int], reduced: bool = False) -> Tuple[Term, ...]:
    """
    Rewrites a raw exponent -> coefficient map into canonical sorted terms.
    `reduced` signals that exponents already lie in the basis.
    """
    modulus = spec.p if spec.kind == RingKind.GRADED else spec.modulus
    if spec.kind == RingKind.PATCH and not reduced:
        N = spec.relation_degree
        expanded: Dict[Exponent, int] = {}
        for exponent, coefficient in raw.items():
            if coefficient % modulus == 0:
                continue
            if all(a < N for a in exponent):
                expanded[exponent] = expanded.get(exponent, 0) + coefficient
                continue
            # product of the univariate reductions of each variable
            partial: Dict[Exponent, int] = {(): coefficient}
            for a in exponent:
                if a < N:
                    factors = ((a, 1),)
                else:
                    factors = tuple((k, c) for k, c in enumerate(_reduced_power(spec.p, spec.m, spec.n, a)) if c)
                partial = {
                    prefix + (k,): value * c
                    for prefix, value in partial.items()
                    for k, c in factors
                }
            for key, value in partial.items():
                expanded[key] = expanded.get(key, 0) + value
        raw = expanded
    elif spec.kind == RingKind.TRUNCATED and not reduced:
        raw = {exponent: c for exponent, c in raw.items() if sum(exponent) <= spec.truncation}
    return tuple(sorted(
        (exponent, coefficient % modulus) for exponent, coefficient in raw.items() if coefficient % modulus
    ))


def _source_relations(spec: RingSpec) -> List[Tuple[Term, ...]]:
    """
    Generators of the relation ideal presenting spec over Z[T_1..T_q], as raw
    integer terms (the coefficient relation p^m is handled by the precision check).
    """
    if spec.kind == RingKind.PATCH:
        # (1+T_i)^N - 1 written out
        N = spec.relation_degree
        return [
            tuple((tuple(k if j == i else 0 for j in range(spec.q)), comb(N, k)) for k in range(1, N + 1))
            for i in range(spec.q)
        ]
    if spec.kind == RingKind.TRUNCATED:
        return [
            ((exponent, 1),)
            for exponent in product(range(spec.truncation + 2), repeat=spec.q)
            if sum(exponent) == spec.truncation + 1
        ]
    return []


def evaluate(terms: Iterable[Term], images: Tuple[RingTowerElement, ...], target: RingSpec) -> RingTowerElement:
    """
    Evaluates the polynomial sum c * T^a given by terms at images in target,
    with coefficients sent through Z -> Z/p^m'. Variables mapping to themselves
    take the direct path through the normal form.
    """
    terms = tuple(terms)
    if target.q == len(images) and all(
        image == RingTowerElement.variable(target, j) for j, image in enumerate(images)
    ):
        return RingTowerElement.from_terms(target, terms)
    zero_exponent = (0,) * len(images)
    if all(not image for image in images):
        constant = sum(c for exponent, c in terms if exponent == zero_exponent)
        return RingTowerElement.constant(target, constant)
    powers: Dict[Tuple[int, int], RingTowerElement] = {}

    def power(j: int, a: int) -> RingTowerElement:
        if (j, a) not in powers:
            powers[(j, a)] = images[j] ** a
        return powers[(j, a)]

    result = RingTowerElement.zero(target)
    for exponent, coefficient in terms:
        term = RingTowerElement.constant(target, coefficient)
        for j, a in enumerate(exponent):
            if a and term:
                term = term * power(j, a)
        result = result + term
    return result

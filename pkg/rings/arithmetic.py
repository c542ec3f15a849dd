from itertools import product
from typing import Iterator, Sequence, Union
import logging

from core.errors import InvalidParameter, NotAReduction, SpecMismatch
from rings.dataclasses import RingKind, RingMap, RingSpec, RingTowerElement, evaluate

logger = logging.getLogger(__name__)

ARITH_OPS = ("add", "sub", "neg", "mul", "normal_form", "is_unit", "invert")


#-------- Ring constructors --------

def make_patch_ring(p: int, m: int, n: int, q: int) -> RingSpec:
    """
    S_n^(m) = (Z/p^m)[T_1..T_q]/((1+T_i)^{p^n} - 1), a local ring with maximal
    ideal (p, T_1..T_q) and residue field F_p. Raises NonPrime or InvalidParameter.
    """
    if n < 1:
        raise InvalidParameter(f"patch level n = {n} must be at least 1")
    if q < 0:
        raise InvalidParameter(f"variable count q = {q} must be nonnegative")
    return RingSpec(p=p, m=m, n=n, q=q, kind=RingKind.PATCH)


def coefficient_ring(p: int, m: int) -> RingSpec:
    return RingSpec(p=p, m=m, n=0, q=0, kind=RingKind.COEFFICIENT)


def graded_ring(p: int, q: int) -> RingSpec:
    return RingSpec(p=p, m=1, n=0, q=q, kind=RingKind.GRADED)


def truncated_ring(p: int, m: int, g: int, truncation: int) -> RingSpec:
    """
    The R_inf model (Z/p^m)[x_1..x_g]/(x_1..x_g)^{truncation+1}.
    """
    return RingSpec(p=p, m=m, n=0, q=g, kind=RingKind.TRUNCATED, truncation=truncation)


#-------- Element operations --------

def ring_arith(op: str, *args: RingTowerElement) -> Union[RingTowerElement, bool]:
    """
    Dispatches one ring operation on elements sharing a spec.
    `normal_form` accepts raw terms: ring_arith("normal_form", spec, terms).
    """
    if op == "normal_form":
        spec, terms = args
        if isinstance(terms, RingTowerElement):
            terms = terms.coeffs
        return RingTowerElement.from_terms(spec, terms)
    if op not in ARITH_OPS:
        raise InvalidParameter(f"unknown ring operation {op!r}")
    specs = {x.spec for x in args}
    if len(specs) != 1:
        raise SpecMismatch(f"{op} needs elements of one ring, got {len(specs)} rings")
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "neg":
        return -args[0]
    if op == "mul":
        return args[0] * args[1]
    if op == "is_unit":
        return args[0].is_unit()
    return args[0].inverse()


def substitute(element: RingTowerElement, images: Sequence[RingTowerElement], target: RingSpec) -> RingTowerElement:
    """
    Evaluates element at images without claiming the result is a ring map
    (used for the structure maps of a patching tower, whose source is a power series ring).
    """
    if len(images) != element.spec.q:
        raise SpecMismatch(f"{element.spec} needs {element.spec.q} images, got {len(images)}")
    return evaluate(element.coeffs, tuple(images), target)


def enumerate_ring(spec: RingSpec) -> Iterator[RingTowerElement]:
    """
    Every element of a finite ring, in the order of the coefficient vectors.
    """
    basis = spec.basis()
    for coefficients in product(range(spec.modulus), repeat=len(basis)):
        yield RingTowerElement.from_terms(spec, zip(basis, coefficients))


def coordinates(element: RingTowerElement) -> list:
    """
    Coefficient vector of element in the monomial basis of its ring.
    """
    index = element.spec.basis_index()
    vector = [0] * len(index)
    for exponent, coefficient in element.coeffs:
        vector[index[exponent]] = coefficient
    return vector


def from_coordinates(spec: RingSpec, vector: Sequence[int]) -> RingTowerElement:
    return RingTowerElement.from_terms(spec, zip(spec.basis(), (int(c) for c in vector)))


#-------- Ring maps --------

def reduction_map(source: RingSpec, target: RingSpec) -> RingMap:
    """
    T_i -> T_i with coefficients reduced mod p^m'. Defined when the target sits
    below the source in the tower: same p and q, level and precision not larger.
    """
    if source.p != target.p or source.q != target.q:
        raise NotAReduction(f"{source} and {target} differ in p or q")
    if target.m > source.m:
        raise NotAReduction(f"precision {target.m} exceeds source precision {source.m}")
    if source.kind == RingKind.PATCH and target.kind == RingKind.PATCH:
        if target.n > source.n:
            raise NotAReduction(f"level {target.n} exceeds source level {source.n}")
    elif source.kind == RingKind.TRUNCATED and target.kind == RingKind.TRUNCATED:
        if target.truncation > source.truncation:
            raise NotAReduction("a reduction cannot raise the truncation degree")
    elif not (source.kind == target.kind == RingKind.COEFFICIENT):
        if not (source.is_scalar and target.is_scalar):
            raise NotAReduction(f"no tower reduction from {source} to {target}")
    images = tuple(RingTowerElement.variable(target, j) for j in range(target.q))
    logger.debug("reduction map %s -> %s", source, target)
    return RingMap(source, target, images)


def residue_map(spec: RingSpec) -> RingMap:
    """
    The residue field map S -> k = F_p, T_j -> 0.
    """
    target = coefficient_ring(spec.p, 1)
    return RingMap(spec, target, tuple(RingTowerElement.zero(target) for _ in range(spec.q)))


def augmentation_map(spec: RingSpec) -> RingMap:
    """
    S_n^(m) -> S_n^(m)/a = Z/p^m where a = (T_1..T_q).
    """
    target = coefficient_ring(spec.p, spec.m)
    return RingMap(spec, target, tuple(RingTowerElement.zero(target) for _ in range(spec.q)))

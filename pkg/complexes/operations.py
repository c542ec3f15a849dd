from itertools import combinations
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from core.errors import NotAComplex, ShapeMismatch, SpecMismatch, UnsupportedRing
from complexes.dataclasses import FiniteModulePresentation, FreeComplex, Minimization, TauProfile
from linalg.dataclasses import Matrix
from linalg.expansion import expand_array, multiplication_array
from linalg.howell import (
    elementary_divisors_array, howell_array, kernel_array, solve_array, span_exponent_array,
)
from rings.dataclasses import RingKind, RingMap, RingSpec, RingTowerElement

logger = logging.getLogger(__name__)


#-------- Construction --------

def make_complex(spec: RingSpec, lo: int, differentials: Sequence[Matrix], ranks: Optional[Sequence[int]] = None) -> FreeComplex:
    """
    Validated complex with d^lo = differentials[0]. `ranks` is only needed when
    there are no differentials (a single term or the empty complex).
    Raises ShapeMismatch or NotAComplex.
    """
    differentials = tuple(differentials)
    if ranks is None:
        if differentials:
            ranks = [matrix.rows for matrix in differentials] + [differentials[-1].cols]
        else:
            ranks = []
    C = FreeComplex(spec=spec, lo=lo, ranks=tuple(ranks), differentials=differentials)
    check_complex(C)
    return C


def check_complex(C: FreeComplex):
    for k in range(len(C.differentials) - 1):
        if not (C.differentials[k] @ C.differentials[k + 1]).is_zero():
            raise NotAComplex(f"d^{C.lo + k + 1} ∘ d^{C.lo + k} is not zero", degree=C.lo + k)


def zero_complex(spec: RingSpec) -> FreeComplex:
    return FreeComplex(spec=spec, lo=0, ranks=(), differentials=())


def direct_sum(C: FreeComplex, D: FreeComplex) -> FreeComplex:
    if C.spec != D.spec:
        raise SpecMismatch("direct sums need complexes over one ring")
    if not C.ranks:
        return D
    if not D.ranks:
        return C
    lo, hi = min(C.lo, D.lo), max(C.hi, D.hi)
    ranks = tuple(C.rank(i) + D.rank(i) for i in range(lo, hi + 1))
    differentials = tuple(
        Matrix.block_diagonal([C.differential(i), D.differential(i)], C.spec) for i in range(lo, hi)
    )
    return FreeComplex(C.spec, lo, ranks, differentials)


def shift(C: FreeComplex, k: int) -> FreeComplex:
    """
    C[k], with C[k]^i = C^(i+k) and differentials multiplied by (-1)^k.
    """
    sign = -1 if k % 2 else 1
    return FreeComplex(C.spec, C.lo - k, C.ranks, tuple(matrix.scale(sign) for matrix in C.differentials))


def koszul_complex(spec: RingSpec, elements: Sequence[RingTowerElement], top: int) -> FreeComplex:
    """
    Koszul complex of f_1..f_c as a cochain complex ending in degree top: the
    term of degree top-k has basis e_S over the k-subsets S (lexicographic), and
    e_S -> sum_t (-1)^t f_(s_t) e_(S minus s_t).
    """
    c = len(elements)
    subsets = [list(combinations(range(c), k)) for k in range(c + 1)]
    ranks = tuple(len(subsets[k]) for k in range(c, -1, -1))
    zero = RingTowerElement.zero(spec)
    differentials = []
    for k in range(c, 0, -1):
        index = {S: position for position, S in enumerate(subsets[k - 1])}
        rows = []
        for S in subsets[k]:
            row = [zero] * len(subsets[k - 1])
            for t, s in enumerate(S):
                face = S[:t] + S[t + 1:]
                row[index[face]] = elements[s] if t % 2 == 0 else -elements[s]
            rows.append(tuple(row))
        differentials.append(Matrix(spec, len(subsets[k]), len(subsets[k - 1]), tuple(rows)))
    return FreeComplex(spec, top - c, ranks, tuple(differentials))


def koszul_homotopy(spec: RingSpec, c: int, j: int, top: int) -> List[Matrix]:
    """
    Wedge with e_j on the Koszul complex of c elements: h^i : F^i -> F^(i-1),
    listed for i = top-c .. top, with h d + d h = f_j.
    """
    subsets = [list(combinations(range(c), k)) for k in range(c + 1)]
    zero, one = RingTowerElement.zero(spec), RingTowerElement.one(spec)
    maps = []
    for k in range(c, -1, -1):
        if k == c:
            maps.append(Matrix.zero(spec, len(subsets[k]), 0))
            continue
        index = {S: position for position, S in enumerate(subsets[k + 1])}
        rows = []
        for S in subsets[k]:
            row = [zero] * len(subsets[k + 1])
            if j not in S:
                sign = sum(1 for s in S if s < j)
                row[index[tuple(sorted(S + (j,)))]] = one if sign % 2 == 0 else -one
            rows.append(tuple(row))
        maps.append(Matrix(spec, len(subsets[k]), len(subsets[k + 1]), tuple(rows)))
    return maps


#-------- Base change and duality --------

def tensor_along(C: FreeComplex, f: RingMap) -> FreeComplex:
    if f.source != C.spec:
        raise SpecMismatch(f"map starts at {f.source}, complex lives over {C.spec}")
    return FreeComplex(f.target, C.lo, C.ranks, tuple(matrix.apply_map(f) for matrix in C.differentials))


def dual(C: FreeComplex) -> FreeComplex:
    """
    Hom(C, R): degrees negated, differentials transposed.
    """
    if not C.ranks:
        return C
    return FreeComplex(
        C.spec, -C.hi, tuple(reversed(C.ranks)),
        tuple(matrix.transpose() for matrix in reversed(C.differentials)),
    )


#-------- Minimization --------

def minimize(C: FreeComplex) -> FreeComplex:
    return minimize_with_maps(C).complex


def minimize_with_maps(C: FreeComplex) -> Minimization:
    """
    Cancels unit pivots until every differential entry lies in the maximal
    ideal. The pivot is the first unit in row-major order of the lowest
    degree differential that has one. Cancelling u = d^i[a][b] removes e_a
    from F^i and f_b from F^(i+1) and replaces d^i by
    d^i[k][j] - d^i[k][b] u^-1 d^i[a][j]. The chain maps between the
    minimized and the input complex are accumulated along the way.
    """
    spec = C.spec
    differentials = list(C.differentials)
    inclusion = [Matrix.identity(spec, rank) for rank in C.ranks]
    projection = [Matrix.identity(spec, rank) for rank in C.ranks]
    kept = [tuple(range(rank)) for rank in C.ranks]
    cancelled = 0
    while True:
        pivot = _first_unit(differentials)
        if pivot is None:
            break
        k, a, b = pivot
        delta = differentials[k]
        u = delta.entry(a, b)
        u_inverse = u.inverse()
        column = delta.column(b)
        pivot_row = delta.row(a)
        rows = [i for i in range(delta.rows) if i != a]
        cols = [j for j in range(delta.cols) if j != b]
        differentials[k] = Matrix(spec, len(rows), len(cols), tuple(
            tuple(delta.entry(i, j) - column[i] * u_inverse * pivot_row[j] for j in cols) for i in rows
        ))
        if k > 0:
            differentials[k - 1] = differentials[k - 1].without(col=a)
        if k + 1 < len(differentials):
            differentials[k + 1] = differentials[k + 1].without(row=b)
        # step maps in degree lo+k (source) and lo+k+1 (target)
        zero = RingTowerElement.zero(spec)
        one = RingTowerElement.one(spec)
        source_inclusion = Matrix(spec, len(rows), delta.rows, tuple(
            tuple(one if j == i else (-(column[i] * u_inverse) if j == a else zero) for j in range(delta.rows))
            for i in rows
        ))
        source_projection = Matrix.identity(spec, delta.rows).without(col=a)
        target_inclusion = Matrix.identity(spec, delta.cols).without(row=b)
        target_projection = Matrix(spec, delta.cols, len(cols), tuple(
            tuple(-(u_inverse * pivot_row[j]) for j in cols) if i == b
            else tuple(one if j == i else zero for j in cols)
            for i in range(delta.cols)
        ))
        inclusion[k] = source_inclusion @ inclusion[k]
        inclusion[k + 1] = target_inclusion @ inclusion[k + 1]
        projection[k] = projection[k] @ source_projection
        projection[k + 1] = projection[k + 1] @ target_projection
        kept[k] = kept[k][:a] + kept[k][a + 1:]
        kept[k + 1] = kept[k + 1][:b] + kept[k + 1][b + 1:]
        cancelled += 1
    ranks = tuple(len(indices) for indices in kept)
    logger.debug("minimized %s: %d pivots cancelled, ranks %s", C, cancelled, ranks)
    return Minimization(
        complex=FreeComplex(spec, C.lo, ranks, tuple(differentials)),
        inclusion=tuple(inclusion),
        projection=tuple(projection),
        kept=tuple(kept),
    )


def tau_profile(C: FreeComplex) -> TauProfile:
    minimal = minimize(C)
    return TauProfile({i: minimal.rank(i) for i in minimal.degrees() if minimal.rank(i)})


#-------- Cohomology over finite rings --------

def cohomology(C: FreeComplex, i: int, with_actions: bool = True) -> FiniteModulePresentation:
    """
    H^i(C) = ker d^i / im d^(i-1), computed on the underlying free
    Z/p^m-modules. Reports the cardinality, the elementary divisors and the
    action of every ring variable on the Howell generators of the cocycles.
    """
    spec = C.spec
    if not spec.is_finite:
        raise UnsupportedRing("cohomology over the polynomial ring needs the graded engine")
    p, m, rho = spec.p, spec.m, spec.rank
    ambient = C.rank(i) * rho
    cocycles = _cocycle_rows(C, i)
    coboundaries = expand_array(C.differential(i - 1)) if C.rank(i - 1) else np.zeros((0, ambient), dtype=np.int64)
    base = span_exponent_array(coboundaries, p, m)
    size_exponent = span_exponent_array(cocycles, p, m) - base
    divisors = elementary_divisors_array(cocycles, coboundaries, p, m)
    g = cocycles.shape[0]
    stacked = np.vstack([cocycles, coboundaries]) if g else coboundaries
    relations = kernel_array(stacked, p, m)[:, :g] if g else np.zeros((0, 0), dtype=np.int64)
    relations = howell_array(relations, p, m)[0] if relations.size else np.zeros((0, g), dtype=np.int64)
    actions = []
    if with_actions and g:
        for j in range(spec.q):
            multiply = multiplication_array(RingTowerElement.variable(spec, j), C.rank(i))
            images = np.mod(cocycles @ multiply, spec.modulus)
            actions.append(np.array([solve_array(stacked, image, p, m)[:g] for image in images], dtype=np.int64))
    return FiniteModulePresentation(
        spec=spec,
        degree=i,
        ambient_rank=ambient,
        generators=cocycles,
        relations=relations,
        size_exponent=size_exponent,
        elementary_divisors=divisors,
        actions=tuple(actions),
    )


def cohomology_exponent(C: FreeComplex, i: int) -> int:
    """
    log_p |H^i(C)|.
    """
    spec = C.spec
    if not spec.is_finite:
        raise UnsupportedRing("cohomology over the polynomial ring needs the graded engine")
    ambient = C.rank(i) * spec.rank
    coboundaries = expand_array(C.differential(i - 1)) if C.rank(i - 1) else np.zeros((0, ambient), dtype=np.int64)
    return span_exponent_array(_cocycle_rows(C, i), spec.p, spec.m) - span_exponent_array(coboundaries, spec.p, spec.m)


def top_cohomology_degree(C: FreeComplex) -> Optional[int]:
    """
    Greatest i with H^i(C) != 0, None when C is acyclic.
    """
    for i in reversed(C.degrees()):
        if cohomology_exponent(C, i):
            return i
    return None


#-------- Helper Functions --------

def _first_unit(differentials: List[Matrix]) -> Optional[Tuple[int, int, int]]:
    for k, matrix in enumerate(differentials):
        for a, row in enumerate(matrix.entries):
            for b, entry in enumerate(row):
                if entry.is_unit():
                    if entry.spec.kind == RingKind.GRADED and not entry.is_constant():
                        raise UnsupportedRing(
                            f"{entry} is a unit only after localization; homogenize the complex first"
                        )
                    return k, a, b
    return None


def _cocycle_rows(C: FreeComplex, i: int) -> np.ndarray:
    spec = C.spec
    ambient = C.rank(i) * spec.rank
    if C.rank(i + 1) == 0:
        return howell_array(np.eye(ambient, dtype=np.int64), spec.p, spec.m)[0]
    return kernel_array(expand_array(C.differential(i)), spec.p, spec.m)


def check_shapes(maps: Sequence[Matrix], C: FreeComplex, shift_by: int = 0):
    """
    Checks that maps[k] is a square endomorphism (shift_by = 0) or a map
    F^i -> F^(i+shift_by) for i = C.lo + k.
    """
    if len(maps) != len(C.ranks):
        raise ShapeMismatch(f"expected one map per degree of {C}, got {len(maps)}")
    for k, matrix in enumerate(maps):
        i = C.lo + k
        if (matrix.rows, matrix.cols) != (C.rank(i), C.rank(i + shift_by)):
            raise ShapeMismatch(f"map in degree {i} has shape {matrix.rows}x{matrix.cols}")

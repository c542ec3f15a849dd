from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np

from core.errors import NoSolution, ShapeMismatch, SpecMismatch
from linalg.dataclasses import HowellForm, Matrix
from rings.dataclasses import RingSpec

logger = logging.getLogger(__name__)

# (row, column, valuation) of one pivot; the pivot entry is p^valuation
Pivot = Tuple[int, int, int]


def valuation(x: int, p: int, m: int) -> int:
    """
    p-adic valuation of x in Z/p^m, with valuation(0) = m.
    """
    x %= p ** m
    if x == 0:
        return m
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


#-------- Array engine over Z/p^m --------

def howell_array(array: np.ndarray, p: int, m: int) -> Tuple[np.ndarray, List[Pivot]]:
    """
    Howell form of an integer array over Z/p^m.

    Z/p^m is a chain ring, so every entry is a unit times p^v. For each column
    the active row of least valuation becomes the pivot and is scaled to p^v,
    rows below are cleared with it, and when v > 0 the row p^(m-v) * pivot_row
    (zero in the pivot column) is fed back in so that the result keeps the
    Howell property. Entries above each pivot are finally reduced into
    [0, p^v). Returns the nonzero rows and the pivots.
    """
    modulus = p ** m
    array = np.mod(np.asarray(array, dtype=np.int64), modulus)
    if array.ndim != 2:
        raise ShapeMismatch("expected a two-dimensional array")
    rows, cols = array.shape
    work = np.zeros((rows + cols, cols), dtype=np.int64)
    work[:rows] = array
    count = rows
    pivots: List[Pivot] = []
    r = 0
    for c in range(cols):
        if r >= count:
            break
        valuations = [valuation(int(x), p, m) for x in work[r:count, c]]
        v = min(valuations)
        if v == m:
            continue
        j = r + valuations.index(v)
        if j != r:
            work[[r, j]] = work[[j, r]]
        unit = int(work[r, c]) // p ** v
        if unit != 1:
            work[r] = np.mod(work[r] * pow(unit, -1, modulus), modulus)
        factors = work[r + 1:count, c] // p ** v
        if factors.any():
            work[r + 1:count] = np.mod(work[r + 1:count] - np.outer(factors, work[r]), modulus)
        if v > 0:
            annihilated = np.mod(work[r] * p ** (m - v), modulus)
            if annihilated.any():
                work[count] = annihilated
                count += 1
        pivots.append((r, c, v))
        r += 1
    for i, c, v in pivots:
        factors = work[:i, c] // p ** v
        if factors.any():
            work[:i] = np.mod(work[:i] - np.outer(factors, work[i]), modulus)
    return work[:len(pivots)].copy(), pivots


def howell_complete(array: np.ndarray, p: int, m: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[Pivot]]:
    """
    Howell form H of array, a transformation U with U @ array = H, and the
    Howell form K of the left kernel {x : x @ array = 0}, all read off the
    Howell form of [array | I].
    """
    array = np.asarray(array, dtype=np.int64)
    rows, cols = array.shape
    augmented = np.hstack([np.mod(array, p ** m), np.eye(rows, dtype=np.int64)])
    reduced, pivots = howell_array(augmented, p, m)
    left = [(i, c, v) for i, c, v in pivots if c < cols]
    split = len(left)
    H = reduced[:split, :cols]
    U = reduced[:split, cols:]
    K = reduced[split:, cols:]
    return H, U, K, left


def kernel_array(array: np.ndarray, p: int, m: int) -> np.ndarray:
    """
    Generators (in Howell form) of the left kernel of array over Z/p^m.
    """
    _, _, K, _ = howell_complete(array, p, m)
    return K


def solve_array(array: np.ndarray, target: np.ndarray, p: int, m: int) -> np.ndarray:
    """
    Some x with x @ array = target over Z/p^m. Raises NoSolution when the
    target is outside the row span.
    """
    H, U, _, pivots = howell_complete(array, p, m)
    return _solve_reduced(H, U, pivots, target, p, m)


def in_span_array(rows: np.ndarray, vector: np.ndarray, p: int, m: int) -> bool:
    H, pivots = howell_array(rows, p, m)
    residual = _reduce_vector(H, pivots, vector, p, m)
    return residual is not None and not residual.any()


def span_exponent_array(rows: np.ndarray, p: int, m: int) -> int:
    """
    log_p of the number of elements of the row span.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return 0
    _, pivots = howell_array(rows, p, m)
    return sum(m - v for _, _, v in pivots)


def elementary_divisors_array(generators: np.ndarray, relations: np.ndarray, p: int, m: int) -> Tuple[int, ...]:
    """
    Exponents e_1 <= e_2 <= ... with span(generators)/span(relations) isomorphic
    to the sum of the Z/p^e_i. The relations must lie inside the generator span.

    With s_k = log_p |p^k K + I| - log_p |I| the quotient has s_{j-1} - s_j
    cyclic factors of order at least p^j.
    """
    generators = _as_rows(generators)
    relations = _as_rows(relations, generators.shape[1])
    base = span_exponent_array(relations, p, m)
    sizes = []
    for k in range(m + 2):
        scaled = np.mod(generators * p ** k, p ** m)
        sizes.append(span_exponent_array(np.vstack([scaled, relations]), p, m) - base)
    at_least = [sizes[j - 1] - sizes[j] for j in range(1, m + 2)]
    divisors: List[int] = []
    for j in range(1, m + 1):
        divisors.extend([j] * (at_least[j - 1] - at_least[j]))
    return tuple(divisors)


#-------- Matrix interface --------

def howell_form(A: Matrix) -> HowellForm:
    """
    Howell form of a matrix over Z/p^m. Equal row spans give identical forms.
    """
    spec = _scalar_spec(A)
    H, U, _, pivots = howell_complete(A.to_array(), spec.p, spec.m)
    logger.debug("howell form of a %dx%d matrix has %d rows", A.rows, A.cols, len(pivots))
    return HowellForm(
        H=_wrap(spec, H, A.cols),
        U=_wrap(spec, U, A.rows),
        pivots=tuple((c, v) for _, c, v in pivots),
    )


def kernel_and_solve(A: Matrix, b: Optional[Sequence] = None) -> Tuple[Matrix, Optional[Matrix]]:
    """
    Generators of {x : xA = 0} and, when b is given, a row x with xA = b.
    """
    spec = _scalar_spec(A)
    H, U, K, pivots = howell_complete(A.to_array(), spec.p, spec.m)
    kernel = _wrap(spec, K, A.rows)
    if b is None:
        return kernel, None
    target = _vector(spec, b, A.cols)
    solution = _solve_reduced(H, U, pivots, target, spec.p, spec.m)
    return kernel, Matrix.from_array(spec, solution.reshape(1, A.rows))


def span_exponent(A: Matrix) -> int:
    spec = _scalar_spec(A)
    return span_exponent_array(A.to_array(), spec.p, spec.m)


def elementary_divisors(generators: Matrix, relations: Matrix) -> Tuple[int, ...]:
    spec = _scalar_spec(generators)
    if relations.spec != spec or relations.cols != generators.cols:
        raise SpecMismatch("generators and relations must live in the same free module")
    return elementary_divisors_array(generators.to_array(), relations.to_array(), spec.p, spec.m)


#-------- Helper Functions --------

def _scalar_spec(A: Matrix) -> RingSpec:
    if not A.spec.is_scalar:
        raise SpecMismatch(f"Howell forms need Z/p^m, got {A.spec}; expand scalars first")
    return A.spec


def _wrap(spec: RingSpec, array: np.ndarray, cols: int) -> Matrix:
    if array.shape[0] == 0:
        return Matrix.zero(spec, 0, cols)
    return Matrix.from_array(spec, array)


def _vector(spec: RingSpec, b, cols: int) -> np.ndarray:
    if isinstance(b, Matrix):
        vector = b.to_array().reshape(-1)
    else:
        vector = np.array([
            entry.constant_term() if hasattr(entry, "constant_term") else int(entry) for entry in b
        ], dtype=np.int64)
    if vector.shape != (cols,):
        raise ShapeMismatch(f"right-hand side must have {cols} entries")
    return np.mod(vector, spec.modulus)


def _as_rows(array, cols: Optional[int] = None) -> np.ndarray:
    array = np.asarray(array, dtype=np.int64)
    if array.size == 0:
        return np.zeros((0, cols if cols is not None else (array.shape[1] if array.ndim == 2 else 0)), dtype=np.int64)
    return array


def _reduce_vector(H: np.ndarray, pivots: List[Pivot], vector: np.ndarray, p: int, m: int,
                   U: Optional[np.ndarray] = None, combination: Optional[np.ndarray] = None):
    """
    Clears vector against the pivot rows of H. Returns None as soon as a pivot
    entry is not divisible by the pivot, else the residual (zero iff vector is in the span).
    """
    modulus = p ** m
    residual = np.mod(np.asarray(vector, dtype=np.int64), modulus)
    for k, (_, c, v) in enumerate(pivots):
        entry = int(residual[c])
        if entry % p ** v:
            return None
        t = entry // p ** v
        if t:
            residual = np.mod(residual - t * H[k], modulus)
            if combination is not None:
                combination[:] = np.mod(combination + t * U[k], modulus)
    return residual


def _solve_reduced(H, U, pivots, target, p: int, m: int) -> np.ndarray:
    combination = np.zeros(U.shape[1], dtype=np.int64)
    residual = _reduce_vector(H, pivots, target, p, m, U, combination)
    if residual is None or residual.any():
        raise NoSolution("right-hand side is not in the row span")
    return combination

from functools import lru_cache

import numpy as np

from linalg.dataclasses import Matrix
from rings.arithmetic import coefficient_ring, coordinates, from_coordinates
from rings.dataclasses import RingSpec, RingTowerElement


@lru_cache(maxsize=8192)
def regular_block(element: RingTowerElement) -> np.ndarray:
    """
    Matrix of y -> y * element on the monomial basis: row s holds the
    coordinates of e_s * element. The returned array is read-only.
    """
    spec = element.spec
    basis = spec.basis()
    block = np.zeros((len(basis), len(basis)), dtype=np.int64)
    if element:
        for s, exponent in enumerate(basis):
            monomial = RingTowerElement.from_terms(spec, {exponent: 1})
            block[s] = coordinates(monomial * element)
    block.setflags(write=False)
    return block


def expand_array(A: Matrix) -> np.ndarray:
    """
    The (rows * rho) x (cols * rho) integer array of A acting on the underlying
    free Z/p^m-modules, rho being the rank of the ring.
    """
    rho = A.spec.rank
    array = np.zeros((A.rows * rho, A.cols * rho), dtype=np.int64)
    for i, row in enumerate(A.entries):
        for j, entry in enumerate(row):
            if entry:
                array[i * rho:(i + 1) * rho, j * rho:(j + 1) * rho] = regular_block(entry)
    return array


def expand_scalars(A: Matrix) -> Matrix:
    """
    Regular representation of A over Z/p^m. Functorial in A; over a ring
    without variables this returns A itself.
    """
    if A.spec.is_scalar:
        return A
    return Matrix.from_array(coefficient_ring(A.spec.p, A.spec.m), expand_array(A))


def multiplication_array(element: RingTowerElement, rank: int) -> np.ndarray:
    """
    Multiplication by element on the free module of the given rank, expanded.
    """
    return np.kron(np.eye(rank, dtype=np.int64), regular_block(element))


def collapse_vector(spec: RingSpec, array: np.ndarray) -> tuple:
    """
    Groups expanded coordinates back into ring elements.
    """
    rho = spec.rank
    return tuple(from_coordinates(spec, array[k:k + rho]) for k in range(0, len(array), rho))

from itertools import product

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from core.errors import NoSolution, SpecMismatch
from linalg.dataclasses import Matrix
from linalg.expansion import expand_array, expand_scalars, regular_block
from linalg.howell import (
    elementary_divisors, elementary_divisors_array, howell_array, howell_form, in_span_array, kernel_and_solve,
    kernel_array, solve_array, span_exponent, span_exponent_array,
)
from rings.arithmetic import coefficient_ring, from_coordinates, make_patch_ring
from rings.dataclasses import RingTowerElement

Z4 = coefficient_ring(2, 2)
Z9 = coefficient_ring(3, 2)


@st.composite
def small_matrices(draw):
    """
    A matrix of shape up to 3x3 over Z/4 or Z/9, as (array, p, m).
    """
    p = draw(st.sampled_from([2, 3]))
    rows = draw(st.integers(1, 3))
    cols = draw(st.integers(1, 3))
    entries = draw(st.lists(st.integers(0, p * p - 1), min_size=rows * cols, max_size=rows * cols))
    return np.array(entries, dtype=np.int64).reshape(rows, cols), p, 2


def enumerate_vectors(modulus, length):
    for values in product(range(modulus), repeat=length):
        yield np.array(values, dtype=np.int64)


class HowellFormTestCase(SimpleTestCase):
    def test_already_canonical(self):
        form = howell_form(Matrix.from_rows(Z4, [[2]]))
        self.assertEqual(form.H.to_array().tolist(), [[2]])

    def test_row_reduction(self):
        form = howell_form(Matrix.from_rows(Z4, [[1, 2], [0, 2]]))
        self.assertEqual(form.H.to_array().tolist(), [[1, 0], [0, 2]])
        A = Matrix.from_rows(Z4, [[1, 2], [0, 2]])
        self.assertEqual(form.U @ A, form.H)

    def test_zero_matrix(self):
        form = howell_form(Matrix.zero(Z4, 2, 3))
        self.assertTrue(form.H.is_zero())
        self.assertEqual(form.H.rows, 0)

    def test_annihilator_row_is_added(self):
        # span of (2, 1) over Z/4 contains 2 * (2, 1) = (0, 2)
        H, pivots = howell_array(np.array([[2, 1]]), 2, 2)
        self.assertEqual(H.tolist(), [[2, 1], [0, 2]])
        self.assertEqual([(c, v) for _, c, v in pivots], [(0, 1), (1, 1)])

    def test_patch_matrix_rejected(self):
        ring = make_patch_ring(3, 1, 1, 1)
        with self.assertRaises(SpecMismatch):
            howell_form(Matrix.identity(ring, 2))

    @hypothesis_settings(deadline=None, max_examples=80)
    @given(small_matrices(), st.data())
    def test_equal_spans_give_identical_forms(self, sample, data):
        array, p, m = sample
        modulus = p ** m
        rows = array.shape[0]
        # invertible row mixing: unit lower triangular times unit upper triangular
        lower = np.eye(rows, dtype=np.int64)
        upper = np.eye(rows, dtype=np.int64)
        for i in range(rows):
            for j in range(rows):
                if i > j:
                    lower[i, j] = data.draw(st.integers(0, modulus - 1))
                elif i < j:
                    upper[i, j] = data.draw(st.integers(0, modulus - 1))
        units = [u for u in range(1, modulus) if u % p]
        scales = np.diag([data.draw(st.sampled_from(units)) for _ in range(rows)])
        mixed = np.mod(scales @ lower @ upper @ array, modulus)
        extra = np.mod(np.array(data.draw(st.lists(st.integers(0, modulus - 1), min_size=rows, max_size=rows))) @ array, modulus)
        mixed = np.vstack([mixed, extra])
        self.assertEqual(howell_array(array, p, m)[0].tolist(), howell_array(mixed, p, m)[0].tolist())


class KernelTestCase(SimpleTestCase):
    def test_kernel_of_two_over_z4(self):
        kernel, _ = kernel_and_solve(Matrix.from_rows(Z4, [[2]]))
        self.assertEqual(kernel.to_array().tolist(), [[2]])

    def test_solve_two_over_z4(self):
        A = Matrix.from_rows(Z4, [[2]])
        _, x = kernel_and_solve(A, [2])
        self.assertEqual(x @ A, Matrix.from_rows(Z4, [[2]]))

    def test_identity_has_trivial_kernel(self):
        kernel, _ = kernel_and_solve(Matrix.identity(Z9, 3))
        self.assertEqual(kernel.rows, 0)

    def test_no_solution(self):
        with self.assertRaises(NoSolution):
            kernel_and_solve(Matrix.from_rows(Z4, [[2]]), [1])
        with self.assertRaises(NoSolution):
            kernel_and_solve(Matrix.from_rows(Z9, [[3, 0]]), [3, 1])

    def test_empty_matrices(self):
        self.assertEqual(kernel_array(np.zeros((2, 0), dtype=np.int64), 3, 2).tolist(), [[1, 0], [0, 1]])
        self.assertEqual(kernel_array(np.zeros((0, 2), dtype=np.int64), 3, 2).shape, (0, 0))

    @hypothesis_settings(deadline=None, max_examples=60)
    @given(small_matrices())
    def test_kernel_matches_enumeration(self, sample):
        array, p, m = sample
        modulus = p ** m
        kernel = kernel_array(array, p, m)
        for row in kernel:
            self.assertFalse(np.mod(row @ array, modulus).any())
        for x in enumerate_vectors(modulus, array.shape[0]):
            in_kernel = not np.mod(x @ array, modulus).any()
            self.assertEqual(in_kernel, in_span_array(kernel, x, p, m), msg=f"x = {x}")

    @hypothesis_settings(deadline=None, max_examples=60)
    @given(small_matrices())
    def test_solve_matches_enumeration(self, sample):
        array, p, m = sample
        modulus = p ** m
        reachable = {tuple(np.mod(x @ array, modulus)) for x in enumerate_vectors(modulus, array.shape[0])}
        for b in enumerate_vectors(modulus, array.shape[1]):
            if tuple(b) in reachable:
                x = solve_array(array, b, p, m)
                self.assertEqual(np.mod(x @ array, modulus).tolist(), b.tolist())
            else:
                with self.assertRaises(NoSolution):
                    solve_array(array, b, p, m)
        self.assertEqual(len(reachable), p ** span_exponent_array(array, p, m))


class SubquotientTestCase(SimpleTestCase):
    def test_span_exponent(self):
        self.assertEqual(span_exponent(Matrix.from_rows(Z4, [[2, 0], [0, 1]])), 3)
        self.assertEqual(span_exponent(Matrix.zero(Z4, 0, 2)), 0)

    def test_elementary_divisors(self):
        generators = Matrix.identity(Z4, 2)
        relations = Matrix.from_rows(Z4, [[2, 0]])
        self.assertEqual(elementary_divisors(generators, relations), (1, 2))
        self.assertEqual(elementary_divisors(generators, Matrix.identity(Z4, 2)), ())

    def test_elementary_divisors_of_cyclic_subgroup(self):
        # span of 3 in Z/27 is Z/9
        self.assertEqual(elementary_divisors_array(np.array([[3]]), np.zeros((0, 1)), 3, 3), (2,))


class ExpansionTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_multiplication_by_t(self):
        self.assertEqual(regular_block(self.T).tolist(), [[0, 1, 0], [0, 0, 1], [0, 0, 0]])

    def test_identity(self):
        expanded = expand_scalars(Matrix.identity(self.ring, 2))
        self.assertEqual(expanded.to_array().tolist(), np.eye(6, dtype=np.int64).tolist())

    def test_ring_without_variables(self):
        field = make_patch_ring(3, 1, 1, 0)
        A = Matrix.from_rows(field, [[1, 2], [0, 1]])
        self.assertIs(expand_scalars(A), A)

    @hypothesis_settings(deadline=None, max_examples=40)
    @given(st.sampled_from([(3, 1, 1, 1), (2, 1, 1, 2), (2, 2, 1, 1)]), st.data())
    def test_expansion_is_a_ring_map(self, params, data):
        ring = make_patch_ring(*params)
        rho, modulus = ring.rank, ring.modulus

        def random_matrix():
            return Matrix.from_rows(ring, [
                [from_coordinates(ring, data.draw(st.lists(st.integers(0, modulus - 1), min_size=rho, max_size=rho)))
                 for _ in range(2)]
                for _ in range(2)
            ])

        A, B = random_matrix(), random_matrix()
        self.assertEqual(
            expand_array(A @ B).tolist(), np.mod(expand_array(A) @ expand_array(B), modulus).tolist(),
        )
        self.assertEqual(expand_array(A + B).tolist(), np.mod(expand_array(A) + expand_array(B), modulus).tolist())

    def test_units_expand_to_invertible_blocks(self):
        ring = make_patch_ring(2, 2, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        u = T + 3
        product_block = np.mod(regular_block(u) @ regular_block(u.inverse()), ring.modulus)
        self.assertEqual(product_block.tolist(), np.eye(2, dtype=np.int64).tolist())

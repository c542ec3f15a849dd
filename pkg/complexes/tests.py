import random

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from core.errors import NotAComplex, ShapeMismatch, SpecMismatch, UnsupportedRing
from complexes.dataclasses import FreeComplex
from complexes.operations import (
    cohomology, cohomology_exponent, direct_sum, dual, koszul_complex, koszul_homotopy, make_complex, minimize,
    minimize_with_maps, shift, tau_profile, tensor_along, top_cohomology_degree,
)
from linalg.dataclasses import Matrix
from linalg.expansion import collapse_vector, expand_array
from linalg.howell import kernel_array, span_exponent_array
from rings.arithmetic import from_coordinates, graded_ring, make_patch_ring, reduction_map, residue_map
from rings.dataclasses import RingTowerElement

# patch rings with at most 81 elements
SMALL_RINGS = [(3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 2), (2, 1, 2, 1), (2, 3, 1, 1)]


def random_element(rng, ring, in_maximal_ideal=False):
    coordinates = [rng.randrange(ring.modulus) for _ in range(ring.rank)]
    if in_maximal_ideal:
        coordinates[0] = ring.p * rng.randrange(ring.modulus // ring.p)
    return from_coordinates(ring, coordinates)


def random_complex(rng, ring):
    """
    A three-term complex: random d^0, and d^1 whose columns are random
    elements of the right kernel of d^0.
    """
    ranks = [rng.randint(1, 3) for _ in range(3)]
    d0 = Matrix.from_rows(ring, [
        [random_element(rng, ring, rng.random() < 0.6) for _ in range(ranks[1])] for _ in range(ranks[0])
    ])
    kernel = kernel_array(expand_array(d0.transpose()), ring.p, ring.m)
    columns = []
    for _ in range(ranks[2]):
        coefficients = np.array([rng.randrange(ring.modulus) for _ in range(len(kernel))], dtype=np.int64)
        vector = np.mod(coefficients @ kernel, ring.modulus) if len(kernel) else np.zeros(ranks[1] * ring.rank, dtype=np.int64)
        columns.append(collapse_vector(ring, vector))
    d1 = Matrix.from_rows(ring, [[columns[j][i] for j in range(ranks[2])] for i in range(ranks[1])])
    return make_complex(ring, rng.randint(-1, 1), [d0, d1])


class MakeComplexTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_square_of_t_is_not_zero(self):
        d = Matrix.from_rows(self.ring, [[self.T]])
        with self.assertRaises(NotAComplex):
            make_complex(self.ring, 0, [d, d])

    def test_cube_of_t_is_zero(self):
        C = make_complex(self.ring, 0, [Matrix.from_rows(self.ring, [[self.T * self.T]]), Matrix.from_rows(self.ring, [[self.T]])])
        self.assertEqual(C.ranks, (1, 1, 1))

    def test_empty_complex(self):
        C = make_complex(self.ring, 0, [])
        self.assertTrue(C.is_zero())
        self.assertTrue(tau_profile(C).is_empty)

    def test_shapes_are_checked(self):
        with self.assertRaises(ShapeMismatch):
            make_complex(self.ring, 0, [Matrix.identity(self.ring, 2), Matrix.identity(self.ring, 3)])

    def test_file_format(self):
        C = make_complex(self.ring, -1, [Matrix.from_rows(self.ring, [[self.T, 2]])])
        self.assertEqual(FreeComplex.from_dict(C.to_dict()), C)
        self.assertEqual(C.to_dict()["differentials"], [[[[[[1], 1]], [[[0], 2]]]]])


class MinimizeTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_identity_is_contractible(self):
        C = make_complex(self.ring, 0, [Matrix.identity(self.ring, 1)])
        self.assertTrue(minimize(C).is_zero())

    def test_cancel_unit_pivot(self):
        C = make_complex(self.ring, 0, [Matrix.from_rows(self.ring, [[1, 0], [0, self.T]])])
        minimal = minimize(C)
        self.assertEqual(minimal.ranks, (1, 1))
        self.assertEqual(minimal.differential(0), Matrix.from_rows(self.ring, [[self.T]]))
        for i in (0, 1):
            self.assertEqual(cohomology_exponent(C, i), cohomology_exponent(minimal, i))

    def test_minimal_complex_unchanged(self):
        C = make_complex(self.ring, 0, [Matrix.from_rows(self.ring, [[self.T]])])
        self.assertEqual(minimize(C), C)

    def test_comparison_maps_are_chain_maps(self):
        rng = random.Random(11)
        for params in SMALL_RINGS:
            ring = make_patch_ring(*params)
            C = random_complex(rng, ring)
            result = minimize_with_maps(C)
            M = result.complex
            for i in C.degrees():
                if i < C.hi:
                    self.assertEqual(result.include(i) @ C.differential(i), M.differential(i) @ result.include(i + 1))
                    self.assertEqual(C.differential(i) @ result.project(i + 1), result.project(i) @ M.differential(i))
                self.assertEqual(result.include(i) @ result.project(i), Matrix.identity(ring, M.rank(i)))

    def test_graded_minimization(self):
        ring = graded_ring(3, 2)
        T1 = RingTowerElement.variable(ring, 0)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[1, 0], [0, T1]])])
        self.assertEqual(minimize(C).differential(0), Matrix.from_rows(ring, [[T1]]))
        with self.assertRaises(UnsupportedRing):
            minimize(make_complex(ring, 0, [Matrix.from_rows(ring, [[T1 + 1]])]))


class TauProfileTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_free_module(self):
        profile = tau_profile(make_complex(self.ring, 0, [], ranks=[1]))
        self.assertEqual(profile.taus, {0: 1})
        self.assertEqual(profile.amplitude, 0)
        self.assertEqual(profile.d_plus, 0)

    def test_after_cancellation(self):
        profile = tau_profile(make_complex(self.ring, 0, [Matrix.from_rows(self.ring, [[1, 0], [0, self.T]])]))
        self.assertEqual(profile.taus, {0: 1, 1: 1})
        self.assertEqual(profile.amplitude, 1)
        self.assertEqual(profile.d_minus, 0)

    def test_zero_complex(self):
        profile = tau_profile(make_complex(self.ring, 0, [Matrix.identity(self.ring, 2)]))
        self.assertTrue(profile.is_empty)
        self.assertIsNone(profile.amplitude)


class CohomologyTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_multiplication_by_t(self):
        C = make_complex(self.ring, 0, [Matrix.from_rows(self.ring, [[self.T]])])
        H0, H1 = cohomology(C, 0), cohomology(C, 1)
        self.assertEqual(H0.cardinality, 3)
        self.assertEqual(H1.cardinality, 3)
        self.assertEqual(H0.elementary_divisors, (1,))
        # H^0 = (T^2), killed by T
        self.assertEqual(H0.generators.tolist(), [[0, 0, 1]])
        self.assertEqual(H0.actions[0].tolist(), [[0]])

    def test_zero_differential(self):
        C = make_complex(self.ring, 0, [Matrix.zero(self.ring, 1, 1)])
        self.assertEqual(cohomology(C, 0).cardinality, 27)
        self.assertEqual(cohomology(C, 1).elementary_divisors, (1, 1, 1))

    def test_identity_differential(self):
        C = make_complex(self.ring, 0, [Matrix.identity(self.ring, 1)])
        self.assertTrue(cohomology(C, 0).is_zero())
        self.assertTrue(cohomology(C, 1).is_zero())
        self.assertIsNone(top_cohomology_degree(C))

    def test_relations_present_the_quotient(self):
        ring = make_patch_ring(2, 2, 1, 1)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[2]])])
        H1 = cohomology(C, 1)
        # (Z/4)[T]/(T^2+2T) modulo 2 is F_2^2
        self.assertEqual(H1.elementary_divisors, (1, 1))
        self.assertEqual(H1.size_exponent, 2)
        # the presentation (Z/4)^g / relations has the same size
        self.assertEqual(2 * len(H1.generators) - span_exponent_array(H1.relations, 2, 2), 2)

    def test_graded_ring_unsupported(self):
        ring = graded_ring(3, 1)
        with self.assertRaises(UnsupportedRing):
            cohomology(make_complex(ring, 0, [], ranks=[1]), 0)


class BaseChangeTestCase(SimpleTestCase):
    def test_reduction_of_levels(self):
        source = make_patch_ring(3, 1, 2, 2)
        target = make_patch_ring(3, 1, 1, 2)
        C = make_complex(source, 0, [Matrix.from_rows(source, [[RingTowerElement.variable(source, 1)]])])
        reduced = tensor_along(C, reduction_map(source, target))
        self.assertEqual(reduced.differential(0), Matrix.from_rows(target, [[RingTowerElement.variable(target, 1)]]))

    def test_residue_field(self):
        ring = make_patch_ring(3, 1, 1, 1)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[RingTowerElement.variable(ring, 0)]])])
        fiber = tensor_along(C, residue_map(ring))
        self.assertTrue(fiber.differential(0).is_zero())
        self.assertEqual(fiber.ranks, (1, 1))

    def test_identity_map(self):
        ring = make_patch_ring(3, 1, 1, 1)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[RingTowerElement.variable(ring, 0)]])])
        self.assertEqual(tensor_along(C, reduction_map(ring, ring)), C)

    def test_wrong_source(self):
        ring = make_patch_ring(3, 1, 1, 1)
        other = make_patch_ring(3, 1, 2, 1)
        with self.assertRaises(SpecMismatch):
            tensor_along(make_complex(ring, 0, [], ranks=[1]), residue_map(other))


class DualityTestCase(SimpleTestCase):
    def test_transpose_and_negate(self):
        ring = make_patch_ring(3, 1, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[T, 0, 1]])])
        D = dual(C)
        self.assertEqual((D.lo, D.hi, D.ranks), (-1, 0, (3, 1)))
        self.assertEqual(D.differential(-1), C.differential(0).transpose())

    def test_involution(self):
        rng = random.Random(5)
        for params in SMALL_RINGS:
            C = random_complex(rng, make_patch_ring(*params))
            self.assertEqual(dual(dual(C)), C)

    def test_zero_complex(self):
        ring = make_patch_ring(3, 1, 1, 1)
        self.assertTrue(dual(make_complex(ring, 0, [])).is_zero())


class KoszulTestCase(SimpleTestCase):
    def test_ranks_and_differentials(self):
        ring = graded_ring(3, 2)
        T1, T2 = (RingTowerElement.variable(ring, j) for j in range(2))
        K = koszul_complex(ring, [T1, T2], 0)
        self.assertEqual((K.lo, K.ranks), (-2, (1, 2, 1)))
        self.assertEqual(K.differential(-2), Matrix.from_rows(ring, [[-T2, T1]]))
        self.assertEqual(K.differential(-1), Matrix.from_rows(ring, [[T1], [T2]]))

    def test_wedge_homotopy(self):
        ring = make_patch_ring(3, 1, 1, 3)
        elements = [RingTowerElement.variable(ring, j) for j in range(3)]
        K = koszul_complex(ring, elements, 2)
        for j in range(3):
            h = koszul_homotopy(ring, 3, j, 2)
            for k, i in enumerate(K.degrees()):
                total = Matrix.zero(ring, K.rank(i), K.rank(i))
                if K.rank(i - 1):
                    total = total + h[k] @ K.differential(i - 1)
                if K.rank(i + 1):
                    total = total + K.differential(i) @ h[k + 1]
                self.assertEqual(total, Matrix.identity(ring, K.rank(i)).scale(elements[j]))

    def test_direct_sum_and_shift(self):
        ring = make_patch_ring(3, 1, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        C = make_complex(ring, 0, [Matrix.from_rows(ring, [[T]])])
        S = direct_sum(C, shift(C, -1))
        self.assertEqual((S.lo, S.ranks), (0, (1, 2, 1)))
        self.assertEqual(tau_profile(S).taus, {0: 1, 1: 2, 2: 1})
        self.assertEqual(shift(C, 1).differential(-1), Matrix.from_rows(ring, [[-T]]))


class RandomComplexTestCase(SimpleTestCase):
    """
    Seeded random complexes over patch rings with at most 81 elements.
    """

    def complexes(self, seed):
        rng = random.Random(seed)
        for k in range(settings.RANDOM_SAMPLE_COUNT):
            ring = make_patch_ring(*SMALL_RINGS[k % len(SMALL_RINGS)])
            yield random_complex(rng, ring)

    def test_nakayama_top_degree(self):
        for C in self.complexes(2024):
            self.assertEqual(tau_profile(C).d_plus, top_cohomology_degree(C), msg=str(C))

    def test_minimization_is_a_quasi_isomorphism(self):
        for C in self.complexes(17):
            M = minimize(C)
            self.assertFalse(M.has_unit_entry())
            self.assertEqual(M.euler_characteristic(), C.euler_characteristic())
            for i in C.degrees():
                H, H_min = cohomology(C, i, with_actions=False), cohomology(M, i, with_actions=False)
                self.assertEqual(H.cardinality, H_min.cardinality)
                self.assertEqual(H.elementary_divisors, H_min.elementary_divisors)

    def test_minimization_is_idempotent(self):
        for C in self.complexes(3):
            M = minimize(C)
            self.assertEqual(minimize(M), M)

    def test_reductions_keep_minimality(self):
        for C in self.complexes(8):
            M = minimize(C)
            spec = C.spec
            targets = [residue_map(spec)]
            if spec.m > 1:
                targets.append(reduction_map(spec, spec.at_precision(1)))
            if spec.n > 1:
                targets.append(reduction_map(spec, make_patch_ring(spec.p, spec.m, 1, spec.q)))
            for f in targets:
                self.assertFalse(tensor_along(M, f).has_unit_entry())

import random
from itertools import product

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from complexes.operations import koszul_complex, make_complex, minimize
from core.errors import InvalidParameter, NotHomogeneous, NotMinimalInput, UnsupportedRing
from graded.dataclasses import GradedModule, infer_degrees
from graded.groebner import ModuleBasis, ModuleOrder, leading_term, syzygy_projection
from graded.height_amplitude import verify_height_amplitude
from graded.invariants import koszul_depth, module_invariants, support_height_profile
from graded.local import homogenize, invariants_at_origin, local_dimension, vanishes_at_origin
from graded.modules import (
    annihilator, graded_cohomology, hilbert_function, ideal_colon, ideal_intersection, is_zero_module,
    krull_dimension, saturation,
)
from graded.polynomials import (
    from_poly, groebner_basis, ideal_basis, monomial_minimal_primes, monomials_of_degree, poly_ring, same_ideal,
    to_poly,
)
from graded.resolution import ext_module, minimal_graded_resolution
from linalg.dataclasses import Matrix
from linalg.howell import span_exponent_array
from rings.arithmetic import graded_ring, make_patch_ring
from rings.dataclasses import RingTowerElement


def variables(spec):
    return [RingTowerElement.variable(spec, j) for j in range(spec.q)]


def random_form(rng, spec, degree):
    """
    A random homogeneous polynomial of the given degree, possibly zero.
    """
    return RingTowerElement.from_terms(spec, [
        (monom, rng.randrange(spec.p)) for monom in monomials_of_degree(spec.q, degree)
    ])


def random_module(rng, spec):
    """
    Presentation up to 3 x 3 with homogeneous relations of entry degree <= 2.
    """
    rank = rng.randint(1, 3)
    degrees = [rng.randint(0, 1) for _ in range(rank)]
    relations = []
    for _ in range(rng.randint(0, 3)):
        total = rng.randint(max(degrees), 2 + min(degrees))
        relations.append(tuple(
            random_form(rng, spec, total - d) if 0 <= total - d <= 2 else RingTowerElement.zero(spec)
            for d in degrees
        ))
    return GradedModule.from_relations(spec, rank, relations, degrees)


def random_minimal_complex(rng, spec):
    """
    d^0 of random linear forms, d^1 made of syzygies of the columns of d^0,
    then minimized.
    """
    ring = poly_ring(spec)
    ranks = [rng.randint(1, 3), rng.randint(1, 3)]
    d0 = Matrix.from_rows(spec, [[random_form(rng, spec, 1) for _ in range(ranks[1])] for _ in range(ranks[0])])
    columns = [tuple(to_poly(d0.entry(i, j), ring) for i in range(ranks[0])) for j in range(ranks[1])]
    syzygies = syzygy_projection(ring, columns, [], ranks[0])[:rng.randint(0, 3)]
    differentials = [d0]
    if syzygies:
        differentials.append(Matrix.from_rows(spec, [
            [from_poly(vector[i], spec) for vector in syzygies] for i in range(ranks[1])
        ]))
    return minimize(make_complex(spec, rng.randint(-1, 0), differentials))


class GroebnerBasisTestCase(SimpleTestCase):
    def setUp(self):
        self.R = graded_ring(3, 2)
        self.T1, self.T2 = variables(self.R)

    def test_principal_monomial(self):
        self.assertEqual(groebner_basis([self.T1], self.R), [self.T1])

    def test_lex_basis(self):
        basis = groebner_basis([self.T1 - self.T2, self.T2 * self.T2], self.R, "lex")
        self.assertEqual(basis, [self.T1 - self.T2, self.T2 * self.T2])

    def test_monomial_ideal_is_reduced(self):
        generators = [self.T1 * self.T2, self.T1 * self.T1]
        self.assertCountEqual(groebner_basis(generators, self.R), generators)

    def test_empty_input(self):
        self.assertEqual(groebner_basis([], self.R), [])

    def test_patch_ring_rejected(self):
        with self.assertRaises(UnsupportedRing):
            groebner_basis([], make_patch_ring(3, 1, 1, 1))


class ModuleGroebnerTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = poly_ring(graded_ring(3, 2))
        self.t1, self.t2 = self.ring.gens

    def test_syzygy_of_two_variables(self):
        syzygies = syzygy_projection(self.ring, [(self.t1,), (self.t2,)], [], 1)
        self.assertEqual(len(syzygies), 1)
        c1, c2 = syzygies[0]
        self.assertFalse(c1 * self.t1 + c2 * self.t2)
        self.assertEqual(sorted([c1.LM, c2.LM]), [(0, 1), (1, 0)])

    def test_term_over_position(self):
        order = ModuleOrder()
        self.assertEqual(leading_term((self.t1, self.t2 ** 2), order)[:2], (1, (0, 2)))
        self.assertEqual(leading_term((self.t1, self.t1), order)[:2], (0, (1, 0)))

    def test_membership(self):
        zero = self.ring.zero
        basis = ModuleBasis(self.ring, 2, [(self.t1, self.t2), (self.t2, zero)])
        self.assertTrue(basis.contains((self.t1 * self.t2, self.t2 ** 2)))
        self.assertTrue(basis.contains((zero, self.t2 ** 2)))
        self.assertFalse(basis.contains((self.ring.one, zero)))

    def test_ideal_operations(self):
        ring, t1, t2 = self.ring, self.t1, self.t2
        self.assertTrue(same_ideal(ideal_intersection(ring, [t1], [t2]), ideal_basis([t1 * t2], ring)))
        self.assertTrue(same_ideal(ideal_colon(ring, [t1 * t2], t1), ideal_basis([t2], ring)))
        self.assertTrue(same_ideal(saturation(ring, [t1 ** 2, t1 * t2], [t1, t2]), ideal_basis([t1], ring)))

    def test_annihilator(self):
        R = graded_ring(3, 2)
        T1, T2 = variables(R)
        M = GradedModule.from_relations(R, 2, [(T1, RingTowerElement.zero(R)), (RingTowerElement.zero(R), T2)])
        self.assertTrue(same_ideal(annihilator(M), ideal_basis([self.t1 * self.t2], self.ring)))


class GradedModuleTestCase(SimpleTestCase):
    def setUp(self):
        self.R = graded_ring(2, 2)
        self.T1, self.T2 = variables(self.R)
        self.zero = RingTowerElement.zero(self.R)

    def test_degrees_are_inferred(self):
        self.assertEqual(infer_degrees(2, [(self.T1, RingTowerElement.one(self.R))]), (0, 1))

    def test_inhomogeneous_relation(self):
        with self.assertRaises(NotHomogeneous):
            GradedModule.from_relations(self.R, 1, [(self.T1 + self.T1 * self.T2,)])

    def test_file_format(self):
        M = GradedModule.from_relations(self.R, 2, [(self.T1, self.zero), (self.T2, self.T1)])
        data = M.to_dict()
        self.assertEqual(data["gens"], 2)
        self.assertEqual(len(data["relations"]), 2)
        self.assertEqual(len(data["relations"][0]), 2)
        self.assertEqual(GradedModule.from_dict(data).relations, M.relations)

    def test_hilbert_function(self):
        M = GradedModule.from_relations(self.R, 1, [(self.T1 * self.T2,)])
        self.assertEqual([hilbert_function(M, t) for t in range(5)], [1, 2, 2, 2, 2])
        self.assertEqual(krull_dimension(M), 1)

    def test_zero_module(self):
        M = GradedModule.from_relations(self.R, 1, [(RingTowerElement.one(self.R),)])
        self.assertTrue(is_zero_module(M))
        self.assertEqual(krull_dimension(M), -1)
        self.assertEqual(module_invariants(M).to_dict()["perfect"], "not_applicable")
        self.assertEqual(support_height_profile(M), ())


class ResolutionTestCase(SimpleTestCase):
    def setUp(self):
        self.R = graded_ring(3, 2)
        self.T1, self.T2 = variables(self.R)

    def test_residue_field(self):
        k = GradedModule.from_relations(self.R, 1, [(self.T1,), (self.T2,)])
        resolution = minimal_graded_resolution(k)
        self.assertEqual(resolution.betti.betti, (1, 2, 1))
        self.assertEqual(resolution.betti.graded, ({0: 1}, {1: 2}, {2: 1}))
        self.assertFalse(resolution.complex.has_unit_entry())

    def test_free_module(self):
        resolution = minimal_graded_resolution(GradedModule.free(self.R, [0]))
        self.assertEqual(resolution.length, 0)

    def test_principal_ideal(self):
        M = GradedModule.from_relations(self.R, 1, [(self.T1 * self.T2,)])
        resolution = minimal_graded_resolution(M)
        self.assertEqual(resolution.complex.ranks, (1, 1))
        self.assertEqual(resolution.complex.differentials[0], Matrix.from_rows(self.R, [[self.T1 * self.T2]]))

    def test_redundant_generators_are_cancelled(self):
        one = RingTowerElement.one(self.R)
        M = GradedModule.from_relations(self.R, 2, [(one, -self.T1), (RingTowerElement.zero(self.R), self.T2)])
        self.assertEqual(minimal_graded_resolution(M).betti.betti, (1, 1))

    def test_ext_of_residue_field(self):
        k = GradedModule.from_relations(self.R, 1, [(self.T1,), (self.T2,)])
        self.assertTrue(is_zero_module(ext_module(k, 0)))
        self.assertTrue(is_zero_module(ext_module(k, 1)))
        top = ext_module(k, 2)
        self.assertEqual(sum(hilbert_function(top, t) for t in range(-4, 3)), 1)

    def test_ext_of_free_and_cyclic(self):
        ext = ext_module(GradedModule.free(self.R, [0]), 0)
        self.assertEqual([hilbert_function(ext, t) for t in range(3)], [1, 2, 3])
        cyclic = GradedModule.from_relations(self.R, 1, [(self.T1,)])
        ext = ext_module(cyclic, 1)
        self.assertEqual(krull_dimension(ext), 1)
        self.assertEqual([hilbert_function(ext, t) for t in range(-1, 4)], [1, 1, 1, 1, 1])


class InvariantsTestCase(SimpleTestCase):
    def setUp(self):
        self.R = graded_ring(3, 2)
        self.T1, self.T2 = variables(self.R)

    def test_residue_field(self):
        invariants = module_invariants(GradedModule.from_relations(self.R, 1, [(self.T1,), (self.T2,)]))
        self.assertEqual(
            (invariants.dim, invariants.depth, invariants.grade, invariants.projdim, invariants.perfect),
            (0, 0, 2, 2, True),
        )

    def test_free_module(self):
        invariants = module_invariants(GradedModule.free(self.R, [0]))
        self.assertEqual((invariants.dim, invariants.depth, invariants.grade, invariants.projdim), (2, 2, 0, 0))

    def test_cyclic_module(self):
        invariants = module_invariants(GradedModule.from_relations(self.R, 1, [(self.T1,)]))
        self.assertEqual(
            (invariants.dim, invariants.depth, invariants.grade, invariants.projdim, invariants.amplitude),
            (1, 1, 1, 1, 1),
        )

    def test_random_modules(self):
        """
        am = projdim, Auslander-Buchsbaum, grade + dim = q, grade <= projdim
        and dim Ext^i <= q - i on seeded random presentations.
        """
        rng = random.Random(1)
        for _ in range(max(50, settings.RANDOM_SAMPLE_COUNT // 2)):
            spec = graded_ring(rng.choice([2, 3]), 2)
            M = random_module(rng, spec)
            if is_zero_module(M):
                continue
            invariants = module_invariants(M)
            self.assertEqual(invariants.amplitude, invariants.projdim)
            self.assertEqual(invariants.depth + invariants.projdim, 2)
            self.assertEqual(invariants.grade + invariants.dim, 2)
            self.assertLessEqual(invariants.grade, invariants.projdim)
            for i in range(3):
                self.assertLessEqual(krull_dimension(ext_module(M, i)), 2 - i)

    def test_depth_of_maximal_ideal(self):
        # (T1, T2) = coker(T2 e1 - T1 e2) has projdim 1 and depth 1
        M = GradedModule.from_relations(self.R, 2, [(self.T2, -self.T1)], [1, 1])
        self.assertEqual(koszul_depth(M), 1)
        self.assertEqual(minimal_graded_resolution(M).length, 1)


class SupportHeightTestCase(SimpleTestCase):
    def test_examples(self):
        R = graded_ring(3, 2)
        T1, T2 = variables(R)
        self.assertEqual(support_height_profile(GradedModule.from_relations(R, 1, [(T1,)])), (1,))
        self.assertEqual(support_height_profile(GradedModule.from_relations(R, 1, [(T1,), (T2,)])), (2,))

    def test_two_components(self):
        R = graded_ring(2, 3)
        T1, T2, T3 = variables(R)
        M = GradedModule.from_relations(R, 1, [(T1,)]).direct_sum(GradedModule.from_relations(R, 1, [(T2,), (T3,)]))
        self.assertEqual(support_height_profile(M), (1, 2))

    def test_embedded_component_is_ignored(self):
        # (T1^2, T1 T2) has minimal prime (T1) and embedded prime (T1, T2)
        R = graded_ring(3, 2)
        T1, T2 = variables(R)
        M = GradedModule.from_relations(R, 1, [(T1 * T1,), (T1 * T2,)])
        self.assertEqual(support_height_profile(M), (1,))

    @hypothesis_settings(deadline=None, max_examples=40)
    @given(st.lists(st.tuples(*[st.integers(0, 2)] * 3), min_size=1, max_size=3))
    def test_monomial_oracle(self, exponents):
        R = graded_ring(2, 3)
        generators = [RingTowerElement.from_terms(R, {monom: 1}) for monom in exponents]
        M = GradedModule.from_relations(R, 1, [(g,) for g in generators])
        expected = tuple(sorted({len(prime) for prime in monomial_minimal_primes(exponents, 3)}))
        self.assertEqual(support_height_profile(M), expected)

    def test_oracle_conventions(self):
        self.assertEqual(monomial_minimal_primes([], 2), [frozenset()])
        self.assertEqual(monomial_minimal_primes([(0, 0)], 2), [])
        self.assertEqual(monomial_minimal_primes([(1, 1)], 2), [frozenset({0}), frozenset({1})])


class HeightAmplitudeTestCase(SimpleTestCase):
    def setUp(self):
        self.R = graded_ring(3, 2)
        self.T1, self.T2 = variables(self.R)

    def test_koszul_complex(self):
        report = verify_height_amplitude(koszul_complex(self.R, [self.T1, self.T2], 0))
        self.assertEqual(report.amplitude, 2)
        self.assertEqual(report.height_profile, (2,))
        self.assertTrue(report.part_i)
        self.assertEqual(report.part_ii, "pass")
        self.assertTrue(report.part_iii.applicable)
        self.assertTrue(report.part_iii.passed)

    def test_multiplication_by_variable(self):
        C = make_complex(self.R, 0, [Matrix.from_rows(self.R, [[self.T1]])])
        report = verify_height_amplitude(C)
        self.assertEqual((report.amplitude, report.height_profile), (1, (1,)))
        self.assertTrue(report.part_iii.passed)
        self.assertEqual(report.cohomology[0], {t: 0 for t in range(0, settings.HILBERT_TRUNCATION_DEGREE + 1)})

    def test_zero_differential(self):
        C = make_complex(self.R, 0, [Matrix.zero(self.R, 1, 1)])
        report = verify_height_amplitude(C)
        self.assertEqual((report.amplitude, report.height_profile), (1, (0,)))
        self.assertTrue(report.part_i)
        self.assertEqual(report.part_ii, "not_applicable")
        self.assertFalse(report.part_iii.applicable)

    def test_unit_entry_rejected(self):
        C = make_complex(self.R, 0, [Matrix.identity(self.R, 1)])
        with self.assertRaises(NotMinimalInput):
            verify_height_amplitude(C)

    def test_linear_regular_sequences(self):
        """
        Koszul complexes of independent linear forms: lower cohomology
        vanishes, the top is perfect of grade c and duality holds.
        """
        rng = random.Random(3)
        for q, c in product(range(1, 4), range(1, 4)):
            if c > q:
                continue
            spec = graded_ring(rng.choice([2, 3]), q)
            while True:
                coefficients = np.array([[rng.randrange(spec.p) for _ in range(q)] for _ in range(c)], dtype=np.int64)
                if span_exponent_array(coefficients, spec.p, 1) == c:
                    break
            forms = [
                sum((RingTowerElement.variable(spec, j) * int(row[j]) for j in range(q)), RingTowerElement.zero(spec))
                for row in coefficients
            ]
            report = verify_height_amplitude(koszul_complex(spec, forms, 0))
            self.assertEqual(report.height_profile, (c,))
            self.assertTrue(report.part_iii.lower_vanishing)
            self.assertTrue(report.part_iii.top_perfect)
            self.assertTrue(report.part_iii.duality)
            top = graded_cohomology(koszul_complex(spec, forms, 0), 0)
            invariants = module_invariants(top)
            self.assertEqual((invariants.grade, invariants.projdim), (c, c))

    def test_random_minimal_complexes(self):
        rng = random.Random(2)
        for _ in range(settings.RANDOM_SAMPLE_COUNT):
            spec = graded_ring(rng.choice([2, 3]), 3)
            C = random_minimal_complex(rng, spec)
            if C.is_zero():
                continue
            report = verify_height_amplitude(C)
            self.assertLessEqual(report.amplitude, 2)
            self.assertTrue(report.part_i, msg=str(C))
            if report.part_iii.applicable and report.part_iii.lower_vanishing:
                self.assertTrue(report.part_iii.duality, msg=str(C))

    def test_diagonal_monomial_complexes(self):
        """
        coker of diag(m_1..m_r) has support the union of V(m_i); its
        profile must match the brute-force minimal primes.
        """
        rng = random.Random(4)
        spec = graded_ring(2, 3)
        for _ in range(settings.RANDOM_SAMPLE_COUNT // 4):
            monomials = []
            for _ in range(rng.randint(1, 3)):
                exponent = tuple(rng.randint(0, 2) for _ in range(3))
                if not any(exponent):
                    exponent = (1, 0, 0)
                monomials.append(exponent)
            diagonal = [
                [RingTowerElement.from_terms(spec, {monom: 1}) if i == j else RingTowerElement.zero(spec)
                 for j in range(len(monomials))]
                for i, monom in enumerate(monomials)
            ]
            report = verify_height_amplitude(make_complex(spec, 0, [Matrix.from_rows(spec, diagonal)]))
            primes = {prime for monom in monomials for prime in monomial_minimal_primes([monom], 3)}
            minimal = {prime for prime in primes if not any(other < prime for other in primes)}
            self.assertEqual(report.height_profile, tuple(sorted({len(prime) for prime in minimal})))


class LocalHeightAmplitudeTestCase(SimpleTestCase):
    """
    Minimal complexes whose entries admit no grading, answered at the origin.
    """

    def setUp(self):
        self.R = graded_ring(3, 2)
        self.T1, self.T2 = variables(self.R)

    def test_inhomogeneous_entry(self):
        C = make_complex(self.R, 0, [Matrix.from_rows(self.R, [[self.T1 + self.T1 * self.T1]])])
        report = verify_height_amplitude(C)
        self.assertEqual(report.model, "homogenized")
        self.assertEqual((report.amplitude, report.height_profile), (1, (1,)))
        self.assertTrue(report.part_i)
        self.assertEqual(report.part_ii, "pass")
        self.assertTrue(report.part_iii.passed)
        self.assertIsNone(report.part_iii.duality)
        self.assertEqual(report.to_dict()["model"], "homogenized")

    def test_homogenized_complex(self):
        C = make_complex(self.R, 0, [Matrix.from_rows(self.R, [[self.T1 + self.T1 * self.T1]])])
        model = homogenize(C)
        T0, T1, _ = variables(model.spec)
        self.assertEqual(model.spec, graded_ring(3, 3))
        self.assertEqual(model.differential(0).entry(0, 0), T0 * T1 + T1 * T1)
        wide = graded_ring(3, settings.MAX_GRADED_VARIABLES)
        x = RingTowerElement.variable(wide, 0)
        with self.assertRaises(InvalidParameter):
            homogenize(make_complex(wide, 0, [Matrix.from_rows(wide, [[x + x * x]])]))

    def test_component_away_from_the_origin(self):
        # both entries carry the factor T2 - 1, so H^-1 lives on T2 = 1 only
        shift = self.T2 - 1
        C = koszul_complex(self.R, [self.T1 * shift, self.T2 * shift], 0)
        self.assertFalse(is_zero_module(graded_cohomology(homogenize(C), -1)))
        self.assertTrue(vanishes_at_origin(C, -1))
        report = verify_height_amplitude(C)
        self.assertEqual((report.amplitude, report.d_plus), (2, 0))
        self.assertEqual(report.height_profile, (2,))
        self.assertEqual(report.part_ii, "pass")
        self.assertTrue(report.part_iii.lower_vanishing)
        self.assertTrue(report.part_iii.passed)
        invariants = invariants_at_origin(C, 0)
        self.assertEqual(
            (invariants.dim, invariants.depth, invariants.grade, invariants.projdim, invariants.perfect),
            (0, 0, 2, 2, True),
        )

    def test_local_dimension(self):
        ring = poly_ring(graded_ring(3, 3))
        T0, T1, T2 = ring.gens
        self.assertEqual(local_dimension(ring, [T0 * T1 + T1 ** 2]), 1)
        self.assertEqual(local_dimension(ring, [T2 - T0]), -1)
        self.assertEqual(local_dimension(ring, [T1 * (T2 - T0), T2 * (T2 - T0)]), 0)
        self.assertEqual(local_dimension(ring, []), 2)

    @hypothesis_settings(max_examples=8, deadline=None)
    @given(st.dictionaries(st.sampled_from([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]), st.integers(1, 2), min_size=1))
    def test_principal_complexes(self, terms):
        f = RingTowerElement.from_terms(self.R, terms)
        report = verify_height_amplitude(make_complex(self.R, 0, [Matrix.from_rows(self.R, [[f]])]))
        self.assertEqual(report.height_profile, (1,))
        self.assertTrue(report.part_i)
        self.assertTrue(report.part_iii.passed)

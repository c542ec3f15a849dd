from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from core.errors import InvalidParameter, NonPrime, NotAReduction, NotAUnit, SpecMismatch, UnsupportedRing
from rings.arithmetic import (
    augmentation_map, enumerate_ring, graded_ring, make_patch_ring, reduction_map, residue_map, ring_arith, substitute,
    truncated_ring, coordinates, from_coordinates,
)
from rings.dataclasses import RingKind, RingMap, RingSpec, RingTowerElement


def poly(spec, terms):
    return RingTowerElement.from_terms(spec, terms)


class PatchRingTestCase(SimpleTestCase):
    def setUp(self):
        self.ring = make_patch_ring(3, 1, 1, 1)
        self.T = RingTowerElement.variable(self.ring, 0)

    def test_relation_collapses_cube(self):
        self.assertEqual(self.ring.basis(), ((0,), (1,), (2,)))
        self.assertTrue((self.T ** 3).is_zero())
        self.assertTrue(ring_arith("normal_form", self.ring, {(3,): 1}).is_zero())

    def test_no_variables_gives_prime_field(self):
        field = make_patch_ring(3, 1, 1, 0)
        self.assertEqual(field.rank, 1)
        self.assertEqual(RingTowerElement.constant(field, 4), RingTowerElement.one(field))

    def test_two_adic_relation(self):
        ring = make_patch_ring(2, 2, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        # (1+T)^2 - 1 = T^2 + 2T over Z/4
        self.assertEqual(T * T, poly(ring, {(1,): 2}))
        self.assertEqual(ring.basis(), ((0,), (1,)))

    def test_higher_level_relation_uses_binomials(self):
        ring = make_patch_ring(3, 2, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        # (1+T)^3 - 1 = T^3 + 3T^2 + 3T
        self.assertEqual(T ** 3, poly(ring, {(2,): -3, (1,): -3}))

    def test_power_of_t_stays_in_maximal_ideal(self):
        for p, m, n in [(2, 1, 1), (2, 3, 2), (3, 1, 1), (3, 2, 1), (5, 2, 1)]:
            ring = make_patch_ring(p, m, n, 1)
            T = RingTowerElement.variable(ring, 0)
            for e in range(ring.relation_degree, 3 * ring.relation_degree):
                self.assertEqual((T ** e).constant_term(), 0, msg=f"T^{e} in {ring}")
        cube = RingTowerElement.from_terms(self.ring, {(3,): 1})
        self.assertTrue(cube.is_zero())

    def test_reductions_between_precisions_exist(self):
        source = make_patch_ring(3, 2, 1, 1)
        target = make_patch_ring(3, 1, 1, 1)
        T = RingTowerElement.variable(source, 0)
        self.assertEqual(reduction_map(source, target)(T ** 3), RingTowerElement.zero(target))

    def test_rejects_bad_parameters(self):
        with self.assertRaises(NonPrime):
            make_patch_ring(4, 1, 1, 1)
        with self.assertRaises(InvalidParameter):
            make_patch_ring(3, 0, 1, 1)
        with self.assertRaises(InvalidParameter):
            make_patch_ring(3, 1, 0, 1)

    def test_invert_one_plus_t(self):
        inverse = ring_arith("invert", self.T + 1)
        self.assertEqual(inverse, poly(self.ring, {(0,): 1, (1,): 2, (2,): 1}))
        self.assertEqual((self.T + 1) * inverse, RingTowerElement.one(self.ring))

    def test_t_is_not_a_unit(self):
        self.assertFalse(ring_arith("is_unit", self.T))
        with self.assertRaises(NotAUnit):
            self.T.inverse()

    def test_mixed_specs_rejected(self):
        other = make_patch_ring(3, 1, 2, 1)
        with self.assertRaises(SpecMismatch):
            ring_arith("add", self.T, RingTowerElement.variable(other, 0))

    def test_serialization_is_canonical(self):
        x = poly(self.ring, {(2,): 5, (0,): 1})
        self.assertEqual(x.to_list(), [[[0], 1], [[2], 2]])
        self.assertEqual(RingTowerElement.deserialize(self.ring, x.serialize()), x)
        self.assertEqual(RingSpec.deserialize(self.ring.serialize()), self.ring)


class LocalityTestCase(SimpleTestCase):
    """
    Exhaustive checks on every patch ring with at most 81 elements used in the suites.
    """
    small_rings = [(3, 1, 1, 1), (2, 2, 1, 1), (2, 1, 1, 2), (3, 2, 1, 1), (2, 1, 2, 1)]

    def test_unit_or_maximal_ideal(self):
        # in a finite local ring the maximal ideal is the nilradical
        for p, m, n, q in self.small_rings:
            ring = make_patch_ring(p, m, n, q)
            exponent = m * (ring.relation_degree * q + 1)
            for x in enumerate_ring(ring):
                nilpotent = (x ** exponent).is_zero()
                self.assertNotEqual(x.is_unit(), nilpotent, msg=f"{x} in {ring}")

    def test_inverse_is_two_sided(self):
        for p, m, n, q in self.small_rings:
            ring = make_patch_ring(p, m, n, q)
            one = RingTowerElement.one(ring)
            for x in enumerate_ring(ring):
                if x.is_unit():
                    y = x.inverse()
                    self.assertEqual(x * y, one)
                    self.assertEqual(y * x, one)

    def test_maximal_ideal_is_nilpotent(self):
        ring = make_patch_ring(3, 2, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        self.assertTrue(((T + 3) ** 7).is_zero())
        self.assertFalse((T + 3).is_unit())


class NormalFormTestCase(SimpleTestCase):
    @hypothesis_settings(deadline=None, max_examples=60)
    @given(st.dictionaries(
        st.tuples(st.integers(0, 12), st.integers(0, 12)), st.integers(-50, 50), max_size=6,
    ))
    def test_idempotent(self, raw):
        ring = make_patch_ring(3, 2, 1, 2)
        once = ring_arith("normal_form", ring, raw)
        self.assertEqual(ring_arith("normal_form", ring, once), once)
        for exponent, coefficient in once.coeffs:
            self.assertTrue(all(a < 3 for a in exponent))
            self.assertTrue(0 < coefficient < 9)

    @hypothesis_settings(deadline=None, max_examples=40)
    @given(
        st.lists(st.integers(0, 8), min_size=9, max_size=9),
        st.lists(st.integers(0, 8), min_size=9, max_size=9),
    )
    def test_multiplication_is_associative_with_reduction(self, a, b):
        ring = make_patch_ring(3, 2, 1, 2)
        x, y = from_coordinates(ring, a), from_coordinates(ring, b)
        T1 = RingTowerElement.variable(ring, 0)
        self.assertEqual((x * y) * T1, x * (y * T1))
        self.assertEqual(coordinates(x), [c % 9 for c in a])

    def test_graded_ring_keeps_powers(self):
        ring = graded_ring(3, 2)
        T1 = RingTowerElement.variable(ring, 0)
        self.assertEqual((T1 ** 5).coeffs, (((5, 0), 1),))
        with self.assertRaises(UnsupportedRing):
            (T1 + 1).inverse()
        self.assertEqual(RingTowerElement.constant(ring, 2).inverse(), RingTowerElement.constant(ring, 2))

    def test_truncated_ring_drops_high_degrees(self):
        ring = truncated_ring(3, 2, 2, 2)
        x1 = RingTowerElement.variable(ring, 0)
        x2 = RingTowerElement.variable(ring, 1)
        self.assertEqual(ring.kind, RingKind.TRUNCATED)
        self.assertEqual(ring.rank, 6)
        self.assertTrue((x1 * x1 * x2).is_zero())
        self.assertEqual((1 + x1).inverse() * (1 + x1), RingTowerElement.one(ring))


class RingMapTestCase(SimpleTestCase):
    def test_reduction_between_levels(self):
        source = make_patch_ring(3, 1, 2, 1)
        target = make_patch_ring(3, 1, 1, 1)
        f = reduction_map(source, target)
        T = RingTowerElement.variable(source, 0)
        self.assertEqual(f(T), RingTowerElement.variable(target, 0))
        self.assertTrue(f(T ** 3).is_zero())

    def test_identity_reduction(self):
        ring = make_patch_ring(3, 2, 1, 2)
        f = reduction_map(ring, ring)
        x = poly(ring, {(1, 1): 4, (0, 2): 7})
        self.assertEqual(f(x), x)

    def test_precision_reduction_is_residue_map(self):
        source = make_patch_ring(3, 2, 1, 1)
        target = make_patch_ring(3, 1, 1, 1)
        f = reduction_map(source, target)
        self.assertEqual(f(poly(source, {(0,): 7, (2,): 3})), poly(target, {(0,): 1}))

    def test_composition_of_reductions(self):
        a = make_patch_ring(3, 3, 2, 2)
        b = make_patch_ring(3, 2, 2, 2)
        c = make_patch_ring(3, 1, 1, 2)
        direct = reduction_map(a, c)
        through = reduction_map(b, c).compose(reduction_map(a, b))
        generators = [RingTowerElement.variable(a, j) for j in range(2)] + [RingTowerElement.constant(a, 5)]
        for x in generators + [generators[0] ** 7 * generators[1] + 13]:
            self.assertEqual(direct(x), through(x))

    def test_not_a_reduction(self):
        with self.assertRaises(NotAReduction):
            reduction_map(make_patch_ring(3, 1, 1, 1), make_patch_ring(3, 1, 2, 1))
        with self.assertRaises(NotAReduction):
            reduction_map(make_patch_ring(3, 1, 1, 1), make_patch_ring(3, 2, 1, 1))

    def test_ill_defined_map_rejected(self):
        source = make_patch_ring(3, 1, 1, 1)
        target = graded_ring(3, 1)
        # T^3 = 0 in the source but not in F_3[T]
        with self.assertRaises(SpecMismatch):
            RingMap(source, target, (RingTowerElement.variable(target, 0),))

    def test_residue_and_augmentation(self):
        ring = make_patch_ring(3, 2, 1, 2)
        x = poly(ring, {(0, 0): 4, (1, 0): 1})
        self.assertEqual(residue_map(ring)(x).constant_term(), 1)
        self.assertEqual(augmentation_map(ring)(x).constant_term(), 4)

    def test_substitute_into_the_model(self):
        model = truncated_ring(3, 2, 1, 2)
        x = RingTowerElement.variable(model, 0)
        three = RingTowerElement.constant(model, 3)
        self.assertEqual(substitute(x * x + x * 2, (three,), model), RingTowerElement.constant(model, 6))
        ring = make_patch_ring(3, 2, 1, 1)
        T = RingTowerElement.variable(ring, 0)
        self.assertEqual(substitute(x * 4, (T,), ring), T * 4)
        with self.assertRaises(SpecMismatch):
            substitute(x, (), model)

from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from cli.scenarios import Perturbation, ScenarioParams, gen_scenario
from complexes.operations import cohomology_exponent, koszul_complex, make_complex, tensor_along
from core.errors import (
    ActionMismatch, AugmentationNotKilled, BaseMismatch, HeightAmplitudeViolated, InsufficientTower,
    InvalidParams, NoCompatibleChain, TauNotConstant, TauOutOfRange,
)
from linalg.dataclasses import Matrix
from patcher.certify import certify, fiber_model, free_rank
from patcher.dataclasses import PatchingTower, TowerParams
from patcher.hypotheses import evaluate_at_actions, validate_hypotheses
from patcher.pigeonhole import basis_changes, patch
from rings.arithmetic import make_patch_ring, reduction_map, truncated_ring
from rings.dataclasses import RingTowerElement

ERRORS = {
    Perturbation.TAU_VARIES: TauNotConstant,
    Perturbation.TAU_OUT_OF_RANGE: TauOutOfRange,
    Perturbation.ACTION_MISMATCH: ActionMismatch,
    Perturbation.AUGMENTATION_NOT_KILLED: AugmentationNotKilled,
    Perturbation.BASE_MISMATCH: BaseMismatch,
}

CONFIGURATIONS = [(1, 0), (1, 1), (2, 1), (2, 2)]


def ground_truth(q=2, r=1, **kwargs):
    return gen_scenario(ScenarioParams(p=3, q=q, r=r, **kwargs))


def with_level(tower, index, **changes):
    levels = list(tower.levels)
    levels[index] = replace(levels[index], **changes)
    return replace(tower, levels=tuple(levels))


class TowerModelTestCase(SimpleTestCase):

    def test_tower_file_round_trip(self):
        tower = ground_truth(padding=1).tower
        parsed = PatchingTower.deserialize(tower.serialize())
        self.assertEqual(parsed.to_dict(), tower.to_dict())
        self.assertEqual(parsed.base.model.dimension, 2)

    def test_r_larger_than_q(self):
        with self.assertRaises(InvalidParams):
            TowerParams(p=3, q=1, r=2, d=1, precisions=(2, 2), truncation=2)

    def test_base_ring_size(self):
        base = ground_truth().tower.base
        # R = R_inf / (x) is Z/p^m
        self.assertEqual(base.ring_exponent(2), 2)

    def test_evaluate_at_actions(self):
        tower = ground_truth(i_template="scaled").tower
        level = tower.levels[0]
        spec = level.spec
        induced = evaluate_at_actions(level.i_images[0], level.x_actions, level.complex)
        T1 = RingTowerElement.variable(spec, 0)
        for i, matrix in zip(level.complex.degrees(), induced):
            self.assertEqual(matrix, Matrix.identity(spec, level.complex.rank(i)).scale(T1))


class ValidationTestCase(SimpleTestCase):

    def test_ground_truth_passes(self):
        report = validate_hypotheses(ground_truth().tower)
        self.assertTrue(report.passed)
        self.assertEqual(report.taus.taus, {1: 1, 2: 1})
        self.assertEqual({check.hypothesis for check in report.checks}, {"i", "ii", "iii"})

    def test_level_replaced_by_wider_complex(self):
        tower = ground_truth().tower
        spec = tower.levels[1].spec
        zero = RingTowerElement.zero(spec)
        wide = make_complex(spec, 1, [Matrix.from_rows(spec, [[zero, zero], [zero, zero]])])
        with self.assertRaises(TauNotConstant) as raised:
            validate_hypotheses(with_level(tower, 1, complex=wide))
        self.assertIn("report", raised.exception.details)

    def test_zeroed_witness(self):
        tower = ground_truth().tower
        with self.assertRaises(BaseMismatch) as raised:
            validate_hypotheses(with_level(tower, 1, witness=np.zeros((1, 1), dtype=np.int64)))
        self.assertEqual(raised.exception.hypothesis, "iii")

    def test_single_level(self):
        tower = ground_truth().tower
        with self.assertRaises(InsufficientTower):
            validate_hypotheses(replace(tower, levels=tower.levels[:1]))

    def test_action_checked_on_cohomology_without_homotopy(self):
        tower = ground_truth(q=1, r=1).tower
        unchecked = tower
        for index in range(len(tower.levels)):
            unchecked = with_level(unchecked, index, homotopies=(None,))
        self.assertTrue(validate_hypotheses(unchecked).passed)

    def test_negative_suite(self):
        for q, r in CONFIGURATIONS:
            for perturbation, error in ERRORS.items():
                with self.subTest(q=q, r=r, perturbation=perturbation.value):
                    files = gen_scenario(ScenarioParams(p=3, q=q, r=r, levels=2), perturbation)
                    self.assertEqual(files.sidecar["expected_error"], error.__name__)
                    with self.assertRaises(error):
                        certify(files.tower, patch(files.tower, 2))


class PatchTestCase(SimpleTestCase):

    def test_recovers_koszul_differential(self):
        result = patch(ground_truth().tower, 2)
        spec = make_patch_ring(3, 2, 2, 2)
        T2 = RingTowerElement.variable(spec, 1)
        self.assertEqual(result.limit, make_complex(spec, 1, [Matrix.from_rows(spec, [[T2]])]))
        model = truncated_ring(3, 2, 1, 2)
        self.assertEqual(result.i_images, (RingTowerElement.variable(model, 0), RingTowerElement.zero(model)))
        self.assertEqual(result.chain, (0, 1))

    def test_full_koszul_limit(self):
        files = ground_truth(q=2, r=2)
        result = patch(files.tower, 2)
        spec = make_patch_ring(3, 2, 2, 2)
        variables = [RingTowerElement.variable(spec, j) for j in range(2)]
        self.assertEqual(result.limit, koszul_complex(spec, variables, 2))
        self.assertEqual(result.limit.ranks, (1, 2, 1))

    def test_padded_levels_match_the_sidecar(self):
        files = ground_truth(padding=2, seed=11)
        result = patch(files.tower, 2)
        self.assertEqual(result.limit.to_dict(), files.sidecar["delta_inf"])
        self.assertEqual(result.basis_changes, 0)

    def test_too_few_levels_for_precision(self):
        tower = ground_truth().tower
        with self.assertRaises(InsufficientTower):
            patch(tower, 3)
        with self.assertRaises(InsufficientTower):
            patch(replace(tower, levels=tower.levels[:1]), 1)

    def test_sign_change_found_by_fallback(self):
        tower = ground_truth(q=1, r=1).tower
        spec = tower.levels[1].spec
        T = RingTowerElement.variable(spec, 0)
        flipped = make_complex(spec, 0, [Matrix.from_rows(spec, [[-T]])])
        homotopy = (Matrix.zero(spec, 1, 0), Matrix.from_rows(spec, [[-1]]))
        tower = with_level(tower, 1, complex=flipped, homotopies=(homotopy,), witness=np.array([[-1]]))
        result = patch(tower, 2)
        self.assertEqual(result.basis_changes, 1)
        limit_spec = make_patch_ring(3, 2, 2, 1)
        expected = Matrix.from_rows(limit_spec, [[RingTowerElement.variable(limit_spec, 0)]])
        self.assertEqual(result.limit, make_complex(limit_spec, 0, [expected]))

    def test_incompatible_level(self):
        tower = ground_truth(q=1, r=1).tower
        spec = tower.levels[1].spec
        T = RingTowerElement.variable(spec, 0)
        unit = RingTowerElement.one(spec) + T
        twisted = make_complex(spec, 0, [Matrix.from_rows(spec, [[T * unit]])])
        homotopy = (Matrix.zero(spec, 1, 0), Matrix.from_rows(spec, [[unit.inverse()]]))
        tower = with_level(tower, 1, complex=twisted, homotopies=(homotopy,))
        self.assertTrue(validate_hypotheses(tower).passed)
        # the third level still reduces onto the first
        self.assertEqual(patch(tower, 2).chain, (0, 2))
        with self.assertRaises(NoCompatibleChain):
            patch(replace(tower, levels=tower.levels[:2]), 2)

    def test_basis_change_candidates(self):
        self.assertEqual(len(list(basis_changes((1, 1)))), 3)
        self.assertEqual(len(list(basis_changes((2,)))), 7)


class CertifyTestCase(SimpleTestCase):

    def test_ground_truth_certificate(self):
        tower = ground_truth().tower
        certificate = certify(tower, patch(tower, 2))
        self.assertTrue(certificate.valid)
        self.assertEqual(certificate.rank, 1)
        self.assertTrue(certificate.free)
        self.assertEqual(certificate.ha_report.height_profile, (1,))

    def test_lower_cohomology_kill(self):
        tower = ground_truth().tower
        certificate = certify(tower, patch(tower, 2))
        self.assertTrue(all(entry["exponent"] > 0 for entry in certificate.lower_cohomology))
        self.assertTrue(certificate.fiber_lower_vanishes)
        self.assertEqual(certificate.to_dict()["lower_cohomology"]["fiber_vanishes"], True)

    def test_koszul_scenario(self):
        tower = ground_truth(q=2, r=2).tower
        certificate = certify(tower, patch(tower, 2))
        self.assertTrue(certificate.valid)
        self.assertEqual(certificate.rank, 1)
        self.assertEqual(certificate.invariants.projdim, 2)

    def test_adversarial_limit(self):
        tower = ground_truth().tower
        result = patch(tower, 2)
        spec = result.limit.spec
        zero = RingTowerElement.zero(spec)
        broken = replace(result, limit=make_complex(spec, 1, [Matrix.from_rows(spec, [[zero]])]))
        with self.assertRaises(HeightAmplitudeViolated) as raised:
            certify(tower, broken)
        self.assertTrue(raised.exception.details["certificate"]["checks"]["tau_concentrated"])

    def test_fiber_model(self):
        spec = make_patch_ring(3, 2, 1, 1)
        T = RingTowerElement.variable(spec, 0)
        C = make_complex(spec, 0, [Matrix.from_rows(spec, [[T * 4 + 3]])])
        fiber = fiber_model(C)
        self.assertEqual(fiber.differential(0).entry(0, 0), RingTowerElement.variable(fiber.spec, 0))

    def test_monotone_precision(self):
        tower = ground_truth(q=1, r=1).tower
        self.assertTrue(certify(tower, patch(tower, 2)).valid)
        self.assertTrue(certify(tower, patch(tower, 1)).valid)

    def test_end_to_end(self):
        for p in (2, 3):
            for q, r in CONFIGURATIONS:
                with self.subTest(p=p, q=q, r=r):
                    files = gen_scenario(ScenarioParams(p=p, q=q, r=r))
                    tower = files.tower
                    certificate = certify(tower, patch(tower, 2))
                    self.assertTrue(certificate.valid)
                    self.assertEqual(certificate.rank, files.sidecar["rank"])
                    limit = certificate.limit.limit
                    self.assertEqual(limit.to_dict(), files.sidecar["delta_inf"])
                    self.assertEqual(
                        {str(i): limit.rank(i) for i in limit.degrees()}, files.sidecar["tau"],
                    )
                    for index in (0, 1):
                        level = tower.levels[index]
                        target = make_patch_ring(p, level.precision, level.n, q)
                        ours = tensor_along(limit, reduction_map(limit.spec, target))
                        for i in level.complex.degrees():
                            self.assertEqual(cohomology_exponent(ours, i), cohomology_exponent(level.complex, i))

    def test_rank_and_freeness_come_from_the_limit(self):
        for rank in (1, 2):
            tower = ground_truth(q=1, r=1, rank=rank).tower
            self.assertEqual(free_rank(patch(tower, 2), tower.base, 1), (rank, True))
        tower = ground_truth(q=1, r=1).tower
        result = patch(tower, 2)
        spec = result.limit.spec
        # T + 3 is not a unit, and H^1 of the reduction is only Z/3
        shifted = make_complex(spec, 0, [Matrix.from_rows(spec, [[RingTowerElement.variable(spec, 0) + 3]])])
        self.assertEqual(free_rank(replace(result, limit=shifted), tower.base, 1), (1, False))

    def test_inhomogeneous_limit(self):
        tower = ground_truth(q=1, r=1).tower
        for index, level in enumerate(tower.levels):
            spec = level.spec
            T = RingTowerElement.variable(spec, 0)
            unit = RingTowerElement.one(spec) + T
            twisted = make_complex(spec, 0, [Matrix.from_rows(spec, [[T * unit]])])
            homotopy = (Matrix.zero(spec, 1, 0), Matrix.from_rows(spec, [[unit.inverse()]]))
            tower = with_level(tower, index, complex=twisted, homotopies=(homotopy,))
        certificate = certify(tower, patch(tower, 2))
        self.assertTrue(certificate.valid)
        self.assertEqual(certificate.rank, 1)
        self.assertEqual(certificate.ha_report.model, "homogenized")
        self.assertEqual(certificate.ha_report.height_profile, (1,))
        self.assertTrue(certificate.fiber_lower_vanishes)
        self.assertEqual((certificate.invariants.projdim, certificate.invariants.depth), (1, 0))

    @hypothesis_settings(max_examples=5, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10 ** 6), padding=st.integers(min_value=1, max_value=2))
    def test_padded_towers_certify(self, seed, padding):
        files = ground_truth(q=1, r=1, seed=seed, padding=padding)
        certificate = certify(files.tower, patch(files.tower, 2))
        self.assertTrue(certificate.valid)
        self.assertEqual(certificate.limit.limit.to_dict(), files.sidecar["delta_inf"])

from io import StringIO
from pathlib import Path
from tempfile import TemporaryDirectory
import json

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from cli.scenarios import Perturbation, ScenarioParams, gen_scenario
from complexes.operations import make_complex
from core.errors import InvalidParams
from core.serialization import canonical_json, write_json
from graded.dataclasses import GradedModule
from linalg.dataclasses import Matrix
from rings.arithmetic import graded_ring, make_patch_ring
from rings.dataclasses import RingTowerElement


def run(name, *args, **options):
    out = StringIO()
    call_command(name, *args, stdout=out, **options)
    return out.getvalue()


class CommandTestCase(SimpleTestCase):
    """
    Base for the command tests: every test gets its own scratch directory.
    """

    def setUp(self):
        self.scratch = TemporaryDirectory()
        self.addCleanup(self.scratch.cleanup)
        self.root = Path(self.scratch.name)

    def gen(self, folder, *args):
        out_dir = self.root / folder
        data = json.loads(run('gen', '--out-dir', str(out_dir), *args))
        return out_dir, data

    def failing(self, name, *args):
        out = StringIO()
        with self.assertRaises(CommandError) as raised:
            call_command(name, *args, stdout=out)
        return raised.exception.returncode, json.loads(out.getvalue())


class GenTestCase(CommandTestCase):

    def test_same_seed_same_files(self):
        args = ('--q', '2', '--r', '1', '--padding', '2', '--seed', '5')
        first, _ = self.gen('first', *args)
        second, _ = self.gen('second', *args)
        for name in ("tower.json", "sidecar.json"):
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_sidecar(self):
        out_dir, data = self.gen('truth', '--q', '2', '--r', '1', '--d', '2', '--levels', '3', '--seed', '7')
        sidecar = json.loads((out_dir / "sidecar.json").read_text())
        self.assertEqual(data["expected"], sidecar)
        self.assertEqual(sidecar["rank"], 1)
        self.assertEqual(sidecar["tau"], {"1": 1, "2": 1})
        self.assertIsNone(sidecar["expected_error"])
        spec = make_patch_ring(3, 2, 2, 2)
        T2 = RingTowerElement.variable(spec, 1)
        self.assertEqual(sidecar["delta_inf"], make_complex(spec, 1, [Matrix.from_rows(spec, [[T2]])]).to_dict())

    def test_r_larger_than_q(self):
        returncode, error = self.failing('gen', '--q', '1', '--r', '2', '--out-dir', str(self.root))
        self.assertEqual(returncode, 2)
        self.assertEqual(error["error"], "InvalidParams")
        self.assertFalse((self.root / "tower.json").exists())

    def test_augmentation_needs_precision_two(self):
        with self.assertRaises(InvalidParams):
            gen_scenario(ScenarioParams(p=3, q=1, r=1, precisions=(1, 1, 1)), Perturbation.AUGMENTATION_NOT_KILLED)

    @hypothesis_settings(max_examples=3, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=10 ** 6))
    def test_scenarios_are_reproducible(self, seed):
        params = ScenarioParams(p=3, q=1, r=1, levels=2, seed=seed, padding=1)
        first, second = gen_scenario(params), gen_scenario(params)
        self.assertEqual(first.tower.serialize(), second.tower.serialize())
        self.assertEqual(canonical_json(first.sidecar), canonical_json(second.sidecar))


class PatchCommandTestCase(CommandTestCase):

    def test_ground_truth(self):
        out_dir, _ = self.gen('truth', '--seed', '7')
        certificate = json.loads(run('patch', str(out_dir / "tower.json")))
        self.assertTrue(certificate["valid"])
        self.assertEqual(certificate["rank"], 1)
        self.assertTrue(certificate["free"])
        self.assertTrue(all(certificate["checks"].values()))

    def test_characteristic_two(self):
        out_dir, data = self.gen('two', '--p', '2', '--q', '2', '--r', '1')
        certificate = json.loads(run('patch', str(out_dir / "tower.json")))
        self.assertTrue(certificate["valid"])
        self.assertEqual(certificate["rank"], data["expected"]["rank"])

    def test_text_report(self):
        out_dir, _ = self.gen('truth', '--q', '1', '--r', '1')
        text = run('patch', str(out_dir / "tower.json"), '--format', 'text', '--precision', '1')
        self.assertIn("rank 1, free True", text)

    def test_tau_varies(self):
        out_dir, data = self.gen('varies', '--perturbation', 'tau_varies')
        returncode, error = self.failing('patch', str(out_dir / "tower.json"))
        self.assertEqual(returncode, 1)
        self.assertEqual(error["error"], "TauNotConstant")
        self.assertEqual(error["error"], data["expected"]["expected_error"])
        self.assertIn("report", error["details"])

    def test_precision_beyond_the_tower(self):
        out_dir, _ = self.gen('short', '--levels', '2')
        returncode, error = self.failing('patch', str(out_dir / "tower.json"), '--precision', '3')
        self.assertEqual(returncode, 2)
        self.assertEqual(error["error"], "InsufficientTower")

    def test_missing_file(self):
        returncode, error = self.failing('patch', str(self.root / "absent.json"))
        self.assertEqual(returncode, 2)
        self.assertEqual(error["error"], "MalformedInput")


class GradedCommandTestCase(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.R = graded_ring(3, 2)
        self.T1 = RingTowerElement.variable(self.R, 0)

    def write(self, name, data):
        path = self.root / name
        write_json(path, data)
        return str(path)

    def test_verify_ha(self):
        C = make_complex(self.R, 0, [Matrix.from_rows(self.R, [[self.T1]])])
        report = json.loads(run('verify_ha', self.write("complex.json", C.to_dict())))
        self.assertEqual(report["height_profile"], [1])

    def test_verify_ha_inhomogeneous(self):
        C = make_complex(self.R, 0, [Matrix.from_rows(self.R, [[self.T1 + self.T1 * self.T1]])])
        report = json.loads(run('verify_ha', self.write("local.json", C.to_dict())))
        self.assertEqual(report["model"], "homogenized")
        self.assertEqual(report["height_profile"], [1])
        self.assertTrue(report["part_iii"]["passed"])
        self.assertIsNone(report["part_iii"]["duality"])

    def test_verify_ha_malformed(self):
        path = self.root / "broken.json"
        path.write_text("{\"ring\": ")
        returncode, error = self.failing('verify_ha', str(path))
        self.assertEqual(returncode, 2)
        self.assertEqual(error["error"], "MalformedInput")

    def test_verify_ha_unit_entry(self):
        C = make_complex(self.R, 0, [Matrix.identity(self.R, 1)])
        returncode, error = self.failing('verify_ha', self.write("unit.json", C.to_dict()))
        self.assertEqual(returncode, 2)
        self.assertEqual(error["error"], "NotMinimalInput")

    def test_invariants(self):
        M = GradedModule.from_relations(self.R, 1, [(self.T1,)])
        data = json.loads(run('invariants', self.write("module.json", M.to_dict())))
        self.assertEqual((data["dim"], data["depth"], data["projdim"]), (1, 1, 1))
        self.assertTrue(data["perfect"])
        self.assertEqual(data["support_heights"], [1])
        self.assertIn("betti", data)

    def test_minimize(self):
        spec = make_patch_ring(3, 1, 1, 1)
        T = RingTowerElement.variable(spec, 0)
        C = make_complex(spec, 0, [Matrix.from_rows(spec, [[T, 0], [0, 1]])])
        data = json.loads(run('minimize', self.write("complex.json", C.to_dict())))
        self.assertEqual(data["complex"]["ranks"], [1, 1])
        self.assertEqual(data["tau"]["taus"], {"0": 1, "1": 1})

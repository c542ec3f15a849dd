from pathlib import Path
from tempfile import TemporaryDirectory

from django.test import SimpleTestCase

from core.errors import (
    EXIT_INVALID_INPUT, EXIT_SEARCH_FAILURE, EXIT_VIOLATION,
    BaseMismatch, MalformedInput, NoCompatibleChain, NotAUnit, TauNotConstant,
)
from core.serialization import canonical_json, read_json, require_keys, write_json


class ErrorTestCase(SimpleTestCase):

    def test_exit_codes(self):
        self.assertEqual(TauNotConstant.exit_code, EXIT_VIOLATION)
        self.assertEqual(NoCompatibleChain.exit_code, EXIT_SEARCH_FAILURE)
        self.assertEqual(NotAUnit.exit_code, EXIT_INVALID_INPUT)
        self.assertEqual(MalformedInput.exit_code, EXIT_INVALID_INPUT)

    def test_error_object(self):
        error = BaseMismatch("witness is not onto", level=2)
        self.assertEqual(error.hypothesis, "iii")
        self.assertEqual(error.to_dict(), {
            "error": "BaseMismatch",
            "message": "witness is not onto",
            "exit_code": 1,
            "details": {"level": 2},
        })

    def test_default_message(self):
        self.assertEqual(NoCompatibleChain().message, "NoCompatibleChain")


class SerializationTestCase(SimpleTestCase):

    def setUp(self):
        self.scratch = TemporaryDirectory()
        self.addCleanup(self.scratch.cleanup)
        self.root = Path(self.scratch.name)

    def test_key_order_does_not_matter(self):
        self.assertEqual(canonical_json({"b": [1, 2], "a": 0}), canonical_json({"a": 0, "b": [1, 2]}))
        self.assertTrue(canonical_json({}).endswith("\n"))

    def test_file_round_trip(self):
        path = self.root / "data.json"
        write_json(path, {"ranks": [1, 2, 1]})
        self.assertEqual(read_json(path), {"ranks": [1, 2, 1]})

    def test_unreadable_files(self):
        with self.assertRaises(MalformedInput):
            read_json(self.root / "absent.json")
        path = self.root / "broken.json"
        path.write_text("[1, 2")
        with self.assertRaises(MalformedInput) as raised:
            read_json(path)
        self.assertEqual(raised.exception.details["path"], str(path))

    def test_required_keys(self):
        require_keys({"p": 3, "q": 1}, ("p", "q"), "ring")
        with self.assertRaisesMessage(MalformedInput, "missing field(s) q"):
            require_keys({"p": 3}, ("p", "q"), "ring")
        with self.assertRaises(MalformedInput):
            require_keys([3], ("p",), "ring")

import json
from pathlib import Path
from typing import Any

from core.errors import MalformedInput


def canonical_json(data: Any) -> str:
    """
    Dumps data as canonical JSON: sorted keys, fixed separators and indent,
    trailing newline. Equal data always gives identical bytes.
    """
    return json.dumps(data, sort_keys=True, indent=2, separators=(",", ": "), ensure_ascii=True) + "\n"


def write_json(path: Path, data: Any):
    """
    Writes data to path in canonical form.
    """
    Path(path).write_text(canonical_json(data), encoding="utf-8")


def read_json(path: Path) -> Any:
    """
    Reads a JSON file, reporting unreadable or malformed files as MalformedInput.
    """
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise MalformedInput(f"Cannot read {path}: {e.strerror}", path=str(path))
    except json.JSONDecodeError as e:
        raise MalformedInput(f"Invalid JSON in {path}: {e.msg} (line {e.lineno})", path=str(path))


def require_keys(data: Any, keys, where: str):
    """
    Checks that data is a mapping carrying every key in keys.
    """
    if not isinstance(data, dict):
        raise MalformedInput(f"{where}: expected an object, got {type(data).__name__}")
    missing = [key for key in keys if key not in data]
    if missing:
        raise MalformedInput(f"{where}: missing field(s) {', '.join(missing)}")

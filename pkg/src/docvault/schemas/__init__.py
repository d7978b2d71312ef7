"""Wire-format JSON schemas shared by the service, clients and tests."""

import json
from importlib import resources


def load_schema(name: str) -> dict:
    """Load a packaged schema by stem, e.g. ``load_schema("obfuscator_request")``."""
    ref = resources.files(__package__).joinpath(f"{name}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))

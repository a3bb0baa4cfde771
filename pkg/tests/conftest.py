import json
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

THRESHOLDS = json.loads((Path(__file__).parent / "acceptance_thresholds.json").read_text())


@pytest.fixture(scope="session")
def thresholds():
    return THRESHOLDS

import pytest

from fiberguide.config import default_scenario
from fiberguide.harness import run_scenario
from fiberguide.potential import FieldConfig
from fiberguide.config import DEFAULT_GUIDE
from fiberguide.species import RUBIDIUM_85


@pytest.fixture(scope="session")
def species():
    return RUBIDIUM_85


@pytest.fixture(scope="session")
def bare_field():
    """Guide beam only: no barrier, no reservoir, no gravity."""
    return FieldConfig(guide=DEFAULT_GUIDE)


@pytest.fixture(scope="session")
def default_result():
    """One full run of the reference scenario, shared by every test that
    only inspects it.  This is the single most expensive fixture."""
    return run_scenario(default_scenario())

import pytest

from crewdrill.configs import parse_agents
from crewdrill.dsl.parser import parse
from crewdrill.scenarios import agents_text, scenario_text


@pytest.fixture(scope="session")
def winch_text() -> str:
    return scenario_text("winch")


@pytest.fixture(scope="session")
def winch_doc(winch_text):
    return parse(winch_text)


@pytest.fixture(scope="session")
def winch_agents():
    return parse_agents(agents_text("winch"))


@pytest.fixture(scope="session")
def dark_text() -> str:
    return scenario_text("dark_screw")


@pytest.fixture(scope="session")
def dark_doc(dark_text):
    return parse(dark_text)


@pytest.fixture(scope="session")
def dark_agents():
    return parse_agents(agents_text("dark_screw"))

import pathlib

import pytest

from imcheck import load_automaton, load_imc

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA


@pytest.fixture(scope="session")
def grid():
    """The six-state grid-agent model from the case study."""
    return load_imc(str(DATA / "grid.imc"))


def _automaton(name, props):
    return load_automaton(str(DATA / name), props)


@pytest.fixture(scope="session")
def a_phi1(grid):
    return _automaton("phi1.hoa", grid.props)


@pytest.fixture(scope="session")
def a_phi2(grid):
    return _automaton("phi2.hoa", grid.props)


@pytest.fixture(scope="session")
def a_not_phi2(grid):
    return _automaton("not_phi2.hoa", grid.props)


@pytest.fixture(scope="session")
def a_not_phi1(grid):
    return _automaton("not_phi1.hoa", grid.props)


@pytest.fixture(scope="session")
def a_universal(grid):
    return _automaton("universal.hoa", grid.props)


@pytest.fixture(scope="session")
def a_nothing(grid):
    return _automaton("accepts_nothing.hoa", grid.props)

import pytest

from flexsim.controller import Controller
from flexsim.scenario import load_builtin_scenario


@pytest.fixture
def builtin_sim():
    return load_builtin_scenario()


@pytest.fixture
def builtin_controller(builtin_sim):
    return Controller(builtin_sim)

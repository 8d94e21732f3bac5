"""Shared model fixtures used across the suite."""

import pytest

from qubit_qed import hydrogen_dipole, hydrogen_spin, make_model


@pytest.fixture(scope="session")
def spin_model():
    return make_model("spin", {"m": 1.0}, hydrogen_spin(1.0, 1.0))


@pytest.fixture(scope="session")
def twolevel_model():
    return make_model("two_level", {"m": 1.0}, hydrogen_dipole(1.0, d=1.0))


@pytest.fixture(scope="session")
def twolevel_kk():
    return make_model("two_level", {"m": 1.0}, hydrogen_dipole(0.5, d=1.0))


@pytest.fixture(scope="session")
def twolevel_strong():
    return make_model("two_level", {"m": 1.0}, hydrogen_dipole(0.4, d=2.2))


@pytest.fixture(scope="session")
def dipole_model():
    return make_model("dipole", {"m_e": 1.0, "m_g": -1.0}, hydrogen_dipole(1.0, d=1.0))


@pytest.fixture(scope="session")
def dipole_asym():
    return make_model("dipole", {"m_e": 0.7, "m_g": -1.3}, hydrogen_dipole(1.0, d=1.0))

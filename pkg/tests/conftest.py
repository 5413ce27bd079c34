import pytest

from atomchain import SystemParams, adiabatic_sweep


def paper_params():
    return SystemParams(150, 0.25, 0.05, -15.0, 1e-3, ext_damping=0.0)


@pytest.fixture(scope="session")
def negative_sweep_150():
    """Adiabatic continuation -50 -> -1 at N = 150 (shared, ~10 min)."""
    return adiabatic_sweep(paper_params(), -50.0, -1.0, fix_saturation=0.01)


@pytest.fixture(scope="session")
def positive_sweep_150():
    """Adiabatic continuation +40 -> +0.25 at N = 150 (shared, ~8 min)."""
    return adiabatic_sweep(paper_params(), 40.0, 0.25, fix_saturation=0.01)

import dataclasses

import pytest

from halmotor.config import HarmonicTruncation, MotorDesign
from halmotor.halbach import fourier_coefficients
from halmotor.laplace import solve_coefficients

# Reference design used throughout: 40 mm wavelength, 0.5 mm clearance,
# 4 mm coil band, 7 mm magnets, 40 mm deep unit cell, 2-segment Halbach.
TABLE1 = dict(lam=0.04, g=0.5e-3, h_c=4e-3, h_m=7e-3, L=0.04, N_m=2)

CONFIG_TEXT = """\
# reference design
lambda_m           = 0.04
gap_m              = 0.0005
coil_height_m      = 0.004
pm_height_m        = 0.007
depth_m            = 0.04
n_magnets_per_pole = 2
n_phases           = 3
back_iron          = false
remanence_T        = 1.1
j_max_A_per_m2     = 1.0e7
frequency_Hz       = 50.0
"""

ALL_CASES = [(n_m, back_iron) for back_iron in (False, True)
             for n_m in (2, 3, 4, 5)]


@pytest.fixture(scope="session")
def table1():
    return MotorDesign(**TABLE1)


@pytest.fixture(scope="session")
def table1_iron(table1):
    return dataclasses.replace(table1, back_iron=True)


@pytest.fixture(scope="session")
def trunc():
    return HarmonicTruncation()


@pytest.fixture(scope="session")
def source(table1, trunc):
    return fourier_coefficients(table1, trunc)


@pytest.fixture(scope="session")
def coeffs(table1, source):
    return solve_coefficients(table1, source)


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "design.cfg"
    path.write_text(CONFIG_TEXT)
    return path


def make_case(n_m: int, back_iron: bool) -> MotorDesign:
    return MotorDesign(**TABLE1 | {"N_m": n_m}, back_iron=back_iron)

"""Physical constants and unit conversion factors.

All internal cross-section math runs in CGS-like base units
(cm, s, photons); the Goeppert-Mayer unit appears only at I/O.
"""

import math

PLANCK_J_S = 6.62607015e-34        # J s (exact SI)
C_LIGHT_M_S = 2.99792458e8         # m/s (exact SI)
AVOGADRO = 6.02214076e23           # 1/mol (exact SI)

GM_CM4_S = 1e-50                   # 1 GM in cm^4 s / photon

LN2 = math.log(2.0)
LN10 = math.log(10.0)

UM2_TO_CM2 = 1e-8
FS_TO_S = 1e-15
UM_TO_CM = 1e-4


def photon_energy_j(wavelength_nm: float) -> float:
    """Single-photon energy h*c/lambda in joules."""
    return PLANCK_J_S * C_LIGHT_M_S / (wavelength_nm * 1e-9)


def molar_to_number_density(concentration_m: float) -> float:
    """Convert mol/L to fluorophores per cm^3."""
    return concentration_m * AVOGADRO / 1000.0

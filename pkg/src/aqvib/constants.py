"""Physical constants and unit conversions (CODATA 2018).

Every unit conversion in the package goes through the values defined here so
that energies (hartree), lengths (angstrom), masses (unified amu) and
wavenumbers (cm^-1) stay mutually consistent.
"""

from __future__ import annotations

# CODATA 2018 recommended values.
HARTREE_J = 4.3597447222071e-18      # 1 hartree in joule
AMU_KG = 1.66053906660e-27           # 1 unified atomic mass unit in kg
ANGSTROM_M = 1.0e-10                 # 1 angstrom in metre
BOHR_ANGSTROM = 0.529177210903       # 1 bohr in angstrom
SPEED_OF_LIGHT_CM_S = 2.99792458e10  # speed of light in cm/s (exact)

# Force constant conversion: hartree/angstrom^2 -> J/m^2 (== N/m).
HARTREE_PER_ANG2_TO_SI = HARTREE_J / ANGSTROM_M**2

# Masses of the most abundant isotope in amu (AME2020).  Diatomic reduced
# masses are built from these unless the caller overrides them explicitly.
ISOTOPE_MASS_AMU: dict[str, float] = {
    "H": 1.00782503207,
    "He": 4.002603254,
    "Li": 7.016003437,
    "Be": 9.012183065,
    "B": 11.009305360,
    "C": 12.0,
    "N": 14.003074004,
    "O": 15.994914620,
    "F": 18.998403163,
    "Ne": 19.992440176,
    "Na": 22.989769282,
    "Mg": 23.985041697,
    "Al": 26.981538530,
    "Si": 27.976926535,
    "P": 30.973761998,
    "S": 31.972071174,
    "Cl": 34.968852682,
    "K": 38.963706486,
    "Ca": 39.962590863,
    "Ga": 68.925573500,
    "Ge": 73.921177761,
    "As": 74.921594570,
    "Se": 79.916521800,
    "Br": 78.918337600,
    "Kr": 83.911497728,
}

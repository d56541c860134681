"""Physical constants used across the package (SI units)."""

C_LIGHT = 2.99792458e8          # vacuum speed of light, m/s
HBAR = 1.054571817e-34          # reduced Planck constant, J s
ATOMIC_MASS_KG = 1.66e-27       # one atomic mass unit, kg

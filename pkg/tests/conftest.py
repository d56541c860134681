"""Shared builders for the reference configuration used across the suite.

The reference experiment: a 1.46 um microcavity at the 7th longitudinal
order between 1 m mirrors, a measured photon loss of 1e8 1/s, and a dye
bath of 1e9 molecules with 50 THz-wide emission/absorption profiles
offset +-4.18 THz from the 3456 THz electronic resonance.  The polarised
pump sweep probes the index pair (1.3435, 1.3395); most closed-form
reference values are frozen at those two indices.
"""

from __future__ import annotations

from dataclasses import replace

from polarbec import (
    CavityParams,
    DyeParams,
    MediumIndices,
    Mode,
    build_rate_table,
    cutoff_frequency,
)

# --- reference configuration ----------------------------------------------

KAPPA = 1e8
BASE_INDEX = 1.34
SWEEP_INDICES = MediumIndices(n_L=1.3435, n_R=1.3395)


def make_cavity(mirror_loss: float = 0.01) -> CavityParams:
    return CavityParams(mirror_radius=1.0, mirror_separation=1.46e-6,
                        longitudinal_index=7, mirror_loss=mirror_loss)


def make_dye(pump: float = 0.0, **overrides) -> DyeParams:
    fields = dict(Omega0=3456e12, DeltaOmega=4.18e12, linewidth=50e12,
                  gamma_down0=10.0, gamma_up0=10.0, gamma_down=1e9,
                  gamma_up_pump=pump, M=1e9)
    fields.update(overrides)
    return DyeParams(**fields)


def single_mode_problem(pump: float, kappa: float = KAPPA,
                        index: float = 1.3435, **dye_overrides):
    """One L-polarised ground mode with its rate table and dye bath."""
    cavity = make_cavity()
    mode = Mode(j=7, l=0, sigma="L",
                omega=cutoff_frequency(cavity, index), kappa=kappa)
    dye = make_dye(pump, **dye_overrides)
    return [mode], build_rate_table(dye, [mode]), dye


def with_pump(dye: DyeParams, pump: float) -> DyeParams:
    return replace(dye, gamma_up_pump=pump)


def bisect_single_mode(pump: float, kappa: float, gamma_down: float,
                       up: float, dn: float, M: float) -> float:
    """Single-mode stationary occupation by sign bisection of the balance.

    Deliberately independent of the package's closed-form root: brackets
    the zero of the slaved photon drift
        f(N) = -kappa N + (M / D) (dn (N+1) Gu - up N Gd)
    with Gu = pump + N up, Gd = gamma_down + (N+1) dn, D = Gu + Gd,
    and halves the bracket until it collapses in float64.  f(0) >= 0 and
    f is eventually decay-dominated, so the root is unique.
    """
    def f(N: float) -> float:
        Gu = pump + N * up
        Gd = gamma_down + (N + 1.0) * dn
        return (-kappa * N
                + (M / (Gu + Gd)) * (dn * (N + 1.0) * Gu - up * N * Gd))

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise RuntimeError("balance never turns decay-dominated")
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return mid
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid


# --- closed-form reference values, frozen from a 50-digit evaluation -------
# (mpmath oracle, independent of the package arithmetic)

LATERAL_134 = 185156719104.01349          # rad/s at n = 1.34
CUTOFF_134 = 3370038195760704.1           # rad/s at n = 1.34
MASS_134 = 7.0999503739283925e-36         # kg at n = 1.34
DECAY_134 = 3064735820895.5224            # 1/s at n = 1.34, delta = 0.01

DN_L0 = 2.4014433045184345                # emission rate, ground mode, n=1.3435
UP_L0 = 2.8324333455463544                # absorption rate, same mode
DN_R0 = 2.9324342980384228                # emission rate, ground mode, n=1.3395
UP_R0 = 3.5166236526839583                # absorption rate, same mode

TAU_L0 = 1179471253.898433                # gamma_down * up / dn at n=1.3435
TAU_R0 = 1199216519.543614                # same at n = 1.3395
TEFF_L0 = 1274171447.1215687              # finite-loss knee, kappa = 1e8
TEFF_R0 = 1276860563.1847709

THETA_GLUCOSE = 0.176                     # net rotatory strength, eps = 1
CHI_FULL_EPS1 = 2.7200003369996938e-5     # full chain, glucose/methanol
CHI_PREFACTOR = 2.1464649124050614e-8     # chi / (theta * m_u * eps * alpha^2)
CHI_QUICK_EPS1 = 2.711808e-5              # one-line estimate at eps = 1
CHI_QUICK_EPS05 = 1.355904e-5

N_EXACT_2TAU = 4769961660.6043477         # exact root, pump = 2*TAU_L0, kappa=1e8
N_HIGHQ_2TAU = 5411731179.2422399         # lossless-limit branch, same drive

"""Macroscopicity figures of merit for a flux-qubit loop.

Extensive difference: magnetic-moment difference between the two
circulating-current states in Bohr magnetons. Disconnectivity: the number of
electrons that change state between the branches, 6 L I_p / (4 e v_F).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018
BOHR_MAGNETON = 9.2740100783e-24  # J/T
ELEMENTARY_CHARGE = 1.602176634e-19  # C
CONSTANTS = {"bohr_magneton": BOHR_MAGNETON, "elementary_charge": ELEMENTARY_CHARGE, "source": "CODATA 2018"}

PAPER_AREA = 7e-12  # m^2
# Loop length and Fermi velocity are not quoted alongside the area; a square
# loop of that area and aluminium's v_F give about 8 electrons.
DEFAULT_CIRCUMFERENCE = 4.0 * math.sqrt(PAPER_AREA)
ALUMINIUM_FERMI_VELOCITY = 2.03e6  # m/s

# Comparison figures quoted for context only.
DUST_PARTICLE_DISCONNECTIVITY = 2.5
DUST_PARTICLE_NUCLEI = 160


@dataclass(frozen=True)
class MacroParams:
    i_p: float = 170e-9
    area: float = PAPER_AREA
    circumference: float = DEFAULT_CIRCUMFERENCE
    fermi_velocity: float = ALUMINIUM_FERMI_VELOCITY
    overlap: float = 1.0

    def __post_init__(self):
        for name in ("i_p", "area", "circumference", "fermi_velocity", "overlap"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and strictly positive, got {v!r}")
        if self.overlap > 1:
            raise ValueError(f"overlap must not exceed 1, got {self.overlap!r}")


@dataclass(frozen=True)
class MacroReport:
    delta_m_bohr: float
    delta_n: float


def extensive_difference(p: MacroParams) -> float:
    """overlap * 2 I_p A / mu_B."""
    return p.overlap * 2.0 * p.i_p * p.area / BOHR_MAGNETON


def disconnectivity(p: MacroParams) -> float:
    return 6.0 * p.circumference * p.i_p / (4.0 * ELEMENTARY_CHARGE * p.fermi_velocity)


def macro_report(p: MacroParams) -> MacroReport:
    return MacroReport(extensive_difference(p), disconnectivity(p))

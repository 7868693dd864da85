"""Bloch-vector picture of a single qubit and the protocol's four channels.

Basis convention: z = +1 is the excited state |e>, z = -1 the ground state
|g>, so the expectation of Q = |e><e| - |g><g| is simply z.

Components may be plain floats or numpy arrays of a common shape; every
channel broadcasts, which is what the grid sweeps rely on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

Real = Union[float, np.ndarray]

PHYSICAL_TOL = 1e-12


class UnphysicalStateError(ValueError):
    """Raised when a Bloch vector lies outside the unit ball."""


@dataclass(frozen=True)
class BlochState:
    x: Real
    y: Real
    z: Real

    @property
    def purity_radius(self) -> Real:
        return np.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        r2 = self.x * self.x + self.y * self.y + self.z * self.z
        return bool(np.all(np.asarray(r2) <= 1.0 + tol))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class MeasurementOutcome:
    value: int
    probability: Real
    post_state: BlochState


def ground_state() -> BlochState:
    return BlochState(0.0, 0.0, -1.0)


def excited_state() -> BlochState:
    return BlochState(0.0, 0.0, 1.0)


def measure_expectation(s: BlochState) -> Real:
    """Expectation value of Q in state ``s``."""
    return s.z


def rotate(s: BlochState, theta: Real) -> BlochState:
    """Pseudo-spin rotation by ``theta`` about the y axis.

    x' = x cos(theta) + z sin(theta),  z' = z cos(theta) - x sin(theta).
    Starting from |g>, theta = pi flips to |e>.
    """
    if not np.all(np.isfinite(theta)):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    c, sn = np.cos(theta), np.sin(theta)
    return BlochState(s.x * c + s.z * sn, s.y, s.z * c - s.x * sn)


def coherence_factor(t: Real, t2: float) -> Real:
    """exp(-t/T2); exactly 1 for an infinite coherence time."""
    if np.any(np.asarray(t) < 0) or not np.all(np.isfinite(t)):
        raise ValueError(f"wait time must be finite and non-negative, got {t!r}")
    if math.isinf(t2) and t2 > 0:
        return 1.0
    if not t2 > 0:
        raise ValueError(f"T2 must be positive or infinite, got {t2!r}")
    return np.exp(-np.asarray(t, dtype=float) / t2) if np.ndim(t) else math.exp(-t / t2)


def dephase(s: BlochState, t: Real, t2: float) -> BlochState:
    """Pure dephasing for a time ``t``: transverse components decay as exp(-t/T2)."""
    gamma = coherence_factor(t, t2)
    if math.isinf(t2):
        return s
    return BlochState(s.x * gamma, s.y * gamma, s.z)


def pulse_o(s: BlochState) -> BlochState:
    """Measurement pulse: complete dephasing in the Q basis."""
    return BlochState(0.0 * s.x, 0.0 * s.y, s.z)


def measure_projective(s: BlochState) -> tuple[MeasurementOutcome, MeasurementOutcome]:
    """Projective Q measurement, returned as the (+1, -1) branches."""
    if not s.is_physical():
        raise UnphysicalStateError(f"state {s} is outside the Bloch ball")
    zero = 0.0 * s.z
    plus = MeasurementOutcome(+1, (1.0 + s.z) / 2.0, BlochState(zero, zero, zero + 1.0))
    minus = MeasurementOutcome(-1, (1.0 - s.z) / 2.0, BlochState(zero, zero, zero - 1.0))
    return plus, minus

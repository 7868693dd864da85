"""Finite-shot emulation of the protocol and a z-test for the non-disturbance condition."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lgsim.protocol import ProtocolParams, run_ensemble


@dataclass(frozen=True)
class ShotRecord:
    n_plus: int
    n_minus: int
    seed: Optional[int] = None

    @property
    def shots(self) -> int:
        return self.n_plus + self.n_minus

    @property
    def estimate(self) -> float:
        return (self.n_plus - self.n_minus) / self.shots

    @property
    def std_error(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.estimate**2) / self.shots)


@dataclass(frozen=True)
class NdcTest:
    d_hat: float
    se_d: float
    z_score: float
    p_value: float
    degenerate: bool = False

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def sample_protocol(params: ProtocolParams, with_pulse: bool, shots: int, seed) -> ShotRecord:
    """Draw ``shots`` Q3 outcomes from the exact ensemble probabilities."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots!r}")
    q3 = float(run_ensemble(params, with_pulse).q3_expectation)
    p_plus = min(1.0, max(0.0, (1.0 + q3) / 2.0))
    rng = np.random.default_rng(seed)
    n_plus = int(rng.binomial(shots, p_plus))
    return ShotRecord(n_plus, shots - n_plus, seed if isinstance(seed, int) else None)


def ndc_test(record_g: ShotRecord, record_no_pulse: ShotRecord) -> NdcTest:
    """Two-sample normal test of d = <Q3>_no_pulse - <Q3>_G = 0.

    The normal approximation gets poor below roughly 100 shots per arm.
    """
    if record_g.shots < 1 or record_no_pulse.shots < 1:
        raise ValueError("both records need at least one shot")
    d_hat = record_no_pulse.estimate - record_g.estimate
    se = math.hypot(record_g.std_error, record_no_pulse.std_error)
    if se == 0.0:
        if d_hat == 0.0:
            return NdcTest(d_hat, se, 0.0, 1.0, degenerate=True)
        return NdcTest(d_hat, se, math.copysign(math.inf, d_hat), 0.0, degenerate=True)
    z = d_hat / se
    return NdcTest(d_hat, se, z, math.erfc(abs(z) / math.sqrt(2.0)))

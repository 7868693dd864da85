"""Two-ensemble Leggett-Garg protocol on a dephasing qubit.

Ensemble ``G`` applies the measurement pulse between the two rotations;
ensemble ``no_pulse`` lets the qubit dephase freely for ``t_wait`` instead.
Q1 is a deterministic preparation label, so every correlator involving it
is ``q1 * <X>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Any, Optional

import numpy as np

from lgsim.bloch import (
    Real,
    dephase,
    ground_state,
    measure_expectation,
    measure_projective,
    pulse_o,
    rotate,
)

ENSEMBLE_G = "G"
ENSEMBLE_NO_PULSE = "no_pulse"

VIOLATION_TOL = 1e-12

# (sign of <Q1Q2>_G, sign of <Q1Q3>_no_pulse, sign of <Q2Q3>_G)
LG_SIGNS: dict[str, tuple[int, int, int]] = {
    "LG1'": (+1, +1, +1),
    "LG2'": (+1, -1, -1),
    "LG3'": (-1, +1, -1),
    "LG4'": (-1, -1, +1),
}


def _check_pm1(name: str, value: int) -> None:
    if value not in (1, -1):
        raise ValueError(f"{name} must be +1 or -1, got {value!r}")


@dataclass(frozen=True)
class ProtocolParams:
    theta1: Real
    theta2: Real
    t_wait: float = 18e-9
    T2: float = 10e-9
    q1: int = -1

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if not (math.isfinite(self.t_wait) and self.t_wait >= 0):
            raise ValueError(f"t_wait must be finite and >= 0, got {self.t_wait!r}")
        if not (self.T2 > 0):
            raise ValueError(f"T2 must be positive or infinite, got {self.T2!r}")
        _check_pm1("q1", self.q1)

    def same_as(self, other: "ProtocolParams") -> bool:
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self)
        )


@dataclass(frozen=True)
class EnsembleStats:
    """Expectation values for one ensemble.

    ``shots`` is ``None`` for exact (infinite-shot) statistics. The Q2 fields
    are only populated for a selective run of ensemble G.
    """

    ensemble_id: str
    q3_expectation: Real
    corr_q1q3: Real
    q2_expectation: Optional[Real] = None
    corr_q1q2: Optional[Real] = None
    corr_q2q3: Optional[Real] = None
    shots: Optional[int] = None
    params: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.ensemble_id not in (ENSEMBLE_G, ENSEMBLE_NO_PULSE):
            raise ValueError(f"unknown ensemble {self.ensemble_id!r}")
        if self.ensemble_id == ENSEMBLE_NO_PULSE and self.q2_expectation is not None:
            raise ValueError("ensemble without the t2 measurement has no Q2 statistics")
        for name in ("q3_expectation", "corr_q1q3", "q2_expectation", "corr_q1q2", "corr_q2q3"):
            v = getattr(self, name)
            if v is not None and np.any(np.abs(np.asarray(v)) > 1 + 1e-12):
                raise ValueError(f"{name} outside [-1, 1]")


@dataclass(frozen=True)
class LGReport:
    lg1: Real
    lg2: Real
    lg3: Real
    lg4: Real
    violated: frozenset
    d: Optional[Real] = None
    q1: Optional[int] = None
    q2: Optional[int] = None
    epsilon_adroit: Optional[Real] = None

    def values(self) -> dict[str, Real]:
        return {"LG1'": self.lg1, "LG2'": self.lg2, "LG3'": self.lg3, "LG4'": self.lg4}


def run_ensemble(params: ProtocolParams, with_pulse: bool, selective: bool = False) -> EnsembleStats:
    """Exact statistics of ground -> rotate(theta1) -> [pulse | dephase] -> rotate(theta2) -> Q3."""
    if selective and not with_pulse:
        raise ValueError("a selective run needs the t2 measurement pulse")
    s = rotate(ground_state(), params.theta1)
    q1 = params.q1
    if not with_pulse:
        s = dephase(s, params.t_wait, params.T2)
        q3 = measure_expectation(rotate(s, params.theta2))
        return EnsembleStats(ENSEMBLE_NO_PULSE, q3, q1 * q3, params=params)
    if not selective:
        q3 = measure_expectation(rotate(pulse_o(s), params.theta2))
        return EnsembleStats(ENSEMBLE_G, q3, q1 * q3, params=params)

    q3 = q2 = q2q3 = 0.0
    for branch in measure_projective(s):
        z3 = measure_expectation(rotate(branch.post_state, params.theta2))
        q3 = q3 + branch.probability * z3
        q2 = q2 + branch.probability * branch.value
        q2q3 = q2q3 + branch.probability * branch.value * z3
    return EnsembleStats(
        ENSEMBLE_G,
        q3,
        q1 * q3,
        q2_expectation=q2,
        corr_q1q2=q1 * q2,
        corr_q2q3=q2q3,
        params=params,
    )


def closed_form_q3(theta1: Real, theta2: Real, t: float, T2: float, with_pulse: bool) -> Real:
    """<Q3> = -cos(theta1)cos(theta2) [+ exp(-t/T2) sin(theta1)sin(theta2) without the pulse]."""
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"wait time must be finite and non-negative, got {t!r}")
    if not T2 > 0:
        raise ValueError(f"T2 must be positive or infinite, got {T2!r}")
    base = -np.cos(theta1) * np.cos(theta2)
    if with_pulse:
        return base
    return base + math.exp(-t / T2) * np.sin(theta1) * np.sin(theta2)


def compute_d(stats_g: EnsembleStats, stats_no_pulse: EnsembleStats) -> Real:
    """Disturbance d = <Q3>_no_pulse - <Q3>_G."""
    a, b = stats_g.params, stats_no_pulse.params
    if a is not None and b is not None:
        same = a.same_as(b) if hasattr(a, "same_as") else a == b
        if not same:
            raise ValueError("ensembles were generated with different parameters")
    return stats_no_pulse.q3_expectation - stats_g.q3_expectation


def evaluate_lg(corr_q1q2: Real, corr_q1q3: Real, corr_q2q3: Real) -> LGReport:
    """Left-hand sides of LG1'..LG4'; each is bounded below by -1 under macrorealism."""
    for name, c in (("corr_q1q2", corr_q1q2), ("corr_q1q3", corr_q1q3), ("corr_q2q3", corr_q2q3)):
        if np.any(np.abs(np.asarray(c)) > 1 + 1e-12):
            raise ValueError(f"{name} outside [-1, 1]: {c!r}")
    vals = {
        label: s12 * corr_q1q2 + s13 * corr_q1q3 + s23 * corr_q2q3
        for label, (s12, s13, s23) in LG_SIGNS.items()
    }
    violated = frozenset(k for k, v in vals.items() if np.any(np.asarray(v) < -1 - VIOLATION_TOL))
    return LGReport(vals["LG1'"], vals["LG2'"], vals["LG3'"], vals["LG4'"], violated)


def lg_report(params: ProtocolParams, q2: int) -> LGReport:
    """LG' values for a fixed (q1, q2) assignment using exact ensemble statistics."""
    _check_pm1("q2", q2)
    g = run_ensemble(params, with_pulse=True)
    n = run_ensemble(params, with_pulse=False)
    q1 = params.q1
    base = evaluate_lg(q1 * q2, q1 * n.q3_expectation, q2 * g.q3_expectation)
    return LGReport(
        base.lg1,
        base.lg2,
        base.lg3,
        base.lg4,
        base.violated,
        d=compute_d(g, n),
        q1=q1,
        q2=q2,
        epsilon_adroit=adroitness(params),
    )


@dataclass(frozen=True)
class LogicRow:
    q1: int
    q2: int
    inequality: str
    constraint: str  # "d >= 0" or "d <= 0"

    def violated_by(self, d: float) -> bool:
        return d < 0 if self.constraint == "d >= 0" else d > 0


@dataclass(frozen=True)
class LogicTable:
    rows: tuple[LogicRow, ...]
    disjunction_holds: bool


ASSIGNMENTS = ((1, -1), (1, 1), (-1, 1), (-1, -1))


def verify_logic_table() -> LogicTable:
    """Reduce every LG' inequality under each fixed (Q1, Q2) to a sign constraint on d.

    Substituting <Q1Q2>_G = Q1 Q2, <Q2Q3>_G = Q2 g and <Q1Q3>_no_pulse =
    Q1 (g + d) makes each left-hand side affine in (g, d). An inequality
    constrains d alone when the g coefficient cancels and the constant sits
    exactly at the bound -1.
    """
    rows = []
    for q1, q2 in ASSIGNMENTS:
        for label, (s12, s13, s23) in LG_SIGNS.items():
            const = s12 * q1 * q2
            g_coef = s13 * q1 + s23 * q2
            d_coef = s13 * q1
            if g_coef == 0 and const == -1:
                rows.append(LogicRow(q1, q2, label, "d >= 0" if d_coef > 0 else "d <= 0"))
    rows = tuple(rows)
    # constraints depend on d only through its sign
    disjunction = all(any(r.violated_by(d) for r in rows) for d in (1.0, -1.0))
    disjunction = disjunction and not any(r.violated_by(0.0) for r in rows)
    return LogicTable(rows, disjunction)


def violating_assignment(d: float, table: Optional[LogicTable] = None) -> Optional[LogicRow]:
    """First table row whose constraint is broken by ``d``; None when d == 0."""
    table = table or verify_logic_table()
    for row in table.rows:
        if row.violated_by(d):
            return row
    return None


def adroitness(params: ProtocolParams) -> Real:
    """Total-variation distance between the Q3 outcome distributions with and without the pulse."""
    g = run_ensemble(params, with_pulse=True).q3_expectation
    n = run_ensemble(params, with_pulse=False).q3_expectation
    p_g, p_n = (1 + g) / 2, (1 + n) / 2
    return 0.5 * (np.abs(p_g - p_n) + np.abs((1 - p_g) - (1 - p_n)))


def figure_curves(theta1: Real, theta2: Real, t_wait: float, T2: float) -> dict[str, Real]:
    """Pulse, no-pulse and no-pulse/infinite-T2 curves plus d, on broadcast angles."""
    p = ProtocolParams(theta1, theta2, t_wait, T2)
    q3_pulse = run_ensemble(p, with_pulse=True).q3_expectation
    q3_nopulse = run_ensemble(p, with_pulse=False).q3_expectation
    p_inf = ProtocolParams(theta1, theta2, t_wait, math.inf)
    q3_inf = run_ensemble(p_inf, with_pulse=False).q3_expectation
    return {
        "q3_pulse": q3_pulse,
        "q3_nopulse": q3_nopulse,
        "q3_nopulse_infT2": q3_inf,
        "d": q3_nopulse - q3_pulse,
    }

"""Original three-time Leggett-Garg inequality with four ensembles.

Each interval k in (a, b, c) rotates by ``theta_k`` and then dephases for
``t_k``; Q is measured at the end of each interval unless the ensemble omits
that time. Ensembles: ``G`` (all three measured), ``no_t1``, ``no_t2``,
``no_t3``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

from lgsim.bloch import dephase, ground_state, measure_projective, rotate

ENSEMBLES = ("G", "no_t1", "no_t2", "no_t3")


@dataclass(frozen=True)
class FullProtocolParams:
    theta_a: float = 0.0
    theta_b: float = 0.0
    theta_c: float = 0.0
    t_a: float = 0.0
    T2_a: float = math.inf
    t_b: float = 18e-9
    T2_b: float = 10e-9
    t_c: float = 0.0
    T2_c: float = math.inf
    ensemble: str = "G"

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}; expected one of {ENSEMBLES}")
        for k in "abc":
            theta = getattr(self, f"theta_{k}")
            t, t2 = getattr(self, f"t_{k}"), getattr(self, f"T2_{k}")
            if not math.isfinite(theta):
                raise ValueError(f"theta_{k} must be finite")
            if not (math.isfinite(t) and t >= 0):
                raise ValueError(f"t_{k} must be finite and >= 0")
            if not t2 > 0:
                raise ValueError(f"T2_{k} must be positive or infinite")

    @property
    def measured_times(self) -> tuple[int, ...]:
        skip = {"G": None, "no_t1": 1, "no_t2": 2, "no_t3": 3}[self.ensemble]
        return tuple(k for k in (1, 2, 3) if k != skip)

    def intervals(self):
        return (
            (self.theta_a, self.t_a, self.T2_a),
            (self.theta_b, self.t_b, self.T2_b),
            (self.theta_c, self.t_c, self.T2_c),
        )

    def physics(self) -> "FullProtocolParams":
        """Copy with the ensemble label normalised, for comparing across ensembles."""
        return replace(self, ensemble="G")


@dataclass(frozen=True)
class FullCorrelators:
    params: FullProtocolParams
    joint: dict  # outcome tuple over measured times -> probability
    correlators: dict  # (i, j) -> <Q_i Q_j>

    def corr(self, i: int, j: int) -> float:
        key = (min(i, j), max(i, j))
        if key not in self.correlators:
            raise ValueError(
                f"<Q{key[0]}Q{key[1]}> is unavailable in ensemble {self.params.ensemble!r}"
            )
        return self.correlators[key]


def run_full(params: FullProtocolParams) -> FullCorrelators:
    measured = params.measured_times
    branches = [(1.0, (), ground_state())]
    for time, (theta, t, t2) in enumerate(params.intervals(), start=1):
        branches = [(p, out, dephase(rotate(s, theta), t, t2)) for p, out, s in branches]
        if time not in measured:
            continue
        split = []
        for p, out, s in branches:
            for o in measure_projective(s):
                split.append((p * o.probability, out + (o.value,), o.post_state))
        branches = split

    joint: dict[tuple[int, ...], float] = {}
    for p, out, _ in branches:
        joint[out] = joint.get(out, 0.0) + p
    correlators = {}
    for (ia, a), (ib, b) in combinations(enumerate(measured), 2):
        correlators[(a, b)] = sum(p * out[ia] * out[ib] for out, p in joint.items())
    return FullCorrelators(params, joint, correlators)


def disturbances_from(reports: dict[str, FullCorrelators]) -> tuple[float, float, float]:
    """(dcI, dcII, dcIII) from already computed ensembles sharing the same physics."""
    base = reports["G"].params.physics()
    for name, r in reports.items():
        if r.params.physics() != base:
            raise ValueError(f"ensemble {name!r} was run with different parameters")
    g = reports["G"]
    dc1 = g.corr(2, 3) - reports["no_t1"].corr(2, 3)
    dc2 = g.corr(1, 3) - reports["no_t2"].corr(1, 3)
    dc3 = g.corr(1, 2) - reports["no_t3"].corr(1, 2)
    return dc1, dc2, dc3


def run_all(params: FullProtocolParams) -> dict[str, FullCorrelators]:
    return {e: run_full(replace(params, ensemble=e)) for e in ENSEMBLES}


def control_disturbances(params: FullProtocolParams) -> tuple[float, float, float]:
    return disturbances_from(run_all(params))


def corrected_lgi(
    corr12_no_t3: float,
    corr13_no_t2: float,
    corr23_no_t1: float,
    dc: tuple[float, float, float],
) -> tuple[float, float, bool]:
    """Evaluate <Q1Q2>_no_t3 + <Q1Q3>_no_t2 + <Q2Q3>_no_t1 >= -1 - dcI - dcII - dcIII."""
    lhs = corr12_no_t3 + corr13_no_t2 + corr23_no_t1
    bound = -1.0 - dc[0] - dc[1] - dc[2]
    return lhs, bound, lhs >= bound


@dataclass(frozen=True)
class FullLGReport:
    correlators: dict  # ensemble -> {(i, j): value}
    lgi_lhs: float
    dcI: float
    dcII: float
    dcIII: float
    corrected_bound: float
    satisfied: bool
    uncorrected_satisfied: bool


def full_lgi_report(params: FullProtocolParams) -> FullLGReport:
    reports = run_all(params)
    dc = disturbances_from(reports)
    lhs, bound, ok = corrected_lgi(
        reports["no_t3"].corr(1, 2),
        reports["no_t2"].corr(1, 3),
        reports["no_t1"].corr(2, 3),
        dc,
    )
    return FullLGReport(
        {e: dict(r.correlators) for e, r in reports.items()},
        lhs,
        *dc,
        corrected_bound=bound,
        satisfied=ok,
        uncorrected_satisfied=lhs >= -1.0,
    )

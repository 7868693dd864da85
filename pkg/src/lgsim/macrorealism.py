"""Classical macrorealist oracle: a two-state telegraph process.

The system holds a definite value q = +/-1 at every time. Between
measurement times it flips with a fixed probability; measuring at t2 is
non-invasive unless ``invasive_flip`` > 0, in which case the measurement
itself flips the state afterwards with that probability.

Joint distributions are 2x2x2 arrays indexed by (q1, q2, q3) with index 0
meaning -1 and index 1 meaning +1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lgsim.protocol import ENSEMBLE_G, ENSEMBLE_NO_PULSE, EnsembleStats, LGReport, evaluate_lg

VALUES = np.array([-1, 1])


@dataclass(frozen=True)
class TelegraphModel:
    p_init: float = 0.5
    p_flip_12: float = 0.0
    p_flip_23: float = 0.0
    invasive_flip: float = 0.0

    def __post_init__(self):
        for name in ("p_init", "p_flip_12", "p_flip_23", "invasive_flip"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


def _step(p_flip: float) -> np.ndarray:
    # transition matrix T[from, to] over the (-1, +1) index
    return np.array([[1 - p_flip, p_flip], [p_flip, 1 - p_flip]])


def joint_distribution(model: TelegraphModel, with_measurement_at_t2: bool) -> np.ndarray:
    """Exact P(q1, q2, q3), enumerating every trajectory."""
    p1 = np.array([1 - model.p_init, model.p_init])
    t12 = _step(model.p_flip_12)
    t23 = _step(model.p_flip_23)
    kick = _step(model.invasive_flip if with_measurement_at_t2 else 0.0)
    joint = np.zeros((2, 2, 2))
    for i1 in range(2):
        for i2 in range(2):
            for ik in range(2):
                for i3 in range(2):
                    joint[i1, i2, i3] += p1[i1] * t12[i1, i2] * kick[i2, ik] * t23[ik, i3]
    return joint


def correlators_from_joint(joint: np.ndarray) -> tuple[float, float, float]:
    """(<Q1Q2>, <Q1Q3>, <Q2Q3>) of a distribution over {+1,-1}^3."""
    q1, q2, q3 = np.meshgrid(VALUES, VALUES, VALUES, indexing="ij")
    return (
        float(np.sum(joint * q1 * q2)),
        float(np.sum(joint * q1 * q3)),
        float(np.sum(joint * q2 * q3)),
    )


def classical_lg_check(joint: np.ndarray) -> tuple[LGReport, float]:
    """LG' family and the original LGI left-hand side when all ensembles share ``joint``."""
    c12, c13, c23 = correlators_from_joint(joint)
    return evaluate_lg(c12, c13, c23), c12 + c13 + c23


def stats_from_joint(
    joint: np.ndarray, with_measurement_at_t2: bool, shots=None, params=None
) -> EnsembleStats:
    q1, q2, q3 = np.meshgrid(VALUES, VALUES, VALUES, indexing="ij")
    mean = lambda a: float(np.sum(joint * a))  # noqa: E731
    if not with_measurement_at_t2:
        return EnsembleStats(
            ENSEMBLE_NO_PULSE, mean(q3), mean(q1 * q3), shots=shots, params=params
        )
    return EnsembleStats(
        ENSEMBLE_G,
        mean(q3),
        mean(q1 * q3),
        q2_expectation=mean(q2),
        corr_q1q2=mean(q1 * q2),
        corr_q2q3=mean(q2 * q3),
        shots=shots,
        params=params,
    )


def enumerate_exact(model: TelegraphModel, with_measurement_at_t2: bool) -> EnsembleStats:
    joint = joint_distribution(model, with_measurement_at_t2)
    return stats_from_joint(joint, with_measurement_at_t2, params=model)


def sample(
    model: TelegraphModel, shots: int, seed, with_measurement_at_t2: bool = True
) -> EnsembleStats:
    """Monte Carlo estimate from ``shots`` trajectories; reproducible for a fixed seed.

    Four uniforms are drawn per trajectory whether or not t2 is measured, so
    both ensembles consume the generator identically.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots!r}")
    rng = np.random.default_rng(seed)
    u = rng.random((shots, 4))
    q1 = np.where(u[:, 0] < model.p_init, 1, -1)
    q2 = np.where(u[:, 1] < model.p_flip_12, -q1, q1)
    kicked = q2
    if with_measurement_at_t2:
        kicked = np.where(u[:, 2] < model.invasive_flip, -q2, q2)
    q3 = np.where(u[:, 3] < model.p_flip_23, -kicked, kicked)

    joint = np.zeros((2, 2, 2))
    np.add.at(joint, ((q1 + 1) // 2, (q2 + 1) // 2, (q3 + 1) // 2), 1.0)
    joint /= shots
    return stats_from_joint(joint, with_measurement_at_t2, shots=shots, params=model)

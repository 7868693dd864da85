"""Simulation toolkit for a simplified Leggett-Garg test on a dephasing qubit."""

__version__ = "0.1.0"

from lgsim.bloch import (
    BlochState,
    MeasurementOutcome,
    dephase,
    ground_state,
    measure_expectation,
    measure_projective,
    pulse_o,
    rotate,
)
from lgsim.protocol import (
    EnsembleStats,
    LGReport,
    ProtocolParams,
    adroitness,
    closed_form_q3,
    compute_d,
    evaluate_lg,
    lg_report,
    run_ensemble,
    verify_logic_table,
)

__all__ = [
    "BlochState",
    "EnsembleStats",
    "LGReport",
    "MeasurementOutcome",
    "ProtocolParams",
    "adroitness",
    "closed_form_q3",
    "compute_d",
    "dephase",
    "evaluate_lg",
    "ground_state",
    "lg_report",
    "measure_expectation",
    "measure_projective",
    "pulse_o",
    "rotate",
    "run_ensemble",
    "verify_logic_table",
]

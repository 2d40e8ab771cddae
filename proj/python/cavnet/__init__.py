"""Two-cavity feedback network simulator.

Coherent-state quantum trajectories with photon-detection-triggered
feedback, threshold-probability phase signals, and exact Fisher
information of detection records.
"""

from ._core import (
    Basis,
    FeedbackConfig,
    FisherResult,
    ModeAmplitudes,
    NetworkParams,
    Observable,
    RunOptions,
    ScalingFit,
    SignalCurve,
    SignalSample,
    TrajectoryRecord,
    UncertaintyPoint,
    UncertaintyResult,
    fisher_information,
    fisher_scaling,
    markov_gap,
    phase_uncertainty,
    signal_scan,
    simulate_trajectory,
    string_probability_with_derivative,
)

__all__ = [
    "Basis",
    "FeedbackConfig",
    "FisherResult",
    "ModeAmplitudes",
    "NetworkParams",
    "Observable",
    "RunOptions",
    "ScalingFit",
    "SignalCurve",
    "SignalSample",
    "TrajectoryRecord",
    "UncertaintyPoint",
    "UncertaintyResult",
    "fisher_information",
    "fisher_scaling",
    "markov_gap",
    "phase_uncertainty",
    "signal_scan",
    "simulate_trajectory",
    "string_probability_with_derivative",
]

"""Finite-key secret-key lengths and rates for BB84 and six-state QKD."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .entropy import Protocol, ProtocolSpec, asymptotic_rate, binary_entropy, h_ae
from .finite_key import (
    ChannelObservation,
    EpsilonBudget,
    ImpreciseEstimateWarning,
    KeyRateResult,
    RunConfig,
    delta_n,
    delta_v,
    key_length,
    key_length_at,
    leak_ec,
    pa_failure,
    total_epsilon,
)
from .optimizer import OptimizationResult, critical_n, optimize_split, scan
from .rapid import RapidEstimate, case_study_1, case_study_2, rapid_delta_n, rapid_delta_v, rapid_estimate
from .simulator import SimRunReport, TrialSpec, WorkBudgetExceeded, simulate_run, validate_delta_v

__all__ = [
    "BACKEND", "Protocol", "ProtocolSpec", "asymptotic_rate", "binary_entropy", "h_ae",
    "ChannelObservation", "EpsilonBudget", "ImpreciseEstimateWarning", "KeyRateResult", "RunConfig",
    "delta_n", "delta_v", "key_length", "key_length_at", "leak_ec", "pa_failure", "total_epsilon",
    "OptimizationResult", "critical_n", "optimize_split", "scan",
    "RapidEstimate", "case_study_1", "case_study_2", "rapid_delta_n", "rapid_delta_v", "rapid_estimate",
    "SimRunReport", "TrialSpec", "WorkBudgetExceeded", "simulate_run", "validate_delta_v",
]

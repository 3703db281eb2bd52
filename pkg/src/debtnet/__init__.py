"""Evolving debtor-creditor networks: growth-deletion model, ledger replay and exponent fits."""

__version__ = "0.1.0"

from .graph import DegreeHistogram, DynamicGraph, GraphError
from .ledger import DailySnapshot, LedgerError, build_events, parse_ledger, replay
from .rateeq import RateEqParams, asymptotic_pk, solve_stationary
from .sim import SimParams, TheoryValues, run, theoretical_gamma, theoretical_mean_degree
from .statfit import FitResult, fit_power_law, fit_series, regress_gamma

__all__ = [
    "DegreeHistogram", "DynamicGraph", "GraphError",
    "DailySnapshot", "LedgerError", "build_events", "parse_ledger", "replay",
    "RateEqParams", "asymptotic_pk", "solve_stationary",
    "SimParams", "TheoryValues", "run", "theoretical_gamma", "theoretical_mean_degree",
    "FitResult", "fit_power_law", "fit_series", "regress_gamma",
]

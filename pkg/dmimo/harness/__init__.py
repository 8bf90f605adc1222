from .benchmark import BenchmarkResult, benchmark_complexity
from .conformance import CheckResult, ConformanceReport, run_conformance
from .experiment import (
    TrialOutcome,
    WaterfallPoint,
    bp_waterfall,
    run_and_save,
    run_experiment,
    run_trial,
    trial_rng,
)
from .metrics import CSV_FIELDS, MetricsRow, emit_csv, read_csv

__all__ = [
    "BenchmarkResult",
    "CSV_FIELDS",
    "CheckResult",
    "ConformanceReport",
    "MetricsRow",
    "TrialOutcome",
    "WaterfallPoint",
    "benchmark_complexity",
    "bp_waterfall",
    "emit_csv",
    "read_csv",
    "run_and_save",
    "run_conformance",
    "run_experiment",
    "run_trial",
    "trial_rng",
]

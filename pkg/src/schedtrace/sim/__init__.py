"""Discrete-event scheduler simulation: baseline vs. predictive policies."""

from .compare import Improvement, LedgerMismatch, compare_results, job_rollup
from .engine import (
    Baseline,
    Machine,
    NoFeasibleMachine,
    Predictive,
    ResourceAccountingError,
    SIM_FEATURE_NAMES,
    SimResult,
    default_machines,
    run_simulation,
)
from .workload import (
    BUILTIN_SHAPES,
    FailurePlan,
    SimTask,
    UnknownWorkload,
    Workload,
    build_workload,
    load_workload,
    save_workload,
    workload_from_dict,
    workload_to_dict,
)

__all__ = [
    "BUILTIN_SHAPES",
    "Baseline",
    "FailurePlan",
    "Improvement",
    "LedgerMismatch",
    "Machine",
    "NoFeasibleMachine",
    "Predictive",
    "ResourceAccountingError",
    "SIM_FEATURE_NAMES",
    "SimResult",
    "SimTask",
    "UnknownWorkload",
    "Workload",
    "build_workload",
    "compare_results",
    "default_machines",
    "job_rollup",
    "load_workload",
    "run_simulation",
    "save_workload",
    "workload_from_dict",
    "workload_to_dict",
]

"""Bit-accurate simulator and evaluation toolkit for serial IMPLY approximate adders."""

__version__ = "0.1.0"

from .adders import (
    AdderKind,
    FaOutcome,
    build_program,
    exact_fa,
    sappi1_fa,
    sappi2_fa,
    truth_table,
)
from .costs import application_gains, comparison_table, energy, memristors, steps
from .imply import MicroOp, StepMachine, StepProgram, run_program
from .metrics import ErrorReport, ed, exhaustive_metrics
from .rca import (
    AddResult,
    MulConfig,
    RcaConfig,
    rca_add,
    rca_add_array,
    rca_add_stepwise,
    shift_add_multiply,
)

__all__ = [
    "AdderKind",
    "AddResult",
    "ErrorReport",
    "FaOutcome",
    "MicroOp",
    "MulConfig",
    "RcaConfig",
    "StepMachine",
    "StepProgram",
    "application_gains",
    "build_program",
    "comparison_table",
    "ed",
    "energy",
    "exact_fa",
    "exhaustive_metrics",
    "memristors",
    "rca_add",
    "rca_add_array",
    "rca_add_stepwise",
    "run_program",
    "sappi1_fa",
    "sappi2_fa",
    "shift_add_multiply",
    "steps",
    "truth_table",
]

from .models import *
from .storage import *

__all__ = [
    "RunConfig",
    "WaveRecord",
    "BranchPointRecord",
    "BranchRecord",
    "SpectrumRecord",
    "KreinRecord",
    "JLRecord",
    "ConsistencyModel",
    "ComparisonRecord",
    "StabilityReport",
    "MinimizerRecord",
    "TABLE_COLUMNS",
    "read_model",
    "write_model",
    "read_wave",
    "read_branch",
    "read_stability_report",
    "read_minimizer_record",
    "read_waves",
    "write_eigenvalues_csv",
    "read_eigenvalues_csv",
    "write_branch_csv",
    "write_trace_csv",
    "read_trace_csv",
    "write_report_table",
]

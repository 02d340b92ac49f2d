"""Run reports and plot-data writers."""

from .generator import (
    TRACE_HEADER,
    ReportGenerator,
    RunReport,
    read_matrix_csv,
    read_solution,
    spectral_norm,
    write_curve_csv,
    write_json,
    write_matrix_csv,
    write_trace_csv,
)

__all__ = [
    "TRACE_HEADER",
    "ReportGenerator",
    "RunReport",
    "read_matrix_csv",
    "read_solution",
    "spectral_norm",
    "write_curve_csv",
    "write_json",
    "write_matrix_csv",
    "write_trace_csv",
]

"""
Input/Output package for opencarnot.
Handles result file export.
"""

from .export import (
    dumps_json, read_control_csv, write_control_csv, write_probe_csv,
    write_scan_csv, write_solver_report
)

"""Executable checks over computed charts, plane arithmetic and the CLI."""
from .checks import (WindowTooSmall, check_operator_iso, check_vanishing, main_theorem_check,
                     torsion_subspace)
from .figures import regression_figures
from .planes import (DegenerateConfiguration, PropagationInput, anchor_intercept, propagate_plane,
                     slope_pipeline)
from .report import Report

__all__ = [
    "Report", "PropagationInput", "propagate_plane", "anchor_intercept", "slope_pipeline",
    "DegenerateConfiguration", "check_vanishing", "check_operator_iso", "main_theorem_check",
    "torsion_subspace", "WindowTooSmall", "regression_figures",
]

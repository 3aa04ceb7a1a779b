from .crossing import crossing_analysis, mixed_ground_state
from .ctcheck import run_ct_check
from .ensemble import ensemble_run
from .factory import build_model, build_path, flow_profile, step_control, tolerance_settings
from .gapfind import find_gap_closing
from .stabilization import index_stabilization, run_deficit_study
from .sweep import run_sweep

__all__ = [
    "build_model", "build_path", "flow_profile", "step_control", "tolerance_settings",
    "run_sweep", "find_gap_closing", "crossing_analysis", "mixed_ground_state",
    "ensemble_run", "run_ct_check", "index_stabilization", "run_deficit_study",
]

"""Shrinkage-test laboratory for slice and hit-and-run step samplers in nested sampling."""

from .calibration import calibrate_method, summarize_scaling
from .geometry import Geometry, get_geometry, make_geometry
from .proposals import METHODS, LiveSet, ProposalState
from .runner import RunConfig, ShrinkageRecord, run_shrinkage, run_shrinkage_oracle
from .shrinkage import TestVerdict, ks_uniform_test, verdict_for, volume_ratios

__version__ = "0.1.0"

__all__ = [
    "Geometry",
    "get_geometry",
    "make_geometry",
    "METHODS",
    "LiveSet",
    "ProposalState",
    "RunConfig",
    "ShrinkageRecord",
    "run_shrinkage",
    "run_shrinkage_oracle",
    "TestVerdict",
    "ks_uniform_test",
    "verdict_for",
    "volume_ratios",
    "calibrate_method",
    "summarize_scaling",
]

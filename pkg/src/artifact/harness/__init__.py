"""Sampling, verification suites, reports and their JSON schema."""
from .config import VerifyConfig
from .report import REPORT_SCHEMA, Report, validate_report
from .sampling import case_rng, sample_matched_lie, sample_matched_pair
from .suites import property_suite, replay_case, run_suite, verify_descent, verify_fl, verify_fl_lie

__all__ = [
    "VerifyConfig", "Report", "REPORT_SCHEMA", "validate_report", "case_rng", "sample_matched_pair",
    "sample_matched_lie", "verify_fl", "verify_fl_lie", "verify_descent", "property_suite", "run_suite",
    "replay_case",
]

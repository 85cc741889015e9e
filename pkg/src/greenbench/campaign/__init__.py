"""Repeated experiments, pattern grouping and table-shaped reports."""

from .config import CampaignConfig, ExperimentConfig, family_of, parse_campaign_config, read_campaign_config
from .patterns import Aggregate, match_patterns, mean_model, same_pattern, select_and_aggregate
from .report import (
    REPORT_HEADER,
    CampaignReport,
    ReportRow,
    emit_plot_data,
    emit_report,
    format_report_csv,
    parse_report_csv,
    read_report_csv,
)
from .runner import ExperimentResult, run_campaign, run_experiment

__all__ = [
    "REPORT_HEADER",
    "Aggregate",
    "CampaignConfig",
    "CampaignReport",
    "ExperimentConfig",
    "ExperimentResult",
    "ReportRow",
    "emit_plot_data",
    "emit_report",
    "family_of",
    "format_report_csv",
    "match_patterns",
    "mean_model",
    "parse_campaign_config",
    "parse_report_csv",
    "read_campaign_config",
    "read_report_csv",
    "run_campaign",
    "run_experiment",
    "same_pattern",
    "select_and_aggregate",
]

"""
Functions for summarizing experiment outputs.
"""

from .report import ReportRow, rows_to_dataframe, format_report, write_report
from .report import gather_reports, domain_pair_tag

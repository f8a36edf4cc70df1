"""Report generation components"""

from .report_builder import render_cayley_dot, render_frame, render_report, write_artifact

__all__ = [
    "render_cayley_dot",
    "render_frame",
    "render_report",
    "write_artifact",
]

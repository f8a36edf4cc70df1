"""
Rendering of check reports and monoid artifacts.

DOT and plain-text output go through the jinja2 templates next to this file;
tables go through pandas.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from jinja2 import Environment, FileSystemLoader, select_autoescape

from ..core.checks import Report, Status
from ..core.drmonoid import DRMonoid
from ..nfield.ideals import IntegralIdeal, prime_ideals_up_to

logger = logging.getLogger(__name__)

# Edge colours cycle over the generator list
EDGE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _environment() -> Environment:
    template_dir = os.path.join(os.path.dirname(__file__), "templates")
    return Environment(
        loader=FileSystemLoader(template_dir),
        autoescape=select_autoescape(["html", "xml"]),
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )


# =============================
# Cayley graphs
# =============================

def cayley_generators(M: DRMonoid, bound: Optional[int] = None) -> List[int]:
    """Distinct non-identity classes of the prime ideals of norm <= bound."""
    bound = bound or max(2 * M.level.norm, 5)
    seen: List[int] = []
    for P in prime_ideals_up_to(M.field, bound):
        i = M.locate(P)
        if i != M.identity and i not in seen:
            seen.append(i)
    return seen


def element_label(M: DRMonoid, i: int) -> str:
    x = M.elements[i]
    if M.field.is_rational:
        return str(x.rep.norm % max(M.level.norm, 1)) if M.level.norm > 1 else "1"
    return f"{x.rep}"


def render_cayley_dot(M: DRMonoid, generators: Optional[Sequence[int]] = None) -> str:
    """Digraph with an edge x -> g x for every generator class g; units are filled."""
    if M.size == 0:
        raise ValueError("cannot export an empty monoid")
    generators = list(generators) if generators is not None else cayley_generators(M)
    units = set(M.coprime_indices())
    nodes = [
        {"index": i, "label": element_label(M, i), "unit": i in units, "zero": i == M.zero and M.size > 1}
        for i in range(M.size)
    ]
    edges = []
    for k, g in enumerate(generators):
        for x in range(M.size):
            edges.append({
                "source": x,
                "target": M.mul(g, x),
                "label": element_label(M, g),
                "color": EDGE_COLORS[k % len(EDGE_COLORS)],
            })
    name = f"DR_{M.field.tag}_{'_'.join(str(v) for v in M.level.key)}"
    text = _environment().get_template("cayley.dot.j2").render(
        title=str(M), name=name, nodes=nodes, edges=edges)
    logger.debug("rendered %s with %d generators", name, len(generators))
    return text


# =============================
# Reports
# =============================

def _rows(report: Report) -> List[Dict[str, Any]]:
    rows = []
    for r in report.results:
        d = r.to_dict()
        rows.append({
            "check_id": r.check_id,
            "status": r.status.value,
            "message": r.message,
            "witness": json.dumps(d["witness"], sort_keys=True) if "witness" in d else None,
        })
    return rows


def render_text_report(report: Report) -> str:
    from .. import __version__

    rows = _rows(report)
    deviations = [row for row in rows if row["status"] == Status.DEVIATION.value]
    return _environment().get_template("report.txt.j2").render(
        title=report.title,
        version=__version__,
        rows=rows,
        summary=report.summary(),
        deviations=deviations,
        passed=report.passed,
    )


def report_frame(report: Report) -> pd.DataFrame:
    return pd.DataFrame(_rows(report), columns=["check_id", "status", "message", "witness"])


def render_report(report: Report, fmt: str) -> str:
    """The report as json, csv or text."""
    if fmt == "json":
        return report.to_json() + "\n"
    if fmt == "csv":
        return report_frame(report).to_csv(index=False)
    if fmt == "text":
        return render_text_report(report)
    raise ValueError(f"unsupported report format {fmt!r}")


# =============================
# Tables
# =============================

def ideals_frame(ideals: Sequence[IntegralIdeal]) -> pd.DataFrame:
    rows = [{"norm": a.norm, "a": a.key[0], "c": a.key[1], "d": a.key[2], "ideal": str(a)} for a in ideals]
    return pd.DataFrame(rows, columns=["norm", "a", "c", "d", "ideal"])


def render_frame(df: pd.DataFrame, fmt: str) -> str:
    if fmt == "csv":
        return df.to_csv(index=False)
    if fmt == "json":
        return df.to_json(orient="records", indent=2) + "\n"
    return df.to_string(index=False) + "\n"


def write_artifact(text: str, path: str) -> str:
    """Write text to path (creating the directory) and return the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    logger.info("wrote %s", path)
    return path


__all__ = [
    "cayley_generators",
    "element_label",
    "ideals_frame",
    "render_cayley_dot",
    "render_frame",
    "render_report",
    "render_text_report",
    "report_frame",
    "write_artifact",
]

"""
Test the dr command line: commands, exit codes, configuration and the cache
"""
import json

import pytest

from bost_connes.core.checks import Report, check, info
from bost_connes.core.drmonoid import dr_level
from bost_connes.nfield import make_field, rational_ideal
from bost_connes.reporting.report_builder import render_cayley_dot, render_report
from bost_connes.ui.app import main
from bost_connes.ui.cache import cache_path, load_level, save_level
from bost_connes.ui.config import RunConfig, get_default_config, load_config_file, resolve_config


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# =============================
# Commands
# =============================

def test_field_gaussian(capsys):
    code, out, _ = run(capsys, "field", "-m", "-1")
    assert code == 0
    assert "-4" in out
    assert "Q(sqrt(-1))" in out


def test_ideals_over_q(capsys):
    code, out, _ = run(capsys, "ideals", "-m", "Q", "--bound", "5", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "norm,a,c,d,ideal"
    assert len(lines) == 1 + 5


def test_rayclass_json(capsys):
    code, out, _ = run(capsys, "rayclass", "-m", "Q", "--conductor", "5", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["invariant_factors"] == [4]
    assert payload["order_report"]


def test_dr_build(capsys, tmp_path):
    code, out, _ = run(capsys, "dr", "build", "-m", "Q", "--conductor", "6", "--cache-dir", str(tmp_path))
    assert code == 0
    assert "elements: 6" in out
    assert "units: {1, 5}" in out
    assert "constructions agree: yes" in out


def test_dr_build_reloads_from_cache(capsys, tmp_path):
    args = ("dr", "build", "-m", "-1", "--conductor", "5", "--cache-dir", str(tmp_path))
    assert run(capsys, *args)[0] == 0
    K = make_field(-1)
    assert (tmp_path / cache_path("", K, rational_ideal(K, 5))).exists()
    code, out, _ = run(capsys, *args)
    assert code == 0
    assert "constructions agree: yes" in out


def test_dr_audit_flags_closed_form(capsys):
    code, out, _ = run(capsys, "dr", "audit", "-m", "2", "--conductor", "2")
    assert code == 0
    assert "flagged" in out


def test_verify_selection(capsys):
    code, out, _ = run(capsys, "verify", "-m", "Q", "--max-conductor-norm", "3",
                       "--select", "drmonoid.triple*", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]
    assert all(r["check_id"].startswith("drmonoid.triple") for r in payload["results"])


def test_verify_empty_selection_passes(capsys):
    code, _, _ = run(capsys, "verify", "-m", "Q", "--select", "")
    assert code == 0


def test_bad_field_is_usage_error(capsys):
    code, _, err = run(capsys, "field", "-m", "4")
    assert code == 2
    assert "dr: error" in err


def test_export_dot_to_file(capsys, tmp_path):
    out = tmp_path / "dr.dot"
    code, _, _ = run(capsys, "export", "dot", "-m", "Q", "--conductor", "4", "--out", str(out))
    assert code == 0
    assert out.read_text().lstrip().startswith("// Cayley graph")


def test_export_zeta_csv(capsys):
    code, out, _ = run(capsys, "export", "zeta-csv", "-m", "Q", "--beta", "2")
    assert code == 0
    assert out.startswith("bound,")


# =============================
# Configuration
# =============================

def test_run_config_defaults():
    """List defaults are fresh per instance and match get_default_config"""
    a, b = RunConfig(), RunConfig()
    assert a.field == "Q"
    assert (a.betas, a.extensions, a.select) == (["2"], [-1], ["*"])
    a.betas.append("3")
    assert b.betas == ["2"]
    assert RunConfig.from_dict(get_default_config()) == b


def test_suite_runs_with_coverage_and_timeout(pytestconfig):
    assert pytestconfig.getoption("cov_source") == ["bost_connes"]
    assert float(pytestconfig.getini("timeout")) > 0


def test_config_precedence(tmp_path):
    path = tmp_path / "dr.cfg"
    path.write_text("# grid\nfield = -5\nbound = 20\nbetas = 2, 3/2\nstrict = yes\n")
    assert load_config_file(str(path))["betas"] == ["2", "3/2"]
    cfg = resolve_config({"bound": 7, "seed": None}, str(path))
    assert cfg.field == "-5"
    assert cfg.bound == 7
    assert cfg.strict is True
    assert cfg.seed == 0


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "dr.cfg"
    path.write_text("colour = blue\n")
    with pytest.raises(ValueError):
        load_config_file(str(path))
    with pytest.raises(ValueError):
        RunConfig.from_dict({"colour": "blue"})


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        RunConfig(bound=0)
    with pytest.raises(ValueError):
        RunConfig(format="xml")


# =============================
# Cache and artifacts
# =============================

def test_cache_round_trip(tmp_path):
    K = make_field(-5)
    M = dr_level(K, rational_ideal(K, 3))
    save_level(str(tmp_path), M)
    M2, report = load_level(str(tmp_path), K, M.level)
    assert report.passed
    assert M2.size == M.size
    assert load_level(str(tmp_path), K, rational_ideal(K, 2)) is None


def test_cayley_dot_marks_units():
    K = make_field(None)
    text = render_cayley_dot(dr_level(K, rational_ideal(K, 5)))
    assert text.count("doublecircle") == 4
    assert "->" in text


def test_render_report_formats():
    report = Report("demo")
    report.add(check("demo.ok", True, "fine"))
    report.add(info("demo.note", "numbers", value=3))
    assert json.loads(render_report(report, "json"))["title"] == "demo"
    assert render_report(report, "csv").splitlines()[0] == "check_id,status,message,witness"
    text = render_report(report, "text")
    assert "result: PASS" in text
    with pytest.raises(ValueError):
        render_report(report, "dot")

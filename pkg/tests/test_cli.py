import subprocess
import sys

import pytest

from motext.resolve import ExtChart, Resolution
from motext.trigrade import TriDegree
from motext.verify.cli import main, parse_class, threads
from motext.verify.emit import read_svg_graph


@pytest.fixture(scope="module")
def saved_a(tmp_path_factory):
    out = tmp_path_factory.mktemp("res") / "a16"
    assert main(["resolve", "--algebra", "A", "--tmax", "16", "--fmax", "8", "--out", str(out)]) == 0
    return out


def test_resolve_writes_loadable_resolution(saved_a):
    chart = ExtChart(Resolution.load(str(saved_a)))
    assert chart.dim(TriDegree(1, 1, 1)) == 1


def test_chart_tsv_and_svg(saved_a, tmp_path, capsys):
    tsv = tmp_path / "ext.tsv"
    assert main(["chart", "--in", str(saved_a), "--emit", "tsv", "--out", str(tsv)]) == 0
    rows = tsv.read_text().splitlines()
    assert rows[0].startswith("s\tf\tw\tdim")
    chart = ExtChart(Resolution.load(str(saved_a)))
    assert len(rows) - 1 == len(list(chart.nonzero_cells()))
    svg = tmp_path / "f0.svg"
    assert main(["chart", "--in", str(saved_a), "--emit", "svg", "--what", "F0",
                 "--window=-2,10,-1,6", "--out", str(svg)]) == 0
    g = read_svg_graph(svg)
    assert (1, 1) in g["dots"]
    assert ((-1, 0), (-1, -1), "h0") in g["arrows"]


def test_massey_cli(saved_a, capsys):
    assert main(["massey", "--in", str(saved_a), "--a", "h0", "--b", "h1", "--x", "h0"]) == 0
    out = capsys.readouterr().out
    assert "at (2,2,1)" in out and "indeterminacy: zero" in out


def test_periodicity_cli(saved_a, capsys):
    assert main(["massey", "--in", str(saved_a), "--P", "2", "--x", "h1"]) == 0
    out = capsys.readouterr().out
    assert "P_2(h1) at (9,5,5)" in out and "indeterminacy: zero" in out


def test_massey_precondition_error(saved_a, capsys):
    assert main(["massey", "--in", str(saved_a), "--P", "2", "--x", "h0"]) == 2
    assert "nonzero" in capsys.readouterr().err


def test_parse_class(saved_a):
    chart = ExtChart(Resolution.load(str(saved_a)))
    assert parse_class(chart, "h1^2").degree == TriDegree(2, 2, 2)
    assert parse_class(chart, "Ph1").degree == TriDegree(9, 5, 5)
    assert parse_class(chart, "(1,1,1):0").vector == 1
    with pytest.raises(ValueError):
        parse_class(chart, "(1,1,1):3")


def test_verify_planes_exit_code(capsys):
    assert main(["verify", "--check", "planes"]) == 0
    assert capsys.readouterr().out.startswith("PASS planes")


def test_verify_unknown_check_fails(capsys):
    assert main(["verify", "--check", "nonsense"]) == 1
    assert "FAIL nonsense" in capsys.readouterr().out


def test_verify_small_window_refused(capsys):
    assert main(["verify", "--check", "massey-uniqueness:2", "--tmax", "8", "--fmax", "4"]) == 1
    assert "need t_max" in capsys.readouterr().out


def test_verify_massey_uniqueness_r2(capsys):
    assert main(["verify", "--check", "massey-uniqueness:2", "--tmax", "24", "--fmax", "12"]) == 0


def test_module_file(tmp_path, capsys):
    f = tmp_path / "ceta.txt"
    f.write_text("gen x0 0 0\ngen x2 2 1\ncoact x2 0 1 x2\ncoact x2 0 xi1 x0\n")
    out = tmp_path / "ceta"
    assert main(["resolve", "--algebra", "A", "--module", str(f), "--tmax", "10", "--fmax", "5",
                 "--out", str(out)]) == 0
    chart = ExtChart(Resolution.load(str(out)))
    # the h0 tower on the top cell starts at (2,1,1)
    assert chart.dim(TriDegree(2, 1, 1)) == 1


def test_threads_env(monkeypatch):
    monkeypatch.setenv("MOTEXT_THREADS", "3")
    assert threads() == 3
    monkeypatch.setenv("MOTEXT_THREADS", "0")
    assert threads() >= 1
    monkeypatch.setenv("MOTEXT_THREADS", "-1")
    with pytest.raises(ValueError):
        threads()


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "motext.verify.cli", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "verify" in r.stdout

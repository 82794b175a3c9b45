import json
import shutil
import subprocess

import pytest

from thetax.cli import run


def out(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr()


def test_cmp(capsys):
    code, cap = out(capsys, "cmp", "--wo", "finite:2", "th(0)", "Om")
    assert code == 0 and cap.out == "<\n"
    assert out(capsys, "cmp", "E(1)", "E(0)")[1].out == ">\n"
    assert out(capsys, "cmp", "w(w(0)) + 1", "w(w(0)) + 1")[1].out == "=\n"
    # stored sums must be non-increasing; no silent absorption
    assert out(capsys, "cmp", "1 + w(w(0))", "w(w(0))")[0] == 2


def test_cmp_carrier_error(capsys):
    code, cap = out(capsys, "cmp", "--wo", "finite:2", "E(5)", "0")
    assert code == 2 and "carrier" in cap.err


def test_cmp_parse_error(capsys):
    assert out(capsys, "cmp", "th(", "0")[0] == 2


def test_usage_error(capsys):
    assert out(capsys, "frobnicate")[0] == 2


def test_normalize(capsys):
    assert out(capsys, "normalize", "w(Om) + w(Om)")[1].out == "Om + Om\n"


def test_enumerate_count(capsys):
    code, cap = out(capsys, "enumerate", "--wo", "finite:2", "--g", "2", "--size", "4",
                    "--e-prefix", "2", "--count")
    assert code == 0 and cap.out == "58\n"


def test_ff(capsys):
    assert out(capsys, "ff", "--fn", "Om + id", "--at", "th(0)")[1].out == "Om + th(0)\n"
    assert out(capsys, "ff", "--fn", "1 + w^(id)", "--at", "0")[0] == 2


def test_bounds(capsys):
    assert out(capsys, "bounds", "final", "0", "1", "2")[1].out == "th(w(E(0) + 2))\n"
    assert out(capsys, "bounds", "cutred", "E(0)")[1].out == "E(0)\n"
    assert out(capsys, "bounds", "add", "2", "Om")[0] == 2


def test_bounds_check_fixture(capsys):
    from importlib import resources
    path = str(resources.files("thetax") / "data" / "steps.json")
    code, cap = out(capsys, "bounds", "--wo", "finite:3", "check", "--step", path)
    assert code == 0
    assert cap.out.count("rejected") == 6


def test_search_and_kb(capsys, tmp_path):
    tree, model, kb = tmp_path / "tree.json", tmp_path / "model.json", tmp_path / "kb.txt"
    code, cap = out(capsys, "search", "--q", "evens<=6", "--depth", "14", "--omega-bound", "2",
                    "--emit", str(tree), "--emit", str(model), "--emit", str(kb))
    assert code == 0 and "replay clean" in cap.out
    assert json.loads(model.read_text())["0"] == [0, 2, 4, 6]
    code, cap = out(capsys, "kb-order", "--tree", str(tree))
    assert code == 0 and cap.out == kb.read_text()
    assert cap.out.endswith("root\n")


def test_search_cap(capsys):
    code, cap = out(capsys, "search", "--q", "{}", "--depth", "30", "--node-cap", "10")
    assert code == 3 and "cap" in cap.err


def test_selftest(capsys):
    code, cap = out(capsys, "selftest", "--wo", "finite:2", "--g", "2", "--size", "4")
    assert code == 0
    assert "FAIL" not in cap.out
    assert len(cap.out.splitlines()) >= 10


@pytest.mark.skipif(shutil.which("thetax") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["thetax", "cmp", "0", "Om"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "<\n"

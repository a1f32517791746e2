import io
import json
import os

import pytest

from lccdtt.cli import main

HERE = os.path.dirname(__file__)
SAMPLES = os.path.join(HERE, "..", "samples")


def run(*argv):
    out = io.StringIO()
    return main(list(argv), out), out.getvalue()


def sample(name):
    return os.path.join(SAMPLES, name)


def test_check_unit():
    code, out = run("check", sample("unit.tt"))
    assert code == 0 and "0 failed" in out


def test_fibrancy_chain2():
    code, out = run("fibrancy", sample("chain2.json"))
    assert code == 0 and "fibrant" in out


def test_fibrancy_negative():
    code, out = run("fibrancy", sample("noncommuting.json"))
    assert code == 1 and "does not commute" in out


def test_eq_beta_trace():
    code, out = run("eq", sample("beta.tt"), "--trace")
    assert code == 0 and "~>" in out


def test_norm_target():
    code, out = run("norm", sample("beta.tt"), "--target", "norms")
    assert code == 0 and "(f . a)" in out


def test_unknown_exit_code(tmp_path):
    p = tmp_path / "u.tt"
    p.write_text("sketch { obj A; } context G { x : A; y : A; } "
                 "judgment { eq x y : A; }")
    assert run("eq", str(p))[0] == 2


def test_failure_exit_code(tmp_path):
    p = tmp_path / "f.tt"
    p.write_text("context G { x : Unit; } judgment { check y : Unit; }")
    code, out = run("check", str(p))
    assert code == 1 and "ScopeError" in out


def test_usage_errors():
    assert run()[0] == 64
    assert run("frobnicate")[0] == 64
    assert run("norm", sample("beta.tt"))[0] == 64
    assert run("check", "no/such/file.tt")[0] == 64
    assert run("model-check", sample("reflect.tt"), "--model", "nope")[0] == 64


def test_model_check_and_exports():
    assert run("model-check", sample("reflect.tt"), "--model", "diamond")[0] == 0
    code, out = run("export-json", sample("beta.tt"))
    doc = json.loads(out)
    assert code == 0 and "G" in doc["contexts"]
    code, out = run("export-dot", sample("chain2.json"))
    assert code == 0 and out.startswith("digraph")


@pytest.mark.parametrize("seed", [0, 5])
def test_suite_seed_reproducible(seed):
    a = run("suite", "cwf", "-n", "30", "--seed", str(seed))
    b = run("suite", "cwf", "-n", "30", "--seed", str(seed))
    assert a[0] == 0 and a[1].split(";")[0] == b[1].split(";")[0]

import io
import json

import pytest

from lyucalc import cli
from lyucalc.errors import ParseError, PipelineAssertion

SKEW_FILE = """# two skew lines
label=skew lines
p=2
vars=x0,x1,x2,x3
gens=x0*x2, x0*x3
gens=x1*x2, x1*x3
"""


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def skew(tmp_path):
    f = tmp_path / "skew.txt"
    f.write_text(SKEW_FILE)
    return f


def test_parse_problem():
    spec = cli.parse_problem(SKEW_FILE)
    assert spec.p == 2 and spec.label == "skew lines"
    assert len(spec.polys) == 4
    assert cli.parse_problem("p=3\nvars=x,y\ngens=\n").polys == []
    with pytest.raises(ParseError):
        cli.parse_problem("p=4\nvars=x\n")


def test_table_json_round_trip(skew):
    code, out, _ = run(["table", str(skew)])
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "lyucalc.table/1"
    assert rep["entries"] == [[0, 1, 1], [2, 2, 2]]
    assert rep["dimA"] == 2 and rep["minimize"] is True
    assert rep["input"]["label"] == "skew lines"
    again = json.loads(run(["table", str(skew)])[1])
    assert cli.strip_timing(again) == cli.strip_timing(rep)


def test_cell_and_csv(skew):
    rep = json.loads(run(["table", str(skew), "--cell", "1", "1"])[1])
    assert rep["entries"] == [[1, 1, 0]] and rep["cells_computed"] == [[1, 1]]
    code, out, _ = run(["table", str(skew), "--format", "csv"])
    assert out.splitlines() == ["i,j,lambda", "0,1,1", "2,2,2"]


def test_cache_warm_equals_cold(skew, tmp_path):
    cache = tmp_path / "cache"
    from lyucalc.extcalc import clear_data_cache
    clear_data_cache()
    cold = json.loads(run(["table", str(skew), "--cache-dir", str(cache)])[1])
    clear_data_cache()
    warm = json.loads(run(["table", str(skew), "--cache-dir", str(cache)])[1])
    assert cold["cache_hits"] == 0 and warm["cache_hits"] == 1
    assert cli.strip_timing(cold) == cli.strip_timing(warm)


def test_no_minimize_same_table(skew):
    a = json.loads(run(["table", str(skew)])[1])
    b = json.loads(run(["table", str(skew), "--no-minimize"])[1])
    assert a["entries"] == b["entries"] and b["minimize"] is False


def test_parse_error_exit_code(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("p=2\nvars=x,y\ngens=x*y + $\n")
    code, _, err = run(["table", str(f)])
    assert code == 2
    assert "line 3" in err and "column" in err
    assert run(["table", str(tmp_path / "missing.txt")])[0] == 2


def test_inhomogeneous_exit_code(tmp_path):
    f = tmp_path / "inh.txt"
    f.write_text("p=2\nvars=x,y\ngens=x + y^2\n")
    assert run(["table", str(f)])[0] == 3


def test_internal_error_writes_bundle(skew, tmp_path, monkeypatch):
    import lyucalc.lyutable as lt

    def boom(*a, **k):
        raise PipelineAssertion("synthetic failure")

    monkeypatch.setattr(lt, "lyubeznik_table", boom)
    code, _, err = run(["table", str(skew), "--bundle-dir", str(tmp_path / "b")])
    assert code == 4
    bundles = list((tmp_path / "b").glob("lyucalc-repro-*"))
    assert len(bundles) == 1
    assert {p.name for p in bundles[0].iterdir()} == {"input.txt", "traceback.txt", "flags.json",
                                                      "version.txt"}
    assert str(bundles[0]) in err


def test_ext_dims(tmp_path):
    f = tmp_path / "p1.txt"
    f.write_text("p=3\nvars=x0,x1\ngens=\n")
    rep = json.loads(run(["ext-dims", str(f), "--i", "2", "--j", "2", "--degrees=-1..1"])[1])
    assert rep["schema"] == "lyucalc.ext_dims/1"
    assert rep["dims"] == [[-1, 0], [0, 1], [1, 2]]
    code, out, _ = run(["ext-dims", str(f), "--i", "2", "--j", "2", "--degrees=0..1", "--format", "text"])
    assert out == "0\t1\n1\t2\n"


def test_verify_embedding(tmp_path):
    f = tmp_path / "p1.txt"
    f.write_text("p=2\nvars=x0,x1\ngens=\n")
    code, out, _ = run(["verify-embedding", str(f), "--veronese", "3"])
    assert code == 0 and "tables equal" in out


def test_check_command(skew):
    code, out, _ = run(["check", str(skew), "--trials", "5"])
    assert code == 0
    rep = json.loads(out)
    assert all(c["p_linearity_failures"] == 0 and c["degree_scaling"] for c in rep["cells"])

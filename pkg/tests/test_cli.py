import io
import json
import subprocess
import sys

import numpy as np
import pytest

from colormodels.cli import run
from colormodels.graph_core import cycle_graph, fragment_to_json, graph_to_json, star_fragment
from colormodels.models import (
    edge_model_from_json,
    proper_coloring_model,
    vertex_model_from_json,
    vertex_model_to_json,
)


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text else None), text


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return write


def test_erp_check_files(files):
    k2 = files("k2.json", vertex_model_to_json(proper_coloring_model(2)))
    code, out, _ = call("erp-check", "--model", k2)
    assert code == 0 and out["status"] == "ERP"
    ind = files("ind.json", {"a": [[1, 0], [1, 0]], "B": [[[1, 0], [1, 0]], [[1, 0], [0, 0]]]})
    code, out, _ = call("erp-check", "--model", ind)
    assert code == 0 and out["status"] == "NOT_ERP"


def test_eval_chromatic_c4(files):
    m = files("m.json", vertex_model_to_json(proper_coloring_model(3)))
    g = files("c4.json", graph_to_json(cycle_graph(4)))
    code, out, _ = call("eval", "--vertex-model", m, "--graph", g)
    assert code == 0 and out == {"value": [18.0, 0.0]}


def test_eval_edge_model_and_circles():
    code, out, _ = call("eval", "--edge-model", "builtin:proper-2", "--graph", "builtin:cycle-4")
    assert code == 0 and out["value"][0] == pytest.approx(2)


def test_transform_and_twin_reduce_round_trip(files):
    code, out, _ = call("transform", "--model", "builtin:proper-2", "--degree", "2")
    assert code == 0
    h = edge_model_from_json(out["edge_model"])
    t = edge_model_from_json(out["table"])
    assert h.k == 2 and t.coeff((1, 0)) == pytest.approx(np.sqrt(2))
    m = files("tw.json", {"a": [1, 2, 3], "B": [[1, 1, 0], [1, 1, 0], [0, 0, 2]]})
    code, out, _ = call("twin-reduce", "--model", m)
    assert code == 0 and out["n_after"] == 2
    r = vertex_model_from_json(out["model"])
    assert np.allclose(sorted(r.a.real), [3, 3])


def test_connection_matrix_and_witness(files):
    frags = files("fr.json", [fragment_to_json(star_fragment(2))])
    code, out, _ = call("connection-matrix", "--model", "builtin:proper-3", "--l", "2", "--fragments", frags)
    assert code == 0 and out["M"] == [[[6.0, 0.0]]] and out["psd"] is True
    assert set(out) >= {"l", "fragments", "M", "psd", "min_eigenvalue", "witness"}
    code, out, _ = call("witness", "--model", "builtin:antiferro", "--l", "3")
    assert code == 0 and out["value"] == pytest.approx(-2) and out["psd"] is False
    code, out, _ = call("witness", "--model", "builtin:proper-3", "--l", "3")
    assert code == 0 and out["witness"] is None


def test_kempf_ness_search_reproducible():
    argv = ["kempf-ness-search", "--model", "builtin:proper-2", "--seed", "5", "--iters", "20"]
    a = call(*argv)
    b = call(*argv)
    assert a[0] == 0 and a[2] == b[2]
    assert a[1]["found"] is True and set(a[1]) == {"found", "g", "f_history"}


def test_erp_check_complex_needs_seed(files):
    m = files("c.json", {"a": [[1, 0], [0, 1]], "B": [[[2, 0], [1, 0]], [[1, 0], [3, 0]]]})
    code, _, _ = call("erp-check", "--model", m)
    assert code == 1
    argv = ["erp-check", "--model", m, "--seed", "1", "--budget", "40"]
    a, b = call(*argv), call(*argv)
    assert a[0] == 0 and a[1]["status"] == "UNKNOWN" and a[2] == b[2]


def test_input_errors(files, tmp_path):
    assert call("eval", "--graph", str(tmp_path / "missing.json"), "--model", "builtin:proper-2")[0] == 1
    assert call("eval", "--model", "builtin:proper-2")[0] == 1
    assert call("erp-check", "--model", "builtin:proper-2", "--bogus")[0] == 1
    assert call("bogus")[0] == 1
    assert call()[0] == 1
    bad = files("bad.json", {"a": [1, 0], "B": [[1, 0], [0, 1]]})
    assert call("erp-check", "--model", bad)[0] == 1
    asym = files("asym.json", {"vertices": 1, "edges": [[0, 3]]})
    assert call("eval", "--model", "builtin:proper-2", "--graph", asym)[0] == 1


def test_console_script_logs_to_stderr():
    proc = subprocess.run(
        [sys.executable, "-m", "colormodels.cli", "erp-check", "--model", "builtin:proper-3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "NOT_ERP"


def test_selftest_reports_each_criterion(monkeypatch):
    import colormodels.acceptance as acc

    monkeypatch.setattr(acc, "CRITERIA", [c for c in acc.CRITERIA if c[0] in (2, 3, 4)])
    code, out, _ = call("selftest")
    assert code == 0 and out["passed"] is True
    assert [c["id"] for c in out["criteria"]] == [2, 3, 4]

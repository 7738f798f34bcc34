import json
import math

import numpy as np
import pytest

from isosing.cli import load_tabulated_map, main, number, number_list


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_number_expressions():
    assert number("exp(-2)") == pytest.approx(math.exp(-2))
    assert number("1/e") == pytest.approx(1 / math.e)
    assert number("0.2*e") == pytest.approx(0.2 * math.e)
    assert number_list("1, 2/4, pi") == pytest.approx([1, 0.5, math.pi])
    assert number("2 ** 3") == 8.0
    for bad in ("__import__('os')", "x + 1", "[1]", "open"):
        with pytest.raises(Exception):
            number(bad)


def test_dilatation_point(capsys):
    code, rep = run(["dilatation", "--map", "ring", "--alpha", "0.5", "--x", "0.25,0"], capsys)
    assert code == 0
    assert rep["results"]["pointwise"]["singular_values"] == [6.0, 1.0]
    assert rep["results"]["pointwise"]["K_I"] == 6.0


# (argv, exit code)
MATRIX = [
    (["classify", "--map", "ring", "--alpha", "0.5", "--expect", "essential"], 0),
    (["classify", "--map", "inversion", "--n", "3", "--expect", "pole"], 0),
    (["classify", "--map", "identity", "--expect", "pole"], 1),
    (["classify", "--map", "inversion", "--post-invert", "--expect", "removable"], 0),
    (["modulus", "--a", "1", "--b-outer", "e"], 0),
    (["modulus", "--descriptor", "cap", "--y0", "0,0", "--r", "0.1", "--L", "0.1*e"], 0),
    (["fmo", "--Q", "log", "--expect", "fmo"], 0),
    (["fmo", "--Q", "inv", "--expect", "fmo"], 1),
    (["integrals", "--Q", "const", "--eps0", "exp(-1)", "--eps", "exp(-2)", "--A", "2*pi"], 0),
    # LHS = pi exceeds pi log 2
    (["integrals", "--Q", "const", "--eps0", "exp(-1)", "--eps", "exp(-2)", "--A", "pi"], 1),
    (["dilatation", "--map", "ring", "--alpha", "0.5", "--q", "1", "--r-inner", "1e-3", "--r-outer", "0.5",
      "--expect", "converged"], 0),
    (["dilatation", "--map", "ring", "--alpha", "2", "--q", "1", "--r-inner", "1e-8", "--r-outer", "0.5"], 3),
    (["dilatation", "--map", "ring", "--x", "0.1,0"], 2),
    (["lemma1", "--k0", "1", "--A", "1", "--p", "1", "--loglog", "2,4,8"], 0),
    (["growth", "--map", "log_decay", "--beta", "1", "--kind", "prop3", "--A", "1", "--eps0", "0.3",
      "--f-b", "0,0", "--radii", "1e-2,1e-4,1e-8,1e-16"], 1),
    (["growth", "--map", "ring", "--alpha", "0.5", "--kind", "log_power", "--C", "2"], 0),
    (["poletskii", "--map", "linear", "--diag", "2,1", "--a", "1", "--b-outer", "e"], 0),
    (["nosuchcommand"], 2),
    (["run", "--config", "/nonexistent/config.json"], 2),
]


@pytest.mark.parametrize("argv,code", MATRIX, ids=[" ".join(m[0][:3]) for m in MATRIX])
def test_exit_code_matrix(argv, code, capsys):
    assert main(argv) == code
    capsys.readouterr()


def test_reports_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["classify", "--map", "folding", "--n", "2", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_timing_is_opt_in(tmp_path):
    path = tmp_path / "r.json"
    main(["lemma1", "--loglog", "2,3", "--out", str(path)])
    assert "timing" not in json.loads(path.read_text())
    main(["lemma1", "--loglog", "2,3", "--timing", "--out", str(path)])
    assert json.loads(path.read_text())["timing"]["seconds"] >= 0


def test_config_document_and_plot_data(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "classify", "map": "ring", "alpha": 0.5, "n": 2, "expect": "essential"}))
    out, plot = tmp_path / "o.json", tmp_path / "p.tsv"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--plot-data", str(plot)]) == 0
    rep = json.loads(out.read_text())
    assert rep["command"] == "classify" and rep["results"]["verdict"] == "essential"
    lines = plot.read_text().splitlines()
    assert lines[0].split("\t")[0] == "radius" and len(lines) == 13


def test_bad_config_documents(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"command": "explode"}))
    assert main(["run", "--config", str(bad)]) == 2


def test_thread_override(monkeypatch, capsys):
    monkeypatch.setenv("ISOSING_THREADS", "0")
    assert main(["fmo", "--Q", "const"]) == 2
    monkeypatch.setenv("ISOSING_THREADS", "2")
    code, rep = run(["fmo", "--Q", "const", "--levels", "6"], capsys)
    assert code == 0 and rep["results"]["verdict"] == "fmo"


def test_tabulated_map_round_trip(tmp_path, capsys):
    xs = np.linspace(-1, 1, 21)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    rows = ["x1,x2,f1,f2"] + [f"{x},{y},{2 * x},{y}" for x, y in zip(X.ravel(), Y.ravel())]
    path = tmp_path / "t.csv"
    path.write_text("\n".join(rows) + "\n")
    f = load_tabulated_map(str(path))
    assert np.allclose(f([[0.33, -0.41]]), [[0.66, -0.41]])
    code, rep = run(["dilatation", "--map", "tabulated", "--table", str(path), "--x", "0.3,0.2"], capsys)
    assert code == 0 and rep["results"]["pointwise"]["K_I"] == pytest.approx(2.0, rel=1e-6)

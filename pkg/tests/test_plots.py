import numpy as np

import delta
import plots_utils
import pseudospectrum
import res2tex
from results import GridResult, read_results, write_results

TABLE_COLUMNS = ("kappa", "L", "re1", "im1", "re3", "im3", "re5", "im5", "spurious3", "error")


def table_file(tmp_path):
    rows = [
        (0.0, 8.0, 0.5094, -0.8823, 1.1691, -5.9752, 1.6233, -2.8122, "yes", ""),
        (0.0, np.inf, 0.5094, -0.8823, np.nan, np.nan, 1.6241, -2.8130, "", ""),
        (1.0, 4.0, np.nan, np.nan, np.nan, np.nan, np.nan, np.nan, "", "EigensolverFailure"),
    ]
    path = str(tmp_path / "table1.json")
    write_results(path, "json", TABLE_COLUMNS, rows, {"trunc": 100})
    return path


def test_format_complex():
    assert res2tex.format_complex(0.5094, -0.8823) == "0.5094 - 0.8823i"
    assert res2tex.format_complex(float("nan"), 1.0) == ""


def test_table(tmp_path):
    lines = res2tex.gen_table(table_file(tmp_path))
    body = "\n".join(lines)
    assert lines[0].startswith(r"\begin{tabular}")
    assert r"\cellcolor{lightgray}1.1691 - 5.9752i" in body
    assert r"\(\infty\) & 0.5094 - 0.8823i &  & 1.6241 - 2.8130i" in body
    assert "Err." in body
    # one rule between the kappa blocks
    assert body.count(r"\midrule") == 2


def test_standalone_table(tmp_path):
    lines = res2tex.add_standalone(table_file(tmp_path), None)
    assert lines[0] == r"\documentclass{standalone}"
    assert lines[-1] == r"\end{document}"


def test_load_rows_csv(tmp_path):
    path = str(tmp_path / "galerkin.csv")
    write_results(path, "csv", ("n", "re", "im"), [(1, 0.5, -0.25)], {})
    assert plots_utils.load_rows(path) == [{"n": 1.0, "re": 0.5, "im": -0.25}]


def test_load_rows_json(tmp_path):
    path = str(tmp_path / "galerkin.json")
    write_results(path, "json", ("n", "re", "im"), [(1, 0.5, -0.25)], {})
    _, columns, rows = read_results(path)
    assert plots_utils.load_rows(path) == [dict(zip(columns, row)) for row in rows]
    assert plots_utils.load_rows(path)[0]["re"] == 0.5


def test_pseudospectrum_plot(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    values = np.full((2, 3), 1e-3)
    grid = GridResult(np.array([0.0, 1.0, 2.0]), np.array([-1.0, 1.0]), values)
    write_results("grid.csv", "csv", GridResult.columns, grid.to_rows(), {})
    write_results("eig.csv", "csv", ("n", "re", "im"), [(1, 0.5, -0.9)], {})
    txt = pseudospectrum.main("grid.csv", "eig.csv")
    assert "mesh/cols=3" in txt
    assert "(0.0, -1.0, -3.0)" in txt
    assert "(0.5, -0.9, 0)" in txt
    assert (tmp_path / "pseudospectrum.tex").exists()

    rows = plots_utils.load_rows("grid.csv")
    rows[0]["value"] = 0.0
    assert "-16.0" in pseudospectrum.generate_plot(rows)[2]


def test_delta_plot(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    write_results("delta_k1.json", "json", ("n", "delta"), [(1, 0.5), (2, 0.6)], {})
    txt = delta.main(["delta_k1.json"], standalone=True)
    assert r"\documentclass{standalone}" in txt
    assert "(1, 0.5) (2, 0.6)" in txt
    assert r"\addlegendentry{delta\_k1.json}" in txt

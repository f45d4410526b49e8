import json

import pytest

from plagrange.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_transducer_json(capsys):
    code, out, _ = run(capsys, "transducer", "13", "fast", "json")
    assert code == 0
    assert len(json.loads(out)["nodes"]) == 13


def test_transducer_dot(capsys, tmp_path):
    code, out, _ = run(capsys, "transducer", "2", "slow", "dot")
    assert code == 0 and out.count('label="[[') == 4
    path = tmp_path / "t.dot"
    assert main(["transducer", "2", "slow", "dot", "-o", str(path)]) == 0
    assert path.read_text() == out


def test_transducer_usage(capsys):
    code, _, err = run(capsys, "transducer", "1", "fast")
    assert code == 2 and "usage" in err


def test_minlp(capsys):
    code, out, _ = run(capsys, "minlp", "3")
    data = json.loads(out)
    assert code == 0
    assert data["alpha"] == {"num_under_root": 12, "denom": 1}
    assert data["witnesses"][0]["symmetry"] == "S"


def test_minlp_not_prime(capsys):
    code, _, err = run(capsys, "minlp", "4")
    assert code == 2 and "not prime" in err


def test_minlp_checkpoint_resume(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("LAGRANGE_CHECKPOINT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "minlp", "67", "--max-k", "8")
    assert code == 4
    ck = json.loads(out)["checkpoint"]
    assert ck.startswith(str(tmp_path))
    code, resumed, _ = run(capsys, "minlp", "67", "--resume")
    assert code == 0
    code, direct, _ = run(capsys, "minlp", "67")
    assert resumed == direct


def test_minlp_corrupt_checkpoint(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    code, _, err = run(capsys, "minlp", "13", "--resume", str(bad))
    assert code == 2 and "corrupt" in err


def test_minlp_threads_identical(capsys):
    _, one, _ = run(capsys, "minlp", "67", "--threads", "1")
    _, eight, _ = run(capsys, "minlp", "67", "--threads", "8")
    assert one == eight


def test_verify_table(capsys, tmp_path):
    plot = tmp_path / "plot.txt"
    code, out, _ = run(capsys, "verify-table", "3", "67", "163", "227", "13", "--plot-data", str(plot))
    assert code == 0
    assert out.count("PASS") == 5 and "5/5" in out
    lines = plot.read_text().splitlines()[1:]
    assert lines[0] == "3, 3.46410161513775, S"
    assert lines[-1].startswith("13, ") and lines[-1].endswith(", M")


def test_verify_table_tampered(capsys, tmp_path):
    from importlib import resources

    text = resources.files("plagrange").joinpath("data/table1.csv").read_text()
    bad = tmp_path / "table.csv"
    bad.write_text(text.replace("67,sqrt(7157)/23", "67,sqrt(7159)/23"))
    code, out, _ = run(capsys, "verify-table", "67", "--table-file", str(bad))
    assert code == 3 and "FAIL p=67" in out


def test_markoff(capsys):
    code, out, _ = run(capsys, "markoff", "5")
    data = json.loads(out)
    assert code == 0 and data["points"]["sqrt(5)"] is True
    code, out, _ = run(capsys, "markoff", "--enumerate", "34")
    assert [d["triple"] for d in json.loads(out)] == [[1, 1, 1], [1, 1, 2], [1, 2, 5], [1, 5, 13], [2, 5, 29], [1, 13, 34]]
    code, out, _ = run(capsys, "markoff", "--uniqueness", "100000")
    assert code == 0 and json.loads(out)["collisions"] == []


@pytest.mark.parametrize("period, value", [("2211", "sqrt(221)/5"), ("1", "sqrt(5)"), ("33211112", "sqrt(7157)/23")])
def test_quality(capsys, period, value):
    code, out, _ = run(capsys, "quality", period)
    data = json.loads(out)
    assert code == 0 and data["lambda"] == value
    assert len(data["cuts"]) == len(period)


def test_quality_bad_input(capsys):
    code, _, _ = run(capsys, "quality", "2x")
    assert code == 2


def test_unknown_command(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2

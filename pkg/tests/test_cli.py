import csv

import pytest

from ldpcount.cli import main
from ldpcount.graph import gen_erdos_renyi
from ldpcount.oracle import path_count_oriented


def _out(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr()


def test_exact(capsys):
    code, io = _out(capsys, ["exact", "--graph", "er:20:0.3", "--seed", "1",
                             "--pattern", "path:3", "--distinct"])
    assert code == 0
    assert int(io.out) == path_count_oriented(gen_erdos_renyi(20, 0.3, 1), 3) // 2


def test_exact_walk_by_k(capsys):
    code, io = _out(capsys, ["exact", "--graph", "er:10:0.5", "--k", "2", "--walk"])
    assert code == 0 and int(io.out) > 0


def test_run_prints_summary(capsys):
    argv = ["run", "--mech", "walk-opt", "--graph", "er:50:0.1", "--k", "4", "--eps", "1",
            "--trials", "10", "--unoriented", "--seed", "2"]
    code, io = _out(capsys, argv)
    assert code == 0
    fields = dict(line.split("\t", 1) for line in io.out.splitlines())
    assert fields["rounds"] == "3"
    assert "rel_err_pct" in fields and "comm_MB" in fields
    # seed determines everything
    assert _out(capsys, argv)[1].out == io.out


def test_run_star_one_round(capsys):
    code, io = _out(capsys, ["run", "--mech", "star", "--k", "3", "--graph", "er:100:0.1",
                             "--trials", "2"])
    fields = dict(line.split("\t", 1) for line in io.out.splitlines())
    assert code == 0 and fields["rounds"] == "1"
    assert float(fields["comm_MB"]) == 100 * 8 / 1e6


def test_run_fixed_marks_and_transcript(tmp_path, capsys):
    marks = tmp_path / "marks.txt"
    marks.write_text("\n".join(str(i % 4) for i in range(30)))
    dump = tmp_path / "t.txt"
    code, io = _out(capsys, ["run", "--mech", "path", "--k", "3", "--graph", "er:30:0.2",
                             "--noiseless", "--trials", "1", "--fixed-marks", str(marks),
                             "--dump-transcript", str(dump)])
    assert code == 0
    assert dump.read_text().startswith("mark\t0\t0")


def test_transcript_command(capsys):
    code, io = _out(capsys, ["transcript", "--mech", "pattern", "--pattern", "star:3",
                             "--graph", "er:20:0.3"])
    assert code == 0 and io.out.startswith("mark\t")


def test_compare_trees_command(capsys):
    code, io = _out(capsys, ["compare-trees", "--graph", "er:100:0.08", "--pattern", "path:4",
                             "--roots", "0", "2", "--trials", "3"])
    lines = io.out.splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[1].split("\t")[:2] == ["0", "5"] and lines[2].split("\t")[:2] == ["2", "4"]


def test_bench(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text("dataset = er:40:0.1\ntrials = 2\nquery = star star:2\n")
    out = tmp_path / "r.csv"
    assert main(["bench", str(plan), "--output", str(out)]) == 0
    assert len(list(csv.reader(out.open()))) == 2
    assert main(["bench", str(plan)]) == 0
    assert capsys.readouterr().out.startswith("dataset,")


@pytest.mark.parametrize("argv, code, needle", [
    (["run", "--mech", "teleport", "--graph", "er:5:0.5", "--k", "2"], 2, "mechanism"),
    (["run", "--mech", "path", "--graph", "er:5:0.5", "--pattern", "0-1,1-2,2-0"], 2, "cycle"),
    (["run", "--mech", "path", "--graph", "er:5:0.5"], 2, "--pattern or --k"),
    (["run", "--mech", "path", "--graph", "er:5:0.5", "--k", "2", "--trials", "0"], 2, "--trials"),
    (["run", "--mech", "walk", "--graph", "er:5:0.5", "--k", "2", "--fixed-marks", "/nonexistent"], 4, "nonexistent"),
    (["exact", "--graph", "er:300:0.5", "--pattern", "path:6"], 3, "limit"),
    (["exact", "--graph", "file:/nonexistent/graph.txt", "--k", "2"], 4, "nonexistent"),
    (["bogus"], 2, ""),
])
def test_errors(argv, code, needle, capsys):
    got, io = _out(capsys, argv)
    assert got == code
    assert needle in io.err


def test_fixed_marks_wrong_mechanism(tmp_path, capsys):
    marks = tmp_path / "m.txt"
    marks.write_text("0\n1\n0\n1\n0\n")
    got, io = _out(capsys, ["run", "--mech", "walk", "--graph", "er:5:0.5", "--k", "2",
                            "--fixed-marks", str(marks)])
    assert got == 2 and "--fixed-marks" in io.err
    marks.write_text("0\nx\n")
    got, io = _out(capsys, ["run", "--mech", "path", "--graph", "er:5:0.5", "--k", "2",
                            "--fixed-marks", str(marks)])
    assert got == 2 and "--fixed-marks" in io.err


def test_bad_edge_line_named(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n1 two\n")
    got, io = _out(capsys, ["exact", "--graph", str(f), "--k", "2"])
    assert got == 4 and "line 2" in io.err

import json

import pytest

from sirel.cli import literal_significant_digits, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_lines(text):
    fields = {}
    for line in text.splitlines():
        if ": " in line:
            key, val = line.split(": ", 1)
            fields[key] = val
    return fields


def test_literal_significant_digits():
    assert literal_significant_digits("2.000") == 4
    assert literal_significant_digits("1.732") == 4
    assert literal_significant_digits("1.73") == 3
    assert literal_significant_digits("0.00123") == 3
    assert literal_significant_digits("2") is None         # exact integer
    assert literal_significant_digits("-17") is None
    assert literal_significant_digits("0.0") is None       # exact zero
    assert literal_significant_digits("1.5e3") == 2


def test_relation_found(tmp_path, capsys):
    f = tmp_path / "vecs.txt"
    f.write_text("11 27 31\n1 2 3\n")
    code, out, _ = run_cli(capsys, "relation", str(f), "--gamma", "1000")
    assert code == 0
    fields = parse_lines(out)
    assert fields["OUTCOME"] == "found"
    assert fields["RELATION"] == "19 -2 -5"
    assert int(fields["ITER"]) <= 5


def test_relation_trivial(tmp_path, capsys):
    f = tmp_path / "vecs.txt"
    f.write_text("0 1 0\n0 0 1\n")
    code, out, _ = run_cli(capsys, "relation", str(f))
    assert code == 0
    assert parse_lines(out)["RELATION"] == "1 0 0"


def test_relation_exhausted(tmp_path, capsys):
    f = tmp_path / "v.txt"
    f.write_text("1 1\n")
    code, out, _ = run_cli(capsys, "relation", str(f), "--bound", "0.5")
    assert code == 2
    fields = parse_lines(out)
    assert fields["OUTCOME"] == "exhausted"
    assert float(fields["FLOOR"]) >= 1.0


def test_relation_reverifies_after_permutation(tmp_path, capsys):
    f = tmp_path / "v.txt"
    f.write_text("1 0 0\n0 1 0\n")  # needs row permutation
    code, out, _ = run_cli(capsys, "relation", str(f))
    assert code == 0
    rel = [int(v) for v in parse_lines(out)["RELATION"].split()]
    assert rel[0] == 0 and rel[1] == 0 and abs(rel[2]) == 1


def test_relation_json(tmp_path, capsys):
    f = tmp_path / "vecs.txt"
    f.write_text("11 27 31\n1 2 3\n")
    code, out, _ = run_cli(capsys, "relation", str(f), "--gamma", "1000", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["outcome"] == "found"
    assert report["relation"] == [19, -2, -5]
    assert report["mode"] == "one-level"
    assert report["digits"] == 50


def test_relation_two_level(tmp_path, capsys):
    f = tmp_path / "vecs.txt"
    f.write_text("86 6 8 673\n83 5 87 91\n")
    code, out, _ = run_cli(capsys, "relation", str(f), "--gamma", "93",
                           "--level", "2", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["outcome"] == "found"
    assert report["relation"] == [32, 747, -63, -10]


def test_relation_errors(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    assert run_cli(capsys, "relation", str(missing))[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n4 5\n")
    assert run_cli(capsys, "relation", str(bad))[0] == 1
    square = tmp_path / "square.txt"
    square.write_text("1 2\n3 4\n")
    assert run_cli(capsys, "relation", str(square))[0] == 1
    dependent = tmp_path / "dep.txt"
    dependent.write_text("1 2 4\n2 4 8\n")
    assert run_cli(capsys, "relation", str(dependent))[0] == 1


def test_minpoly_paper_example(capsys):
    code, out, _ = run_cli(capsys, "minpoly", "--re", "2.000", "--im", "1.732",
                           "--degree", "2", "--digits", "10")
    assert code == 0
    fields = parse_lines(out)
    assert fields["POLY"] == "7 -4 1"
    # effective stated digits capped by what the literals carry
    assert fields["DIGITS"] == "4"


def test_minpoly_three_digit_failure(capsys):
    code, out, err = run_cli(capsys, "minpoly", "--re", "2", "--im", "1.73",
                             "--degree", "2", "--digits", "3")
    assert code == 3
    assert "insufficient precision" in err
    fields = parse_lines(out)
    assert fields["OUTCOME"] == "error"
    assert "RELATION" in fields  # the spurious relation is reported


def test_minpoly_trivial(capsys):
    code, out, _ = run_cli(capsys, "minpoly", "--re", "1.0", "--im", "0",
                           "--degree", "1")
    assert code == 0
    assert parse_lines(out)["POLY"] == "-1 1"


def test_minpoly_json(capsys):
    code, out, _ = run_cli(capsys, "minpoly", "--re", "2.000", "--im", "1.732",
                           "--degree", "2", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["polynomial"] == [7, -4, 1]
    assert report["outcome"] == "found"


def test_minpoly_degree_validation(capsys):
    code, _, err = run_cli(capsys, "minpoly", "--re", "1.0", "--im", "0",
                           "--degree", "0")
    assert code == 1
    assert "degree" in err


def test_printed_relation_reverifies(tmp_path, capsys):
    from fractions import Fraction
    f = tmp_path / "vecs.txt"
    f.write_text("0.5 0.25 0.125\n")
    code, out, _ = run_cli(capsys, "relation", str(f))
    assert code == 0
    rel = [int(v) for v in parse_lines(out)["RELATION"].split()]
    data = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
    assert sum(a * b for a, b in zip(data, rel)) == 0

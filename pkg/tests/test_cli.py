import json

import pytest

from apacket.certio import from_json, from_text
from apacket.cli import (
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PRECONDITION,
    ParseError,
    format_param_text,
    main,
    parse_param_text,
)
from apacket.halfint import HalfInt
from apacket.reduce import verify_certificate

SIMPLE = """\
# one block with a < b
cuspidal rho d=1 kind=orth
group hasse=+ rG=sym2 star=orth
block rho a=1 b=3
target rho a0=1 s0=1
"""


def write(tmp_path, text, name="p.txt"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_forms():
    pf = parse_param_text(SIMPLE + "block rho A=3/2 B=1/2 zeta=-\npoint 0+ 1-\n")
    assert [b.ab_str() for b in pf.blocks] == ["(rho,1,3)", "(rho,2,3)"]
    assert pf.point.t == (0, 1) and pf.point.eta == (1, -1)
    assert pf.target[1:] == (1, HalfInt(1))


@pytest.mark.parametrize("text, line", [
    ("block rho a=1\n", 1),
    ("\n\nfoo\n", 3),
    ("block rho a=x b=1\n", 1),
    ("target rho a0=1\n", 1),
    ("group hasse=0\n", 1),
    ("block rho A=1 B=1/2\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_param_text(text)
    assert exc.value.lineno == line


def test_format_round_trip():
    pf = parse_param_text(SIMPLE + "point 0+\n")
    psi = pf.psi()
    again = parse_param_text(format_param_text(psi, pf.point, pf.target))
    assert again.psi() == psi and again.point == pf.point and again.target == pf.target


def test_validate_ok(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", write(tmp_path, SIMPLE))
    assert code == EXIT_OK and out.startswith("OK")
    assert "n(-)=1" in out


def test_validate_bad_order_and_parity(tmp_path, capsys):
    text = "block rho a=9 b=5\nblock rho a=3 b=1\nblock rho a=2 b=1\n"
    code, out, _ = run(capsys, "validate", write(tmp_path, text))
    assert code == EXIT_PRECONDITION
    assert "order (P) violated: block 0 (rho,9,5)" in out
    assert "bad parity: block 2 (rho,2,1)" in out


def test_packet_counts(tmp_path, capsys):
    text = "block rho a=1 b=1\nblock rho a=3 b=1\nblock rho a=5 b=1\n"
    code, out, _ = run(capsys, "--json", "packet", write(tmp_path, text))
    assert code == EXIT_OK and json.loads(out)["count"] == 4
    code, out, _ = run(capsys, "--json", "packet", write(tmp_path, "block rho a=2 b=2\n"))
    assert json.loads(out)["count"] == 1
    code, out, _ = run(capsys, "--json", "packet", write(tmp_path, "group hasse=-\n"))
    assert json.loads(out)["count"] == 0
    code, _, err = run(capsys, "packet", write(tmp_path, "block rho a=3 b=1\nblock rho a=1 b=3\n"))
    assert code == EXIT_PRECONDITION and "build_dominant" in err


def test_order_command(tmp_path, capsys):
    path = write(tmp_path, SIMPLE)
    code, out, _ = run(capsys, "--json", "order", path)
    assert code == EXIT_OK and json.loads(out)["order"] == -1
    code, out, _ = run(capsys, "order", path, "--s0", "0")
    assert "[-1,0]" in out and "r_G" in out
    tempered = write(tmp_path, "block rho a=3 b=1\ntarget rho a0=3 s0=5/2\n", "t.txt")
    code, out, _ = run(capsys, "--json", "order", tempered)
    assert json.loads(out)["order"] == 0


def test_table_command(tmp_path, capsys):
    code, out, _ = run(capsys, "--json", "table", write(tmp_path, SIMPLE))
    assert json.loads(out)["rows"] == [{"block": "(rho,1,3)", "pole": True, "order": -1}]


def test_reduce_writes_verifiable_certificates(tmp_path, capsys):
    path = write(tmp_path, SIMPLE)
    code, out, _ = run(capsys, "--json", "reduce", path, "--out", str(tmp_path / "c"))
    report = json.loads(out)
    assert code == EXIT_OK and report["verified"]
    assert verify_certificate(from_text((tmp_path / "c.cert.txt").read_text()))
    assert verify_certificate(from_json((tmp_path / "c.cert.json").read_text()))


def test_reduce_examples(tmp_path, capsys):
    tempered = write(tmp_path, "block rho a=3 b=1\ntarget rho a0=2 s0=1\n", "t.txt")
    code, out, _ = run(capsys, "--json", "reduce", tempered)
    assert code == EXIT_OK and json.loads(out)["steps"] == 1
    mult = write(tmp_path, "block rho a=2 b=2\nblock rho a=2 b=2\ntarget rho a0=2 s0=1\n", "m.txt")
    code, out, _ = run(capsys, "--json", "reduce", mult)
    assert code == EXIT_OK and json.loads(out)["steps"] >= 2


def test_reduce_needs_target(tmp_path, capsys):
    code, _, err = run(capsys, "reduce", write(tmp_path, "block rho a=1 b=1\n"))
    assert code == EXIT_PRECONDITION and "target" in err


def test_sort_flag(tmp_path, capsys):
    text = "block rho a=9 b=5\nblock rho a=3 b=1\npoint 0+ 0+\ntarget rho a0=2 s0=1\n"
    path = write(tmp_path, text)
    assert run(capsys, "reduce", path)[0] == EXIT_PRECONDITION
    assert run(capsys, "reduce", path, "--sort")[0] == EXIT_OK


def test_selftest(capsys):
    code, out, _ = run(capsys, "--json", "selftest", "25", "--seed", "4")
    assert code == EXIT_OK and json.loads(out)["failures"] == []
    code, out, _ = run(capsys, "reduce", "--selftest", "10")
    assert code == EXIT_OK and "10/10" in out


def test_missing_file(capsys):
    assert run(capsys, "validate", "/nonexistent/file")[0] == EXIT_PARSE

import json
import math

import pytest

from qtop.cli import EXIT_CONTRACT, EXIT_OK, EXIT_PARSE, ExactFloatEncoder, build_parser, main, spec_from_args
from qtop.models.job import Command, JonesMethod, Nr0Path
from qtop.services.errors import ParseError


def _run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_jones(capsys):
    code, out, _ = _run(capsys, ["jones", "--r", "3", "--knot", "unknot", "--colors", "1"])
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["command"] == "jones"
    assert result["value"][0] == pytest.approx(-2 * math.cos(math.pi / 3))


def test_jones_both_paths(capsys):
    code, out, _ = _run(capsys, ["jones", "--r", "4", "--braid", "2: 1 1", "--colors", "1", "2", "--both"])
    assert code == EXIT_OK
    assert json.loads(out)["path"] == "both"


def test_parse_error_exit_code(capsys):
    code, _, err = _run(capsys, ["jones", "--r", "3", "--braid", "2: 1 y", "--colors", "1"])
    assert code == EXIT_PARSE
    assert "position 5" in err


def test_contract_error_exit_code(capsys):
    code, _, err = _run(capsys, ["nr0", "--r", "4", "--knot", "unknot", "--f", "1"])
    assert code == EXIT_CONTRACT
    assert "r not divisible by 4" in err


def test_generator_range_exit_code(capsys):
    code, _, _ = _run(capsys, ["jones", "--r", "3", "--braid", "2: 3", "--colors", "1"])
    assert code == EXIT_CONTRACT


def test_wrt_surgery_shorthand(capsys):
    code, out, _ = _run(capsys, ["wrt", "--r", "5", "--surgery", "unknot:+1"])
    assert code == EXIT_OK
    result = json.loads(out)
    assert result["value"][0] == pytest.approx(1, abs=1e-8)
    assert result["ord_h1"] == 1


def test_nr0_paths(capsys):
    for path in ("direct", "cabled"):
        code, out, _ = _run(capsys, ["nr0", "--r", "3", "--knot", "unknot", "--f", "1", "--path", path])
        assert code == EXIT_OK
        assert json.loads(out)["value"][0] == pytest.approx(1, abs=1e-8)


def test_ado_grid(capsys):
    code, out, _ = _run(capsys, ["ado", "--r", "3", "--knot", "unknot", "--grid", "0.2", "0.4", "3"])
    assert code == EXIT_OK
    assert len(json.loads(out)["samples"]) == 3


def test_output_file(capsys, tmp_path):
    target = tmp_path / "result.json"
    code, _, _ = _run(capsys, ["ado", "--r", "3", "--knot", "unknot", "--alpha", "0.5", "--output", str(target)])
    assert code == EXIT_OK
    assert json.loads(target.read_text())["value"][0] == pytest.approx(1.5)


def test_json_link_file(capsys, tmp_path):
    link = tmp_path / "hopf.json"
    link.write_text(json.dumps({"strands": 2, "word": [1, 1], "colors": ["V0.3", "S1"], "framings": [0, 1]}))
    code, out, _ = _run(capsys, ["ado", "--r", "3", "--json", str(link)])
    assert code == EXIT_OK
    assert json.loads(out)["colors"] == ["V_0.3", "S_1"]


def test_verify_exit_code(capsys):
    code, out, _ = _run(capsys, ["verify", "deltas", "--r", "3"])
    assert code == EXIT_OK
    assert json.loads(out)["passed"] is True


def test_verify_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "nonsense", "--r", "3"])


def test_spec_from_args():
    args = build_parser().parse_args(
        ["nr", "--r", "3", "--knot", "hopf", "--framings", "1", "0", "--class", "0=-2.37", "--cargo", "1=V0.37"]
    )
    spec = spec_from_args(args)
    assert spec.command is Command.NR
    assert spec.surgery == {0: "-2.37"}
    assert spec.cargo == {1: "V0.37"}
    assert spec.framings == [1, 0]

    args = build_parser().parse_args(["nr0", "--r", "5", "--surgery", "trefoil:-1", "--omega", "1", "--path", "limit"])
    spec = spec_from_args(args)
    assert (spec.knot, spec.f, spec.omega, spec.path) == ("trefoil", -1, 1, Nr0Path.LIMIT)

    args = build_parser().parse_args(["jones", "--r", "3", "--knot", "trefoil", "--colors", "1", "--method", "skein"])
    assert spec_from_args(args).method is JonesMethod.SKEIN


def test_bad_pairs():
    args = build_parser().parse_args(["nr", "--r", "3", "--knot", "hopf", "--class", "zero"])
    with pytest.raises(ParseError):
        spec_from_args(args)


def test_floats_keep_17_significant_digits(capsys):
    assert json.dumps({"x": 0.1, "n": [1.0, -2.5]}, cls=ExactFloatEncoder) == '{"x": 0.10000000000000001, "n": [1.0, -2.5]}'
    code, out, _ = _run(capsys, ["jones", "--r", "3", "--knot", "unknot", "--colors", "1"])
    assert code == EXIT_OK
    value = json.loads(out)["value"][0]
    assert f"{value:.17g}" in out

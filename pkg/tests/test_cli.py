import json

import pytest

from onesided.cli import RunConfig, build_parser, main, parse_k


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_k():
    assert parse_k("8") == [8]
    assert parse_k("2,4,8") == [2, 4, 8]
    assert parse_k("2:6") == [2, 3, 4, 5, 6]
    assert parse_k("2:8:3") == [2, 5, 8]


def test_sandwich_step(capsys):
    code, out, _ = run(capsys, "sandwich-step", "--k", "2:4")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "k,gap,bound" and len(lines) == 4
    k, gap, bound = lines[1].split(",")
    assert int(k) == 2 and float(gap) <= float(bound)


def test_tau_json(capsys):
    code, out, _ = run(capsys, "tau", "--fn", "identity", "--delta", "0.1,0.2", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and rows[0]["tau"] == pytest.approx(0.1 - 0.01 / 4, abs=5e-3)


def test_approximate_and_oracle(capsys):
    code, out, _ = run(capsys, "approximate", "--expr", "abs(x-0.3)", "--k", "4")
    assert code == 0 and out.startswith("k,y,p,step_gap,width,tau,bound")
    code, out, _ = run(capsys, "oracle", "--fn", "exp", "--k", "2", "--grid-n", "128")
    k, n, one, two = out.strip().splitlines()[1].split(",")
    assert code == 0 and float(two) <= float(one)


def test_verify_writes_file(tmp_path, capsys):
    dest = tmp_path / "v.csv"
    code, _, err = run(capsys, "verify", "--fn", "identity", "--k", "2", "--out", str(dest))
    assert code == 0 and "checks passed" in err
    assert dest.read_text().startswith("# schema=1")


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["tau", "--fn", "identity"],
        ["tau", "--expr", "sin("],
        ["approximate", "--fn", "identity", "--expr", "x", "--k", "2"],
        ["sandwich-step", "--k", "a:b"],
        ["oracle", "--fn", "exp", "--k", "2", "--p", "2"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_run_config_round_trip():
    ns = build_parser().parse_args(["approximate", "--fn", "exp", "--k", "2,4", "--y", "0.2"])
    from onesided.cli import _config

    cfg = _config(ns)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.k == [2, 4] and cfg.space().p == 1.0

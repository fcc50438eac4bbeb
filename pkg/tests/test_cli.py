import json

import pytest

from polyclone.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_family_a(capsys):
    code, out, _ = run(capsys, "gen", "A", "--n", "1", "--m", "2")
    assert code == 0
    obj = json.loads(out)
    assert obj["family"] == "A" and obj["n"] == 1 and obj["m"] == 2
    assert len(obj["relations"]) == 9
    assert obj["names"] == ["a", "0", "1"]


def test_gen_family_b(capsys):
    code, out, _ = run(capsys, "gen", "B", "--n", "1")
    assert code == 0
    obj = json.loads(out)
    # two binary relations per level (0 and 1) plus 15 nonempty unaries
    assert len(obj["relations"]) == 19


def test_gen_warns_on_trivial_instance(capsys):
    code, out, err = run(capsys, "gen", "A", "--n", "0", "--m", "2")
    assert code == 0
    assert "warning" in err
    assert json.loads(out)["n"] == 0


def test_gen_requires_m_for_family_a(capsys):
    code, _, err = run(capsys, "gen", "A", "--n", "1")
    assert code == 2 and "error" in err


def test_gen_rejects_bad_parameters(capsys):
    code, _, err = run(capsys, "gen", "A", "--n", "-1", "--m", "2")
    assert code == 2 and "error" in err


def test_ppcheck(capsys):
    code, out, _ = run(capsys, "ppcheck", "A", "--n", "3", "--i", "2")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = run(capsys, "ppcheck", "B", "--n", "2", "--i", "1")
    assert code == 0 and json.loads(out)["holds"] is True


def test_witness_exact(capsys):
    code, out, _ = run(capsys, "witness", "A", "--n", "1", "--m", "2", "--mode", "exact")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True and obj["nu"] is True and obj["arity"] == "5"
    assert all(entry["ok"] for entry in obj["relations"])


def test_witness_sampled(capsys):
    code, out, _ = run(
        capsys,
        "witness", "B", "--n", "1", "--mode", "sampled", "--trials", "200", "--seed", "7",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["mode"] == "sampled" and obj["seed"] == 7


def test_decide_exit_codes(capsys):
    code, out, _ = run(capsys, "decide", "A", "--n", "0", "--m", "3", "--k", "3")
    assert code == 1
    assert json.loads(out)["verdict"] == "unsat"
    code, out, _ = run(capsys, "decide", "A", "--n", "0", "--m", "3", "--k", "4")
    assert code == 0
    obj = json.loads(out)
    assert obj["verdict"] == "sat" and obj["witness"]["arity"] == 4
    code, out, _ = run(
        capsys, "decide", "A", "--n", "1", "--m", "2", "--k", "5", "--node-limit", "1"
    )
    assert code == 3
    assert json.loads(out)["verdict"] == "unknown"


def test_decide_remark_pin(capsys):
    code, out, _ = run(
        capsys, "decide", "A", "--n", "0", "--m", "3", "--k", "3", "--pin", "remark"
    )
    assert code == 1 and json.loads(out)["pin"] == "remark"


def test_trace_roundtrip(capsys):
    code, out, _ = run(capsys, "trace", "A", "--n", "2", "--m", "2")
    assert code == 0
    obj = json.loads(out)
    assert obj["checked"] is True
    assert obj["schedule"][0] == {"a": "2", "0": "2", "1": "12"}
    code, out, _ = run(capsys, "trace", "B", "--n", "1")
    assert code == 0 and json.loads(out)["checked"] is True


def test_trace_rejects_trivial_instance(capsys):
    code, _, err = run(capsys, "trace", "A", "--n", "0", "--m", "2")
    assert code == 2 and "error" in err


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "2", "4")
    assert code == 0
    obj = json.loads(out)
    assert obj["upper"] == str(6**9 // 2 + 1) and obj["lower"] == "3"
    code, _, err = run(capsys, "bounds", "2", "2")
    assert code == 2 and "universe" in err


def test_outputs_are_reproducible(capsys):
    _, out1, _ = run(capsys, "gen", "B", "--n", "1")
    _, out2, _ = run(capsys, "gen", "B", "--n", "1")
    assert out1 == out2
    _, w1, _ = run(capsys, "witness", "A", "--n", "0", "--m", "3", "--mode", "sampled",
                   "--trials", "100")
    _, w2, _ = run(capsys, "witness", "A", "--n", "0", "--m", "3", "--mode", "sampled",
                   "--trials", "100")
    assert w1 == w2


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_budget_env_override(capsys, monkeypatch):
    monkeypatch.setenv("POLYCLONE_BUDGET", "1")
    code, _, err = run(capsys, "witness", "A", "--n", "0", "--m", "3", "--mode", "exact")
    assert code == 3 and "budget" in err.lower()
    monkeypatch.setenv("POLYCLONE_BUDGET", "not-a-number")
    code, _, err = run(capsys, "witness", "A", "--n", "0", "--m", "3")
    assert code == 2

"""End-to-end tests for the command line: schemas, exit codes, determinism."""

import json

import pytest

from ramify import build_heisenberg, build_tower_truncation, psi_step
from ramify.cli import main


def run_cli(argv, capsys):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def heis3_file(tmp_path):
    path = tmp_path / "heis3.json"
    path.write_text(json.dumps(build_heisenberg(3).to_json_dict()))
    return str(path)


@pytest.fixture
def filt_file(tmp_path):
    data = {
        "group": build_heisenberg(3).to_json_dict(),
        "ig": [
            {"element": [0, 0, 1], "value": 5},
            {"element": [0, 0, 2], "value": 5},
        ],
        "default": 2,
    }
    path = tmp_path / "filt.json"
    path.write_text(json.dumps(data))
    return str(path)


# -- herbrand ---------------------------------------------------------------


def test_herbrand_step_eval(capsys):
    code, out, _ = run_cli(
        ["herbrand", "step", "--break", "1", "--p", "2", "--eval", "3"], capsys
    )
    assert code == 0
    assert json.loads(out) == {"value": "5"}


def test_herbrand_step_function_json(capsys):
    code, out, _ = run_cli(["herbrand", "step", "--break", "2", "--p", "3"], capsys)
    assert code == 0
    assert json.loads(out) == {
        "breakpoints": [["2", "2"]],
        "slopes": ["1", "3"],
    }


def test_herbrand_compose_invert_eval(tmp_path, capsys):
    comp = tmp_path / "comp.json"
    comp.write_text(
        json.dumps(
            {
                "outer": psi_step(5, 2).to_json_dict(),
                "inner": psi_step(1, 2).to_json_dict(),
            }
        )
    )
    code, out, _ = run_cli(
        ["herbrand", "compose", "--file", str(comp), "--eval", "4"], capsys
    )
    assert code == 0 and json.loads(out) == {"value": "9"}

    func = tmp_path / "func.json"
    code, out, _ = run_cli(["herbrand", "compose", "--file", str(comp)], capsys)
    func.write_text(out)
    code, out, _ = run_cli(
        ["herbrand", "invert", "--file", str(func), "--eval", "9"], capsys
    )
    assert code == 0 and json.loads(out) == {"value": "4"}
    code, out, _ = run_cli(["herbrand", "eval", "--file", str(func), "--at", "4"], capsys)
    assert code == 0 and json.loads(out) == {"value": "9"}


def test_malformed_flag_exits_one(capsys):
    code, out, err = run_cli(["herbrand", "step", "--break", "1"], capsys)
    assert code == 1
    assert json.loads(err)["code"] == "malformed-input"
    code, _, err = run_cli(["herbrand", "step", "--break", "0", "--p", "2"], capsys)
    assert code == 1
    code, _, err = run_cli(["herbrand", "eval", "--file", "/nonexistent", "--at", "1"], capsys)
    assert code == 1
    assert "cannot read" in json.loads(err)["error"]


# -- group --------------------------------------------------------------------


def test_group_check(heis3_file, capsys):
    code, out, _ = run_cli(["group", "check", "--file", heis3_file], capsys)
    assert code == 0
    assert json.loads(out) == {"consistent": True, "n": 3, "order": 27, "p": 3}


def test_group_check_series(heis3_file, capsys):
    code, out, _ = run_cli(
        ["group", "check", "--file", heis3_file, "--series"], capsys
    )
    assert code == 0
    series = json.loads(out)["series"]
    assert series["gamma_orders"] == [27, 3, 1]
    assert series["p_orders"] == [27, 3, 1]
    assert series["all_equal"] and series["gp_in_derived"]


def test_group_check_inconsistent_exits_three(tmp_path, capsys):
    data = {
        "p": 2,
        "n": 4,
        "power": [],
        "comm": [
            {"j": 2, "i": 1, "rhs": {"3": 1}},
            {"j": 3, "i": 1, "rhs": {"4": 1}},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run_cli(["group", "check", "--file", str(path)], capsys)
    assert code == 3
    report = json.loads(out)
    assert report["consistent"] is False
    assert report["witness"] == [[0, 1, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]]


def test_group_closure(heis3_file, capsys):
    code, out, _ = run_cli(
        ["group", "closure", "--file", heis3_file, "--gens", "[[0,1,0]]", "--normal"],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["order"] == 9
    assert [0, 0, 1] in report["elements"]
    code, out, _ = run_cli(
        ["group", "closure", "--file", heis3_file, "--gens", "[[0,1,0]]"], capsys
    )
    assert json.loads(out)["order"] == 3


def test_group_rank_and_probe(tmp_path, capsys):
    path = tmp_path / "trunc34.json"
    path.write_text(json.dumps(build_tower_truncation(3, 4).to_json_dict()))
    code, out, _ = run_cli(["group", "rank", "--file", str(path), "--k", "1"], capsys)
    assert code == 0
    assert json.loads(out) == {
        "indices": [3, 4],
        "k": 1,
        "min_generators": 2,
        "order": 9,
    }
    code, out, _ = run_cli(["group", "probe", "--file", str(path)], capsys)
    assert code == 0
    assert json.loads(out)["ok"] is True
    code, out, _ = run_cli(
        ["group", "probe", "--file", str(path), "--tower", "1,2,3"], capsys
    )
    assert code == 0 and json.loads(out)["ok"] is True


def test_cap_env_var(heis3_file, capsys, monkeypatch):
    monkeypatch.setenv("RAMIFY_CAP", "10")
    code, _, err = run_cli(["group", "check", "--file", heis3_file], capsys)
    assert code == 4
    assert json.loads(err)["code"] == "cap-exceeded"
    monkeypatch.setenv("RAMIFY_CAP", "frogs")
    code, _, err = run_cli(["group", "check", "--file", heis3_file], capsys)
    assert code == 1


# -- filtration ------------------------------------------------------------------


def test_filtration_validate_ok(filt_file, capsys):
    code, out, _ = run_cli(["filtration", "validate", "--file", filt_file], capsys)
    assert code == 0
    assert json.loads(out) == {"ok": True}


def test_filtration_validate_reports_failure(tmp_path, capsys):
    data = {
        "group": build_heisenberg(3).to_json_dict(),
        "ig": [
            {"element": [0, 0, 1], "value": 5},
            {"element": [0, 0, 2], "value": 5},
            {"element": [1, 0, 0], "value": 5},
        ],
        "default": 2,
    }
    path = tmp_path / "bad_filt.json"
    path.write_text(json.dumps(data))
    code, out, _ = run_cli(["filtration", "validate", "--file", str(path)], capsys)
    assert code == 0  # a query about validity, not a failure of the tool
    report = json.loads(out)
    assert report["ok"] is False
    assert report["level"] == "4"
    assert report["witness"] == [[1, 0, 0], [1, 0, 0]]


def test_filtration_herbrand(filt_file, capsys):
    code, out, _ = run_cli(["filtration", "herbrand", "--file", filt_file], capsys)
    assert code == 0
    assert json.loads(out) == {
        "breakpoints": [["1", "1"], ["4", "4/3"]],
        "slopes": ["1", "1/9", "1/27"],
    }


def test_filtration_upper(filt_file, capsys):
    code, out, _ = run_cli(
        ["filtration", "upper", "--file", filt_file, "--at", "6/5"], capsys
    )
    assert code == 0
    assert json.loads(out) == {
        "elements": [[0, 0, 0], [0, 0, 1], [0, 0, 2]],
        "order": 3,
    }


def test_filtration_quotient(filt_file, capsys):
    code, out, _ = run_cli(
        ["filtration", "quotient", "--file", filt_file, "--kernel", "[[0,0,1]]"],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["order"] == 9
    assert report["upper_breaks"] == ["1"]
    assert all(row["value"] == "2" for row in report["ig"])
    assert len(report["ig"]) == 8


# -- plan --------------------------------------------------------------------------


def test_plan_feasible_exit_codes(capsys):
    ok = ["plan", "feasible", "--i", "1", "--j", "3", "--s", "5", "--p", "2", "--e", "2"]
    code, out, _ = run_cli(ok, capsys)
    assert code == 0 and json.loads(out)["feasible"] is True
    bad = ["plan", "feasible", "--i", "1", "--j", "1", "--s", "3", "--p", "2", "--e", "2"]
    code, out, _ = run_cli(bad, capsys)
    assert code == 2 and json.loads(out)["feasible"] is False


def test_plan_admissible_exit_codes(capsys):
    base = ["plan", "admissible", "--j", "2", "--p", "2", "--e", "2"]
    code, out, _ = run_cli(base, capsys)
    assert code == 2 and json.loads(out) == {"admissible": False}
    code, out, _ = run_cli(base + ["--bound-only"], capsys)
    assert code == 0 and json.loads(out) == {"admissible": True}


def test_plan_run_nonapf_csv(tmp_path, capsys):
    plan = {"kind": "nonapf", "p": 2, "e0": 2, "schedule": [1, 3, 5, 7]}
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(plan))
    code, out, _ = run_cli(["plan", "run", "--file", str(path)], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,lower_break,upper_break,flag"
    assert lines[4].split(",")[2] == "11/4"
    trailer = json.loads(lines[5])
    assert trailer["verdict"] == "non-APF"
    assert trailer["limit_bound"] == "3"


def test_plan_run_apf_json(tmp_path, capsys):
    plan = {
        "kind": "apf",
        "p": 2,
        "e0": 2,
        "eps": [1],
        "base": {"i1": 5, "i": 16},
        "depth": 3,
    }
    path = tmp_path / "apf.json"
    path.write_text(json.dumps(plan))
    code, out, _ = run_cli(
        ["plan", "run", "--file", str(path), "--format", "json"], capsys
    )
    assert code == 0
    report = json.loads(out)
    assert report["upper"] == ["21/2", "27/4", "47/8"]
    assert report["levels"] == [3, 5, 7]


def test_plan_run_infeasible_exits_two(tmp_path, capsys):
    plan = {
        "kind": "apf",
        "p": 2,
        "e0": 2,
        "eps": [1],
        "base": {"i1": 5, "i": 16},
        "depth": 4,
    }
    path = tmp_path / "deep.json"
    path.write_text(json.dumps(plan))
    code, _, err = run_cli(["plan", "run", "--file", str(path)], capsys)
    assert code == 2
    assert json.loads(err)["code"] == "infeasible-plan"


def test_plan_sweep_jobs_match(tmp_path, capsys):
    sweep = {
        "plans": [
            {"kind": "nonapf", "p": 2, "e0": 2, "schedule": [1, 3, 5, 7]},
            {"kind": "custom", "p": 2, "e0": 2, "schedule": [1, 3, 7, 15]},
        ]
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(sweep))
    base = ["plan", "run", "--file", str(path), "--format", "json"]
    code, seq_out, _ = run_cli(base, capsys)
    assert code == 0
    code, par_out, _ = run_cli(base + ["--jobs", "2"], capsys)
    assert code == 0
    assert seq_out == par_out  # input order preserved under parallel evaluation
    results = json.loads(seq_out)["results"]
    assert results[0]["verdict"] == "non-APF"
    assert results[1]["verdict"] == "APF"


# -- merge --------------------------------------------------------------------------


def _seq_json(vals, **kw):
    data = {"upper": vals}
    data.update(kw)
    return data


def test_merge_max(tmp_path, capsys):
    data = {
        "sequences": [
            _seq_json(["1", "2", "5/2"]),
            _seq_json(["1", "2", "3"]),
        ]
    }
    path = tmp_path / "merge.json"
    path.write_text(json.dumps(data))
    code, out, _ = run_cli(
        ["merge", "max", "--file", str(path), "--format", "json"], capsys
    )
    assert code == 0
    report = json.loads(out)
    assert report["upper"] == ["1", "2", "3"]
    assert report["flags"] == [True, True, False]


def test_merge_repair(tmp_path, capsys):
    base = _seq_json(
        ["1", "2", "5/2", "11/4"],
        verdict="non-APF",
        limit_bound="3",
        certificate="geometric increments",
    )
    data = {"base": base, "family": ["1", "2", "3", "4"]}
    path = tmp_path / "repair.json"
    path.write_text(json.dumps(data))
    code, out, _ = run_cli(
        ["merge", "repair", "--file", str(path), "--format", "json"], capsys
    )
    assert code == 0
    report = json.loads(out)
    assert report["upper"] == ["1", "2", "3", "4"]
    assert report["verdict"] == "APF"


def test_merge_rejects_unknown_fields(tmp_path, capsys):
    path = tmp_path / "bad_merge.json"
    path.write_text(json.dumps({"sequences": [_seq_json(["1"])], "extra": 1}))
    code, _, err = run_cli(["merge", "max", "--file", str(path)], capsys)
    assert code == 1
    assert "unknown merge fields" in json.loads(err)["error"]


# -- output plumbing ---------------------------------------------------------------


def test_out_flag_writes_file(tmp_path, heis3_file, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(
        ["group", "check", "--file", heis3_file, "--out", str(target)], capsys
    )
    assert code == 0 and out == ""
    on_disk = target.read_text()
    code, stdout_run, _ = run_cli(["group", "check", "--file", heis3_file], capsys)
    assert on_disk == stdout_run


def test_repeated_runs_identical(filt_file, capsys):
    argv = ["filtration", "quotient", "--file", filt_file, "--kernel", "[[0,0,1]]"]
    _, first, _ = run_cli(argv, capsys)
    _, second, _ = run_cli(argv, capsys)
    assert first == second

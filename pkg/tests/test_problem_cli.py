import json

import pytest

from reflmap.cli import main
from reflmap.poly import VarContext, parse_poly
from reflmap.problem import ProblemError, ProblemSpec, load_problem

from conftest import PROBLEMS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


def base_problem():
    return json.loads((PROBLEMS / "d8_f1.json").read_text())


# -- loader -----------------------------------------------------------------------------


def test_every_shipped_problem_loads():
    for path in sorted(PROBLEMS.glob("*.json")):
        load_problem(path, max_group_order=4096)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("conductor"),
        lambda d: d.update(conductor=0),
        lambda d: d.update(colour="red"),
        lambda d: d["variables"].update(target=["X", "Y", "u"]),
        lambda d: d.update(hypersurface=[]),
        lambda d: d.update(group={"builtin": "dihedral_D8", "generators": []}),
    ],
)
def test_malformed_specs(mutate):
    d = base_problem()
    mutate(d)
    with pytest.raises(ProblemError):
        ProblemSpec.from_dict(d)


# -- exit codes ---------------------------------------------------------------------------


def test_info_ok(capsys):
    code, out, _ = run(capsys, "info", PROBLEMS / "d8_f1.json")
    assert code == 0
    assert "order 8, reflections 4, omega verified" in out


def test_image_text(capsys):
    code, out, _ = run(capsys, "image", PROBLEMS / "d8_f1.json")
    assert code == 0
    assert out.splitlines()[0].startswith("Z^8-10*X*Z^6")
    assert out.splitlines()[1] == "reduced yes"


def test_json_output_round_trips(capsys):
    code, out, _ = run(capsys, "image", PROBLEMS / "s4_t0.json", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["reduced"] is False and data["variables"] == ["x", "y", "z"]
    P = load_problem(PROBLEMS / "s4_t0.json")
    g = parse_poly(data["equation"], VarContext.of(data["variables"], "target"), P.field)
    assert g.total_degree() == data["total_degree"]


def test_output_is_deterministic(capsys):
    first = run(capsys, "branches", PROBLEMS / "d8_f2.json", "--json")
    second = run(capsys, "branches", PROBLEMS / "d8_f2.json", "--json")
    assert first == second


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "info", tmp_path / "nope.json")
    assert code == 1 and "input error" in err


def test_invalid_json(capsys, tmp_path):
    code, _, _ = run(capsys, "info", write(tmp_path, "{not json"))
    assert code == 1


def test_unknown_variable_in_equation(capsys, tmp_path):
    d = base_problem()
    d["hypersurface"] = ["w-2*u-q"]
    code, _, _ = run(capsys, "image", write(tmp_path, d))
    assert code == 1


def test_bad_sigma(capsys):
    code, _, err = run(capsys, "k2", PROBLEMS / "d8_f1.json", "--sigma", "0")
    assert code == 1 and "sigma" in err
    code, _, _ = run(capsys, "k2", PROBLEMS / "d8_f1.json", "--sigma", "a,b")
    assert code == 1


def test_wrong_orbit_map_is_a_math_failure(capsys):
    code, out, _ = run(capsys, "info", PROBLEMS / "bad_omega.json")
    assert code == 2
    assert "NOT verified" in out


def test_report_without_chart_is_a_math_failure(capsys):
    code, _, err = run(capsys, "invariants", PROBLEMS / "s4_t0.json")
    assert code == 2 and "chart" in err


def test_group_cap_is_a_resource_failure(capsys):
    code, _, err = run(capsys, "info", PROBLEMS / "k2c3c5.json")
    assert code == 3 and "cap" in err


def test_step_budget_is_a_resource_failure(capsys):
    code, _, err = run(capsys, "image", PROBLEMS / "s4_t1.json", "--step-budget", "5")
    assert code == 3 and "resource" in err


def test_degree_command(capsys):
    code, out, _ = run(capsys, "degree", PROBLEMS / "xy_graph_k3.json", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["degree"] == 3
    assert len(data["setwise_stabilizer"]) == 3


def test_invariants_json(capsys):
    code, out, _ = run(capsys, "invariants", PROBLEMS / "d8_f2.json", "--json")
    assert code == 0
    data = json.loads(out)
    assert (data["mu_total"], data["delta_total"], data["branch_total"]) == (104, 57, 11)


def test_k2_by_exponents(capsys):
    code, out, _ = run(capsys, "k2", PROBLEMS / "k2c3c5.json", "--sigma", "1,1,0,0,0",
                       "--max-group-order", "4096", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["exponents"] == [1, 1, 0, 0, 0]
    assert data["empty"] is True

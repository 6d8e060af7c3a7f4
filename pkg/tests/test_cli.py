"""CLI subcommands: formats, exit codes, byte stability, registry coverage."""

import json
import subprocess
import sys

import numpy as np
import pytest

import graphonlab as gl
from graphonlab import cli
from graphonlab.cli import OPERATION_SUBCOMMANDS, SUBCOMMANDS, build_parser, canonical_json


def run_cli(args, capsys):
    code = cli.main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def files(tmp_path):
    out = {}

    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    out["k3"] = write("k3.json", gl.graph_to_json(gl.complete_graph(3)))
    out["k4"] = write("k4.json", gl.graph_to_json(gl.complete_graph(4)))
    out["c4"] = write("c4.json", gl.graph_to_json(gl.cycle_graph(4)))
    out["half"] = write("half.json", gl.graphon_to_json(gl.StepGraphon.constant(0.5)))
    two = gl.StepGraphon(np.array([0.5, 0.5]), np.array([[0.8, 0.2], [0.2, 0.8]]))
    out["two"] = write("two.json", gl.graphon_to_json(two))
    _, u = gl.deviation(two)
    out["kernel"] = write("kernel.json", gl.graphon_to_json(u))
    rooted = gl.RootedGraph(gl.path_graph(2), (0,))
    out["rooted"] = write("rooted.json", gl.graph_to_json(rooted))
    out["dir"] = str(tmp_path)
    return out


def test_density_constant_half(files, capsys):
    code, out, _ = run_cli(
        ["density", "--graph", files["k3"], "--graphon", files["half"]], capsys
    )
    assert code == 0
    assert json.loads(out) == {"t": 0.125}


def test_density_finite_host(files, capsys):
    code, out, _ = run_cli(
        ["density", "--graph", files["k3"], "--target", files["k4"]], capsys
    )
    assert code == 0
    assert json.loads(out)["t"] == pytest.approx(24 / 64)


def test_density_plain(files, capsys):
    code, out, _ = run_cli(["density", "--graphon", files["two"]], capsys)
    assert code == 0
    assert json.loads(out)["density"] == pytest.approx(0.5)


def test_rooted(files, capsys):
    code, out, _ = run_cli(
        ["rooted", "--graph", files["rooted"], "--graphon", files["two"]], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["tensor"] == pytest.approx([0.5, 0.5])


def test_cutnorm_witness(files, capsys):
    code, out, _ = run_cli(["cutnorm", "--kernel", files["kernel"]], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["value"] == pytest.approx(0.075)
    assert data["S"] == [0]


def test_cutnorm_sandwich_passes(files, capsys):
    code, out, _ = run_cli(
        ["cutnorm", "--kernel", files["kernel"], "--check", "sandwich"], capsys
    )
    assert code == 0
    assert all(r["pass"] for r in json.loads(out))


def test_spectrum(files, capsys):
    code, out, _ = run_cli(
        ["spectrum", "--input", files["two"], "--cycles", "4", "--paths", "3",
         "--estimates"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["eigenvalues"] == pytest.approx([0.5, 0.3])
    assert data["cycle_densities"]["4"] == pytest.approx(0.5**4 + 0.3**4)
    assert data["path_densities"]["3"] == pytest.approx(0.25)
    assert all(r["pass"] for r in data["estimates"])


def test_expand(files, capsys):
    code, out, _ = run_cli(
        ["expand", "--graph", files["k3"], "--graphon", files["two"]], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["total"] == pytest.approx(0.152)
    assert data["relative_gap"] < 1e-12


def test_classify(files, capsys):
    c5 = gl.graph_to_json(gl.cycle_graph(5))
    path = files["dir"] + "/c5.json"
    with open(path, "w") as fh:
        json.dump(c5, fh)
    code, out, _ = run_cli(
        ["classify", "--base", path, "--ell", "10",
         "--subset", "[[0,1],[1,2],[2,3],[3,4],[0,4]]"],
        capsys,
    )
    assert code == 0
    assert json.loads(out) == {"group": "e"}


def test_construct_family(files, capsys):
    code, out, _ = run_cli(["construct", "family", "--family", "K2|3,2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 7
    assert len(data["edges"]) == 7
    assert data["roots"] == [6]


def test_construct_girth_infinite(files, capsys):
    p5 = gl.graph_to_json(gl.path_graph(5))
    path = files["dir"] + "/p5.json"
    with open(path, "w") as fh:
        json.dump(p5, fh)
    code, out, _ = run_cli(["construct", "girth", "--input", path], capsys)
    assert code == 0
    assert json.loads(out) == {"girth": None}


def test_construct_target_regime_violation(files, capsys):
    code, _, err = run_cli(
        ["construct", "target", "--input", files["rooted"],
         "--m", "12", "--n", "4", "--ell", "6", "--regime", "local"],
        capsys,
    )
    assert code == 4
    assert "divisible by 5" in err


def test_construct_validate_coloring(files, capsys):
    comp = gl.graphon_to_json(gl.complement(gl.graphon_from_json(
        json.load(open(files["two"]))
    )))
    path = files["dir"] + "/comp.json"
    with open(path, "w") as fh:
        json.dump(comp, fh)
    code, out, _ = run_cli(
        ["construct", "validate-coloring", "--coloring", files["two"], path], capsys
    )
    assert code == 0
    assert json.loads(out) == {"valid": True}
    code, _, _ = run_cli(
        ["construct", "validate-coloring", "--coloring", files["two"], files["two"]],
        capsys,
    )
    assert code == 2


def test_verify_lemma(files, capsys):
    inputs = files["dir"] + "/inst.json"
    with open(inputs, "w") as fh:
        json.dump({
            "w": gl.graphon_to_json(gl.StepGraphon.constant(0.6)),
            "m": 2, "n": 2,
        }, fh)
    code, out, _ = run_cli(
        ["verify", "lemma", "--lemma", "kmn_c4", "--inputs", inputs], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True


def test_verify_omega_alpha(files, capsys):
    code, out, _ = run_cli(
        ["verify", "omega-alpha", "--delta", "0.1", "--rmax", "3"], capsys
    )
    assert code == 0
    table = json.loads(out)["table"]
    assert table[0] == {"r": 1, "omega": 1.0, "alpha": 1.0}
    assert table[2]["alpha"] == pytest.approx(0.01)


def test_suite_exit_zero(files, capsys):
    code, out, _ = run_cli(
        ["suite", "--seed", "1", "--trials", "5", "--lemmas", "cs_p3,even_cycle"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert [d["lemma"] for d in data] == ["cs_p3", "even_cycle"]
    assert all(d["failures"] == 0 for d in data)


def test_search_requires_seed(files, capsys):
    code, _, err = run_cli(["search", "--graph", files["k3"]], capsys)
    assert code == 4
    assert "seed" in err


def test_search_value_only(files, capsys):
    code, out, _ = run_cli(
        ["search", "--graph", files["k3"], "--graphon", files["half"], "--value-only"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["value"] == pytest.approx(0.25)
    assert data["margin"] == pytest.approx(0.0, abs=1e-12)


def test_regime(files, capsys):
    code, out, _ = run_cli(
        ["regime", "--rooted", files["rooted"], "--graphon", files["half"],
         "--m", "10", "--n", "4", "--ell", "5", "--regime", "multicolor"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["conclusion_holds"] is True


def test_indep_ratio(files, capsys):
    sparse = gl.graphon_to_json(gl.StepGraphon(
        np.array([0.3, 0.7]), np.array([[0.0, 0.5], [0.5, 0.9]])
    ))
    path = files["dir"] + "/sparse.json"
    with open(path, "w") as fh:
        json.dump(sparse, fh)
    code, out, _ = run_cli(
        ["indep-ratio", "--graphon", path, "--delta", "0.05", "--resolution", "8"],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["alpha"] >= 0.3 - 1e-9


def test_malformed_json_exit_4(files, capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "edges": [[0,1]')
    code, _, err = run_cli(["density", "--graph", str(bad), "--graphon", files["half"]], capsys)
    assert code == 4
    assert "line" in err and "column" in err


def test_budget_exit_3(files, capsys):
    code, _, err = run_cli(
        ["density", "--graph", files["k4"], "--graphon", files["two"],
         "--budget", "5"],
        capsys,
    )
    assert code == 3
    assert "budget" in err.lower()


def test_unknown_subcommand_exit_4(files, capsys):
    code, _, _ = run_cli(["frobnicate"], capsys)
    assert code == 4


def test_byte_stable_output(files, capsys):
    args = ["spectrum", "--input", files["two"], "--estimates"]
    _, out1, _ = run_cli(args, capsys)
    _, out2, _ = run_cli(args, capsys)
    assert out1 == out2


def test_canonical_json_formatting():
    text = canonical_json({"b": 0.5, "a": [1, True, None, "x"]})
    assert text == '{"a": [1, true, null, "x"], "b": 0.5}\n'
    assert canonical_json(1 / 3) == "0.33333333333333331\n"


def test_output_file(files, capsys, tmp_path):
    dest = tmp_path / "out.json"
    code = cli.main([
        "--output", str(dest),
        "density", "--graph", files["k3"], "--graphon", files["half"],
    ])
    capsys.readouterr()
    assert code == 0
    assert json.loads(dest.read_text()) == {"t": 0.125}


def test_registry_covers_every_operation_once():
    expected_ops = {
        # graph core
        "construct_family", "rooted_sum", "girth", "chromatic_number",
        "edge_subgraph", "build_witness", "build_target", "classify_subset",
        "hom_density_graph", "random_high_girth", "is_locally_dense",
        # graphon core
        "density", "hom_density", "rooted_density", "restrict", "complement",
        "deviation", "subset_expansion", "independence_ratio",
        "validate_coloring",
        # spectral
        "decompose", "cycle_density_spectral", "path_density_spectral",
        "project", "estimate_report",
        # cut norm
        "cut_norm_exact", "sandwich_check", "c4_deviation_bound",
        "counting_lemma_bound",
        # lemma oracle
        "verify", "random_suite", "omega_alpha", "omega_alpha_check",
        # commonality
        "commonality_value", "k_common_value", "gradient",
        "search_counterexample", "theorem_regime_check",
    }
    assert set(OPERATION_SUBCOMMANDS) == expected_ops
    assert set(OPERATION_SUBCOMMANDS.values()) <= set(SUBCOMMANDS)
    parser = build_parser()
    sub_actions = [
        a for a in parser._actions
        if isinstance(a, type(parser._subparsers._group_actions[0]))
    ]
    available = set(sub_actions[0].choices)
    assert available == set(SUBCOMMANDS)


def test_console_script_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "graphonlab.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "density" in result.stdout

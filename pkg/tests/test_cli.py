import json
import subprocess
import sys

import numpy as np
import pytest

from treekummer import __version__, io
from treekummer.cli import main


@pytest.fixture
def spec_file(tmp_path):
    def write(obj, name="spec.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write


@pytest.fixture
def chain3_file(spec_file):
    return spec_file(io.fixture("chain3"), "chain3.json")


@pytest.fixture
def daisy_file(spec_file):
    return spec_file(io.fixture("daisy"), "daisy.json")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_tree_ok(capsys, daisy_file):
    code, out, _ = run_cli(capsys, "check-tree", "--spec", daisy_file)
    assert code == 0
    res = json.loads(out)["result"]
    assert res["leaves"] == [0, 1, 2] and res["degrees"] == [1, 1, 1, 3]


def test_check_tree_cycle_names_edge(capsys, spec_file):
    path = spec_file({"vertices": 3, "edges": [[0, 1], [1, 2], [2, 0]]})
    code, _, err = run_cli(capsys, "check-tree", "--spec", path)
    assert code == 2
    assert "CycleDetected" in err and "[0, 2]" in err


@pytest.mark.parametrize(
    "text, needle",
    [("{not json", "line 1"), (json.dumps({"vertices": 2, "edges": [[0, 5]]}), "vertex 5")],
)
def test_malformed_specs(capsys, spec_file, text, needle):
    code, _, err = run_cli(capsys, "check-tree", "--spec", spec_file(text))
    assert code == 2 and needle in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "check-tree", "--spec", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_bad_flag_value_exits_2(capsys, chain3_file):
    with pytest.raises(SystemExit) as exc:
        main(["gof", "--spec", chain3_file, "--level", "1.5"])
    assert exc.value.code == 2


def test_subtrees(capsys, daisy_file):
    code, out, _ = run_cli(capsys, "subtrees", "--spec", daisy_file)
    assert code == 0 and json.loads(out)["result"]["count"] == 11


def test_transform_and_inverse(capsys, chain3_file):
    code, out, _ = run_cli(capsys, "transform", "--spec", chain3_file, "--root", "1", "--values", "1,1,1")
    assert code == 0 and json.loads(out)["result"]["output"] == [1.0, 4.0, 1.0]
    code, out, _ = run_cli(capsys, "transform", "--spec", chain3_file, "--values", "3,2,1", "--inverse")
    res = json.loads(out)["result"]
    assert res["output"] == pytest.approx([1, 1, 1], rel=1e-15)
    assert res["log_jacobian_inverse"] == pytest.approx(-np.log(6), rel=1e-15)


def test_transform_wrong_length(capsys, chain3_file):
    code, _, err = run_cli(capsys, "transform", "--spec", chain3_file, "--values", "1,1")
    assert code == 2 and "--values" in err


def test_root_out_of_range(capsys, chain3_file):
    code, _, _ = run_cli(capsys, "density", "--spec", chain3_file, "--root", "3", "--values", "1,1,1")
    assert code == 2


def test_identity_command(capsys, chain3_file):
    code, out, _ = run_cli(capsys, "identity", "--spec", chain3_file, "--trials", "1000", "--seed", "7")
    rep = json.loads(out)
    assert code == 0
    assert rep["result"]["max_identity_rel_err"] <= 1e-12
    assert rep["seed"] == 7 and rep["version"] == __version__ and len(rep["spec_hash"]) == 64


def test_identity_failure_exit_1(capsys, daisy_file):
    # rounding error is nonzero somewhere in 200 trials, so 1e-30 cannot be met
    code, out, _ = run_cli(capsys, "identity", "--spec", daisy_file, "--trials", "200", "--seed", "1", "--tol", "1e-30")
    res = json.loads(out)["result"]
    assert code == 1
    assert 0 < res["max_identity_rel_err"] <= 1e-12


def test_density(capsys, chain3_file):
    code, out, _ = run_cli(capsys, "density", "--spec", chain3_file, "--values", "1,1,1")
    res = json.loads(out)["result"]
    assert code == 0
    assert res["log_density_unnorm"] == -6 == res["log_density_unnorm_bruteforce"]
    assert np.isfinite(res["log_density"])


def test_a_zero_exits_2(capsys, spec_file):
    spec = io.fixture("chain3")
    spec["a"][1] = 0
    code, _, err = run_cli(capsys, "verify-all", "--spec", spec_file(spec), "--seed", "1")
    assert code == 2 and "a[1]" in err


def test_missing_field_exits_2(capsys, spec_file):
    spec = io.fixture("daisy")
    del spec["a"]
    code, _, err = run_cli(capsys, "sample", "--spec", spec_file(spec), "--seed", "1")
    assert code == 2 and '"a"' in err


def test_sample_csv_and_sidecar(capsys, daisy_file, tmp_path):
    out = tmp_path / "draws.csv"
    code, _, _ = run_cli(capsys, "sample", "--spec", daisy_file, "--n", "50", "--seed", "11", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "0,1,2,3" and len(lines) == 51
    meta = json.loads((tmp_path / "draws.meta.json").read_text())
    assert meta["seed"] == 11 and meta["spec_hash"] == io.spec_hash(io.fixture("daisy"))
    data = io.read_samples_csv(out)
    assert data.shape == (50, 4) and np.all(data > 0)


def test_sample_to_stdout(capsys, chain3_file):
    code, out, _ = run_cli(capsys, "sample", "--spec", chain3_file, "--n", "3", "--seed", "2")
    assert code == 0 and out.splitlines()[0] == "0,1,2" and len(out.splitlines()) == 4


def test_auto_seed_is_logged_and_recorded(capsys, chain3_file):
    code, out, err = run_cli(capsys, "identity", "--spec", chain3_file, "--trials", "3")
    seed = json.loads(out)["seed"]
    assert code == 0 and isinstance(seed, int) and str(seed) in err


def test_gof_and_indep_on_chain(capsys, chain3_file):
    code, out, _ = run_cli(capsys, "gof", "--spec", chain3_file, "--n", "20000", "--seed", "3", "--roots", "leaves")
    assert code == 0 and json.loads(out)["result"]["pass"]
    code, out, _ = run_cli(capsys, "indep", "--spec", chain3_file, "--n", "5000", "--seed", "3", "--roots", "0")
    assert code == 0


def test_indep_raw_flags_dependence(capsys, spec_file):
    spec = {"tree": {"vertices": 2, "edges": [[0, 1]]}, "a": [1, 1], "c_diag": [1, 1],
            "c_edge": [{"edge": [0, 1], "value": 5}]}
    code, out, _ = run_cli(capsys, "indep", "--spec", spec_file(spec), "--n", "20000", "--seed", "4", "--raw")
    assert code == 1 and not json.loads(out)["result"]["pass"]


def test_hv15_demo(capsys):
    code, out, _ = run_cli(capsys, "hv15-demo", "--a", "2", "--b", "1", "--c", "1", "--n", "100000", "--seed", "7")
    res = json.loads(out)["result"]
    assert code == 0 and len(res["reports"]) == 3
    assert all(r["decision"] == "accept" for r in res["reports"])


def test_hv15_demo_rejects_bad_parameter(capsys):
    code, _, _ = run_cli(capsys, "hv15-demo", "--a", "0", "--b", "1", "--c", "1", "--seed", "7")
    assert code == 2


def test_out_file_matches_stdout(capsys, chain3_file, tmp_path):
    target = tmp_path / "rep.json"
    code, out, _ = run_cli(capsys, "subtrees", "--spec", chain3_file, "--out", str(target))
    assert code == 0 and target.read_text() == out


def _subprocess(*argv, cwd):
    return subprocess.run([sys.executable, "-m", "treekummer", *argv], capture_output=True, cwd=cwd, check=False)


def test_byte_identical_outputs(chain3_file, tmp_path):
    a = _subprocess("identity", "--spec", chain3_file, "--trials", "50", "--seed", "9", cwd=tmp_path)
    b = _subprocess("identity", "--spec", chain3_file, "--trials", "50", "--seed", "9", cwd=tmp_path)
    assert a.returncode == 0 and a.stdout == b.stdout
    for name in ("x.csv", "y.csv"):
        r = _subprocess("sample", "--spec", chain3_file, "--n", "200", "--seed", "5", "--out", str(tmp_path / name),
                        cwd=tmp_path)
        assert r.returncode == 0
    assert (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()
    assert (tmp_path / "x.meta.json").read_bytes() == (tmp_path / "y.meta.json").read_bytes()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["chain3", "daisy"])
def test_verify_all_fixtures(capsys, spec_file, name):
    path = spec_file(io.fixture(name), f"{name}.json")
    code, out, _ = run_cli(capsys, "verify-all", "--spec", path, "--n", "100000", "--seed", "2026")
    res = json.loads(out)["result"]
    assert code == 0, res["matrix"]
    assert all(res["matrix"].values())
    if name == "daisy":
        # every leaf is used as a root for the independence battery
        assert {"0", "1", "2"} <= set(res["details"]["independence"]["reports"])

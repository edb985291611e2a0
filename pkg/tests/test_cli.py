import json
import subprocess
import sys

import pytest

from speciallie.cli import CACHE_ENV, DiskCache, code_hash, main
from speciallie.derivations import DerElement, named_element


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def run_json(capsys, *argv):
    rc, out, _ = run(capsys, *argv, "--format", "json")
    return rc, json.loads(out)


def computed(res):
    return [r["computed"] for r in res["rows"]]


def test_rank_b(capsys):
    rc, res = run_json(capsys, "rank", "--space", "b", "--n", "3", "--k", "1..4")
    assert rc == 0 and res["schema"] == 1
    assert computed(res) == [3, 1, 6, 6]
    assert all(r["match"] for r in res["rows"])


def test_rank_grB(capsys):
    rc, res = run_json(capsys, "rank", "--space", "grB", "--n", "4", "--k", "1..4")
    assert rc == 0 and computed(res) == [6, 4, 10, 21]


def test_rank_L(capsys):
    rc, res = run_json(capsys, "rank", "--space", "L", "--n", "2", "--k", "6")
    assert rc == 0 and computed(res) == [9]


@pytest.mark.parametrize("space", ["p", "C", "S", "wedge"])
def test_rank_other_spaces_match(capsys, space):
    rc, res = run_json(capsys, "rank", "--space", space, "--n", "2..3", "--k", "2..4")
    assert rc == 0 and res["ok"]


def test_rank_tsv_has_header(capsys):
    rc, out, _ = run(capsys, "rank", "--space", "S", "--n", "3", "--k", "2", "--format", "tsv")
    lines = out.strip().splitlines()
    assert lines[0] == "n\tk\tformula\tcomputed\tmatch"
    assert lines[1] == "3\t2\t6\t6\ttrue"


def test_output_is_deterministic(capsys, tmp_path):
    argv = ["rank", "--space", "b", "--n", "3..4", "--k", "1..4", "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--cache-dir", str(tmp_path))
    _, c, _ = run(capsys, *argv, "--cache-dir", str(tmp_path))
    _, d, _ = run(capsys, *argv, "--parallelism", "2")
    assert a == b == c == d


def test_cache_env_and_flag_precedence(capsys, tmp_path, monkeypatch):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    monkeypatch.setenv(CACHE_ENV, str(env_dir))
    run(capsys, "rank", "--space", "L", "--n", "2", "--k", "3")
    assert (env_dir / code_hash() / "L_n2_k3.json").exists()
    run(capsys, "rank", "--space", "L", "--n", "2", "--k", "4", "--cache-dir", str(flag_dir))
    assert (flag_dir / code_hash() / "L_n2_k4.json").exists()
    assert not (env_dir / code_hash() / "L_n2_k4.json").exists()


def test_corrupt_cache_is_recomputed(capsys, tmp_path):
    cache = DiskCache(tmp_path)
    cache.put("b", 3, 3, 6)
    (tmp_path / code_hash() / "b_n3_k3.json").write_text("{not json")
    rc, res = run_json(capsys, "rank", "--space", "b", "--n", "3", "--k", "3", "--cache-dir", str(tmp_path))
    assert rc == 0 and computed(res) == [6]
    assert DiskCache(tmp_path).get("b", 3, 3) == 6


def test_verify_small_bounds_all_pass(capsys):
    rc, res = run_json(capsys, "verify", "--suite", "paper", "--max-n", "3", "--max-k", "4")
    assert rc == 0 and res["ok"]


def test_verify_small_bounds_without_the_wedge_display(capsys):
    _, res = run_json(capsys, "verify", "--suite", "paper", "--max-n", "3", "--max-k", "4")
    others = [c for c in res["claims"] if c["id"] != "wedge-display"]
    assert all(c["status"] in ("pass", "skip") for c in others)


def test_verify_single_claim_by_tag(capsys):
    rc, res = run_json(capsys, "verify", "--suite", "paper", "--claim", "T-John-2", "--n", "4")
    assert rc == 0
    assert [c["status"] for c in res["claims"]] == ["pass"]


def test_verify_props(capsys):
    rc, res = run_json(capsys, "verify", "--suite", "props", "--seed", "42")
    assert rc == 0
    assert {c["id"] for c in res["claims"]} == {"lie-antisymmetry-jacobi", "der-antisymmetry-jacobi",
                                                "trace-equivariance", "special-closure", "leibniz"}


def test_verify_failure_exit_code(capsys):
    rc, res = run_json(capsys, "verify", "--claim", "wedge-display", "--max-n", "3", "--max-k", "4")
    assert rc == 1 and not res["ok"]


def test_element_b5(capsys):
    rc, res = run_json(capsys, "element", "b5", "1", "2", "1", "3", "4", "--n", "4")
    assert rc == 0
    assert res["n"] == 4 and res["k"] == 4 and res["special"]
    assert res["partition"] == [2, 1, 1, 1]
    assert DerElement.from_json(res["element"]) == named_element("b5", (1, 2, 1, 3, 4), 4)


def test_element_n3_mt5(capsys):
    rc, res = run_json(capsys, "element", "n3", "1", "2", "3", "--n", "3", "--trace", "mt5")
    assert rc == 0 and res["traces"]["symmetric"]["terms"] == []


def test_element_t12(capsys):
    rc, out, _ = run(capsys, "element", "t", "1", "2", "--n", "2")
    assert rc == 0
    assert "x1*(x)[x2,x1] + x2*(x)[x1,x2]" in out


def test_element_rejects_collisions(capsys):
    rc, _, err = run(capsys, "element", "t", "1", "1", "--n", "2")
    assert rc == 2 and "distinct" in err


def test_element_rejects_wrong_trace_degree(capsys):
    rc, _, err = run(capsys, "element", "t", "1", "2", "--n", "2", "--trace", "mt5")
    assert rc == 2 and "degree" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rank", "--space", "Q", "--n", "2", "--k", "1"])
    assert exc.value.code == 2
    rc, _, _ = run(capsys, "rank", "--space", "b", "--n", "1", "--k", "1")
    assert rc == 2
    rc, _, _ = run(capsys, "rank", "--space", "b", "--n", "x", "--k", "1")
    assert rc == 2
    rc, _, _ = run(capsys, "verify", "--claim", "no-such-claim")
    assert rc == 2


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "speciallie", "rank", "--space", "L", "--n", "2", "--k", "6",
                        "--format", "tsv"], capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stdout.splitlines()[1].split("\t")[3] == "9"

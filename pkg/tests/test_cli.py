import re

import pytest

from langshift.cli import main
from langshift.patterns import parse_pattern_text


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "domino": "1 2\n33\n",
        "square": "2 2\n33\n33\n",
        "grid": "3 4\n0123\n3210\n1111\n",
        "bad": "2 2\n33\n3x\n",
        "bg1": "background 1\n1 1\n3\n",
    }.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    """Split a preimage listing into pattern records plus the summary line."""
    body, summary = text.rsplit("count=", 1)
    chunks = [c for c in body.strip("\n").split("\n\n") if c]
    return [parse_pattern_text(c)[0] for c in chunks], "count=" + summary


def test_evolve_domino_growth(files, capsys):
    code, out, _ = run(["evolve", files["domino"], "--params", "2,2", "--mode", "embedded", "--steps", "10"], capsys)
    assert "fixed=false steps=10" in out
    arrivals = dict(kv.split(":") for kv in re.search(r"all3_arrivals=(\S+)", out).group(1).split(","))
    assert int(arrivals["1"]) <= 2
    assert code == 4


@pytest.mark.parametrize("mode", ["embedded", "torus"])
def test_evolve_identity(files, capsys, mode):
    code, out, _ = run(["evolve", files["grid"], "--params", "9,9", "--mode", mode], capsys)
    assert code == 0 and "fixed=true steps=0" in out


def test_evolve_trace(files, capsys):
    code, out, _ = run(["evolve", files["grid"], "--params", "1,1", "--mode", "torus", "--trace"], capsys)
    assert code == 0
    assert out.startswith("step 0\n3 4\n0123\n")


def test_evolve_parse_error(files, capsys):
    code, _, err = run(["evolve", files["bad"], "--params", "2,2"], capsys)
    assert code == 2 and "line 3" in err


def test_evolve_non_quiescent(files, capsys):
    code, _, err = run(["evolve", files["domino"], "--params", "0,2"], capsys)
    assert code == 3 and "quiescent" in err
    code, _, _ = run(["evolve", files["bg1"], "--params", "0,2"], capsys)
    assert code == 3


def test_bad_params_is_parse_error(files, capsys):
    code, _, _ = run(["evolve", files["domino"], "--params", "12,2"], capsys)
    assert code == 2


def test_preimage_garden_of_eden(capsys):
    code, out, _ = run(["preimage", "--literal", "0", "--params", "0,0"], capsys)
    assert code == 0 and out == "count=0 complete=true nodes=0\n"


def test_preimage_listing_round_trips(capsys):
    code, out, _ = run(["preimage", "--literal", "3", "--params", "9,9"], capsys)
    pats, summary = records(out)
    assert code == 0
    assert summary.startswith("count=65536 complete=true")
    assert len(pats) == 65536 and len(set(pats)) == 65536
    assert all(p.shape == (3, 3) and p[1, 1] == 3 for p in pats)


def test_preimage_budget_exit(files, capsys):
    code, out, _ = run(["preimage", files["square"], "--params", "2,2", "--max-nodes", "300"], capsys)
    assert code == 4 and "complete=false nodes=300" in out


def test_preimage_motif_check_fails_for_domino_law(files, capsys):
    code, out, _ = run(["preimage", files["square"], "--params", "2,2", "--check-motif", "33",
                        "--count-only", "--max-nodes", "200000"], capsys)
    assert "motif-check=fail" in out
    wit = parse_pattern_text(out.split("witness\n", 1)[1])[0]
    assert not wit.contains(parse_pattern_text("1 2\n33\n")[0])
    assert code == 4


def test_preimage_motif_check_pass(capsys):
    code, out, _ = run(["preimage", "--literal", "3", "--params", "9,9", "--check-motif", "3"], capsys)
    assert code == 0 and "motif-check=pass" in out


def test_verify_props(capsys):
    code, out, _ = run(["verify", "--prop", "P1"], capsys)
    assert code == 0 and out.startswith("PROP P1 verified params=(9,9) seed=0")
    code, out, _ = run(["verify", "--prop", "P6", "--params", "4,4"], capsys)
    assert code == 0 and out.count("PROP P6 verified") == 2
    code, out, _ = run(["verify", "--prop", "P5a", "--params", "2,2"], capsys)
    assert code == 0 and "arrivals r0=0 r1=2" in out


def test_verify_refuted_exit(capsys):
    code, out, _ = run(["verify", "--prop", "P1", "--params", "8,9", "--samples", "10"], capsys)
    assert code == 5 and "PROP P1 refuted" in out and "witness neighbourhood" in out


def test_walk(files, capsys):
    code, out, _ = run(["walk", files["square"], "--params", "2,2", "--depth", "3", "--seed", "7",
                        "--expand-nodes", "100000"], capsys)
    assert code == 0
    headers = [ln for ln in out.splitlines() if ln.startswith("node ")]
    assert len(headers) >= 4 and all("motif-33=" in h for h in headers)
    assert out.splitlines()[-1].startswith("walk reached=true depth=3")


def test_walk_root_only(capsys):
    code, out, _ = run(["walk", "--literal", "0", "--params", "0,0", "--depth", "2", "--seed", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("node 0 depth=0 parent=- status=empty-list preimages=0")


def test_walk_requires_seed(files, capsys):
    code, _, _ = run(["walk", files["square"], "--params", "2,2", "--depth", "1"], capsys)
    assert code == 2


def test_walk_budget_exit(files, capsys):
    code, out, _ = run(["walk", files["square"], "--params", "2,2", "--depth", "3", "--seed", "7",
                        "--max-nodes", "500"], capsys)
    assert code == 4 and "walk reached=false" in out


def test_out_file(files, tmp_path, capsys):
    target = tmp_path / "res.txt"
    code, out, _ = run(["preimage", "--literal", "0", "--params", "1,1", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    pats, summary = records(target.read_text())
    assert summary.startswith("count=1 ") and pats[0].cells == bytes(9)


def test_render(files, capsys):
    code, out, _ = run(["render", files["domino"], "--params", "2,2", "--steps", "1"], capsys)
    assert code == 0
    assert "t=1 3x2\n##\n##\n##\n" in out

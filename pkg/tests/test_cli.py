import json

import pytest

from ghforge.cli import RunConfig, main
from ghforge.fileio import InputError, dumps, load_space, load_triple, round_sig, save_space
from ghforge.metric import MetricError, triangle_space


@pytest.fixture
def files(tmp_path, gap_boundary):
    paths = []
    for k, A in enumerate(gap_boundary, 1):
        p = tmp_path / f"A{k}.json"
        save_space(A, p)
        paths.append(str(p))
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_fileio_roundtrip(tmp_path):
    A = triangle_space(3, 4, 5)
    save_space(A, tmp_path / "a.json")
    assert (load_space(tmp_path / "a.json").d == A.d).all()
    (tmp_path / "a.csv").write_text("0,5,4\n5,0,3\n4,3,0\n")
    assert (load_space(tmp_path / "a.csv").d == A.d).all()
    (tmp_path / "t.json").write_text('{"triple": [1, 2, 3]}')
    assert load_triple(tmp_path / "t.json") == (1, 2, 3)


def test_fileio_errors(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(InputError):
        load_space(tmp_path / "bad.json")
    (tmp_path / "tri.json").write_text("[[0, 1, 5], [1, 0, 1], [5, 1, 0]]")
    with pytest.raises(MetricError, match="tri.json"):
        load_space(tmp_path / "tri.json")
    with pytest.raises(FileNotFoundError):
        load_space(tmp_path / "missing.json")
    (tmp_path / "t.json").write_text("[1, 2]")
    with pytest.raises(InputError):
        load_triple(tmp_path / "t.json")


def test_round_sig():
    assert round_sig(1 / 3) == 0.333333333333
    assert dumps({"b": 1.0, "a": [2 / 3]}) == '{"a": [0.666666666667], "b": 1.0}'


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("nope")
    with pytest.raises(ValueError):
        RunConfig("dist", tolerance=0)


def test_dist(capsys, files):
    code, out, _ = run(capsys, "dist", files[0], files[1], "--method", "oracle")
    assert code == 0 and out["result"]["value"] == 2.0
    assert out["version"] and out["config"]["options"]["method"] == "oracle"


def test_mf_and_certify(capsys, files):
    code, out, _ = run(capsys, "mf", *files)
    assert code == 0 and out["result"]["total"] == 3.0
    code, out, _ = run(capsys, "certify", "--legs", "1,1,1", *files)
    assert out["result"]["status"] == "impossible"
    assert out["result"]["forced_distances"] == [31.0, 20.0, 10.0]


def test_cone_commands(capsys, files, tmp_path):
    code, out, _ = run(capsys, "cone", "embed", files[0])
    assert out["result"]["point"] == [4.0, 11.0, 14.75]
    trip = []
    for k, t in enumerate([(8, 22, 29.5), (11.5, 18, 29), (12, 21.5, 33)]):
        p = tmp_path / f"B{k}.json"
        p.write_text(json.dumps(list(t)))
        trip.append(str(p))
    code, out, _ = run(capsys, "cone", "star", "--triple", *trip)
    assert code == 0 and out["result"]["total"] == 6.0 and out["result"]["certified"]


def test_smt_and_budget(capsys, files):
    code, out, _ = run(capsys, "smt", "--n", "4", *files)
    assert code == 0 and out["result"]["exact"]["total"] == 3.5
    code, out, _ = run(capsys, "smt", "--n", "4", "--budget", "3", *files)
    assert code == 2 and out["status"] == "budget_exhausted"
    assert out["result"]["exact"]["kind"] == "heuristic_upper"


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "3", "3")
    assert code == 0 and len(out["result"]["correspondences"]) == 15
    code, out, _ = run(capsys, "enumerate", "2", "2", "--all")
    assert len(out["result"]["correspondences"]) == 7


def test_bad_inputs_exit_1(capsys, files, tmp_path):
    code, _, err = run(capsys, "dist", files[0], str(tmp_path / "nope.json"))
    assert code == 1 and "not found" in err
    bad = tmp_path / "bad.json"
    bad.write_text("[[0, 1], [2, 0]]")
    code, _, err = run(capsys, "dist", files[0], str(bad))
    assert code == 1 and "bad.json" in err


def test_ssr_search_output(capsys, tmp_path):
    out = tmp_path / "r.jsonl"
    code = main(["ssr-search", "--seeds", "0..2", "--random-starts", "1", "--out", str(out)])
    assert code == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert lines[0]["type"] == "header" and lines[-1]["type"] == "summary"
    assert sum(l["type"] == "record" for l in lines) == 3
    first = out.read_text()
    main(["ssr-search", "--seeds", "0..2", "--random-starts", "1", "--out", str(out), "--workers", "2"])
    capsys.readouterr()
    a, b = first.splitlines(), out.read_text().splitlines()
    assert a[1:] == b[1:]  # only the header (workers) differs

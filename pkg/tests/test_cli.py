import json

import pytest

from rainbowlab.cli import MANIFEST_TAG, extract_manifest, main

# one small invocation per subcommand; each must replay byte for byte
RUNS = {
    "gen": ["gen", "--n", "7", "--p", "0.5", "--c", "8", "--seed", "3"],
    "solve": None,  # needs an input file, built in the test
    "pipeline": ["pipeline", "--n", "40", "--p", "0.5", "--c", "60", "--seed", "1"],
    "coupling": ["coupling", "--family", "rainbow-pm", "--n", "4", "--p", "0.4", "--c", "3",
                 "--trials", "2000", "--members", "5"],
    "coupling-steps": ["coupling", "--family", "rainbow-pm", "--n", "4", "--p", "0.4", "--c",
                       "3", "--sweep-i", "--q", "0.4"],
    "sweep": ["sweep", "--n", "7", "--p", "0.5", "0.9", "--c", "8", "--trials", "20"],
    "pack": ["pack", "--n", "7", "--p", "1.0", "--c", "21", "--seed", "2"],
    "rich": ["rich", "--family", "rainbow-pm", "--n", "4", "--p", "0.5", "--eps", "0.5",
             "--trials", "2000", "--members", "5"],
    "audit": ["audit", "--n", "120", "--p", "0.05", "--c", "150", "--samples", "500"],
}


def _run(tmp_path, name, argv):
    out = tmp_path / f"{name}.out"
    code = main(argv + ["--out", str(out), "--workers", "1"])
    return code, out


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.cg"
    assert main(["gen", "--n", "7", "--p", "0.9", "--c", "21", "--seed", "5",
                 "--out", str(path)]) == 0
    return path


@pytest.mark.parametrize("name", sorted(RUNS))
def test_replay_identical(tmp_path, graph_file, name, capsys):
    argv = RUNS[name] or ["solve", "--input", str(graph_file)]
    code, out = _run(tmp_path, name, argv)
    assert code in (0, 1)
    capsys.readouterr()
    assert main(["replay", str(out), "--check"]) == 0
    assert capsys.readouterr().out == "identical\n"
    again = tmp_path / "again.out"
    assert main(["replay", str(out), "--out", str(again)]) == code
    assert again.read_bytes() == out.read_bytes()


def test_text_outputs_carry_manifest_line(tmp_path):
    _, out = _run(tmp_path, "gen", RUNS["gen"])
    text = out.read_text()
    assert text.startswith(MANIFEST_TAG)
    man = extract_manifest(text)
    assert man["command"] == "gen" and man["args"]["n"] == 7
    assert "out" not in man["args"] and "workers" not in man["args"]


def test_json_outputs_are_sorted(tmp_path):
    _, out = _run(tmp_path, "coupling", RUNS["coupling"])
    doc = json.loads(out.read_text())
    assert set(doc) == {"manifest", "result"}
    assert doc["result"]["consistent"] is True


def test_replay_detects_edited_input(tmp_path, graph_file):
    code, out = _run(tmp_path, "solve", ["solve", "--input", str(graph_file)])
    graph_file.write_text(graph_file.read_text() + "# edited\n")
    assert main(["replay", str(out), "--check"]) == 65


def test_replay_detects_tampered_output(tmp_path, capsys):
    _, out = _run(tmp_path, "gen", RUNS["gen"])
    out.write_text(out.read_text() + "0 1 0\n")
    assert main(["replay", str(out), "--check"]) == 1
    assert "DIFFERENT" in capsys.readouterr().out


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("RAINBOWLAB_SEED", "3")
    argv = [a for a in RUNS["gen"] if a not in ("--seed", "3")]
    _, a = _run(tmp_path, "a", argv)
    monkeypatch.delenv("RAINBOWLAB_SEED")
    _, b = _run(tmp_path, "b", RUNS["gen"])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("argv", [
    [],
    ["gen", "--n", "5"],
    ["nonsense"],
    ["sweep", "--n", "7", "--trials", "2", "--c", "8"],
    ["sweep", "--n", "7", "--trials", "2", "--p", "0.5", "--c", "8", "--eps", "0.1"],
    ["solve", "--input", "x.cg", "--kind", "ell"],
    ["gen", "--n", "5", "--p", "0.5", "--c", "3", "--workers", "0"],
])
def test_usage_errors(argv, capsys, tmp_path):
    if argv[:2] == ["solve", "--input"]:
        path = tmp_path / "x.cg"
        main(["gen", "--n", "6", "--p", "0.5", "--c", "3", "--k", "3", "--out", str(path)])
        argv = ["solve", "--input", str(path), "--kind", "ell"]
    assert main(argv) == 64


def test_bad_seed_env_is_usage_error(monkeypatch):
    monkeypatch.setenv("RAINBOWLAB_SEED", "abc")
    assert main(["gen", "--n", "5", "--p", "0.5", "--c", "3"]) == 64


@pytest.mark.parametrize("argv", [
    ["gen", "--n", "5", "--p", "1.5", "--c", "3"],
    ["gen", "--n", "5", "--p", "0.5", "--c", "0"],
    ["coupling", "--family", "rainbow-hc", "--n", "6", "--p", "0.3", "--c", "7",
     "--richness", "4", "--trials", "100", "--members", "5"],
    ["coupling", "--family", "rainbow-pm", "--n", "5", "--p", "0.3", "--c", "3"],
    ["pipeline", "--n", "9", "--p", "0.5", "--c", "30", "--config", "BAD"],
])
def test_domain_errors(argv, capsys, tmp_path):
    cfg = tmp_path / "bad.conf"
    cfg.write_text("bogus = 1\n")
    code = main([str(cfg) if a == "BAD" else a for a in argv])
    assert code == 65, capsys.readouterr().err


def test_malformed_input_is_data_error(tmp_path):
    bad = tmp_path / "bad.cg"
    bad.write_text("not a graph\n")
    assert main(["solve", "--input", str(bad)]) == 65


def test_missing_input_is_io_error(tmp_path):
    assert main(["solve", "--input", str(tmp_path / "missing.cg")]) == 74
    assert main(["gen", "--n", "5", "--p", "0.5", "--c", "3",
                 "--out", str(tmp_path / "no" / "dir" / "g.cg")]) == 74


def test_pipeline_failure_exit_code(capsys):
    assert main(["pipeline", "--n", "9", "--p", "0.5", "--c", "3"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["trace"]["stage"] == "partition"


def test_solve_exit_codes(tmp_path, capsys):
    empty = tmp_path / "e.cg"
    main(["gen", "--n", "6", "--p", "0.0", "--c", "6", "--out", str(empty)])
    assert main(["solve", "--input", str(empty)]) == 1
    assert json.loads(capsys.readouterr().out)["result"]["status"] == "none"
    dense = tmp_path / "d.cg"
    main(["gen", "--n", "14", "--p", "0.6", "--c", "14", "--seed", "1", "--out", str(dense)])
    assert main(["solve", "--input", str(dense), "--node-limit", "3"]) == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert capsys.readouterr().out.startswith("rainbowlab ")

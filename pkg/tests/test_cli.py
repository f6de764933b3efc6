import json

import pytest

from gamedecomp import gameio
from gamedecomp.cli import main
from gamedecomp.spectral import InteractionGraph


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def game_dir(tmp_path, capsys):
    assert run(capsys, "generate", "--seed", 7, "--out-dir", tmp_path)[0] == 0
    return tmp_path


def test_generate_writes_game_and_truth(game_dir):
    game = gameio.read_game(game_dir / "game.json")
    assert game.n_players == 24 and game.choices == (2,) * 24
    truth = gameio.read_json(game_dir / "game.truth.json")
    assert len(truth["groups"]) == 2


def test_analyze_cut_solve_pipeline(game_dir, capsys):
    code, out, _ = run(capsys, "analyze", game_dir / "game.json", "--seed", 7,
                       "--out-dir", game_dir, "--format", "json", "--sweep", "2,10")
    assert code == 0
    summary = json.loads(out)
    assert summary["rows_per_matrix"] == 240 and summary["deviation_pairs"] == 240
    assert summary["recovery"]["false_positives"] == 0
    assert [p["L"] for p in summary["sweep"]] == [2, 10]
    for name in ("matrices.json", "matrices.txt", "eigen.json", "graph.json", "graph.dot",
                 "recovery.json"):
        assert (game_dir / name).exists()

    code, out, _ = run(capsys, "cut", "--out-dir", game_dir, "--sweep", "0,1,5")
    assert code == 0 and "components:" in out
    cut = gameio.read_json(game_dir / "cut_graph.json")
    graph = gameio.read_json(game_dir / "graph.json")
    assert len(cut["components"]) >= len(graph["components"])

    code, out, err = run(capsys, "solve", game_dir / "game.json", "--graph",
                         game_dir / "graph.json", "--out-dir", game_dir, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["evals"] == sum(2 ** len(c) for c in graph["components"])
    assert "brute_force" not in doc  # 2^24 profiles is past the exhaustive cap


def test_solve_linear_fit_matches_brute_force(tmp_path, capsys):
    files = __import__("gamedecomp.experiments", fromlist=["exp2"]).exp2(3)
    (tmp_path / "game.json").write_text(files["game.json"])
    code, out, err = run(capsys, "solve", tmp_path / "game.json", "--decomposition",
                         "linear-fit", "--members", "0,1;0,2", "--out-dir", tmp_path,
                         "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["evals"] == 18 and doc["brute_force"]["evals"] == 27
    assert set(map(tuple, doc["profiles"])) <= set(map(tuple, doc["brute_force"]["profiles"]))
    if doc["status"] != "found":
        assert "warning" in err
    # the written decomposition can be fed back in
    code, out2, _ = run(capsys, "solve", tmp_path / "game.json", "--decomposition",
                        tmp_path / "decomposition.json", "--out-dir", tmp_path, "--format", "json")
    assert code == 0 and json.loads(out2)["profiles"] == doc["profiles"]


def test_byte_identical_reruns(tmp_path, capsys):
    outputs = []
    for k in range(2):
        d = tmp_path / str(k)
        run(capsys, "generate", "--seed", 3, "--players", 8, "--out-dir", d)
        run(capsys, "analyze", d / "game.json", "--seed", 3, "--out-dir", d)
        run(capsys, "cut", "--out-dir", d)
        outputs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outputs[0] == outputs[1]


def test_threads_do_not_change_results(tmp_path, capsys):
    run(capsys, "generate", "--seed", 5, "--players", 10, "--out-dir", tmp_path)
    run(capsys, "analyze", tmp_path / "game.json", "--out-dir", tmp_path / "a")
    run(capsys, "analyze", tmp_path / "game.json", "--out-dir", tmp_path / "b", "--threads", 4)
    assert (tmp_path / "a" / "eigen.json").read_bytes() == (tmp_path / "b" / "eigen.json").read_bytes()


def test_degenerate_one_player_one_choice(tmp_path, capsys):
    assert run(capsys, "generate", "--players", 1, "--choices", 1, "--groups", 1,
               "--out-dir", tmp_path)[0] == 0
    assert run(capsys, "analyze", tmp_path / "game.json", "--out-dir", tmp_path)[0] == 0
    code, out, _ = run(capsys, "solve", tmp_path / "game.json", "--graph",
                       tmp_path / "graph.json", "--out-dir", tmp_path, "--format", "json")
    assert code == 0 and json.loads(out)["profiles"] == [[0]]


def test_repro_both_experiments(tmp_path, capsys):
    code, out, _ = run(capsys, "repro", "exp1", "--out-dir", tmp_path / "e1")
    assert code == 0 and "Experiment 1" in out
    assert (tmp_path / "e1" / "cut_graph.dot").exists()
    code, out, _ = run(capsys, "repro", "exp2", "--out-dir", tmp_path / "e2")
    assert code == 0 and "Experiment 2" in out
    assert (tmp_path / "e2" / "brute_force.json").exists()


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "repro", "exp1", "--samples", 0, "--out-dir", tmp_path)[0] == 2
    assert run(capsys, "generate", "--players", 0, "--out-dir", tmp_path)[0] == 2
    assert run(capsys, "cut", "--tau-lambda", -1, "--out-dir", tmp_path)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])
    assert exc.value.code == 2


def test_io_errors(tmp_path, capsys):
    assert run(capsys, "analyze", tmp_path / "missing.json", "--out-dir", tmp_path)[0] == 4
    assert run(capsys, "cut", "--out-dir", tmp_path)[0] == 4
    bad = tmp_path / "bad.json"
    bad.write_text('{"choices": [2, 2],\n  oops}')
    code, _, err = run(capsys, "analyze", bad, "--out-dir", tmp_path)
    assert code == 4 and "line 2" in err


def test_capacity_error(tmp_path, capsys):
    run(capsys, "generate", "--players", 21, "--groups", 1, "--out-dir", tmp_path)
    chain = InteractionGraph(21, {(j, j + 1): 1.0 for j in range(20)})
    (tmp_path / "chain.json").write_text(gameio.dumps(chain.to_dict()))
    code, _, err = run(capsys, "solve", tmp_path / "game.json", "--graph", tmp_path / "chain.json",
                       "--verify-samples", 50, "--out-dir", tmp_path)
    assert code == 3 and "error" in err

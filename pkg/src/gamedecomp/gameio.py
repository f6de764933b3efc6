"""JSON file formats for games, ground-truth graphs and decompositions."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from gamedecomp.core import TableGame, UtilityTable
from gamedecomp.errors import GameFormatError


def _number(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def loads(text: str, what: str = "file"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"invalid JSON in {what}: {exc.msg}", exc.lineno) from exc


def read_json(path) -> dict:
    path = Path(path)
    return loads(path.read_text(), str(path))


def game_to_dict(game: TableGame, seed: int | None = None) -> dict:
    doc = {
        "players": game.n_players,
        "choices": list(game.choices),
        "tables": [
            {"player": t.player, "scope": list(t.scope),
             "values": [_number(v) for v in t.values.ravel()]}
            for t in game.tables
        ],
    }
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def game_from_dict(doc: dict) -> TableGame:
    if not isinstance(doc, dict):
        raise GameFormatError("game file must hold a JSON object")
    for key in ("players", "choices", "tables"):
        if key not in doc:
            raise GameFormatError(f"game file is missing the '{key}' field")
    n = doc["players"]
    choices = doc["choices"]
    if not isinstance(n, int) or n < 1:
        raise GameFormatError(f"'players' must be a positive integer, got {n!r}")
    if not isinstance(choices, list) or len(choices) != n:
        raise GameFormatError(f"'choices' must list {n} choice counts")
    tables = []
    for k, entry in enumerate(doc["tables"]):
        try:
            tables.append(UtilityTable.from_flat(
                int(entry["player"]), [int(j) for j in entry["scope"]],
                entry["values"], choices))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise GameFormatError(f"table {k}: {exc}") from exc
    try:
        return TableGame(choices, tables)
    except ValueError as exc:
        raise GameFormatError(str(exc)) from exc


def write_game(path, game: TableGame, seed: int | None = None):
    Path(path).write_text(dumps(game_to_dict(game, seed)))


def read_game(path) -> TableGame:
    return game_from_dict(read_json(path))


def truth_to_dict(influencer_sets, groups=None) -> dict:
    from gamedecomp.spectral import connected_components

    n = len(influencer_sets)
    edges = [{"from": j, "to": i} for i, s in enumerate(influencer_sets) for j in s if j != i]
    comps = connected_components(n, [(e["from"], e["to"]) for e in edges])
    doc = {"players": n, "influencers": [list(s) for s in influencer_sets],
           "edges": edges, "components": [list(c) for c in comps]}
    if groups is not None:
        doc["groups"] = [list(g) for g in groups]
    return doc


def truth_edges(doc: dict) -> set[tuple[int, int]]:
    return {(int(e["from"]), int(e["to"])) for e in doc["edges"]}


def truth_path_for(game_path) -> Path:
    """Ground-truth file written next to a generated game."""
    game_path = Path(game_path)
    return game_path.with_name(game_path.stem + ".truth.json")


def array_to_list(a: np.ndarray):
    return [[float(x) for x in row] for row in np.asarray(a)]

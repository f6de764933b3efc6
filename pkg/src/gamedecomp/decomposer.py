"""Decompositions of a game into partial games.

Two routes. Graph components give partial games that defer to the parent
oracle. Linear decompositions split each player's utility into a weighted
sum of part tables, ``u_i(a) = sum_k b_k u_{k,i}(a_{N_k})`` over the parts
``k`` that contain ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from gamedecomp.core import EXHAUSTIVE_CAP, Game, PartialGame, make_partial_game
from gamedecomp.errors import GameFormatError, NegativeWeightError
from gamedecomp.spectral import InteractionGraph

N_VERIFY_SAMPLES = 10**5

KINDS = ("exact-component", "approximate-cut", "linear")


def _check_cover(game: Game, member_sets: Iterable[Sequence[int]]):
    covered = set()
    for m in member_sets:
        covered.update(m)
    if covered != set(game.players):
        missing = sorted(set(game.players) - covered)
        extra = sorted(covered - set(game.players))
        raise ValueError(f"parts must cover exactly the game's players "
                         f"(missing {missing}, unknown {extra})")


@dataclass
class Decomposition:
    game: Game
    parts: list[PartialGame]
    kind: str

    def __post_init__(self):
        if not self.parts:
            raise ValueError("a decomposition needs at least one part")
        if self.kind not in KINDS:
            raise ValueError(f"unknown decomposition kind {self.kind!r}")
        _check_cover(self.game, (p.members for p in self.parts))

    @property
    def member_sets(self) -> list[tuple[int, ...]]:
        return [p.members for p in self.parts]


@dataclass
class LinearDecomposition:
    """Parts with nonnegative weights; ``residual`` is set by verification."""

    game: Game
    parts: list[PartialGame]
    weights: list[float]
    residual: float | None = None
    tolerance: float | None = None

    def __post_init__(self):
        if not self.parts:
            raise ValueError("a decomposition needs at least one part")
        if len(self.weights) != len(self.parts):
            raise ValueError("one weight per part is required")
        self.weights = [float(b) for b in self.weights]
        if any(b < 0 for b in self.weights):
            raise NegativeWeightError(
                f"weights must be nonnegative, got {self.weights}")
        _check_cover(self.game, (p.members for p in self.parts))

    @property
    def member_sets(self) -> list[tuple[int, ...]]:
        return [p.members for p in self.parts]

    @property
    def verified(self) -> bool:
        return self.residual is not None and self.residual <= self.tolerance

    @property
    def feasible(self) -> bool:
        return self.verified

    def combined_utility(self, player: int, profile) -> float:
        total = 0.0
        for b, part in zip(self.weights, self.parts):
            if player in part.members:
                total += b * part.utility(player, part.restrict(profile))
        return total

    def to_dict(self) -> dict:
        parts = []
        for part in self.parts:
            tables = [{"player": i, "scope": list(part.members),
                       "values": [float(x) for x in part.table(i).ravel()]}
                      for i in part.members]
            parts.append({"members": list(part.members), "tables": tables})
        return {"parts": parts, "weights": list(self.weights), "residual": self.residual}

    @classmethod
    def from_dict(cls, game: Game, doc: dict) -> LinearDecomposition:
        try:
            parts = []
            for entry in doc["parts"]:
                members = [int(j) for j in entry["members"]]
                tables = {}
                for t in entry["tables"]:
                    if [int(j) for j in t["scope"]] != sorted(members):
                        raise GameFormatError(
                            f"table scope {t['scope']} differs from part members {members}")
                    tables[int(t["player"])] = np.asarray(t["values"], dtype=float)
                parts.append(PartialGame.from_tables(game, members, tables))
            weights = doc.get("weights", [1.0] * len(parts))
        except (KeyError, TypeError) as exc:
            raise GameFormatError(f"malformed decomposition: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, (GameFormatError, NegativeWeightError)):
                raise
            raise GameFormatError(f"malformed decomposition: {exc}") from exc
        return cls(game, parts, weights)


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    tolerance: float
    n_profiles: int
    exhaustive: bool
    worst_player: int | None = None
    worst_profile: tuple[int, ...] | None = None

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def decompose_by_components(game: Game, graph: InteractionGraph) -> Decomposition:
    """One parent-backed partial game per weak component of ``graph``."""
    if graph.n_players != game.n_players:
        raise ValueError(f"graph has {graph.n_players} players, game has {game.n_players}")
    kind = "approximate-cut" if graph.cut_edges else "exact-component"
    parts = [make_partial_game(game, comp) for comp in graph.components]
    return Decomposition(game, parts, kind)


def as_linear(decomposition: Decomposition) -> LinearDecomposition:
    """Unit-weight linear decomposition with the same parts."""
    return LinearDecomposition(decomposition.game, list(decomposition.parts),
                               [1.0] * len(decomposition.parts))


def profile_set(game: Game, profiles=None, cap: int = EXHAUSTIVE_CAP,
                n_samples: int = N_VERIFY_SAMPLES, seed: int = 0):
    """``(profiles, exhaustive)``: all profiles when the game is small, else a uniform sample."""
    if profiles is not None:
        return [game.check_profile(a) for a in profiles], False
    if game.size <= cap:
        return list(game.profiles()), True
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, np.asarray(game.choices), size=(n_samples, game.n_players))
    return [tuple(row) for row in draws.tolist()], False


def _evaluate(game: Game, profiles) -> np.ndarray:
    return np.array([game.utilities(a) for a in profiles]).reshape(len(profiles), game.n_players)


def _predict(candidate: LinearDecomposition, P: np.ndarray) -> np.ndarray:
    """Combined utility of every player at every row of ``P``."""
    game = candidate.game
    pred = np.zeros((len(P), game.n_players))
    for b, part in zip(candidate.weights, candidate.parts):
        # tabulate a part once unless that costs more than direct lookups
        tabulate = part.tables is not None or part.size <= len(P)
        idx = _flat_index(P, part.members, game.choices) if tabulate else None
        for i in part.members:
            if tabulate:
                pred[:, i] += b * part.table(i).ravel()[idx]
            else:
                pred[:, i] += b * np.array([part.utility(i, part.restrict(a)) for a in P])
    return pred


def _residual(U: np.ndarray, profiles, candidate: LinearDecomposition, exhaustive: bool):
    P = np.asarray(profiles, dtype=np.int64).reshape(len(profiles), candidate.game.n_players)
    err = np.abs(U - _predict(candidate, P))
    scale = float(np.abs(U).max(initial=0.0))
    tolerance = 1e-9 * (1.0 + scale)
    if err.size == 0 or err.max() == 0.0:
        return ResidualReport(0.0, tolerance, len(profiles), exhaustive)
    row, player = np.unravel_index(int(np.argmax(err)), err.shape)
    return ResidualReport(float(err[row, player]), tolerance, len(profiles), exhaustive,
                          int(player), tuple(int(x) for x in P[row]))


def verify_linear(game: Game, candidate: LinearDecomposition, profiles=None,
                  cap: int = EXHAUSTIVE_CAP, n_samples: int = N_VERIFY_SAMPLES,
                  seed: int = 0) -> ResidualReport:
    """Largest gap between the game and the weighted sum of parts.

    Checks every profile when the game has at most ``cap`` of them, otherwise
    ``n_samples`` uniform ones (or exactly ``profiles`` when given). Records
    the residual and tolerance on ``candidate``.
    """
    if any(b < 0 for b in candidate.weights):
        raise NegativeWeightError(f"weights must be nonnegative, got {candidate.weights}")
    if candidate.game is not game and candidate.game.choices != game.choices:
        raise ValueError("decomposition was built for a different game")
    profiles, exhaustive = profile_set(game, profiles, cap, n_samples, seed)
    report = _residual(_evaluate(game, profiles), profiles, candidate, exhaustive)
    candidate.residual = report.residual
    candidate.tolerance = report.tolerance
    return report


def _flat_index(profiles: np.ndarray, members, choices) -> np.ndarray:
    idx = np.zeros(len(profiles), dtype=np.int64)
    for j in members:
        idx = idx * choices[j] + profiles[:, j]
    return idx


def fit_linear(game: Game, member_sets: Sequence[Sequence[int]], profiles=None,
               cap: int = EXHAUSTIVE_CAP, n_samples: int = N_VERIFY_SAMPLES,
               seed: int = 0) -> LinearDecomposition:
    """Least-squares split of every utility over the given member sets.

    For each player ``i`` the tables ``f_{k,i}`` of the parts containing ``i``
    minimise ``sum_a (u_i(a) - sum_k f_{k,i}(a_{N_k}))^2`` with unit weights.
    The split is unique only up to functions moved between parts; the
    minimum-norm solution is taken and then every table after the first is
    shifted to zero mean, its mean added to the first. The returned
    decomposition carries its residual; ``feasible`` is false when that
    residual exceeds the tolerance.
    """
    member_sets = [tuple(sorted(set(int(j) for j in m))) for m in member_sets]
    if not member_sets or any(not m for m in member_sets):
        raise ValueError("member sets must be nonempty")
    _check_cover(game, member_sets)
    profiles, exhaustive = profile_set(game, profiles, cap, n_samples, seed)
    P = np.asarray(profiles, dtype=np.int64).reshape(len(profiles), game.n_players)
    U = _evaluate(game, profiles)
    sizes = [int(np.prod([game.choices[j] for j in m])) for m in member_sets]
    tables: list[dict[int, np.ndarray]] = [{} for _ in member_sets]

    for i in game.players:
        ks = [k for k, m in enumerate(member_sets) if i in m]
        offsets = np.cumsum([0] + [sizes[k] for k in ks])
        cols = np.stack([offsets[n] + _flat_index(P, member_sets[k], game.choices)
                         for n, k in enumerate(ks)], axis=1)
        rows = np.repeat(np.arange(len(P)), len(ks))
        design = sp.csr_matrix((np.ones(cols.size), (rows, cols.ravel())),
                               shape=(len(P), int(offsets[-1])))
        normal = (design.T @ design).toarray()
        rhs = design.T @ U[:, i]
        coef = np.linalg.lstsq(normal, rhs, rcond=None)[0]
        pieces = [coef[offsets[n]:offsets[n + 1]].copy() for n in range(len(ks))]
        for piece in pieces[1:]:
            shift = piece.mean()
            piece -= shift
            pieces[0] += shift
        for k, piece in zip(ks, pieces):
            tables[k][i] = piece

    parts = [PartialGame.from_tables(game, m, t) for m, t in zip(member_sets, tables)]
    fitted = LinearDecomposition(game, parts, [1.0] * len(parts))
    report = _residual(U, profiles, fitted, exhaustive)
    fitted.residual = report.residual
    fitted.tolerance = report.tolerance
    return fitted

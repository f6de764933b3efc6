"""Normal-form games over index choice sets, partial profiles and partial games.

Players are integers ``0..N-1`` and player ``i`` picks a choice index in
``range(choices[i])``. A strategy profile is a plain tuple of choice indices.
Utilities are supplied by an oracle ``oracle(player, profile) -> float`` that
the game treats as a black box; every call is counted.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

EXHAUSTIVE_CAP = 10**6

Profile = tuple[int, ...]
Oracle = Callable[[int, Profile], float]


class EvalCounter:
    """Monotone counter safe under concurrent increments."""

    def __init__(self):
        self._value = 0
        self._lock = threading.Lock()

    def add(self, n=1):
        with self._lock:
            self._value += n

    def reset(self):
        with self._lock:
            self._value = 0

    @property
    def value(self):
        return self._value


def _profile_space(choices: Sequence[int]) -> Iterator[Profile]:
    return itertools.product(*(range(c) for c in choices))


class Game:
    """A finite game whose utilities are only reachable through an oracle."""

    def __init__(self, choices: Sequence[int], oracle: Oracle):
        choices = tuple(int(c) for c in choices)
        if not choices:
            raise ValueError("a game needs at least one player")
        if any(c < 1 for c in choices):
            raise ValueError(f"every player needs at least one choice, got {choices}")
        self.choices = choices
        self._oracle = oracle
        self._evals = EvalCounter()
        self._profile_evals = EvalCounter()

    @property
    def n_players(self) -> int:
        return len(self.choices)

    @property
    def players(self) -> range:
        return range(self.n_players)

    @property
    def size(self) -> int:
        """Number of joint strategy profiles."""
        return math.prod(self.choices)

    @property
    def eval_count(self) -> int:
        """Utility evaluations, one per (player, profile) pair requested."""
        return self._evals.value

    @property
    def profile_eval_count(self) -> int:
        """Oracle invocations, counting a whole utility vector as one."""
        return self._profile_evals.value

    def reset_evals(self):
        self._evals.reset()
        self._profile_evals.reset()

    def check_profile(self, profile: Sequence[int]) -> Profile:
        profile = tuple(int(a) for a in profile)
        if len(profile) != self.n_players:
            raise ValueError(
                f"profile has {len(profile)} entries, game has {self.n_players} players")
        for i, (a, c) in enumerate(zip(profile, self.choices)):
            if not 0 <= a < c:
                raise ValueError(f"choice {a} of player {i} outside range({c})")
        return profile

    def utility(self, player: int, profile: Profile) -> float:
        self._evals.add()
        self._profile_evals.add()
        return float(self._oracle(player, profile))

    def utilities(self, profile: Profile) -> np.ndarray:
        """Utility vector of all players at one profile."""
        self._evals.add(self.n_players)
        self._profile_evals.add()
        return np.array([float(self._oracle(i, profile)) for i in self.players])

    def profiles(self) -> Iterator[Profile]:
        return _profile_space(self.choices)


@dataclass(frozen=True)
class UtilityTable:
    """Utility of ``player`` as a dense table over the choices of ``scope``.

    ``values`` has one axis per scope player, in ascending player order, so
    its C-order flattening is the row-major layout of the JSON game file.
    """

    player: int
    scope: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        scope = tuple(int(j) for j in self.scope)
        if list(scope) != sorted(set(scope)):
            raise ValueError(f"table scope must be strictly ascending, got {scope}")
        values = np.asarray(self.values, dtype=float)
        if values.ndim != len(scope):
            raise ValueError(
                f"table of player {self.player} has {values.ndim} axes for scope {scope}")
        values.setflags(write=False)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)
        # plain-Python lookup: much faster than numpy scalar indexing
        strides = [math.prod(values.shape[k + 1:]) for k in range(values.ndim)]
        object.__setattr__(self, "_lookup", (tuple(zip(scope, strides)), values.ravel().tolist()))

    def __call__(self, profile: Profile) -> float:
        pairs, flat = self._lookup
        k = 0
        for j, s in pairs:
            k += profile[j] * s
        return flat[k]

    @classmethod
    def from_flat(cls, player, scope, flat, choices):
        scope = tuple(scope)
        shape = tuple(choices[j] for j in scope)
        flat = np.asarray(flat, dtype=float)
        if flat.size != math.prod(shape):
            raise ValueError(
                f"table of player {player} has {flat.size} values, scope {list(scope)} "
                f"needs {math.prod(shape)}")
        return cls(player, scope, flat.reshape(shape))


class TableGame(Game):
    """Game whose utility of player ``i`` is one table over a scope of players."""

    def __init__(self, choices: Sequence[int], tables: Iterable[UtilityTable]):
        tables = sorted(tables, key=lambda t: t.player)
        n = len(choices)
        if [t.player for t in tables] != list(range(n)):
            raise ValueError("exactly one utility table per player is required")
        for t in tables:
            if any(not 0 <= j < n for j in t.scope):
                raise ValueError(f"table of player {t.player} names unknown players")
            shape = tuple(int(choices[j]) for j in t.scope)
            if t.values.shape != shape:
                raise ValueError(
                    f"table of player {t.player} has shape {t.values.shape}, expected {shape}")
        self.tables = tuple(tables)
        super().__init__(choices, lambda i, a: self.tables[i](a))

    @property
    def scopes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(t.scope for t in self.tables)

    def effective_influencers(self) -> tuple[tuple[int, ...], ...]:
        """Per player, the scope members whose choice actually changes the table.

        A random table can by chance be constant along a declared scope axis;
        such a player is not an influencer.
        """
        out = []
        for t in self.tables:
            out.append(tuple(j for axis, j in enumerate(t.scope)
                             if np.any(np.diff(t.values, axis=axis) != 0)))
        return tuple(out)


@dataclass(frozen=True)
class PartialProfile:
    """Choices of the players in ``support``; entries align with ``support``."""

    support: tuple[int, ...]
    choices: tuple[int, ...]

    def __post_init__(self):
        if len(self.support) != len(self.choices):
            raise ValueError("support and choices must have equal length")

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.support, self.choices))

    def restrict(self, support: Iterable[int]) -> PartialProfile:
        lookup = self.as_dict()
        support = tuple(sorted(set(support)))
        missing = [j for j in support if j not in lookup]
        if missing:
            raise ValueError(f"players {missing} are not in the support {list(self.support)}")
        return PartialProfile(support, tuple(lookup[j] for j in support))

    def extend(self, n_players: int, fill: int = 0) -> Profile:
        """Full profile agreeing with this one, other players set to ``fill``."""
        full = [fill] * n_players
        for j, a in zip(self.support, self.choices):
            full[j] = a
        return tuple(full)


def extract_partial(profile: Sequence[int], support: Iterable[int]) -> PartialProfile:
    """Restrict a full profile to the players in ``support`` (sorted ascending)."""
    support = tuple(sorted(set(int(j) for j in support)))
    unknown = [j for j in support if not 0 <= j < len(profile)]
    if unknown:
        raise ValueError(f"support names unknown players {unknown}")
    return PartialProfile(support, tuple(int(profile[j]) for j in support))


class PartialGame:
    """A game on a subset of a parent's players.

    ``utility(player, choices)`` takes the members' choices as a tuple aligned
    with ``members``. Partial games built by :func:`make_partial_game` defer to
    the parent oracle; those built by :meth:`from_tables` carry their own
    utility tables and never touch the parent.
    """

    def __init__(self, parent: Game, members: Iterable[int],
                 oracle: Callable[[int, Profile], float]):
        members = tuple(sorted(set(int(j) for j in members)))
        if not members:
            raise ValueError("a partial game needs at least one member")
        unknown = [j for j in members if not 0 <= j < parent.n_players]
        if unknown:
            raise ValueError(f"members {unknown} are not players of the parent game")
        self.parent = parent
        self.members = members
        self.choices = tuple(parent.choices[j] for j in members)
        self._index = {j: k for k, j in enumerate(members)}
        self._oracle = oracle
        self._evals = EvalCounter()
        self.tables: dict[int, np.ndarray] | None = None

    @classmethod
    def from_tables(cls, parent: Game, members: Iterable[int],
                    tables: Mapping[int, np.ndarray]) -> PartialGame:
        members = tuple(sorted(set(int(j) for j in members)))
        shape = tuple(parent.choices[j] for j in members)
        frozen = {}
        for j in members:
            if j not in tables:
                raise ValueError(f"missing utility table for member {j}")
            values = np.array(tables[j], dtype=float).reshape(shape)
            values.setflags(write=False)
            frozen[j] = values
        pg = cls(parent, members, lambda i, a: frozen[i][a])
        pg.tables = frozen
        return pg

    def __repr__(self):
        return f"PartialGame(members={list(self.members)})"

    @property
    def size(self) -> int:
        return math.prod(self.choices)

    @property
    def eval_count(self) -> int:
        return self._evals.value

    def reset_evals(self):
        self._evals.reset()

    def position(self, player: int) -> int:
        return self._index[player]

    def utility(self, player: int, choices: Sequence[int] | PartialProfile) -> float:
        if isinstance(choices, PartialProfile):
            choices = choices.restrict(self.members).choices
        if player not in self._index:
            raise ValueError(f"player {player} is not a member of {self!r}")
        self._evals.add()
        return float(self._oracle(player, tuple(choices)))

    def profiles(self) -> Iterator[Profile]:
        return _profile_space(self.choices)

    def restrict(self, profile: Sequence[int]) -> Profile:
        """Members' choices taken from a full profile of the parent."""
        return tuple(int(profile[j]) for j in self.members)

    def table(self, player: int) -> np.ndarray:
        """Dense utility table of one member over the members' joint space."""
        if self.tables is not None:
            return self.tables[player]
        return np.array([self.utility(player, a) for a in self.profiles()]).reshape(self.choices)


def make_partial_game(game: Game, members: Iterable[int]) -> PartialGame:
    """Partial game on ``members`` backed by the parent oracle.

    Non-members are held at choice 0. The result is exact only when
    ``members`` contains every influencer of every member; otherwise
    utilities depend on that arbitrary extension.
    """
    members = tuple(sorted(set(int(j) for j in members)))
    n = game.n_players

    def oracle(player, choices):
        return game.utility(player, PartialProfile(members, choices).extend(n))

    return PartialGame(game, members, oracle)

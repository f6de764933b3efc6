"""Random test games with a known interaction structure.

All randomness comes from numpy's PCG64 bit generator seeded through
``numpy.random.default_rng(seed)``, so a seed pins the game bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from gamedecomp.core import TableGame, UtilityTable


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a random table game.

    ``influencer_sets[i]`` lists the players whose choices enter the utility
    of player ``i`` and must contain ``i`` itself. Payoffs are drawn i.i.d.
    uniformly from the integers of the closed ``payoff_range``.
    """

    n_players: int
    choices_per_player: int | tuple[int, ...]
    influencer_sets: tuple[tuple[int, ...], ...]
    payoff_range: tuple[int, int] = (0, 9)
    rng_seed: int = 0

    @property
    def choices(self) -> tuple[int, ...]:
        if isinstance(self.choices_per_player, int):
            return (self.choices_per_player,) * self.n_players
        return tuple(self.choices_per_player)

    def validate(self):
        if self.n_players < 1:
            raise ValueError("n_players must be positive")
        if len(self.choices) != self.n_players:
            raise ValueError("one choice count per player is required")
        if len(self.influencer_sets) != self.n_players:
            raise ValueError("one influencer set per player is required")
        for i, s in enumerate(self.influencer_sets):
            if i not in s:
                raise ValueError(f"influencer set of player {i} must contain {i}")
            if any(not 0 <= j < self.n_players for j in s):
                raise ValueError(f"influencer set of player {i} names unknown players")
        lo, hi = self.payoff_range
        if lo > hi:
            raise ValueError(f"empty payoff range {self.payoff_range}")


def generate_game(spec: GeneratorSpec) -> TableGame:
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    lo, hi = spec.payoff_range
    choices = spec.choices
    tables = []
    for i, scope in enumerate(spec.influencer_sets):
        scope = tuple(sorted(set(scope)))
        shape = tuple(choices[j] for j in scope)
        values = rng.integers(lo, hi + 1, size=shape).astype(float)
        tables.append(UtilityTable(i, scope, values))
    return TableGame(choices, tables)


def grouped_influencer_sets(n_players: int, n_groups: int = 2, min_influencers: int = 1,
                            max_influencers: int = 3, seed: int = 0):
    """Random interaction structure made of ``n_groups`` weakly connected groups.

    Players are shuffled and split into groups of near-equal size. Each group
    gets a random spanning tree with randomly oriented edges, then every
    player receives extra in-group influencers until it has at least
    ``min_influencers`` others (or the group runs out), never exceeding
    ``max_influencers``. Returns ``(influencer_sets, groups)``.
    """
    if n_players < 1 or n_groups < 1:
        raise ValueError("n_players and n_groups must be positive")
    n_groups = min(n_groups, n_players)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_players)
    groups = [sorted(int(j) for j in g) for g in np.array_split(order, n_groups)]
    others: list[set[int]] = [set() for _ in range(n_players)]

    for g in groups:
        members = [int(j) for j in rng.permutation(g)]
        for k in range(1, len(members)):
            child = members[k]
            parent = members[int(rng.integers(k))]
            src, dst = (parent, child) if rng.random() < 0.5 else (child, parent)
            if len(others[dst]) >= max_influencers:
                src, dst = dst, src
            others[dst].add(src)
        for i in g:
            candidates = [j for j in g if j != i and j not in others[i]]
            want = min(min_influencers, len(g) - 1) - len(others[i])
            if want > 0:
                extra = rng.choice(candidates, size=want, replace=False)
                others[i].update(int(j) for j in extra)

    sets = tuple(tuple(sorted(others[i] | {i})) for i in range(n_players))
    return sets, [tuple(g) for g in sorted(groups)]


def two_group_spec(seed: int, n_players: int = 24, choices: int = 2,
                   payoff_range=(0, 9), n_groups: int = 2) -> GeneratorSpec:
    """24 binary players in two groups of 12 with payoffs 0..9 by default."""
    sets, _ = grouped_influencer_sets(n_players, n_groups, seed=seed)
    return GeneratorSpec(n_players, choices, sets, tuple(payoff_range), seed)


@dataclass
class AdditiveInstance:
    """Game built as a weighted sum of part games, with the true parts kept."""

    game: TableGame
    member_sets: list[tuple[int, ...]]
    part_tables: list[dict[int, np.ndarray]]
    weights: list[float] = field(default_factory=list)


def additive_game(choices: Sequence[int], member_sets: Sequence[Sequence[int]],
                  weights: Sequence[float] | None = None, payoff_range=(0, 9),
                  seed: int = 0) -> AdditiveInstance:
    """Combined game ``u_i = sum_k b_k u_{k,i}`` of random integer part tables.

    Every member of every part gets a table over that part's joint choices.
    """
    choices = tuple(int(c) for c in choices)
    n = len(choices)
    member_sets = [tuple(sorted(set(m))) for m in member_sets]
    if set().union(*member_sets) != set(range(n)):
        raise ValueError("member sets must cover every player")
    weights = [1.0] * len(member_sets) if weights is None else [float(b) for b in weights]
    rng = np.random.default_rng(seed)
    lo, hi = payoff_range
    part_tables = []
    for members in member_sets:
        shape = tuple(choices[j] for j in members)
        part_tables.append({i: rng.integers(lo, hi + 1, size=shape).astype(float)
                            for i in members})

    tables = []
    for i in range(n):
        scope = tuple(sorted(set().union(*(m for m in member_sets if i in m))))
        total = np.zeros(tuple(choices[j] for j in scope))
        for b, members, part in zip(weights, member_sets, part_tables):
            if i not in members:
                continue
            # broadcast the part table onto the player's full scope
            expand = [scope.index(j) for j in members]
            view_shape = [1] * len(scope)
            for axis, j in zip(expand, members):
                view_shape[axis] = choices[j]
            total = total + b * part[i].reshape(view_shape)
        tables.append(UtilityTable(i, scope, total))
    return AdditiveInstance(TableGame(choices, tables), member_sets, part_tables, weights)

"""Pure Nash equilibria of games and partial games, and consistent equilibria.

Best responses are weak: a profile is an equilibrium when no player gains
more than ``tol`` (default 0) by a unilateral switch, so ties qualify.
Profiles are always returned sorted lexicographically.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gamedecomp.core import EXHAUSTIVE_CAP, Game, PartialGame, make_partial_game
from gamedecomp.decomposer import LinearDecomposition
from gamedecomp.errors import CapacityError, NegativeWeightError

FOUND = "found"
NONE_EXIST = "none-exist-for-this-decomposition"


@dataclass
class EquilibriumSet:
    members: tuple[int, ...]
    profiles: list[tuple[int, ...]]
    evals_used: int
    profiles_scanned: int
    game_ref: object = field(default=None, repr=False, compare=False)

    def __contains__(self, profile) -> bool:
        return tuple(profile) in set(self.profiles)

    def __len__(self):
        return len(self.profiles)


def _as_partial(game) -> PartialGame:
    return make_partial_game(game, game.players) if isinstance(game, Game) else game


def enumerate_nash(pg: PartialGame | Game, tol: float = 0.0,
                   cap: int = EXHAUSTIVE_CAP) -> EquilibriumSet:
    """All pure equilibria of a partial game by one scan of its profile space.

    Each member's utility is tabulated over the joint space (one call per
    member per profile) and compared with its maximum along the member's own
    axis.
    """
    pg = _as_partial(pg)
    if pg.size > cap:
        raise CapacityError(pg.members, pg.size, cap)
    before = pg.eval_count
    m = len(pg.members)
    tensors = np.empty((m,) + pg.choices)
    for a in pg.profiles():
        for p, i in enumerate(pg.members):
            tensors[(p,) + a] = pg.utility(i, a)
    stable = np.ones(pg.choices, dtype=bool)
    for p in range(m):
        best = tensors[p].max(axis=p, keepdims=True)
        stable &= tensors[p] >= best - tol
    profiles = [tuple(int(x) for x in idx) for idx in np.argwhere(stable)]
    return EquilibriumSet(pg.members, profiles, pg.eval_count - before, pg.size, pg)


def satisfies(profile, pg: PartialGame, tol: float = 0.0) -> bool:
    """True when the restriction of a full profile is an equilibrium of ``pg``."""
    a = pg.restrict(profile)
    for p, i in enumerate(pg.members):
        current = pg.utility(i, a)
        for alt in range(pg.choices[p]):
            if alt == a[p]:
                continue
            deviation = a[:p] + (alt,) + a[p + 1:]
            if pg.utility(i, deviation) > current + tol:
                return False
    return True


def brute_force_nash(game: Game, tol: float = 0.0, cap: int = EXHAUSTIVE_CAP) -> EquilibriumSet:
    """Reference enumeration over the whole profile space.

    Deliberately plain loops over a payoff dictionary, kept apart from
    :func:`enumerate_nash` so the two can check each other.
    """
    if game.size > cap:
        raise CapacityError(tuple(game.players), game.size, cap)
    before = game.eval_count
    payoff = {}
    for a in game.profiles():
        payoff[a] = [game.utility(i, a) for i in game.players]
    found = []
    for a, values in payoff.items():
        is_nash = True
        for i in game.players:
            for alt in range(game.choices[i]):
                b = list(a)
                b[i] = alt
                if payoff[tuple(b)][i] > values[i] + tol:
                    is_nash = False
                    break
            if not is_nash:
                break
        if is_nash:
            found.append(a)
    return EquilibriumSet(tuple(game.players), sorted(found), game.eval_count - before,
                          game.size, game)


def best_response_gain(game: Game, profile) -> float:
    """Largest gain any single player gets by switching; 0 at an exact equilibrium."""
    profile = game.check_profile(profile)
    gain = 0.0
    for i in game.players:
        current = game.utility(i, profile)
        for alt in range(game.choices[i]):
            if alt != profile[i]:
                b = profile[:i] + (alt,) + profile[i + 1:]
                gain = max(gain, game.utility(i, b) - current)
    return gain


@dataclass
class ConsistencyResult:
    profiles: list[tuple[int, ...]]
    status: str
    part_equilibria: list[EquilibriumSet]
    profiles_scanned: int
    evals_used: int
    certification_evals: int
    rejected: list[tuple[int, ...]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"profiles": [list(a) for a in self.profiles], "status": self.status,
                "evals": self.profiles_scanned, "oracle_evals": self.evals_used,
                "certification_evals": self.certification_evals,
                "rejected": [list(a) for a in self.rejected],
                "parts": [{"members": list(s.members),
                           "equilibria": [list(a) for a in s.profiles],
                           "profiles_scanned": s.profiles_scanned}
                          for s in self.part_equilibria]}


def join_equilibria(part_sets: list[EquilibriumSet]) -> list[dict[int, int]]:
    """Merge partial equilibria that agree on every shared player."""
    assigned: set[int] = set()
    candidates: list[dict[int, int]] = [{}]
    for eqs in sorted(part_sets, key=len):
        shared = [j for j in eqs.members if j in assigned]
        pos = [eqs.members.index(j) for j in shared]
        by_key: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for prof in eqs.profiles:
            by_key.setdefault(tuple(prof[p] for p in pos), []).append(prof)
        merged = []
        for cand in candidates:
            for prof in by_key.get(tuple(cand[j] for j in shared), []):
                new = dict(cand)
                new.update(zip(eqs.members, prof))
                merged.append(new)
        candidates = merged
        assigned.update(eqs.members)
        if not candidates:
            break
    return candidates


def consistent_equilibria(decomp: LinearDecomposition, tol: float | None = None,
                          cap: int = EXHAUSTIVE_CAP,
                          require_verified: bool = True) -> ConsistencyResult:
    """Profiles whose restriction to every part is an equilibrium of that part.

    With nonnegative weights such profiles are equilibria of the combined
    game. Each one is still rechecked against the combined game by a
    unilateral-deviation scan; any that fail land in ``rejected``. Part
    ties are judged within ``tol``, by default the decomposition's
    verification tolerance.

    ``require_verified=False`` admits approximate decompositions, for which
    the join carries no guarantee and certification alone decides.
    """
    if any(b < 0 for b in decomp.weights):
        raise NegativeWeightError(f"weights must be nonnegative, got {decomp.weights}")
    if require_verified and not decomp.verified:
        raise ValueError("decomposition is not verified; run verify_linear first "
                         f"(residual {decomp.residual}, tolerance {decomp.tolerance})")
    game = decomp.game
    residual = decomp.residual if decomp.verified else 0.0
    if tol is not None:
        part_tol = tol
    elif decomp.verified and residual > 0.0:
        part_tol = decomp.tolerance
    else:
        part_tol = 0.0
    part_sets = [enumerate_nash(p, part_tol, cap) for p in decomp.parts]
    joined = join_equilibria(part_sets)
    profiles = sorted(tuple(c[i] for i in game.players) for c in joined)

    cert_tol = part_tol * sum(decomp.weights) + 2.0 * residual
    before = game.eval_count
    certified, rejected = [], []
    for a in profiles:
        (certified if best_response_gain(game, a) <= cert_tol else rejected).append(a)
    return ConsistencyResult(
        certified, FOUND if certified else NONE_EXIST, part_sets,
        sum(s.profiles_scanned for s in part_sets), sum(s.evals_used for s in part_sets),
        game.eval_count - before, rejected)

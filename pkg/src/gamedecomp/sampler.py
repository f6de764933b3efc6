"""Interaction matrices from single-player deviation samples.

For a subject player ``i`` the sample matrix ``X_i`` has ``N*L`` rows. Block
``j`` (rows ``j*L .. (j+1)*L-1``) holds, in column ``j`` only, the change in
``u_i`` when player ``j`` alone switches from ``a_j`` to a different random
choice at a uniformly random base profile ``a``. The interaction matrix is the
sample covariance ``(X - mean)^T (X - mean) / (N*L - 1)``.

Every ``(subject, j)`` block (or ``j`` block when harvesting) draws from its
own PCG64 stream seeded by ``SeedSequence(seed, spawn_key=...)``, so results
do not depend on thread count or block order. Longer runs extend shorter ones:
the first ``L`` samples of a block are the same for any larger ``L``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from gamedecomp.core import Game


@dataclass(frozen=True)
class SampleRecord:
    deviating_player: int
    base_profile: tuple[int, ...]
    deviated_profile: tuple[int, ...]
    delta: float


@dataclass
class InteractionMatrix:
    subject: int
    C: np.ndarray
    samples: np.ndarray
    samples_per_player: int
    records: list[SampleRecord] = field(default_factory=list, repr=False)

    @property
    def n_players(self) -> int:
        return self.C.shape[0]

    @property
    def sample_count(self) -> int:
        return self.samples.shape[0]

    def to_dict(self) -> dict:
        return {"subject": self.subject, "n": self.n_players, "L": self.samples_per_player,
                "C": [[float(x) for x in row] for row in self.C]}

    def to_text(self, precision: int = 4) -> str:
        """Aligned table for reading by eye; all-zero rows are kept."""
        width = precision + 7
        header = "      " + "".join(f"{j:>{width}d}" for j in range(self.n_players))
        lines = [f"C[{self.subject}]  (N={self.n_players}, L={self.samples_per_player})", header]
        for p, row in enumerate(self.C):
            lines.append(f"{p:>5d} " + "".join(f"{x:>{width}.{precision}f}" for x in row))
        return "\n".join(lines) + "\n"


def covariance_matrix(X: np.ndarray) -> np.ndarray:
    """Column covariance with divisor ``rows - 1``, mirrored to exact symmetry.

    All-zero columns of ``X`` give exactly zero rows and columns.
    """
    X = np.asarray(X, dtype=float)
    M = X.shape[0]
    if M < 2:
        raise ValueError("covariance needs at least two rows")
    centered = X - X.mean(axis=0)
    C = centered.T @ centered / (M - 1)
    return np.triu(C) + np.triu(C, 1).T


def _block_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _deviation_pairs(choices, j, L, rng):
    """``L`` random ``(a, b)`` pairs where ``b`` differs from ``a`` only at ``j``."""
    high = np.asarray(choices)
    for _ in range(L):
        a = rng.integers(0, high)
        b = a.copy()
        b[j] = (a[j] + rng.integers(1, choices[j])) % choices[j]
        yield tuple(int(x) for x in a), tuple(int(x) for x in b)


def _check_L(L):
    if L < 2:
        raise ValueError(f"need at least 2 samples per player, got L={L}")


def interaction_matrix(game: Game, subject: int, samples_per_player: int = 10,
                       seed: int = 0, keep_records: bool = False) -> InteractionMatrix:
    """Interaction matrix of one subject, following the per-subject procedure.

    Costs two utility evaluations of the subject per sample row. Players with
    a single choice cannot deviate; their block stays zero.
    """
    _check_L(samples_per_player)
    L = samples_per_player
    n = game.n_players
    if not 0 <= subject < n:
        raise ValueError(f"unknown subject player {subject}")
    X = np.zeros((n * L, n))
    records = []
    for j in game.players:
        if game.choices[j] < 2:
            continue
        rng = _block_rng(seed, subject, j)
        for l, (a, b) in enumerate(_deviation_pairs(game.choices, j, L, rng)):
            delta = game.utility(subject, b) - game.utility(subject, a)
            X[j * L + l, j] = delta
            if keep_records:
                records.append(SampleRecord(j, a, b, delta))
    return InteractionMatrix(subject, covariance_matrix(X), X, L, records)


def _harvest_block(game: Game, j: int, L: int, seed: int) -> np.ndarray:
    deltas = np.zeros((L, game.n_players))
    if game.choices[j] < 2:
        return deltas
    rng = _block_rng(seed, j)
    for l, (a, b) in enumerate(_deviation_pairs(game.choices, j, L, rng)):
        deltas[l] = game.utilities(b) - game.utilities(a)
    return deltas


def all_interaction_matrices(game: Game, samples_per_player: int = 10, seed: int = 0,
                             harvest: bool = True, threads: int = 1) -> list[InteractionMatrix]:
    """One interaction matrix per player.

    With ``harvest`` each deviation pair is evaluated once for the whole
    utility vector and its differences feed every subject's matrix, so the
    oracle sees ``2*N*L`` profiles in total. Without it every subject draws
    its own samples as :func:`interaction_matrix` does.
    """
    _check_L(samples_per_player)
    L = samples_per_player
    n = game.n_players
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        if not harvest:
            return list(pool.map(lambda i: interaction_matrix(game, i, L, seed), range(n)))
        blocks = list(pool.map(lambda j: _harvest_block(game, j, L, seed), range(n)))

    result = []
    for i in range(n):
        X = np.zeros((n * L, n))
        for j, deltas in enumerate(blocks):
            X[j * L:(j + 1) * L, j] = deltas[:, i]
        result.append(InteractionMatrix(i, covariance_matrix(X), X, L))
    return result

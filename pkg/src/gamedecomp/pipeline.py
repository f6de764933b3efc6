"""End-to-end analysis: sample, eigendecompose, build the graph, score it."""
from __future__ import annotations

import time
from dataclasses import dataclass

from gamedecomp.core import Game
from gamedecomp.sampler import InteractionMatrix, all_interaction_matrices
from gamedecomp.spectral import (DEFAULT_TAU_V, InfluencerReport, InteractionGraph,
                                 analyze_matrix, build_graph)


@dataclass
class Analysis:
    matrices: list[InteractionMatrix]
    reports: list[InfluencerReport]
    graph: InteractionGraph
    samples_per_player: int
    oracle_evals: int
    profile_evals: int
    seconds: float

    @property
    def rows_per_matrix(self) -> int:
        return self.matrices[0].sample_count

    @property
    def difference_samples(self) -> int:
        """Recorded utility differences over all subjects."""
        return sum(m.sample_count for m in self.matrices)

    @property
    def deviation_pairs(self) -> int:
        return self.profile_evals // 2


def analyze_game(game: Game, samples_per_player: int = 10, seed: int = 0,
                 tau_lambda: float | None = None, tau_v: float = DEFAULT_TAU_V,
                 harvest: bool = True, threads: int = 1) -> Analysis:
    start = time.perf_counter()
    evals0, profiles0 = game.eval_count, game.profile_eval_count
    matrices = all_interaction_matrices(game, samples_per_player, seed, harvest, threads)
    reports = [analyze_matrix(m, tau_lambda, tau_v) for m in matrices]
    graph = build_graph(reports)
    return Analysis(matrices, reports, graph, samples_per_player,
                    game.eval_count - evals0, game.profile_eval_count - profiles0,
                    time.perf_counter() - start)


@dataclass(frozen=True)
class Recovery:
    true_positives: int
    false_positives: int
    false_negatives: int

    @property
    def precision(self) -> float:
        found = self.true_positives + self.false_positives
        return 1.0 if found == 0 else self.true_positives / found

    @property
    def recall(self) -> float:
        actual = self.true_positives + self.false_negatives
        return 1.0 if actual == 0 else self.true_positives / actual

    @property
    def exact(self) -> bool:
        return self.false_positives == 0 and self.false_negatives == 0

    def to_dict(self) -> dict:
        return {"true_positives": self.true_positives, "false_positives": self.false_positives,
                "false_negatives": self.false_negatives, "precision": self.precision,
                "recall": self.recall, "exact": self.exact}


def score_recovery(found: set[tuple[int, int]], truth: set[tuple[int, int]]) -> Recovery:
    return Recovery(len(found & truth), len(found - truth), len(truth - found))


def true_edges(influencer_sets) -> set[tuple[int, int]]:
    return {(j, i) for i, s in enumerate(influencer_sets) for j in s if j != i}

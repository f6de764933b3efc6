import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamedecomp.core import Game
from gamedecomp.generator import GeneratorSpec, generate_game, two_group_spec
from gamedecomp.pipeline import analyze_game, score_recovery, true_edges
from gamedecomp.sampler import (all_interaction_matrices, covariance_matrix,
                                interaction_matrix)

from conftest import constant_game


def enumerated_deltas(game, subject, j):
    """Every (a, b) pair with b differing from a only at j, as utility changes of subject."""
    out = []
    for a in game.profiles():
        for alt in range(game.choices[j]):
            if alt != a[j]:
                b = a[:j] + (alt,) + a[j + 1:]
                out.append(game.utility(subject, b) - game.utility(subject, a))
    return out


def limit_covariance(game, subject):
    """Population covariance of the sample matrix rows as L grows without bound."""
    n = game.n_players
    mean = np.zeros(n)
    second = np.zeros(n)
    for j in range(n):
        if game.choices[j] > 1:
            d = np.array(enumerated_deltas(game, subject, j))
            mean[j] = d.mean() / n
            second[j] = (d ** 2).mean() / n
    C = -np.outer(mean, mean)
    C[np.diag_indices(n)] += second
    return C


def loop_covariance(X):
    M, n = len(X), len(X[0])
    m = [sum(X[r][p] for r in range(M)) / M for p in range(n)]
    return np.array([[(sum(X[r][p] * X[r][q] for r in range(M)) - M * m[p] * m[q]) / (M - 1)
                      for q in range(n)] for p in range(n)])


def test_constant_game_gives_zero_matrix():
    C = interaction_matrix(constant_game((2, 3, 2)), 1, 5).C
    assert np.array_equal(C, np.zeros((3, 3)))


def test_invalid_L():
    with pytest.raises(ValueError):
        interaction_matrix(constant_game((2, 2)), 0, 1)
    with pytest.raises(ValueError):
        all_interaction_matrices(constant_game((2, 2)), 1)


def test_enumerated_sample_matrix_matches_two_pass_covariance(three_player_game):
    g = three_player_game
    blocks = [enumerated_deltas(g, 1, j) for j in range(3)]
    L = len(blocks[0])
    X = np.zeros((3 * L, 3))
    for j, d in enumerate(blocks):
        X[j * L:(j + 1) * L, j] = d
    np.testing.assert_allclose(covariance_matrix(X), loop_covariance(X.tolist()), atol=1e-12)


def test_sampled_matrix_converges_to_enumerated_limit(three_player_game):
    g = three_player_game
    limit = limit_covariance(g, 1)
    errors = []
    for L in (50, 800, 12800):
        C = interaction_matrix(g, 1, L, seed=2).C
        errors.append(np.abs(C - limit).max())
    assert errors[-1] < 0.05 * np.abs(limit).max()
    assert errors[-1] < errors[0]


def test_matrix_shape_and_rows(three_player_game):
    m = interaction_matrix(three_player_game, 0, 7, keep_records=True)
    assert m.samples.shape == (21, 3) and m.sample_count == 21
    assert all(np.count_nonzero(row) <= 1 for row in m.samples)
    for rec in m.records:
        diff = [k for k in range(3) if rec.base_profile[k] != rec.deviated_profile[k]]
        assert diff == [rec.deviating_player]


def test_single_player_game():
    g = Game((4,), lambda i, a: float(a[0] ** 2))
    (m,) = all_interaction_matrices(g, 6, seed=1)
    assert m.C.shape == (1, 1)
    deltas = m.samples[:, 0]
    assert m.C[0, 0] == pytest.approx(np.var(deltas, ddof=1))


def test_no_interactions_only_diagonal_self_entry():
    spec = GeneratorSpec(5, 3, tuple((i,) for i in range(5)), (0, 9), 3)
    g = generate_game(spec)
    for m in all_interaction_matrices(g, 10, seed=0):
        off = m.C.copy()
        off[m.subject, m.subject] = 0.0
        assert np.all(off == 0.0)


def test_single_choice_players_leave_zero_columns():
    g = Game((1, 3, 2), lambda i, a: float(a[1] * 3 + a[2] + 10 * a[0]))
    m = interaction_matrix(g, 1, 10)
    assert np.all(m.samples[:, 0] == 0.0)
    assert np.all(m.C[0] == 0.0) and np.all(m.C[:, 0] == 0.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_exact_zero_soundness_symmetry_psd(seed, harvest):
    spec = two_group_spec(seed, n_players=8, choices=3)
    g = generate_game(spec)
    for m in all_interaction_matrices(g, 5, seed=seed, harvest=harvest):
        C = m.C
        assert np.array_equal(C, C.T)
        for j in range(8):
            if j not in spec.influencer_sets[m.subject]:
                assert np.all(m.samples[:, j] == 0.0)
                assert np.all(C[j] == 0.0) and np.all(C[:, j] == 0.0)
        assert np.linalg.eigvalsh(C).min() >= -1e-9 * np.trace(C)
        np.testing.assert_allclose(C, np.cov(m.samples, rowvar=False, ddof=1), atol=1e-12)


def test_harvest_and_per_subject_budgets():
    g = generate_game(two_group_spec(seed=1))
    n, L = 24, 10
    mats = all_interaction_matrices(g, L, seed=1, harvest=True)
    assert g.profile_eval_count == 2 * n * L
    assert all(m.sample_count == n * L for m in mats)
    g.reset_evals()
    all_interaction_matrices(g, L, seed=1, harvest=False)
    assert g.profile_eval_count == 2 * n * n * L
    assert g.eval_count == 2 * n * n * L


def test_threads_do_not_change_results():
    g = generate_game(two_group_spec(seed=5, n_players=10))
    for harvest in (True, False):
        serial = all_interaction_matrices(g, 6, seed=9, harvest=harvest, threads=1)
        parallel = all_interaction_matrices(g, 6, seed=9, harvest=harvest, threads=4)
        for a, b in zip(serial, parallel):
            assert np.array_equal(a.C, b.C)


def test_per_subject_batch_matches_single_calls(three_player_game):
    batch = all_interaction_matrices(three_player_game, 5, seed=4, harvest=False)
    for m in batch:
        assert np.array_equal(m.C, interaction_matrix(three_player_game, m.subject, 5, 4).C)


def test_longer_runs_extend_shorter_ones(three_player_game):
    short = all_interaction_matrices(three_player_game, 4, seed=3)
    long = all_interaction_matrices(three_player_game, 9, seed=3)
    for s, l in zip(short, long):
        for j in range(3):
            assert np.array_equal(s.samples[j * 4:(j + 1) * 4, j], l.samples[j * 9:j * 9 + 4, j])


def test_recall_is_monotone_in_L():
    for seed in range(5):
        g = generate_game(two_group_spec(seed, n_players=12, choices=2))
        truth = true_edges(g.effective_influencers())
        recalls = [score_recovery(analyze_game(g, L, seed).graph.edge_set, truth).recall
                   for L in (2, 3, 5, 8, 13)]
        assert recalls == sorted(recalls)


def test_dump_formats(three_player_game):
    m = interaction_matrix(three_player_game, 2, 3)
    doc = m.to_dict()
    assert doc["subject"] == 2 and doc["n"] == 3 and doc["L"] == 3
    assert np.array_equal(np.array(doc["C"]), m.C)
    text = m.to_text()
    assert text.startswith("C[2]") and len(text.strip().splitlines()) == 5

"""Eigenanalysis of interaction matrices and the interaction graph.

Player ``j`` influences subject ``i`` when some retained eigenvector of
``C_i`` has a large enough entry at ``j`` and its eigenvalue is large enough.
The graph has an edge ``j -> i`` for every such pair with ``j != i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from gamedecomp.sampler import InteractionMatrix

# thresholds used for the approximate cut of a 24-player binary game
CUT_TAU_LAMBDA = 0.29
CUT_TAU_V = 0.05
DEFAULT_TAU_V = 1e-9
RELATIVE_TAU_LAMBDA = 1e-9
JACOBI_TOL = 1e-12
CLUSTER_RTOL = 1e-12


def jacobi_eigh(A: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors (as columns) of a symmetric matrix.

    Cyclic Jacobi rotations; stops once every off-diagonal entry is below
    ``tol * ||A||_F``. Entries that are exactly zero are never rotated, so
    an index whose row and column are zero keeps the unit eigenvector.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    threshold = tol * np.linalg.norm(A)
    if n < 2 or threshold == 0.0:
        return np.diag(A).copy(), V
    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A))).max()
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < threshold:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                v_p, v_q = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * v_p - s * v_q
                V[:, q] = s * v_p + c * v_q
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.diag(A).copy(), V


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    # pairs sharing a cluster id have tied eigenvalues and span one eigenspace
    cluster: int = 0

    def to_dict(self) -> dict:
        return {"value": float(self.value), "vector": [float(x) for x in self.vector],
                "cluster": self.cluster}

    @classmethod
    def from_dict(cls, doc) -> EigenPair:
        return cls(float(doc["value"]), np.array(doc["vector"], dtype=float),
                   int(doc.get("cluster", 0)))


def _matrix(C) -> np.ndarray:
    return np.asarray(C.C if isinstance(C, InteractionMatrix) else C, dtype=float)


def eigendecompose(C, tau_lambda: float | None = None) -> list[EigenPair]:
    """Nontrivial eigenpairs of a symmetric matrix, largest eigenvalue first.

    Only pairs with eigenvalue above ``tau_lambda`` are kept; the default
    floor is ``1e-9 * trace(C)``. Indices with an all-zero row are split off
    before solving, so the returned vectors are exactly zero there.
    """
    C = _matrix(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {C.shape}")
    scale = max(1.0, float(np.linalg.norm(C)))
    if np.abs(C - C.T).max(initial=0.0) > 64 * np.finfo(float).eps * scale:
        raise ValueError("interaction matrix is not symmetric")
    if tau_lambda is None:
        tau_lambda = RELATIVE_TAU_LAMBDA * max(float(np.trace(C)), 0.0)
    n = C.shape[0]
    active = np.flatnonzero(np.any(C != 0.0, axis=1))
    if active.size == 0:
        return []
    values, vectors = jacobi_eigh(C[np.ix_(active, active)])
    order = np.argsort(-values, kind="stable")
    pairs = []
    for k in order:
        if not values[k] > tau_lambda:
            continue
        vec = np.zeros(n)
        vec[active] = vectors[:, k]
        if vec[np.argmax(np.abs(vec))] < 0:
            vec = -vec
        pairs.append(EigenPair(float(values[k]), vec))
    _assign_clusters(pairs)
    return pairs


def _assign_clusters(pairs: list[EigenPair]):
    if not pairs:
        return
    tol = CLUSTER_RTOL * abs(pairs[0].value)
    cluster = 0
    for prev, pair in zip([None] + pairs[:-1], pairs):
        if prev is not None and prev.value - pair.value > tol:
            cluster += 1
        pair.cluster = cluster


@dataclass
class InfluencerReport:
    subject: int
    strengths: dict[int, float]
    eigenpairs: list[EigenPair]
    tau_lambda: float = 0.0
    tau_v: float = DEFAULT_TAU_V

    @property
    def influencers(self) -> tuple[int, ...]:
        return tuple(sorted(self.strengths))

    @property
    def others(self) -> tuple[int, ...]:
        """Influencers other than the subject."""
        return tuple(j for j in self.influencers if j != self.subject)

    def to_dict(self) -> dict:
        return {"subject": self.subject, "tau_lambda": self.tau_lambda, "tau_v": self.tau_v,
                "influencers": [{"player": j, "strength": self.strengths[j]}
                                for j in self.influencers],
                "eigenpairs": [p.to_dict() for p in self.eigenpairs]}

    @classmethod
    def from_dict(cls, doc) -> InfluencerReport:
        return cls(int(doc["subject"]),
                   {int(e["player"]): float(e["strength"]) for e in doc["influencers"]},
                   [EigenPair.from_dict(p) for p in doc["eigenpairs"]],
                   float(doc["tau_lambda"]), float(doc["tau_v"]))


def influencers(pairs: Sequence[EigenPair], subject: int, tau_lambda: float = 0.0,
                tau_v: float = DEFAULT_TAU_V) -> InfluencerReport:
    """Players with an entry above ``tau_v`` in an eigenvector whose value exceeds ``tau_lambda``.

    For a cluster of tied eigenvalues the entry magnitude is taken as the
    norm of the player's coordinates across the cluster, which does not
    depend on the arbitrary basis chosen inside the eigenspace. The strength
    of influencer ``j`` is the largest ``value * magnitude`` among the pairs
    that qualify it.
    """
    strengths: dict[int, float] = {}
    clusters: dict[int, list[EigenPair]] = {}
    for pair in pairs:
        clusters.setdefault(pair.cluster, []).append(pair)
    for group in clusters.values():
        value = min(p.value for p in group)
        if not value > tau_lambda:
            continue
        magnitude = np.sqrt(sum(p.vector ** 2 for p in group))
        for j in np.flatnonzero(magnitude > tau_v):
            j = int(j)
            strengths[j] = max(strengths.get(j, 0.0), float(value * magnitude[j]))
    return InfluencerReport(subject, strengths, list(pairs), tau_lambda, tau_v)


def analyze_matrix(C: InteractionMatrix, tau_lambda: float | None = None,
                   tau_v: float = DEFAULT_TAU_V) -> InfluencerReport:
    pairs = eigendecompose(C, None)
    floor = RELATIVE_TAU_LAMBDA * max(float(np.trace(C.C)), 0.0)
    tau = floor if tau_lambda is None else max(tau_lambda, floor)
    return influencers(pairs, C.subject, tau, tau_v)


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted(tuple(g) for g in out.values())


def connected_components(n: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Weak components, each sorted, ordered by smallest member."""
    uf = UnionFind(n)
    for a, b in edges:
        uf.union(a, b)
    return uf.groups()


@dataclass
class InteractionGraph:
    n_players: int
    edges: dict[tuple[int, int], float]
    cut_edges: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def components(self) -> list[tuple[int, ...]]:
        return connected_components(self.n_players, self.edges)

    @property
    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges)

    def influencers_of(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(j for j, k in self.edges if k == i))

    def to_dict(self) -> dict:
        def listing(edges):
            return [{"from": j, "to": i, "strength": edges[(j, i)]} for j, i in sorted(edges)]
        return {"players": self.n_players, "edges": listing(self.edges),
                "cut_edges": listing(self.cut_edges),
                "components": [list(c) for c in self.components]}

    @classmethod
    def from_dict(cls, doc) -> InteractionGraph:
        def parse(entries):
            return {(int(e["from"]), int(e["to"])): float(e.get("strength", 1.0))
                    for e in entries}
        return cls(int(doc["players"]), parse(doc["edges"]), parse(doc.get("cut_edges", [])))

    def to_dot(self, name: str = "interaction") -> str:
        """Graphviz digraph; edge labels are strengths, cut edges are dashed."""
        lines = [f"digraph {name} {{"]
        for i in range(self.n_players):
            lines.append(f"  {i};")
        for (j, i), s in sorted(self.edges.items()):
            lines.append(f'  {j} -> {i} [label="{s:.3f}"];')
        for (j, i), s in sorted(self.cut_edges.items()):
            lines.append(f'  {j} -> {i} [label="{s:.3f}", style=dashed];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(reports: Sequence[InfluencerReport]) -> InteractionGraph:
    subjects = [r.subject for r in reports]
    if len(set(subjects)) != len(subjects):
        raise ValueError("duplicate subjects among influencer reports")
    n = len(reports)
    if sorted(subjects) != list(range(n)):
        raise ValueError("need exactly one report per player 0..N-1")
    edges = {}
    for r in reports:
        for j in r.others:
            edges[(j, r.subject)] = r.strengths[j]
    return InteractionGraph(n, edges)


def approximate_cut(graph: InteractionGraph, tau_lambda: float, tau_v: float,
                    reports: Sequence[InfluencerReport]) -> InteractionGraph:
    """Drop edges that no longer qualify under the thresholds ``tau_lambda`` and ``tau_v``.

    Returns a new graph; edges removed here join any already listed as cut.
    """
    if tau_lambda < 0 or tau_v < 0:
        raise ValueError("cut thresholds must be nonnegative")
    keep = set()
    for r in reports:
        strict = influencers(r.eigenpairs, r.subject, max(tau_lambda, r.tau_lambda), tau_v)
        keep.update((j, r.subject) for j in strict.others)
    edges = {e: s for e, s in graph.edges.items() if e in keep}
    cut = dict(graph.cut_edges)
    cut.update({e: s for e, s in graph.edges.items() if e not in keep})
    return InteractionGraph(graph.n_players, edges, cut)

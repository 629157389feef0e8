"""Permutation-induced matchings in k-partite views.

A tuple of bijections (π_1, ..., π_k), π_i: [m] → V_i, induces the edge
family {π_1(j), ..., π_k(j)}. Fixing π_1..π_{k-1} leaves a bipartite
problem between the rows M_π and the last part V_k; its perfect matchings
encode the choices of π_k.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import PartiteView, partite_min_codegree
from .models import rng_for

log = logging.getLogger(__name__)

PermutationTuple = tuple[tuple[int, ...], ...]


class MatchingContractError(ValueError):
    """A permutation tuple does not induce a perfect matching."""


@dataclass(frozen=True)
class AuxBipartite:
    left: tuple[tuple[int, ...], ...]
    right: tuple[int, ...]
    adjacency: np.ndarray

    @property
    def left_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def right_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=0)

    @property
    def min_degree(self) -> int:
        if not self.adjacency.size:
            return 0
        return int(min(self.left_degrees.min(), self.right_degrees.min()))


def _check_perm(perm: Sequence[int], part: Sequence[int], i: int) -> tuple[int, ...]:
    perm = tuple(perm)
    if len(perm) != len(part) or set(perm) != set(part):
        raise ValueError(f"permutation {i} is not a bijection onto part {i}")
    return perm


def _k_parts(view: PartiteView) -> int:
    k = view.base.k
    if view.s != k:
        raise ValueError(f"need exactly k={k} parts, got {view.s}")
    return view.m


def build_aux_bipartite(view: PartiteView, prefix: Sequence[Sequence[int]]) -> AuxBipartite:
    """Rows M_π from permutations of parts 1..k-1, columns the vertices of V_k;
    row j is adjacent to v iff M_π[j] ∪ {v} is an edge."""
    m = _k_parts(view)
    k = view.base.k
    if len(prefix) != k - 1:
        raise ValueError(f"need k-1={k - 1} permutations, got {len(prefix)}")
    perms = [_check_perm(p, view.parts[i], i) for i, p in enumerate(prefix)]
    left = tuple(tuple(p[j] for p in perms) for j in range(m))
    right = view.parts[-1]
    H = view.base
    adj = np.zeros((m, m), dtype=bool)
    for j, x in enumerate(left):
        for c, v in enumerate(right):
            adj[j, c] = H.has_edge(x + (v,))
    return AuxBipartite(left, right, adj)


def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> list[int]:
    """Maximum matching; returns the matched column of every row or -1.

    Rows are scanned in increasing index and columns in the order given, so
    the result is a deterministic function of ``adj``.
    """
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    INF = n_left + 1
    dist = [0] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l


@dataclass(frozen=True)
class MinDegreeEstimate:
    probability: float
    successes: int
    trials: int
    threshold: float
    delta_star: int
    vacuous: bool
    min_degrees: tuple[int, ...]

    def histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.min_degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))


def _trial_min_degree(args) -> int:
    view, prefix, seed, trial = args
    rng = rng_for(seed, trial)
    last = tuple(int(v) for v in rng.permutation(view.parts[-2]))
    return build_aux_bipartite(view, list(prefix) + [last]).min_degree


def estimate_mindeg_probability(view: PartiteView, prefix: Sequence[Sequence[int]],
                                eps: float, trials: int, seed: int,
                                workers: int = 1) -> MinDegreeEstimate:
    """Fraction of uniformly random π_{k-1} (with π_1..π_{k-2} = ``prefix``)
    for which B_π has minimum degree at least (δ - eps)·m, δ = δ*/m.

    Trial t draws from the stream (seed, t), so the estimate does not depend
    on ``workers``.
    """
    m = _k_parts(view)
    k = view.base.k
    if trials < 1:
        raise ValueError("need at least one trial")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if len(prefix) != k - 2:
        raise ValueError(f"need k-2={k - 2} fixed permutations, got {len(prefix)}")
    prefix = tuple(_check_perm(p, view.parts[i], i) for i, p in enumerate(prefix))
    dstar = partite_min_codegree(view)
    threshold = dstar - eps * m
    tasks = [(view, prefix, seed, t) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            mins = list(pool.map(_trial_min_degree, tasks, chunksize=max(1, trials // (4 * workers))))
    else:
        mins = [_trial_min_degree(t) for t in tasks]
    vacuous = threshold <= 0
    if vacuous:
        log.info("threshold (delta-eps)m = %.3f <= 0; every trial succeeds vacuously", threshold)
        successes = trials
    else:
        successes = sum(d >= threshold - 1e-9 for d in mins)
    return MinDegreeEstimate(successes / trials, successes, trials, max(threshold, 0.0),
                             dstar, vacuous, tuple(mins))


@dataclass(frozen=True)
class OrderedMatching:
    edges: tuple[tuple[int, ...], ...]

    def trailing(self, ell: int) -> tuple[tuple[int, ...], ...]:
        """Intersections X_j of each edge with the last ``ell`` parts."""
        if ell == 0:
            return tuple(() for _ in self.edges)
        return tuple(e[-ell:] for e in self.edges)

    def __len__(self) -> int:
        return len(self.edges)


def ordered_matching_from_tuple(view: PartiteView, perms: Sequence[Sequence[int]]) -> OrderedMatching:
    """Edges e_j = (π_1(j), ..., π_k(j)) in row order, each in part order."""
    m = _k_parts(view)
    k = view.base.k
    if len(perms) != k:
        raise MatchingContractError(f"need k={k} permutations, got {len(perms)}")
    try:
        perms = [_check_perm(p, view.parts[i], i) for i, p in enumerate(perms)]
    except ValueError as exc:
        raise MatchingContractError(str(exc)) from None
    edges = tuple(tuple(p[j] for p in perms) for j in range(m))
    for j, e in enumerate(edges):
        if not view.base.has_edge(e):
            raise MatchingContractError(f"row {j} is not an edge: {e}")
    return OrderedMatching(edges)


def _structurally_blocked(view: PartiteView, prefix: PermutationTuple) -> str | None:
    H = view.base
    label = np.full(H.n, -1, dtype=np.int64)
    for i, p in enumerate(view.parts):
        label[list(p)] = i
    arr = H.edge_array
    if not len(arr):
        return "no edges"
    lab = label[arr]
    crossing = (lab >= 0).all(axis=1) & (np.sort(lab, axis=1) == np.arange(view.s)).all(axis=1)
    cross = arr[crossing]
    covered = set(np.unique(cross).tolist())
    for p in view.parts:
        for v in p:
            if v not in covered:
                return f"vertex {v} lies in no crossing edge"
    if prefix:
        r = len(prefix)
        order = np.argsort(label[cross], axis=1)
        by_part = np.take_along_axis(cross, order, axis=1)
        heads = {tuple(row[:r]) for row in by_part.tolist()}
        for j in range(len(prefix[0])):
            row = tuple(p[j] for p in prefix)
            if row not in heads:
                return f"prefix row {j} {row} extends to no crossing edge"
    return None


def sample_matching_extension(view: PartiteView, prefix: Sequence[Sequence[int]],
                              seed: int, max_attempts: int = 20) -> PermutationTuple | None:
    """Complete the fixed π_1..π_r to a tuple inducing a perfect matching.

    Each attempt draws π_{r+1}..π_{k-1} uniformly from the stream
    (seed, attempt), builds B_π, and looks for a perfect matching with
    Hopcroft-Karp (column order shuffled from the same stream). Returns
    ``None`` when attempts run out or when some vertex or prefix row cannot
    lie in any crossing edge.
    """
    m = _k_parts(view)
    k = view.base.k
    r = len(prefix)
    if r > k - 2:
        raise ValueError(f"prefix length {r} exceeds k-2={k - 2}")
    fixed = tuple(_check_perm(p, view.parts[i], i) for i, p in enumerate(prefix))
    reason = _structurally_blocked(view, fixed)
    if reason is not None:
        log.debug("matching extension impossible: %s", reason)
        return None
    for attempt in range(max_attempts):
        rng = rng_for(seed, attempt)
        drawn = [tuple(int(v) for v in rng.permutation(view.parts[i])) for i in range(r, k - 1)]
        B = build_aux_bipartite(view, list(fixed) + drawn)
        if B.min_degree == 0:
            continue
        adj = []
        for j in range(m):
            cols = np.flatnonzero(B.adjacency[j])
            adj.append([int(c) for c in rng.permutation(cols)])
        match = hopcroft_karp(adj, m)
        if -1 in match:
            continue
        last = tuple(B.right[c] for c in match)
        full = fixed + tuple(drawn) + (last,)
        ordered_matching_from_tuple(view, full)
        return full
    return None

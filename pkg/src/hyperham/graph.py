"""k-uniform hypergraphs, partite views, and ℓ-path / ℓ-cycle validators."""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, ...]


class KGraph:
    """An immutable k-uniform hypergraph on the vertices ``0..n-1``.

    Edges are stored as sorted tuples in a frozenset. The index from
    (k-1)-sets to their completions is built on first use.

    ``labels`` is set on induced subgraphs: ``labels[i]`` is the label of
    local vertex ``i`` in the parent graph.
    """

    def __init__(self, n: int, k: int, edges: Iterable[Iterable[int]] = (),
                 labels: Sequence[int] | None = None):
        if k < 2:
            raise ValueError(f"uniformity must be at least 2, got k={k}")
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got n={n}")
        store = set()
        for e in edges:
            t = tuple(sorted(int(v) for v in e))
            if len(t) != k or len(set(t)) != k:
                raise ValueError(f"edge {e!r} does not have {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise ValueError(f"edge {e!r} has a vertex outside 0..{n - 1}")
            if t in store:
                raise ValueError(f"duplicate edge {t}")
            store.add(t)
        self._n = n
        self._k = k
        self._edges = frozenset(store)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("labels must name every vertex")
        self._labels = labels

    @classmethod
    def _trusted(cls, n: int, k: int, edges: frozenset[Edge],
                 labels: Sequence[int] | None = None) -> "KGraph":
        # edges already sorted, distinct and in range
        H = cls.__new__(cls)
        H._n, H._k, H._edges = n, k, edges
        H._labels = tuple(labels) if labels is not None else None
        return H

    @property
    def n(self) -> int:
        return self._n

    @property
    def k(self) -> int:
        return self._k

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def labels(self) -> tuple[int, ...] | None:
        return self._labels

    @property
    def vertices(self) -> range:
        return range(self._n)

    def __len__(self) -> int:
        return len(self._edges)

    def __contains__(self, e) -> bool:
        return self.has_edge(e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KGraph):
            return NotImplemented
        return (self._n, self._k, self._edges) == (other._n, other._k, other._edges)

    def __hash__(self) -> int:
        return hash((self._n, self._k, self._edges))

    def __repr__(self) -> str:
        return f"KGraph(n={self._n}, k={self._k}, edges={len(self._edges)})"

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self._edges

    @cached_property
    def _completion_index(self) -> dict[Edge, frozenset[int]]:
        index: dict[Edge, set[int]] = defaultdict(set)
        for e in self._edges:
            for i, v in enumerate(e):
                index[e[:i] + e[i + 1:]].add(v)
        return {x: frozenset(vs) for x, vs in index.items()}

    def completions(self, x: Iterable[int]) -> frozenset[int]:
        """Vertices ``v`` such that ``x ∪ {v}`` is an edge."""
        key = tuple(sorted(x))
        if len(key) != self._k - 1:
            raise ValueError(f"expected a {self._k - 1}-set, got {len(key)} vertices")
        return self._completion_index.get(key, frozenset())

    @cached_property
    def edge_masks(self) -> frozenset[int]:
        """Edges as vertex bitmasks, for the search kernels."""
        return frozenset(sum(1 << v for v in e) for e in self._edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as a sorted (E, k) integer array."""
        if not self._edges:
            return np.zeros((0, self._k), dtype=np.int64)
        return np.array(sorted(self._edges), dtype=np.int64)

    def to_parent(self, seq: Iterable[int]) -> tuple[int, ...]:
        """Map local vertex labels back to the parent graph's labels."""
        if self._labels is None:
            return tuple(seq)
        return tuple(self._labels[v] for v in seq)


def _check_set(H: KGraph, X: Iterable[int], size: int) -> tuple[int, ...]:
    t = tuple(sorted(X))
    if len(t) != size or len(set(t)) != size:
        raise ValueError(f"expected {size} distinct vertices, got {X!r}")
    if t and (t[0] < 0 or t[-1] >= H.n):
        raise ValueError(f"vertex set {X!r} is not inside 0..{H.n - 1}")
    return t


def codegree(H: KGraph, X: Iterable[int]) -> int:
    """Number of edges of ``H`` containing the (k-1)-set ``X``."""
    return len(H.completions(_check_set(H, X, H.k - 1)))


def encode_sets(arr: np.ndarray, n: int) -> np.ndarray:
    """Mixed-radix codes of the rows of a sorted vertex array."""
    code = np.zeros(len(arr), dtype=np.int64)
    for j in range(arr.shape[1]):
        code = code * n + arr[:, j]
    return code


class CodegreeTable:
    """Counts of edges X ∪ {v} keyed by the (k-1)-set X and a label of v.

    ``label[v] = -1`` drops completions through ``v``. Lookups are
    vectorised over arrays of sorted (k-1)-sets.
    """

    def __init__(self, H: KGraph, label: Sequence[int] | np.ndarray, nlabels: int):
        self.n, self.nlabels = H.n, nlabels
        label = np.asarray(label, dtype=np.int64)
        arr = H.edge_array
        keys = []
        for i in range(H.k):
            lab = label[arr[:, i]] if len(arr) else np.zeros(0, dtype=np.int64)
            rest = np.delete(arr, i, axis=1)[lab >= 0]
            keys.append(encode_sets(rest, H.n) * nlabels + lab[lab >= 0])
        allkeys = np.concatenate(keys) if keys else np.zeros(0, dtype=np.int64)
        self.keys, self.counts = np.unique(allkeys, return_counts=True)

    def lookup(self, sets: np.ndarray, labels: np.ndarray | int) -> np.ndarray:
        q = encode_sets(sets, self.n) * self.nlabels + labels
        idx = np.searchsorted(self.keys, q)
        idx = np.minimum(idx, max(len(self.keys) - 1, 0))
        if not len(self.keys):
            return np.zeros(len(q), dtype=np.int64)
        return np.where(self.keys[idx] == q, self.counts[idx], 0)


def all_subsets_array(verts: Sequence[int], size: int) -> np.ndarray:
    flat = np.fromiter((v for c in combinations(sorted(verts), size) for v in c),
                       dtype=np.int64)
    return flat.reshape(-1, size)


def min_codegree(H: KGraph) -> int:
    """Minimum co-degree over all (k-1)-subsets, by full enumeration."""
    if H.n < H.k:
        raise ValueError(f"min co-degree needs n >= k (n={H.n}, k={H.k})")
    table = CodegreeTable(H, np.zeros(H.n, dtype=np.int64), 1)
    return int(table.lookup(all_subsets_array(range(H.n), H.k - 1), 0).min())


def is_delta_dirac(H: KGraph, delta: float) -> bool:
    return min_codegree(H) >= delta * H.n


@dataclass(frozen=True)
class PartiteView:
    """An ordered family of disjoint vertex parts of ``base``.

    Only edges with one vertex in each of k distinct parts count as edges of
    the view.
    """

    base: KGraph
    parts: tuple[tuple[int, ...], ...]
    equipartition: bool = False

    def __post_init__(self):
        parts = tuple(tuple(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        seen: set[int] = set()
        for p in parts:
            for v in p:
                if not 0 <= v < self.base.n:
                    raise ValueError(f"vertex {v} is not in the base graph")
                if v in seen:
                    raise ValueError(f"vertex {v} appears in two parts")
                seen.add(v)
        if self.equipartition and len({len(p) for p in parts}) > 1:
            raise ValueError("equipartition parts must have equal size")

    @classmethod
    def equi(cls, base: KGraph, parts: Iterable[Iterable[int]]) -> "PartiteView":
        return cls(base, tuple(tuple(p) for p in parts), equipartition=True)

    @property
    def s(self) -> int:
        return len(self.parts)

    @property
    def m(self) -> int:
        if not self.parts:
            return 0
        sizes = {len(p) for p in self.parts}
        if len(sizes) != 1:
            raise ValueError("parts have different sizes")
        return sizes.pop()

    @cached_property
    def part_of(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}

    def subview(self, indices: Iterable[int]) -> "PartiteView":
        return PartiteView(self.base, tuple(self.parts[i] for i in indices),
                           self.equipartition)

    def crossing_completions(self, X: Sequence[int], part: int) -> frozenset[int]:
        """Completions of ``X`` inside part ``part``."""
        return self.base.completions(X) & frozenset(self.parts[part])

    def is_crossing_edge(self, e: Iterable[int]) -> bool:
        e = tuple(e)
        owners = {self.part_of.get(v) for v in e}
        return None not in owners and len(owners) == len(e) and self.base.has_edge(e)


def partite_min_codegree(view: PartiteView) -> int:
    """Minimum of d(X, V_i) over i and (k-1)-sets X spanning k-1 distinct
    parts other than i."""
    H = view.base
    k = H.k
    if view.s < k:
        raise ValueError(f"need at least k={k} parts, got {view.s}")
    label = np.full(H.n, -1, dtype=np.int64)
    for i, p in enumerate(view.parts):
        label[list(p)] = i
    table = CodegreeTable(H, label, view.s)
    best = None
    for idx in combinations(range(view.s), k - 1):
        grids = np.meshgrid(*(np.asarray(view.parts[i], dtype=np.int64) for i in idx),
                            indexing="ij")
        X = np.sort(np.stack([g.ravel() for g in grids], axis=1), axis=1)
        if not len(X):
            continue
        for i in range(view.s):
            if i in idx:
                continue
            d = int(table.lookup(X, i).min())
            if best is None or d < best:
                best = d
                if d == 0:
                    return 0
    return best if best is not None else 0


def induced(H: KGraph, S: Iterable[int]) -> KGraph:
    """Subgraph induced on ``S``, relabeled ``0..|S|-1`` in sorted order.

    The result's ``labels`` maps local vertices to labels of ``H``'s own
    label space (so repeated inducing composes back to the root graph).
    """
    verts = sorted(set(S))
    for v in verts:
        if not 0 <= v < H.n:
            raise ValueError(f"vertex {v} is not in the graph")
    local = {v: i for i, v in enumerate(verts)}
    vs = set(verts)
    if len(verts) < H.k:
        edges = []
    elif len(H.edges) <= comb(len(verts), H.k):
        edges = [tuple(local[v] for v in e) for e in H.edges if vs.issuperset(e)]
    else:
        edges = [tuple(local[v] for v in c) for c in combinations(verts, H.k)
                 if c in H.edges]
    root = H.labels
    labels = [root[v] for v in verts] if root is not None else verts
    return KGraph(len(verts), H.k, edges, labels=labels)


# -- cycles and paths -------------------------------------------------------

def _stride(k: int, ell: int) -> int:
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    return k - ell


def cycle_windows(order: Sequence[int], k: int, ell: int) -> list[tuple[int, ...]]:
    """Windows of length k at stride k-ell around a cyclic ordering."""
    N = len(order)
    step = _stride(k, ell)
    if N % step:
        raise ValueError(f"cycle length {N} is not divisible by k-ell={step}")
    if N < k:
        raise ValueError(f"cycle length {N} is shorter than k={k}")
    return [tuple(order[(i + j) % N] for j in range(k)) for i in range(0, N, step)]


def path_windows(order: Sequence[int], k: int, ell: int) -> list[tuple[int, ...]]:
    """Windows of length k at stride k-ell along an open ordering."""
    N = len(order)
    step = _stride(k, ell)
    if N < k or (N - k) % step:
        raise ValueError(f"path length {N} is not k + a multiple of k-ell "
                         f"(k={k}, ell={ell})")
    return [tuple(order[i:i + k]) for i in range(0, N - k + 1, step)]


def _check_distinct(order: Sequence[int]) -> None:
    if len(set(order)) != len(order):
        raise ValueError("vertex sequence repeats a vertex")


@dataclass(frozen=True)
class CycleCheck:
    violations: tuple[int, ...]
    degenerate: bool
    spanning: bool

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_ell_cycle(H: KGraph, order: Sequence[int], ell: int) -> CycleCheck:
    """Check every stride-(k-ell) window of a cyclic ordering against ``H``.

    ``violations`` lists the starting positions of windows that are not
    edges. Cycles with only two windows are accepted but flagged
    ``degenerate``; ``spanning`` says whether the ordering covers V(H).
    """
    _check_distinct(order)
    windows = cycle_windows(order, H.k, ell)
    step = H.k - ell
    bad = tuple(i * step for i, w in enumerate(windows) if not H.has_edge(w))
    return CycleCheck(bad, len(windows) <= 2, len(order) == H.n and set(order) == set(H.vertices))


def validate_ell_path(H: KGraph, order: Sequence[int], ell: int) -> tuple[int, ...]:
    """Starting positions of path windows that are not edges of ``H``."""
    _check_distinct(order)
    step = H.k - ell
    return tuple(i * step for i, w in enumerate(path_windows(order, H.k, ell))
                 if not H.has_edge(w))


def canonical_cycle(order: Sequence[int], k: int, ell: int) -> tuple[Edge, ...]:
    """Sorted edge list of the ℓ-cycle; equal for orderings related by
    rotation, reflection or window-preserving reorderings."""
    return tuple(sorted(tuple(sorted(w)) for w in cycle_windows(order, k, ell)))


@dataclass(frozen=True)
class EllPath:
    ordering: tuple[int, ...]
    k: int
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "ordering", tuple(self.ordering))
        _check_distinct(self.ordering)
        path_windows(self.ordering, self.k, self.ell)

    @property
    def edges(self) -> list[tuple[int, ...]]:
        """Windows in path order, each in path order (not sorted)."""
        return path_windows(self.ordering, self.k, self.ell)

    @property
    def first_edge(self) -> tuple[int, ...]:
        return self.ordering[:self.k]

    @property
    def last_edge(self) -> tuple[int, ...]:
        return self.ordering[-self.k:]

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(tuple(sorted(w)) for w in self.edges)

    def __len__(self) -> int:
        return len(self.ordering)


@dataclass(frozen=True)
class EllCycle:
    ordering: tuple[int, ...]
    k: int
    ell: int
    canonical_edges: tuple[Edge, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ordering", tuple(self.ordering))
        _check_distinct(self.ordering)
        object.__setattr__(self, "canonical_edges",
                           canonical_cycle(self.ordering, self.k, self.ell))

    @property
    def degenerate(self) -> bool:
        return len(self.ordering) // (self.k - self.ell) <= 2

    def __len__(self) -> int:
        return len(self.ordering)


# -- text instance format ---------------------------------------------------

def parse_instance(text: str) -> KGraph:
    """Parse ``k n`` followed by one edge per line; '#' lines are comments."""
    header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            nums = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: not an integer list: {raw!r}") from None
        if header is None:
            if len(nums) != 2:
                raise ValueError(f"line {lineno}: header must be 'k n'")
            header = nums
        else:
            edges.append(nums)
    if header is None:
        raise ValueError("missing 'k n' header")
    k, n = header
    return KGraph(n, k, edges)


def format_instance(H: KGraph) -> str:
    lines = [f"{H.k} {H.n}"]
    lines.extend(" ".join(map(str, e)) for e in sorted(H.edges))
    return "\n".join(lines) + "\n"


def read_instance(path: str | Path) -> KGraph:
    return parse_instance(Path(path).read_text())


def write_instance(H: KGraph, path: str | Path | io.TextIOBase) -> None:
    text = format_instance(H)
    if isinstance(path, (str, Path)):
        Path(path).write_text(text)
    else:
        path.write(text)


def parse_partition(text: str) -> list[tuple[int, ...]]:
    """One part per line, vertices separated by whitespace."""
    parts = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts.append(tuple(int(tok) for tok in line.split()))
    return parts

"""Exponential-time exact counters used as ground truth.

Everything here is brute force by design: the pipeline and the closed forms
are checked against these, so they stay free of clever shortcuts.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

from .graph import EllPath, KGraph, PartiteView, path_windows, validate_ell_path

CYCLE_LIMIT_N = 12
MATCHING_LIMIT_M = 10
PERMANENT_LIMIT_M = 24


class LimitExceeded(ValueError):
    """The instance is larger than the configured exhaustive-search limit."""


@dataclass(frozen=True)
class CycleCensus:
    distinct_cycles: int
    orderings: int

    @property
    def symmetry_ratio(self) -> Fraction | None:
        if self.distinct_cycles == 0:
            return None
        return Fraction(self.orderings, self.distinct_cycles)


# -- Hamiltonian ℓ-cycles ---------------------------------------------------

def _cycle_plan(n: int, k: int, ell: int, root_pos: int):
    step = k - ell
    windows = [tuple((i + j) % n for j in range(k)) for i in range(0, n, step)]
    order = [p for p in range(n) if p != root_pos]
    rank = {p: i for i, p in enumerate(order)}
    rank[root_pos] = -1
    checks: list[list[tuple[int, ...]]] = [[] for _ in order]
    for w in windows:
        checks[max(rank[p] for p in w)].append(w)
    return order, checks


def _cycle_branch(args) -> tuple[int, set]:
    n, k, ell, masks, root_pos, first = args
    order, checks = _cycle_plan(n, k, ell, root_pos)
    seq = [0] * n
    bit = [1 << v for v in range(n)]
    seen: set[tuple[int, ...]] = set()
    count = 0
    depth_max = len(order)
    windows_all = [w for ws in checks for w in ws]

    def wmask(w):
        m = 0
        for p in w:
            m |= bit[seq[p]]
        return m

    def rec(depth: int, used: int) -> None:
        nonlocal count
        if depth == depth_max:
            count += 1
            seen.add(tuple(sorted(wmask(w) for w in windows_all)))
            return
        pos = order[depth]
        cands = (first,) if depth == 0 else range(1, n)
        for v in cands:
            if used & bit[v]:
                continue
            seq[pos] = v
            if all(wmask(w) in masks for w in checks[depth]):
                rec(depth + 1, used | bit[v])

    seq[root_pos] = 0
    rec(0, 1)
    return count, seen


def count_ham_ell_cycles(H: KGraph, ell: int, limit: int = CYCLE_LIMIT_N,
                         workers: int = 1) -> CycleCensus:
    """Exhaustively count Hamiltonian ℓ-cycles of ``H``.

    Orderings are rooted by placing vertex 0 in the first block of k-ell
    positions; every valid ordering has exactly one such rotation by a
    multiple of k-ell, so the rooted count times n/(k-ell) is the number of
    vertex sequences whose windows are all edges. Both directions are
    enumerated explicitly. ``distinct_cycles`` counts distinct edge sets.
    """
    n, k = H.n, H.k
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    step = k - ell
    if n % step:
        raise ValueError(f"n={n} is not divisible by k-ell={step}")
    if n < k:
        raise ValueError(f"need n >= k (n={n}, k={k})")
    if n > limit:
        raise LimitExceeded(f"cycle census limited to n <= {limit} (got n={n}); "
                            "raise the limit explicitly if you accept the runtime")
    masks = H.edge_masks
    tasks = []
    for root_pos in range(step):
        for v in range(1, n):
            tasks.append((n, k, ell, masks, root_pos, v))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cycle_branch, tasks))
    else:
        results = [_cycle_branch(t) for t in tasks]
    rooted = sum(c for c, _ in results)
    distinct: set = set()
    for _, s in results:
        distinct |= s
    return CycleCensus(len(distinct), rooted * (n // step))


# -- k-partite perfect matchings ---------------------------------------------

def _check_k_partite(view: PartiteView, limit: int) -> int:
    k = view.base.k
    if view.s != k:
        raise ValueError(f"need exactly k={k} parts, got {view.s}")
    sizes = {len(p) for p in view.parts}
    if len(sizes) != 1:
        raise ValueError("parts must form an equipartition")
    m = sizes.pop()
    if m > limit:
        raise LimitExceeded(f"part size {m} exceeds the limit {limit}")
    return m


def count_perfect_matchings_partite(view: PartiteView,
                                    limit: int = MATCHING_LIMIT_M) -> int:
    """Unordered perfect matchings of a k-partite view with k parts."""
    m = _check_k_partite(view, limit)
    H = view.base
    first, rest = view.parts[0], view.parts[1:]

    def rec(j: int, used: frozenset) -> int:
        if j == m:
            return 1
        total = 0
        u = first[j]
        for tail in product(*rest):
            if used.intersection(tail):
                continue
            if H.has_edge((u,) + tail):
                total += rec(j + 1, used.union(tail))
        return total

    return rec(0, frozenset())


def count_matching_extensions(view: PartiteView, prefix: Sequence[Sequence[int]] = (),
                              limit: int = MATCHING_LIMIT_M) -> int:
    """Number of tuples (π_{r+1}, ..., π_k) completing the fixed permutations
    ``prefix`` = (π_1, ..., π_r) to a tuple that induces a perfect matching.

    Tuples are counted, not matchings: with r = 0 every matching is counted
    once per row order.
    """
    m = _check_k_partite(view, limit)
    k = view.base.k
    r = len(prefix)
    if r > k - 2:
        raise ValueError(f"prefix length {r} exceeds k-2={k - 2}")
    for i, perm in enumerate(prefix):
        if sorted(perm) != sorted(view.parts[i]):
            raise ValueError(f"prefix permutation {i} is not a bijection onto its part")
    H = view.base
    free = view.parts[r:]

    def rec(j: int, used: frozenset) -> int:
        if j == m:
            return 1
        fixed = tuple(perm[j] for perm in prefix)
        total = 0
        for tail in product(*free):
            if used.intersection(tail):
                continue
            if H.has_edge(fixed + tail):
                total += rec(j + 1, used.union(tail))
        return total

    return rec(0, frozenset())


def count_matching_tuples_brute(view: PartiteView) -> int:
    """All (m!)^k tuples checked one by one; for tiny cross-checks only."""
    m = _check_k_partite(view, 4)
    H = view.base
    total = 0
    for perms in product(*(permutations(p) for p in view.parts)):
        if all(H.has_edge(tuple(perm[j] for perm in perms)) for j in range(m)):
            total += 1
    return total


# -- permanent ----------------------------------------------------------------

def permanent(B, limit: int = PERMANENT_LIMIT_M) -> int:
    """Permanent of a square 0/1 (or integer) matrix by Ryser's formula,
    visiting column subsets in Gray-code order."""
    rows = [list(map(int, row)) for row in B]
    m = len(rows)
    if any(len(row) != m for row in rows):
        raise ValueError("matrix must be square")
    if m > limit:
        raise LimitExceeded(f"permanent limited to m <= {limit} (got {m})")
    if m == 0:
        return 1
    cols = [[rows[i][j] for i in range(m)] for j in range(m)]
    sums = [0] * m
    total = 0
    gray = 0
    for step in range(1, 1 << m):
        j = (step & -step).bit_length() - 1
        gray ^= 1 << j
        col = cols[j]
        if gray >> j & 1:
            for i in range(m):
                sums[i] += col[i]
        else:
            for i in range(m):
                sums[i] -= col[i]
        prod = 1
        for s in sums:
            prod *= s
            if not prod:
                break
        if prod:
            size = bin(gray).count("1")
            total += -prod if size & 1 else prod
    return total if m % 2 == 0 else -total


def count_bipartite_matchings(B) -> int:
    """Perfect matchings of a 0/1 incidence matrix by row-wise backtracking."""
    rows = [[j for j, x in enumerate(row) if x] for row in B]
    m = len(rows)

    def rec(i: int, used: int) -> int:
        if i == m:
            return 1
        return sum(rec(i + 1, used | 1 << j) for j in rows[i] if not used >> j & 1)

    return rec(0, 0)


# -- general matchings ----------------------------------------------------------

def _incidence(H: KGraph) -> list[list[tuple[int, ...]]]:
    incident: list[list[tuple[int, ...]]] = [[] for _ in range(H.n)]
    for e in sorted(H.edges):
        for v in e:
            incident[v].append(e)
    return incident


def count_perfect_matchings(H: KGraph) -> int:
    """Perfect matchings of ``H`` (branching on the smallest uncovered vertex)."""
    n = H.n
    if n % H.k:
        return 0
    incident = _incidence(H)

    def rec(covered: int) -> int:
        v = next((u for u in range(n) if not covered >> u & 1), None)
        if v is None:
            return 1
        total = 0
        for e in incident[v]:
            mask = sum(1 << u for u in e)
            if not covered & mask:
                total += rec(covered | mask)
        return total

    return rec(0)


def max_matching_size(H: KGraph) -> int:
    """Largest number of pairwise disjoint edges."""
    n, k = H.n, H.k
    incident = _incidence(H)
    best = 0

    def rec(covered: int, free: int, size: int) -> None:
        nonlocal best
        best = max(best, size)
        if size + free // k <= best:
            return
        v = next(u for u in range(n) if not covered >> u & 1)
        for e in incident[v]:
            mask = sum(1 << u for u in e)
            if not covered & mask:
                rec(covered | mask, free - k, size + 1)
        rec(covered | 1 << v, free - 1, size)

    rec(0, n, 0)
    return best


# -- constrained ℓ-paths -----------------------------------------------------------

def find_ell_path_constrained(F: KGraph, ell: int, first_edge_order: Sequence[int],
                              last_edge_order: Sequence[int]) -> tuple[int, ...] | None:
    """A Hamiltonian ℓ-path of ``F`` starting with ``first_edge_order`` and
    ending with ``last_edge_order`` (both full ordered edges), or ``None``.

    Free positions are filled from whichever end of the unfilled gap has
    fewer admissible vertices; ties go to the left and candidates are tried
    in increasing label order, so the result is deterministic.
    """
    N, k = F.n, F.k
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    step = k - ell
    if N < k or (N - k) % step:
        raise ValueError(f"vertex count {N} is not k + a multiple of k-ell")
    first, last = tuple(first_edge_order), tuple(last_edge_order)
    if len(first) != k or len(last) != k:
        raise ValueError("end edges must have k vertices")
    seq: list[int | None] = [None] * N
    for i, v in enumerate(first):
        seq[i] = v
    for i, v in enumerate(last):
        p = N - k + i
        if seq[p] is not None and seq[p] != v:
            return None
        seq[p] = v
    fixed = [v for v in seq if v is not None]
    if len(set(fixed)) != len(fixed) or any(not 0 <= v < N for v in fixed):
        return None
    windows = [tuple(range(i, i + k)) for i in range(0, N - k + 1, step)]
    covering: list[list[int]] = [[] for _ in range(N)]
    for wi, w in enumerate(windows):
        for p in w:
            covering[p].append(wi)
    missing = [sum(seq[p] is None for p in w) for w in windows]
    for wi, w in enumerate(windows):
        if missing[wi] == 0 and not F.has_edge([seq[p] for p in w]):
            return None
    free_vertices = sorted(set(range(N)) - set(fixed))
    free_pos = [p for p in range(N) if seq[p] is None]
    if not free_pos:
        return tuple(seq)
    used = set(fixed)

    def admissible(p: int) -> list[int]:
        out = []
        closing = [windows[wi] for wi in covering[p] if missing[wi] == 1]
        for v in free_vertices:
            if v in used:
                continue
            seq[p] = v
            if all(F.has_edge([seq[q] for q in w]) for w in closing):
                out.append(v)
        seq[p] = None
        return out

    def rec(lo: int, hi: int) -> bool:
        if lo > hi:
            return True
        left, right = admissible(lo), (admissible(hi) if hi != lo else None)
        if right is not None and len(right) < len(left):
            pos, cands, nlo, nhi = hi, right, lo, hi - 1
        else:
            pos, cands, nlo, nhi = lo, left, lo + 1, hi
        for v in cands:
            seq[pos] = v
            used.add(v)
            for wi in covering[pos]:
                missing[wi] -= 1
            if rec(nlo, nhi):
                return True
            for wi in covering[pos]:
                missing[wi] += 1
            used.discard(v)
            seq[pos] = None
        return False

    lo, hi = free_pos[0], free_pos[-1]
    if rec(lo, hi):
        return tuple(seq)  # type: ignore[arg-type]
    return None


def find_ell_path_with_end_sets(F: KGraph, ell: int, first_k1: Sequence[int],
                                last_k1: Sequence[int]) -> tuple[int, ...] | None:
    """Variant taking ordered (k-1)-sets as the path ends: the path starts
    with ``first_k1`` and ends with ``last_k1``. Tries every single-vertex
    completion of both ends."""
    k = F.k
    first_k1, last_k1 = tuple(first_k1), tuple(last_k1)
    if len(first_k1) != k - 1 or len(last_k1) != k - 1:
        raise ValueError("end sets must have k-1 vertices")
    for a in sorted(F.completions(first_k1)):
        for b in sorted(F.completions(last_k1)):
            found = find_ell_path_constrained(F, ell, first_k1 + (a,), (b,) + last_k1)
            if found is not None:
                return found
    return None


def tight_path_to_ell_path(order: Sequence[int], k: int, ell: int,
                           host: KGraph | None = None) -> EllPath:
    """Keep every (k-ell)-th window of a tight path, starting at its first edge."""
    order = tuple(order)
    N = len(order)
    if N < k or (N - k) % (k - ell):
        raise ValueError(f"a tight path on {N} vertices does not thin to an "
                         f"ell-path (need N = k mod k-ell)")
    if host is not None:
        bad = validate_ell_path(host, order, k - 1)
        if bad:
            raise ValueError(f"not a tight path in the host graph (windows at {bad})")
    path = EllPath(order, k, ell)
    assert all(w in path_windows(order, k, k - 1) for w in path.edges)
    return path

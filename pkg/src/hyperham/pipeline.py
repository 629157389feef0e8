"""Constructive sampler of Hamiltonian ℓ-cycles in dense k-graphs.

Put aside a connecting-system W = (W_1, ..., W_m), split the remaining
vertices V' into parts of size m, chain perfect matchings across
overlapping windows of k parts into m disjoint ℓ-paths, then join path i to
path i+1 through an ℓ-path inside W_i plus the two end edges. With W fixed,
distinct path-systems give distinct cycles.
"""

from __future__ import annotations

import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import (CodegreeTable, EllCycle, EllPath, KGraph, PartiteView,
                    all_subsets_array, induced, min_codegree, partite_min_codegree,
                    validate_ell_cycle, validate_ell_path)
from .matching import sample_matching_extension
from .models import derive_seed, rng_for
from .oracle import find_ell_path_constrained

log = logging.getLogger(__name__)

# stage tags for derived random streams
_CS, _PARTITION, _PATHS = 0, 1, 2


class PipelineError(RuntimeError):
    pass


class InfeasibleParams(ValueError):
    pass


class ConnectingSystemError(PipelineError):
    def __init__(self, msg: str, witness: tuple | None = None):
        super().__init__(msg)
        self.witness = witness


class PartitionError(PipelineError):
    def __init__(self, msg: str, histogram: dict[int, int]):
        super().__init__(msg)
        self.histogram = histogram


class StepFailure(PipelineError):
    def __init__(self, step: int):
        super().__init__(f"matching extension failed at step {step}")
        self.step = step


class ConnectorFailure(PipelineError):
    def __init__(self, index: int):
        super().__init__(f"no connecting ℓ-path through block {index}")
        self.index = index


# -- parameters ---------------------------------------------------------------

@dataclass(frozen=True)
class PipelineParams:
    n: int
    k: int
    ell: int
    m: int
    t: int

    @property
    def n_prime(self) -> int:
        return self.n - self.m * self.t

    @property
    def parts(self) -> int:
        return self.n_prime // self.m

    @property
    def steps(self) -> int:
        return (self.parts - self.ell) // (self.k - self.ell)

    def violations(self) -> list[str]:
        n, k, ell, m, t = self.n, self.k, self.ell, self.m, self.t
        step = k - ell
        out = []
        if not 0 <= ell < k - 1:
            out.append("need 0 <= ell < k-1")
            return out
        if n % step:
            out.append("k-ell must divide n")
        if m < 1:
            out.append("need m >= 1")
            return out
        if t < step:
            out.append("need t >= k-ell")
        if t % step != (-ell) % step:
            out.append("need t = -ell mod k-ell")
        npr = n - m * t
        if npr <= 0 or npr % m:
            out.append("m must divide n' = n - m*t > 0")
            return out
        L = npr // m
        if L % step != ell % step:
            out.append("need n'/m = ell mod k-ell")
        if L < k:
            out.append("need n'/m >= k")
        if m == 1 and L < 2 * k:
            out.append("need n'/m >= 2k when m = 1")
        return out


def solve_params(n: int, k: int, ell: int, target_m: int, target_t: int) -> PipelineParams:
    """Feasible (m, t) closest to the targets in L1 distance; ties go to the
    smaller m, then the smaller t."""
    if not 0 <= ell < k - 1:
        raise ValueError(f"need 0 <= ell < k-1, got ell={ell}, k={k}")
    step = k - ell
    if n % step:
        raise ValueError(f"k-ell={step} does not divide n={n}")
    best = None
    for m in range(1, n + 1):
        t = _min_block(k, ell)
        while m * t < n:
            P = PipelineParams(n, k, ell, m, t)
            if not P.violations():
                key = (abs(m - target_m) + abs(t - target_t), m, t)
                if best is None or key < best[0]:
                    best = (key, P)
            t += step
    if best is None:
        raise InfeasibleParams(_why_infeasible(n, k, ell))
    return best[1]


def _min_block(k: int, ell: int) -> int:
    # smallest t >= k-ell with t = -ell mod k-ell
    step = k - ell
    return step + (-ell) % step


def _why_infeasible(n: int, k: int, ell: int) -> str:
    step = k - ell
    t0 = _min_block(k, ell)
    if n - t0 < k:
        return (f"n={n} too small: need room for a block of t >= {t0} "
                f"(t = -ell mod k-ell) plus a path on >= k={k} vertices")
    return (f"n={n}: no m >= 1, t >= {t0} with t = -ell mod {step}, "
            f"n'/m = ell mod {step} and n'/m >= k")


# -- connecting system --------------------------------------------------------

@dataclass(frozen=True)
class ConnectingSystem:
    blocks: tuple[tuple[int, ...], ...]
    eta: float
    attempts: int = 1

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def t(self) -> int:
        return len(self.blocks[0]) if self.blocks else 0

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for b in self.blocks for v in b)


def block_codegrees(H: KGraph, blocks: Sequence[Sequence[int]]) -> np.ndarray:
    """Matrix of d(X, W_i): one row per (k-1)-subset of V(H) in
    lexicographic order, one column per block."""
    label = np.full(H.n, -1, dtype=np.int64)
    for i, b in enumerate(blocks):
        label[list(b)] = i
    table = CodegreeTable(H, label, len(blocks))
    X = all_subsets_array(range(H.n), H.k - 1)
    return np.stack([table.lookup(X, i) for i in range(len(blocks))], axis=1)


def find_connecting_system(H: KGraph, m: int, t: int, eta_target: float,
                           max_tries: int = 20, seed: int = 0) -> ConnectingSystem:
    """First sampled ordered family of m disjoint t-blocks with
    d(X, W_i) >= eta_target·t for every (k-1)-set X and every i."""
    if m < 1 or t < 1 or m * t > H.n:
        raise ValueError(f"need m, t >= 1 and m*t <= n (m={m}, t={t}, n={H.n})")
    need = eta_target * t - 1e-9
    worst = None
    X = all_subsets_array(range(H.n), H.k - 1)
    for attempt in range(max_tries):
        rng = rng_for(seed, _CS, attempt)
        chosen = rng.permutation(H.n)[:m * t].reshape(m, t)
        blocks = tuple(tuple(sorted(int(v) for v in row)) for row in chosen)
        D = block_codegrees(H, blocks)
        low = int(D.min())
        if low >= need:
            return ConnectingSystem(blocks, low / t, attempt + 1)
        r, i = np.unravel_index(int(D.argmin()), D.shape)
        if worst is None or low < worst[2]:
            worst = (tuple(int(v) for v in X[r]), int(i), low)
    raise ConnectingSystemError(
        f"no connecting-system with eta >= {eta_target} in {max_tries} tries; "
        f"worst witness X={worst[0]} block={worst[1]} d={worst[2]}", worst)


# -- partitions and path-systems ---------------------------------------------

def sample_good_partition(H: KGraph, vertices: Iterable[int], m: int, max_tries: int = 20,
                          seed: int = 0, threshold: float | None = None
                          ) -> tuple[PartiteView, int, int]:
    """Uniform ordered equipartition of ``vertices`` into parts of size m
    whose partite co-degree δ* reaches ``threshold`` (default (δ-0.1)·m with
    δ = min co-degree / n). Returns (view, δ*, attempts)."""
    V = np.array(sorted(vertices), dtype=np.int64)
    if m < 1 or len(V) % m:
        raise ValueError(f"m={m} does not divide |V'|={len(V)}")
    if threshold is None:
        delta = min_codegree(H) / H.n
        threshold = (delta - 0.1) * m
    hist: dict[int, int] = {}
    for attempt in range(max_tries):
        rng = rng_for(seed, _PARTITION, attempt)
        parts = rng.permutation(V).reshape(-1, m)
        view = PartiteView.equi(H, [tuple(int(v) for v in p) for p in parts])
        dstar = partite_min_codegree(view) if view.s >= H.k else 0
        if dstar >= threshold - 1e-9:
            return view, dstar, attempt + 1
        hist[dstar] = hist.get(dstar, 0) + 1
    raise PartitionError(f"no partition with δ* >= {threshold:.3f} in {max_tries} tries; "
                         f"achieved δ* histogram {dict(sorted(hist.items()))}", hist)


@dataclass(frozen=True)
class PathSystem:
    paths: tuple[EllPath, ...]
    covered: frozenset[int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        cov = [v for p in self.paths for v in p.ordering]
        if len(set(cov)) != len(cov):
            raise ValueError("paths are not vertex-disjoint")
        if len({len(p) for p in self.paths}) > 1:
            raise ValueError("paths have different lengths")
        object.__setattr__(self, "covered", frozenset(cov))

    @property
    def m(self) -> int:
        return len(self.paths)

    def key(self) -> tuple[frozenset, ...]:
        """Identity as an ordered family of edge sets."""
        return tuple(p.edge_set() for p in self.paths)


def build_path_system(H: KGraph, view: PartiteView, ell: int, seed: int,
                      max_attempts: int = 20) -> PathSystem:
    """Chain matching extensions over windows of k parts overlapping in ℓ.

    Step s uses parts s(k-ℓ) .. s(k-ℓ)+k-1; its first ℓ permutations are the
    last ℓ of step s-1. Path j reads the j-th entry of every part's
    permutation, so the paths are ordered by the first part's permutation.
    """
    k = H.k
    step = k - ell
    L, m = view.s, view.m
    if not 0 <= ell < k - 1:
        raise ValueError(f"need 0 <= ell < k-1, got {ell}")
    if L < k or L % step != ell % step:
        raise ValueError(f"{L} parts: need >= k and = ell mod k-ell")
    perms: list[tuple[int, ...] | None] = [None] * L
    for s in range((L - ell) // step):
        lo = s * step
        sub = view.subview(range(lo, lo + k))
        prefix = [perms[lo + q] for q in range(ell)] if s else []
        got = sample_matching_extension(sub, prefix, derive_seed(seed, s), max_attempts)
        if got is None:
            raise StepFailure(s + 1)
        for q in range(k):
            perms[lo + q] = got[q]
    paths = []
    for j in range(m):
        order = tuple(p[j] for p in perms)
        bad = validate_ell_path(H, order, ell)
        if bad:
            raise PipelineError(f"path {j} has non-edge windows at {bad}")
        paths.append(EllPath(order, k, ell))
    return PathSystem(tuple(paths))


# -- tailoring ----------------------------------------------------------------

@dataclass(frozen=True)
class Connection:
    cycle: EllCycle
    dirac_predicted: int


def connect_paths(H: KGraph, ps: PathSystem, cs: ConnectingSystem, ell: int) -> Connection:
    """Join P_i to P_{i+1} by a Hamiltonian ℓ-path of H[W_i ∪ Y_i ∪ X_{i+1}]
    starting with P_i's last edge and ending with P_{i+1}'s first edge."""
    k = H.k
    m = ps.m
    if cs.m != m:
        raise ValueError(f"{cs.m} blocks for {m} paths")
    if ps.covered & cs.vertices:
        raise ValueError("blocks meet the path-system")
    if len(ps.covered) + len(cs.vertices) != H.n:
        raise ValueError("paths and blocks do not cover V(H)")
    order: list[int] = []
    predicted = 0
    for i in range(m):
        Y = ps.paths[i].last_edge
        X = ps.paths[(i + 1) % m].first_edge
        region = sorted(set(cs.blocks[i]) | set(Y) | set(X))
        local = {v: j for j, v in enumerate(region)}
        F = induced(H, region)
        if F.n >= F.k and min_codegree(F) > F.n / 2:
            predicted += 1
        q = find_ell_path_constrained(F, ell, [local[v] for v in Y], [local[v] for v in X])
        if q is None:
            raise ConnectorFailure(i + 1)
        order.extend(ps.paths[i].ordering)
        order.extend(region[j] for j in q[k:len(q) - k])
    check = validate_ell_cycle(H, order, ell)
    if not check.ok or not check.spanning:
        raise PipelineError(f"spliced ordering fails validation: {check}")
    return Connection(EllCycle(tuple(order), k, ell), predicted)


# -- sampler ------------------------------------------------------------------

@dataclass
class Diagnostics:
    params: PipelineParams | None = None
    min_codegree: int = 0
    dirac: bool = False
    cs_attempts: int = 0
    cs_resamples: int = 0
    eta: float = 0.0
    samples: int = 0
    partition_attempts: int = 0
    path_failures: int = 0
    connector_failures: int = 0
    connectors_predicted: int = 0
    connectors_total: int = 0
    repeats: int = 0
    violations: int = 0
    dstar: list[int] = field(default_factory=list)
    failure: str = ""
    systems: list[ConnectingSystem] = field(default_factory=list)


@dataclass(frozen=True)
class SampleResult:
    cycles: tuple[EllCycle, ...]
    diagnostics: Diagnostics
    requested: int

    @property
    def complete(self) -> bool:
        return len(self.cycles) >= self.requested


@dataclass(frozen=True)
class _Outcome:
    index: int
    connection: Connection | None
    key: tuple | None
    dstar: int
    partition_attempts: int
    path_failures: int
    error: str


_SHARED: dict = {}


def _init_worker(H, ell, cs, seed, dstar_threshold, stage_tries):
    _SHARED.update(H=H, ell=ell, cs=cs, seed=seed, thr=dstar_threshold, tries=stage_tries)


def _run_sample(index: int) -> _Outcome:
    g = _SHARED
    return _sample_once(g["H"], g["ell"], g["cs"], g["seed"], index, g["thr"], g["tries"])


def _sample_once(H: KGraph, ell: int, cs: ConnectingSystem, seed: int, index: int,
                 dstar_threshold: float, stage_tries: int) -> _Outcome:
    rest = set(range(H.n)) - cs.vertices
    parts_tried = fails = 0
    dstar = 0
    for attempt in range(stage_tries):
        try:
            view, dstar, used = sample_good_partition(
                H, rest, cs.m, stage_tries, derive_seed(seed, _PARTITION, index, attempt),
                threshold=dstar_threshold)
        except PartitionError as exc:
            return _Outcome(index, None, None, 0, parts_tried + stage_tries, fails, str(exc))
        parts_tried += used
        try:
            ps = build_path_system(H, view, ell, derive_seed(seed, _PATHS, index, attempt),
                                   stage_tries)
        except StepFailure:
            fails += 1
            continue
        try:
            conn = connect_paths(H, ps, cs, ell)
        except ConnectorFailure as exc:
            return _Outcome(index, None, None, dstar, parts_tried, fails, str(exc))
        return _Outcome(index, conn, ps.key(), dstar, parts_tried, fails, "")
    return _Outcome(index, None, None, dstar, parts_tried, fails, "path-system retries exhausted")


def sample_ham_cycles(H: KGraph, ell: int, count: int, seed: int, target_m: int = 2,
                      target_t: int = 5, eta_target: float = 0.2,
                      dstar_threshold: float = 0.0, stage_tries: int = 20,
                      max_samples: int | None = None, connector_patience: int = 3,
                      workers: int = 1) -> SampleResult:
    """Sample ``count`` Hamiltonian ℓ-cycles with pairwise distinct edge sets.

    Sample i is a pure function of (H, connecting-system, seed, i), so the
    output does not depend on ``workers``. After ``connector_patience``
    consecutive connector failures the connecting-system is resampled and
    the pending samples are redone against it. When the budget runs out the
    result holds the cycles found so far and the reason in its diagnostics.
    """
    k = H.k
    diag = Diagnostics()
    P = solve_params(H.n, k, ell, target_m, target_t)
    diag.params = P
    diag.min_codegree = min_codegree(H)
    diag.dirac = diag.min_codegree > H.n / 2
    if not diag.dirac:
        warnings.warn(f"min co-degree {diag.min_codegree} <= n/2: proceeding best-effort",
                      RuntimeWarning, stacklevel=2)
    if max_samples is None:
        max_samples = 4 * count + 20
    cycles: list[EllCycle] = []
    seen: dict[tuple, tuple] = {}

    def new_cs(round_: int) -> ConnectingSystem | None:
        try:
            cs = find_connecting_system(H, P.m, P.t, eta_target, stage_tries,
                                        derive_seed(seed, _CS, round_))
        except ConnectingSystemError as exc:
            diag.failure = str(exc)
            return None
        diag.cs_attempts += cs.attempts
        diag.eta = cs.eta
        diag.systems.append(cs)
        return cs

    cs_round = 0
    cs = new_cs(cs_round)
    if cs is None:
        return SampleResult((), diag, count)
    streak = 0
    index = 0
    pool = None
    batch = max(1, workers)
    try:
        while len(cycles) < count and index < max_samples:
            todo = list(range(index, min(index + batch, max_samples)))
            if workers > 1:
                if pool is None:
                    pool = ProcessPoolExecutor(workers, initializer=_init_worker,
                                               initargs=(H, ell, cs, seed, dstar_threshold, stage_tries))
                outcomes = list(pool.map(_run_sample, todo))
            else:
                outcomes = [_sample_once(H, ell, cs, seed, i, dstar_threshold, stage_tries)
                            for i in todo]
            restart = False
            for out in outcomes:
                index = out.index + 1
                diag.samples += 1
                diag.partition_attempts += out.partition_attempts
                diag.path_failures += out.path_failures
                if out.connection is None:
                    if out.error.startswith("no connecting"):
                        diag.connector_failures += 1
                        streak += 1
                        if streak >= connector_patience:
                            streak = 0
                            cs_round += 1
                            diag.cs_resamples += 1
                            cs = new_cs(cs_round)
                            if cs is None:
                                return SampleResult(tuple(cycles), diag, count)
                            if pool is not None:
                                pool.shutdown()
                                pool = None
                            restart = True
                            break
                    continue
                streak = 0
                diag.connectors_total += P.m
                diag.connectors_predicted += out.connection.dirac_predicted
                cyc = out.connection.cycle
                prev = seen.get(cyc.canonical_edges)
                if prev is not None:
                    if prev == out.key:
                        diag.repeats += 1
                    else:
                        diag.violations += 1
                        log.warning("distinct path-systems gave the same cycle (sample %d)",
                                    out.index)
                    continue
                seen[cyc.canonical_edges] = out.key
                cycles.append(cyc)
                diag.dstar.append(out.dstar)
                if len(cycles) >= count:
                    break
            if restart:
                continue
    finally:
        if pool is not None:
            pool.shutdown()
    if len(cycles) < count:
        diag.failure = diag.failure or (f"retry budget exhausted after {diag.samples} samples "
                                        f"({len(cycles)}/{count} cycles)")
    return SampleResult(tuple(cycles), diag, count)

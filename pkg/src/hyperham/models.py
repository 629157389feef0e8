"""Seeded instance generators.

All randomness flows through ``numpy.random.default_rng`` seeded with
integer tuples, so an instance is a pure function of its parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .graph import KGraph, min_codegree

FAMILIES = ("complete", "binomial", "dirac_rejection", "bipartite3", "h_epsilon")


def rng_for(*key: int) -> np.random.Generator:
    """Independent stream for an integer key such as (seed, stage, attempt)."""
    return np.random.default_rng([int(x) for x in key])


def gen_complete(n: int, k: int) -> KGraph:
    return KGraph._trusted(n, k, frozenset(combinations(range(n), k)))


def gen_binomial(n: int, k: int, p: float, seed: int) -> KGraph:
    """Each k-set is an edge independently with probability ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    combos = list(combinations(range(n), k))
    keep = rng_for(seed).random(len(combos)) < p
    return KGraph._trusted(n, k, frozenset(c for c, x in zip(combos, keep) if x))


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DiracSample:
    graph: KGraph
    min_codegree: int
    p: float
    attempts: int


def gen_dirac(n: int, k: int, delta: float, seed: int, max_tries: int = 30,
              margin: float = 0.05, margin_step: float = 0.05) -> DiracSample:
    """Rejection-sample binomial graphs at p = delta + margin until the
    minimum co-degree is at least delta·n; the margin grows by
    ``margin_step`` after every rejection."""
    if not 0.5 < delta < 1:
        raise ValueError(f"delta must lie in (1/2, 1), got {delta}")
    for attempt in range(max_tries):
        p = round(min(1.0, delta + margin + attempt * margin_step), 10)
        H = gen_binomial(n, k, p, seed=_mix(seed, attempt))
        d = min_codegree(H)
        if d >= delta * n:
            return DiracSample(H, d, p, attempt + 1)
    raise GenerationError(f"no {delta}-Dirac instance in {max_tries} tries "
                          f"(last p={p:.3f}, min co-degree {d}); try a larger margin")


def derive_seed(*key: int) -> int:
    """One integer seed from an integer key, for APIs that take a single seed."""
    return int(np.random.SeedSequence([int(x) for x in key]).generate_state(1)[0])


def _mix(seed: int, attempt: int) -> int:
    return derive_seed(seed, attempt)


def gen_bipartite3(n: int) -> KGraph:
    """3-graph on X ∪ Y, |X| = n/3 - 1, with every triple meeting X."""
    if n % 3 or n < 9:
        raise ValueError(f"need 3 | n and n >= 9, got n={n}")
    return _meets_prefix(n, n // 3 - 1)


def h_epsilon_sizes(n: int, eps: float | Fraction) -> tuple[int, int]:
    """|X| = floor((1/3 + eps)·n), |Y| = n - |X|; ``eps`` is snapped to the
    nearest fraction with denominator <= 10^6 so that 1/9 means 1/9."""
    e = Fraction(eps).limit_denominator(10**6)
    if not 0 < e < Fraction(1, 6):
        raise ValueError(f"eps must lie in (0, 1/6), got {eps}")
    x = math.floor((Fraction(1, 3) + e) * n)
    return x, n - x


def gen_h_epsilon(n: int, eps: float | Fraction) -> KGraph:
    """Like ``gen_bipartite3`` but with |X| = floor((1/3 + eps)·n)."""
    x, _ = h_epsilon_sizes(n, eps)
    return _meets_prefix(n, x)


def _meets_prefix(n: int, x: int) -> KGraph:
    # X = {0..x-1}; a sorted triple meets X iff its smallest vertex does
    return KGraph._trusted(n, 3, frozenset(c for c in combinations(range(n), 3) if c[0] < x))


def gen_bipartite_dirac(m: int, min_ratio: float, seed: int, p: float | None = None,
                        max_tries: int = 1000) -> np.ndarray:
    """Random m×m 0/1 incidence matrix with every row and column sum at
    least ceil(min_ratio·m), by rejection."""
    need = math.ceil(min_ratio * m - 1e-12)
    if p is None:
        p = min(1.0, min_ratio + 0.2)
    rng = rng_for(seed)
    for _ in range(max_tries):
        B = (rng.random((m, m)) < p).astype(np.int8)
        if B.sum(axis=0).min() >= need and B.sum(axis=1).min() >= need:
            return B
    raise GenerationError(f"no bipartite instance with min degree {need} in {max_tries} tries")


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    k: int = 3
    p: float | None = None
    delta: float | None = None
    eps: float | Fraction | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.family in ("bipartite3", "h_epsilon") and self.k != 3:
            raise ValueError(f"{self.family} is a 3-graph family")


def generate(spec: GenSpec) -> KGraph:
    if spec.family == "complete":
        return gen_complete(spec.n, spec.k)
    if spec.family == "binomial":
        if spec.p is None:
            raise ValueError("binomial needs p")
        return gen_binomial(spec.n, spec.k, spec.p, spec.seed)
    if spec.family == "dirac_rejection":
        if spec.delta is None:
            raise ValueError("dirac needs delta")
        return gen_dirac(spec.n, spec.k, spec.delta, spec.seed).graph
    if spec.family == "bipartite3":
        return gen_bipartite3(spec.n)
    if spec.eps is None:
        raise ValueError("h_epsilon needs eps")
    return gen_h_epsilon(spec.n, spec.eps)

"""Closed-form cycle counts (exact) and log-space evaluators of the bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction


class DomainWarning(UserWarning):
    """A bound was evaluated outside the range where it is claimed."""


def c_k_ell(k: int, ell: int) -> int:
    """Within-block reordering multiplicity r!(k-ell-r)!, r = k mod (k-ell)."""
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    step = k - ell
    r = k % step
    return math.factorial(r) * math.factorial(step - r)


@dataclass(frozen=True)
class ExactCount:
    value: Fraction
    reliable: bool = True
    note: str = ""

    @property
    def is_integer(self) -> bool:
        return self.value.denominator == 1

    def __int__(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self.value} is not an integer")
        return self.value.numerator

    def __eq__(self, other):
        if isinstance(other, ExactCount):
            return self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash(self.value)


def psi_reliability(n: int, k: int, ell: int) -> tuple[bool, str]:
    """Whether the closed form for Ψ_k(n, ell) counts distinct edge sets.

    The closed form divides the n! orderings by a symmetry group of order
    2B·c^B (B = n/(k-ell) windows), which is right when that group is the
    whole stabiliser of the cycle's edge set. It is larger when

    - B <= 2: rotation and reflection coincide;
    - ell = 0: the windows are disjoint, so the edge set is an unordered
      perfect matching (stabiliser of order B!·(k!)^B);
    - n <= 2k - ell: the gaps between windows (the n-k vertices a window
      misses) are pairwise disjoint, so the edge set is again an unordered
      family.

    In the last two cases B! = 2B at B = 3 and the count is still exact.
    """
    B = n // (k - ell)
    if B <= 2:
        return False, "degenerate: at most two windows"
    if ell == 0 and B != 3:
        return False, "ell=0: the edge set is an unordered perfect matching"
    if n < 2 * k - ell or (n == 2 * k - ell and B != 3):
        return False, "short cycle: window complements are disjoint"
    return True, ""


def psi(n: int, k: int, ell: int) -> ExactCount:
    """(n-1)! · (k-ell)/2 · c_k(ell)^(-n/(k-ell)), exactly."""
    if not 0 <= ell < k:
        raise ValueError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    step = k - ell
    if n % step:
        raise ValueError(f"n={n} is not divisible by k-ell={step}")
    if n < k:
        raise ValueError(f"need n >= k (n={n}, k={k})")
    B = n // step
    value = Fraction(math.factorial(n - 1) * step, 2 * c_k_ell(k, ell) ** B)
    reliable, note = psi_reliability(n, k, ell)
    return ExactCount(value, reliable, note)


def log_psi(n: int, k: int, ell: int) -> float:
    step = k - ell
    if n % step:
        raise ValueError(f"n={n} is not divisible by k-ell={step}")
    return (math.lgamma(n) + math.log(step / 2)
            - (n // step) * math.log(c_k_ell(k, ell)))


@dataclass(frozen=True)
class LogBound:
    log_value: float
    slack: float

    def __post_init__(self):
        if not 0 < self.slack <= 1:
            raise ValueError(f"slack must lie in (0, 1], got {self.slack}")

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def dirac_lower_bound_log(n: int, k: int, ell: int, delta: float,
                          slack: float = 1.0) -> LogBound:
    """log(slack^n · Ψ_k(n, ell) · delta^(n/(k-ell))).

    ``slack`` stands in for the unquantified (1-o(1)) factor and must be
    chosen by the caller.
    """
    if not 0 < slack <= 1:
        raise ValueError(f"slack must lie in (0, 1], got {slack}")
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if delta <= 0.5:
        warnings.warn(f"delta={delta} <= 1/2: the lower bound is not claimed here",
                      DomainWarning, stacklevel=2)
    B = n // (k - ell)
    log_value = log_psi(n, k, ell) + B * math.log(delta) + n * math.log(slack)
    return LogBound(log_value, slack)


def gnp_expected_ham_log(n: int, p: float) -> float:
    """log of (n-1)! p^n / 2, the expected Hamiltonian cycle count of G(n, p)."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return math.lgamma(n) + n * math.log(p) - math.log(2)


def ck_matching_bound_log(n_side: int, d: int | float, slack: float = 1.0) -> float:
    """log of slack^n · n! · (d/n)^n for a bipartite graph with sides of size n
    and minimum degree d."""
    if n_side < 1:
        raise ValueError(f"need n_side >= 1, got {n_side}")
    if not 0 < d <= n_side:
        raise ValueError(f"need 0 < d <= n_side, got d={d}")
    if not 0 < slack <= 1:
        raise ValueError(f"slack must lie in (0, 1], got {slack}")
    if d < n_side / 2:
        warnings.warn(f"d={d} < n/2: the matching bound is not claimed here",
                      DomainWarning, stacklevel=2)
    n = n_side
    return math.lgamma(n + 1) + n * math.log(d / n) + n * math.log(slack)

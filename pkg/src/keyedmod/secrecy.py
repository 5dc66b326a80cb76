"""Keyspace, unicity, perfect-secrecy, and matching-count analytics.

The permutation key over an M-point scheme has M! equally likely values,
so key entropy is log2(M!) bits and a message must stay short enough
that M^n <= M! for the keyspace to cover all message candidates. With
independent symbols (zero redundancy) the unicity distance diverges:
no amount of intercepted traffic pins down the key. Brute-forcing the
assignment is counting-hard: candidate assignments are the perfect
matchings of a bipartite graph, counted by the permanent of its
bi-adjacency matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "KeyspaceReport",
    "UnicityResult",
    "PerfectSecrecyReport",
    "keyspace_report",
    "unicity",
    "permanent",
    "verify_perfect_secrecy",
]

#: Exhaustive key enumeration is refused beyond this many keys (6! = 720).
MAX_SECRECY_ORDER = 6

#: Permanent evaluation is refused beyond this dimension (2**20 subset terms).
MAX_PERMANENT_DIM = 20


@dataclass(frozen=True)
class KeyspaceReport:
    order: int
    keyspace_size: int
    key_entropy_bits: float
    shannon_bound_max_symbols: int


def keyspace_report(order: int) -> KeyspaceReport:
    """Exact keyspace size M!, its entropy in bits, and the largest n with M^n <= M!."""
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if order > 64:
        raise ValueError(f"order above 64 not supported, got {order}")
    size = math.factorial(order)
    entropy = sum(math.log2(k) for k in range(2, order + 1))
    n = 0
    while order ** (n + 1) <= size:
        n += 1
    return KeyspaceReport(
        order=order,
        keyspace_size=size,
        key_entropy_bits=entropy,
        shannon_bound_max_symbols=n,
    )


@dataclass(frozen=True)
class UnicityResult:
    """Ciphertext volume needed for a unique brute-force solution, H(K)/D."""

    entropy_bits: float
    redundancy: float
    distance: float

    def __post_init__(self) -> None:
        infinite = math.isinf(self.distance)
        if infinite != (self.redundancy == 0 and self.entropy_bits > 0):
            raise ValueError("distance is infinite iff redundancy is 0 and entropy > 0")


def unicity(entropy_bits: float, redundancy: float) -> UnicityResult:
    """Unicity distance for the given key entropy and per-symbol message redundancy."""
    if entropy_bits < 0:
        raise ValueError(f"entropy must be >= 0, got {entropy_bits}")
    if redundancy < 0:
        raise ValueError(f"redundancy must be >= 0, got {redundancy}")
    if entropy_bits == 0:
        distance = 0.0
    elif redundancy == 0:
        distance = math.inf
    else:
        distance = entropy_bits / redundancy
    return UnicityResult(
        entropy_bits=entropy_bits, redundancy=redundancy, distance=distance
    )


def _as_binary_matrix(matrix) -> list[list[int]]:
    arr = np.asarray(matrix)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix must be square, got shape {arr.shape}")
    rows = [[int(v) for v in row] for row in arr]
    for row in rows:
        for v in row:
            if v not in (0, 1):
                raise ValueError(f"matrix entries must be 0 or 1, got {v}")
    return rows


def permanent(matrix) -> int:
    """Exact permanent of a square 0/1 matrix via Ryser's inclusion-exclusion.

    Runs in O(2^n * n) using Gray-code column subsets and exact integer
    arithmetic; equals the number of perfect matchings of the bipartite
    graph whose bi-adjacency matrix this is. Dimensions above
    ``MAX_PERMANENT_DIM`` are refused.
    """
    rows = _as_binary_matrix(matrix)
    n = len(rows)
    if n == 0:
        return 1
    if n > MAX_PERMANENT_DIM:
        raise ValueError(
            f"dimension {n} exceeds the exact-evaluation guard ({MAX_PERMANENT_DIM})"
        )
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    row_sums = [0] * n
    total = 0
    prev_gray = 0
    popcount = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        changed = gray ^ prev_gray
        j = changed.bit_length() - 1
        if gray & changed:
            popcount += 1
            col = cols[j]
            for i in range(n):
                row_sums[i] += col[i]
        else:
            popcount -= 1
            col = cols[j]
            for i in range(n):
                row_sums[i] -= col[i]
        prev_gray = gray
        term = 1
        for s in row_sums:
            term *= s
            if term == 0:
                break
        if term:
            total += term if (popcount & 1) == (n & 1) else -term
    return total


@dataclass(frozen=True)
class PerfectSecrecyReport:
    """Exhaustive check that ciphertext reveals nothing about the plaintext symbol."""

    order: int
    n_keys: int
    prior: tuple[Fraction, ...]
    passed: bool
    max_deviation: Fraction
    n_checked: int


def _as_prior(order: int, prior) -> tuple[Fraction, ...]:
    if prior is None:
        return tuple(Fraction(1, order) for _ in range(order))
    probs = tuple(Fraction(p) for p in prior)
    if len(probs) != order:
        raise ValueError(f"prior must have {order} entries, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise ValueError("prior probabilities must be nonnegative")
    if sum(probs) != 1:
        raise ValueError(f"prior must sum to 1 exactly, got {sum(probs)}")
    return probs


def verify_perfect_secrecy(order: int, prior=None) -> PerfectSecrecyReport:
    """Enumerate all keys exactly and test plaintext/ciphertext independence.

    Under a uniform key, for every plaintext symbol p and every observed
    point index c the posterior prob(P=p | C=c) must equal the prior
    prob(P=p), and symmetrically prob(C=c | P=p) must equal prob(C=c).
    All arithmetic is rational, so the check is exact. Orders above
    ``MAX_SECRECY_ORDER`` are refused.
    """
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    if order > MAX_SECRECY_ORDER:
        raise ValueError(
            f"order {order} exceeds the exhaustive-enumeration guard"
            f" ({MAX_SECRECY_ORDER})"
        )
    probs = _as_prior(order, prior)
    n_keys = math.factorial(order)
    key_weight = Fraction(1, n_keys)

    joint = [[Fraction(0)] * order for _ in range(order)]
    for perm in itertools.permutations(range(order)):
        for p in range(order):
            joint[p][perm[p]] += probs[p] * key_weight

    marginal_c = [sum(joint[p][c] for p in range(order)) for c in range(order)]
    max_dev = Fraction(0)
    checked = 0
    for p in range(order):
        for c in range(order):
            posterior = joint[p][c] / marginal_c[c] if marginal_c[c] else Fraction(0)
            max_dev = max(max_dev, abs(posterior - probs[p]))
            checked += 1
            if probs[p]:
                likelihood = joint[p][c] / probs[p]
                max_dev = max(max_dev, abs(likelihood - marginal_c[c]))
                checked += 1
    return PerfectSecrecyReport(
        order=order,
        n_keys=n_keys,
        prior=probs,
        passed=max_dev == 0,
        max_deviation=max_dev,
        n_checked=checked,
    )

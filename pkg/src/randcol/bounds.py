"""Closed-form probability bounds, exact binomial tails, and the
nearly-disjoint block family used by the equipartition argument.

Every asymptotic constant is an explicit BoundConstants field defaulting
to 1.0. These defaults are NOT taken from any source; they exist so the
expressions are computable, and experiments must treat them as free
parameters to fit or sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError


@dataclass(frozen=True)
class BoundConstants:
    """Positive constants for the implicit Omega/Theta factors.

    c_shinkar scales the exp(-c*d) colouring bound for expander
    families; c1/c2 belong to the first blow-up proof; c3 is the digraph
    vertex-expansion constant; c4 the resilient-pair constant; c_prime
    and c_dprime the girth and spectral-gap constants; c_thm2 scales all
    three subgraph-colouring tail regimes.
    """

    c_shinkar: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0
    c_prime: float = 1.0
    c_dprime: float = 1.0
    c_thm2: float = 1.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) <= 0:
                raise InputError(f"constant {name} must be positive")


def _ceil_exact(x) -> int:
    # math.ceil is exact on int/Fraction; floats convert exactly first
    if isinstance(x, float):
        x = Fraction(x)
    return math.ceil(x)


def binom_tail_geq(n: int, q, x) -> float:
    """Exact upper tail P(Binom(n, q) >= x) by stable log-space
    summation (fsum of per-term exponentials). Non-integer x means the
    sum starts at ceil(x)."""
    if n < 0:
        raise InputError("n must be non-negative")
    if not 0 <= q <= 1:
        raise InputError("q must lie in [0, 1]")
    if not 0 <= x <= n + 1:
        raise InputError(f"x={x} outside 0..n+1")
    lo = max(0, _ceil_exact(x))
    if lo == 0:
        return 1.0
    if lo > n:
        return 0.0
    qf = float(q)
    if qf == 0.0:
        return 0.0
    if qf == 1.0:
        return 1.0
    lq, l1q = math.log(qf), math.log1p(-qf)
    lgn = math.lgamma(n + 1)
    terms = [
        math.exp(
            lgn
            - math.lgamma(i + 1)
            - math.lgamma(n - i + 1)
            + i * lq
            + (n - i) * l1q
        )
        for i in range(lo, n + 1)
    ]
    return min(1.0, math.fsum(terms))


def theorem2_tail_bound(k: int, d: int, constants: BoundConstants | None = None) -> tuple:
    """Tail bound(s) on P(chromatic number of a half-density subgraph of
    a k-clique is at most d), as (regime_tag, value) pairs.

    Regime membership is decided by exact integer comparisons
    (d*d vs k, d**3 vs k); on a shared boundary both regimes are
    reported. Above sqrt(k) the bound is vacuous and tagged "trivial".
    Values use C = constants.c_thm2 and are clamped to [0, 1].
    """
    if not (isinstance(k, int) and isinstance(d, int)):
        raise InputError("k and d must be integers")
    if not 1 <= d <= k:
        raise InputError(f"d={d} outside 1..{k}")
    c = (constants or BoundConstants()).c_thm2
    sqrt_k = math.sqrt(k)
    out = []
    if d * d <= k and 4 * d * d >= k:
        exponent = c * (sqrt_k - d) ** 2 / sqrt_k
        out.append(("near_sqrt", min(1.0, math.exp(-exponent))))
    if d ** 3 >= k and 4 * d * d <= k:
        out.append(("mid", min(1.0, math.exp(-c * k / d))))
    if d ** 3 <= k:
        exponent = c * k * (k - d ** 3) / d ** 3
        out.append(("small_d", min(1.0, math.exp(-exponent))))
    if not out:
        out.append(("trivial", 1.0))
    return tuple(out)


def proposition_lower_bound(p: float, k, n) -> float:
    """Chromatic-number lower bound p*k / (2 ln n) for a p-subgraph of a
    graph whose every subgraph on the same vertices needs k colours."""
    if not 0 < p <= 1:
        raise InputError("p must lie in (0, 1]")
    if k < 2 or n < 2:
        raise InputError("k and n must be at least 2")
    return p * k / (2 * math.log(n))


def _log_choose(n: int, r: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def resilient_pair_probability_bound(k: int, s: int, constants: BoundConstants | None = None):
    """Union bound on one super-vertex containing a resilient pair:
    (s+2) * C(M, k/s) * P(Binom(M, 1/2 + 1/2s) >= k/4)^(k/s) with
    M = k/2 - k/2s, evaluated in log-space and clamped to [0, 1].

    Returns the value alone, or (value, (1+c4)^(-k^2)) when constants
    are supplied for comparison against the target decay rate.
    """
    if s < 2:
        raise InputError("s must be at least 2")
    if k <= 0 or k % (2 * s):
        raise InputError("k must be a positive multiple of 2s")
    m = k // 2 - k // (2 * s)
    size = k // s
    if size > m:
        value = 0.0
    else:
        tail = binom_tail_geq(m, Fraction(1, 2) + Fraction(1, 2 * s), Fraction(k, 4))
        if tail == 0.0:
            value = 0.0
        else:
            log_value = (
                math.log(s + 2) + _log_choose(m, size) + size * math.log(tail)
            )
            value = min(1.0, math.exp(log_value))
    if constants is None:
        return value
    log_ref = -(k ** 2) * math.log1p(constants.c4)
    reference = math.exp(log_ref) if log_ref > -745 else 0.0
    return value, reference


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    f = 2
    while f * f <= q:
        if q % f == 0:
            return False
        f += 1
    return True


def near_disjoint_family(k: int, block_size: int) -> list:
    """Subsets of range(k), each of size >= block_size, pairwise
    intersecting in at most one element.

    When k = q*q for a prime q and block_size <= q, the q*q + q lines of
    the affine plane over F_q give the large family; otherwise the
    fallback is the ceil-free disjoint partition into floor(k/block_size)
    blocks."""
    if block_size < 1:
        raise InputError("block_size must be at least 1")
    if block_size > k:
        raise InputError("block_size cannot exceed k")
    q = math.isqrt(k)
    if q * q == k and _is_prime(q) and block_size <= q:
        blocks = []
        for a in range(q):
            for b in range(q):
                blocks.append(frozenset((x * q + (a * x + b) % q) for x in range(q)))
        for cx in range(q):
            blocks.append(frozenset(cx * q + y for y in range(q)))
        return blocks
    return [
        frozenset(range(i * block_size, (i + 1) * block_size))
        for i in range(k // block_size)
    ]

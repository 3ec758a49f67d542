"""Collusion patterns and information-set rate planning.

A pattern is the inclusion-closed family of server sets that may pool their
queries, stored by its maximal sets.  Servers are 0-based.  Every singleton
is implicitly colluding, since a server always sees its own query.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

MAX_PARTS = 20


class PatternError(ValueError):
    pass


class PlanError(ValueError):
    """No information-set scheme with positive rate exists."""


@dataclass(frozen=True)
class CollusionPattern:
    n: int
    maximal_sets: tuple[frozenset[int], ...]

    def __repr__(self):
        sets = ", ".join("{" + ",".join(map(str, sorted(s))) + "}" for s in self.maximal_sets)
        return f"<{sets}> on {self.n} servers"

    def facets(self) -> list[frozenset[int]]:
        """Maximal sets plus singletons for servers in no listed set."""
        covered = set().union(*self.maximal_sets) if self.maximal_sets else set()
        return list(self.maximal_sets) + [frozenset({j}) for j in range(self.n) if j not in covered]

    def contains(self, subset: Iterable[int]) -> bool:
        return contains(self, subset)


def _sort_key(s: frozenset[int]):
    return (sorted(s), len(s))


def pattern_from_maximal(n: int, sets: Iterable[Iterable[int]]) -> CollusionPattern:
    if n < 1:
        raise PatternError(f"need at least one server, got n={n}")
    normalized = []
    for idx, s in enumerate(sets):
        s = frozenset(int(j) for j in s)
        if not s:
            raise PatternError(f"colluding set #{idx} is empty")
        bad = [j for j in s if not 0 <= j < n]
        if bad:
            raise PatternError(f"colluding set #{idx} has servers {sorted(bad)} outside [0, {n})")
        normalized.append(s)
    unique = set(normalized)
    maximal = [s for s in unique if not any(s < other for other in unique)]
    return CollusionPattern(n, tuple(sorted(maximal, key=_sort_key)))


def binomial_pattern(n: int, t: int) -> CollusionPattern:
    """All sets of at most ``t`` servers collude (t-PIR)."""
    return pattern_from_maximal(n, itertools.combinations(range(n), min(t, n)))


def contains(pattern: CollusionPattern, subset: Iterable[int]) -> bool:
    subset = frozenset(subset)
    if len(subset) <= 1:
        return True
    return any(subset <= s for s in pattern.maximal_sets)


def max_colluding_size(pattern: CollusionPattern) -> int:
    return max((len(s) for s in pattern.maximal_sets), default=1)


def partition_parts(pattern: CollusionPattern) -> list[frozenset[int]]:
    """Connected components of the hypergraph of maximal sets, isolated servers included."""
    parent = list(range(pattern.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in pattern.maximal_sets:
        first, *rest = sorted(s)
        for j in rest:
            parent[find(j)] = find(first)
    groups: dict[int, set[int]] = {}
    for j in range(pattern.n):
        groups.setdefault(find(j), set()).add(j)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def is_disconnected(pattern: CollusionPattern) -> tuple[frozenset[int], frozenset[int]] | None:
    """A split (first component, all others) when the pattern is disconnected."""
    parts = partition_parts(pattern)
    if len(parts) < 2:
        return None
    return parts[0], frozenset().union(*parts[1:])


def i_tilde(pattern: CollusionPattern, t: int) -> frozenset[int]:
    """Servers that lie in no colluding set of size greater than ``t``."""
    if t < 1:
        raise PatternError(f"t must be positive, got {t}")
    touched = set()
    for s in pattern.maximal_sets:
        if len(s) > t:
            touched |= s
    return frozenset(range(pattern.n)) - touched


@dataclass(frozen=True)
class RateCandidate:
    t: int
    i_tilde_size: int
    rate: Fraction


@dataclass(frozen=True)
class RatePlan:
    n: int
    k: int
    t: int
    info_set: tuple[int, ...]
    retained_servers: tuple[int, ...]
    rate: Fraction
    candidates: tuple[RateCandidate, ...]


def infoset_rate(size: int, k: int, t: int) -> Fraction:
    return Fraction(size, size + k + t - 1)


def plan_rate(pattern: CollusionPattern, k: int) -> RatePlan:
    """Pick the protection level ``t`` and information set maximizing the rate.

    Every ``t`` up to the largest colluding set is tried; the rate for ``t``
    is ``min(|I~_t| / (|I~_t| + k + t - 1), (n - k - t + 1) / n)`` and is
    only admissible when ``|I~_t| >= k`` and ``t <= n - k``.  Ties go to the
    smallest ``t``.
    """
    n = pattern.n
    if not 1 <= k < n:
        raise PlanError(f"need 1 <= k < n, got k={k}, n={n}")
    candidates = []
    for t in range(1, max_colluding_size(pattern) + 1):
        tilde = i_tilde(pattern, t)
        if len(tilde) < k or t > n - k:
            continue
        rate = min(infoset_rate(len(tilde), k, t), Fraction(n - k - t + 1, n))
        candidates.append((t, tilde, rate))
    if not candidates:
        raise PlanError("pattern admits no positive-rate information-set scheme for this k")
    best_t, best_tilde, best_rate = max(candidates, key=lambda c: (c[2], -c[0]))
    info = tuple(sorted(best_tilde)[: min(len(best_tilde), n - k - best_t + 1)])
    outside = [j for j in range(n) if j not in set(info)][: k + best_t - 1]
    retained = tuple(sorted(info + tuple(outside)))
    rate = infoset_rate(len(info), k, best_t)
    assert rate == best_rate
    table = tuple(RateCandidate(t, len(tilde), r) for t, tilde, r in candidates)
    return RatePlan(n, k, best_t, info, retained, rate, table)


def naive_rate(pattern: CollusionPattern, k: int) -> Fraction | None:
    """Rate of plain t-PIR against the largest colluding set, or None if infeasible."""
    t = max_colluding_size(pattern)
    if t > pattern.n - k or k < 1:
        return None
    return Fraction(pattern.n - k - t + 1, pattern.n)


def support_unions(parts: Sequence[frozenset[int]]) -> Iterable[frozenset[int]]:
    """Every union of parts, including the empty and the full one."""
    if len(parts) > MAX_PARTS:
        raise PatternError(f"{len(parts)} parts exceed the enumeration limit of {MAX_PARTS}")
    for mask in range(2 ** len(parts)):
        yield frozenset().union(*(parts[b] for b in range(len(parts)) if mask >> b & 1))

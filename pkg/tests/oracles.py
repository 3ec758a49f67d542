"""Brute-force reference computations used as independent oracles.

Nothing here touches row reduction or the numpy paths of the package:
codes are handled as explicit sets of codewords.
"""

import itertools
from fractions import Fraction


def span(rows, p, n):
    """Every linear combination of ``rows`` over F_p, as a set of tuples."""
    words = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        words.add(tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(n)))
    if not rows:
        words.add((0,) * n)
    return words


def min_weight(words):
    return min(sum(1 for v in w if v) for w in words if any(w))


def projection(words, coords):
    return {tuple(w[j] for j in coords) for w in words}


def all_subspaces(p, n):
    """Every linear subspace of F_p^n, as frozensets of codewords (small n only)."""
    seen = set()
    vectors = list(itertools.product(range(p), repeat=n))
    frontier = [frozenset({(0,) * n})]
    seen.add(frontier[0])
    while frontier:
        nxt = []
        for space in frontier:
            for v in vectors:
                if v in space:
                    continue
                bigger = frozenset(
                    tuple((a + c * b) % p for a, b in zip(w, v)) for w in space for c in range(p)
                )
                if bigger not in seen:
                    seen.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return seen


def basis_of(space, p, n):
    """A basis (list of rows) of a subspace given as a set of words, greedily."""
    basis = []
    spanned = {(0,) * n}
    for w in sorted(space):
        if w not in spanned:
            basis.append(list(w))
            spanned = span(basis, p, n)
    return basis


def disconnected_by_definition(n, maximal_sets):
    """Some split of [n] into nonempty disjoint T1, T2 with every set inside one side."""
    servers = range(n)
    for r in range(1, n):
        for t1 in itertools.combinations(servers, r):
            t1 = set(t1)
            if all(s <= t1 or not (s & t1) for s in maximal_sets):
                return True
    return False


def best_infoset_rate(n, k, maximal_sets):
    """Exhaustive search over information sets I and protection levels t.

    ``t`` must cover every colluding set meeting ``I``; the full-file
    condition asks that at least ``k`` servers avoid all sets larger than ``t``.
    """
    tmax = max((len(s) for s in maximal_sets), default=1)
    best = None
    for size in range(1, n + 1):
        for info in itertools.combinations(range(n), size):
            info = set(info)
            t_needed = max([len(s) for s in maximal_sets if s & info] + [1])
            for t in range(t_needed, tmax + 1):
                safe = [j for j in range(n) if all(len(s) <= t for s in maximal_sets if j in s)]
                if len(safe) < k or size > n - k - t + 1:
                    continue
                rate = Fraction(size, size + k + t - 1)
                if best is None or rate > best:
                    best = rate
    return best


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1:]
        yield part + [{first}]


def echelon_bases(p, n):
    """One basis per subspace of F_p^n: every reduced row echelon matrix without zero rows."""
    for k in range(n + 1):
        for pivots in itertools.combinations(range(n), k):
            free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, n) if c not in pivots]
            for values in itertools.product(range(p), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for r, c in enumerate(pivots):
                    rows[r][c] = 1
                for (r, c), v in zip(free, values):
                    rows[r][c] = v
                yield rows

"""Privacy certification for retrieval schemes.

Two independent routes:

* algebraic: a colluding set ``T`` learns nothing iff every block's
  ``e_T`` lies in the projection ``D|_T`` of the retrieval code;
* exact enumeration: every randomness assignment of a round is enumerated,
  the projected queries seen by ``T`` are tabulated for each wanted file,
  and the resulting distributions are compared for equality.

Rounds use independent randomness, so the joint view over all rounds is the
product of the per-round views; it is equal across files iff every round's
view is.  The oracle is exact or skipped, never sampled.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from pirlab.codes import LinearCode, projection_contains
from pirlab.collusion import CollusionPattern
from pirlab.schemes import RetrievalScheme, first_insecure

DEFAULT_ORACLE_CAP = 10**6
_KEY_LIMIT = 2**62


class ConsistencyError(AssertionError):
    """The algebraic and enumeration verdicts disagree."""


def algebraic_check(d: LinearCode, e: Sequence[int], coords) -> bool:
    """True iff ``e`` restricted to ``coords`` lies in ``D`` restricted to ``coords``."""
    coords = sorted(set(coords))
    for j in coords:
        if not 0 <= j < d.n:
            raise ValueError(f"coordinate {j} outside code length {d.n}")
    return projection_contains(d, coords, [int(e[j]) % d.field.p for j in coords])


def state_count(d: LinearCode, m: int, blocks: int) -> int:
    """Randomness assignments per round: one ``D`` codeword per (file, block)."""
    return d.field.p ** (d.k * m * blocks)


def _factor_views(d: LinearCode, coords: list[int]) -> np.ndarray:
    """Projections onto ``coords`` of ``z @ G_D`` for every coefficient vector ``z``."""
    p = d.field.p
    g = np.array(d.gen.data, dtype=np.int64).reshape(d.k, d.n)[:, coords]
    if d.k == 0:
        return np.zeros((1, len(coords)), dtype=np.int64)
    grid = np.indices((p,) * d.k).reshape(d.k, -1).T
    # accumulate row by row to keep products below 2^63 for large p
    out = np.zeros((grid.shape[0], len(coords)), dtype=np.int64)
    for r in range(d.k):
        out = (out + (grid[:, r:r + 1] * g[r]) % p) % p
    return out


def query_view_distribution(
    d: LinearCode,
    block_es: Sequence[Sequence[int]],
    m: int,
    wanted: int,
    coords: Sequence[int],
) -> tuple[np.ndarray, np.ndarray]:
    """Exact distribution of the queries seen by ``coords`` in one round.

    Each (file, block) pair contributes an independent uniform ``D``
    codeword; the wanted file's codewords are shifted by the block's ``e``.
    Returns (sorted view keys or rows, counts).
    """
    p = d.field.p
    coords = list(coords)
    base = _factor_views(d, coords)
    factors = []
    for ell in range(m):
        for e in block_es:
            shift = np.array([int(e[j]) for j in coords], dtype=np.int64) if ell == wanted else 0
            factors.append((base + shift) % p)
    width = len(coords)
    digits = width * len(factors)
    if p**digits < _KEY_LIMIT:
        weights = p ** np.arange(width, dtype=np.int64)
        keys = np.zeros(1, dtype=np.int64)
        stride = p**width
        for f in factors:
            # earlier factors end up in the higher digits
            keys = np.add.outer(keys * stride, f @ weights).ravel()
        uniq, counts = np.unique(keys, return_counts=True)
        return uniq, counts
    sizes = [f.shape[0] for f in factors]
    idx = np.indices(sizes).reshape(len(sizes), -1)
    rows = np.concatenate([f[i] for f, i in zip(factors, idx)], axis=1)
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    return uniq, counts


def distributions_equal(d: LinearCode, block_es: Sequence[Sequence[int]], m: int, coords: Sequence[int]) -> bool:
    """True iff the view of ``coords`` has the same distribution for every wanted file."""
    ref = None
    for i in range(m):
        uniq, counts = query_view_distribution(d, block_es, m, i, coords)
        if ref is None:
            ref = (uniq, counts)
        elif not (np.array_equal(ref[0], uniq) and np.array_equal(ref[1], counts)):
            return False
    return True


@dataclass
class OracleVerdict:
    equal: bool | None
    states: int
    reason: str = ""

    def to_json(self):
        if self.equal is None:
            return {"verdict": "skipped", "states": self.states, "reason": self.reason}
        return {"verdict": "equal" if self.equal else "different", "states": self.states}


def distribution_oracle(
    scheme: RetrievalScheme,
    pattern: CollusionPattern,
    m: int = 2,
    cap: int = DEFAULT_ORACLE_CAP,
) -> dict[frozenset[int], OracleVerdict]:
    """Per maximal colluding set, whether all ``m`` wanted-file indices induce the same query view."""
    d = scheme.retrieval_code
    states = state_count(d, m, scheme.blocks)
    index = {s: pos for pos, s in enumerate(scheme.retained_servers)}
    out = {}
    cache: dict[tuple, bool] = {}
    for T in pattern.facets():
        coords = sorted(index[j] for j in T if j in index)
        if states > cap:
            out[T] = OracleVerdict(None, states, f"skipped(states={states} > cap={cap})")
            continue
        if not coords:
            out[T] = OracleVerdict(True, 0, "no retained server in set")
            continue
        equal = True
        for rnd in scheme.rounds:
            key = (tuple(coords), rnd.block_supports)
            if key not in cache:
                es = [rnd.block_e(b) for b in range(len(rnd.block_supports))]
                cache[key] = distributions_equal(d, es, m, coords)
            if not cache[key]:
                equal = False
                break
        out[T] = OracleVerdict(equal, states)
    return out


@dataclass
class SetVerdict:
    colluding_set: frozenset[int]
    algebraic: bool
    failure: tuple[int, int, tuple[int, ...]] | None  # (round, block, e_T)
    oracle: OracleVerdict


@dataclass
class PrivacyReport:
    sets: list[SetVerdict] = dc_field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(s.algebraic and s.oracle.equal is not False for s in self.sets)

    def failing_sets(self) -> list[frozenset[int]]:
        return [s.colluding_set for s in self.sets if not s.algebraic or s.oracle.equal is False]

    def to_json(self, one_based: bool = True) -> dict:
        off = 1 if one_based else 0
        entries = []
        for s in self.sets:
            entry = {
                "set": sorted(j + off for j in s.colluding_set),
                "algebraic": s.algebraic,
                "oracle": s.oracle.to_json(),
            }
            if s.failure is not None:
                r, b, e_t = s.failure
                entry["failure"] = {"round": r, "block": b, "e_T": list(e_t)}
            entries.append(entry)
        return {
            "overall": self.overall,
            "failing_sets": [sorted(j + off for j in t) for t in self.failing_sets()],
            "sets": entries,
        }


def verify_scheme(
    scheme: RetrievalScheme,
    pattern: CollusionPattern,
    cap: int = DEFAULT_ORACLE_CAP,
    m: int = 2,
) -> PrivacyReport:
    """Check every maximal colluding set algebraically and, within ``cap``, by enumeration.

    Raises :class:`ConsistencyError` if the two routes disagree on any set.
    """
    if pattern.n != scheme.n:
        raise ValueError(f"pattern is on {pattern.n} servers, scheme on {scheme.n}")
    oracle = distribution_oracle(scheme, pattern, m=m, cap=cap)
    report = PrivacyReport()
    index = {s: pos for pos, s in enumerate(scheme.retained_servers)}
    for T in pattern.facets():
        bad = first_insecure(scheme, CollusionPattern(pattern.n, (T,)))
        failure = None
        if bad is not None:
            _, r, b = bad
            coords = sorted(index[j] for j in T if j in index)
            e = scheme.rounds[r].block_e(b)
            failure = (r, b, tuple(e[j] for j in coords))
        verdict = SetVerdict(T, bad is None, failure, oracle[T])
        if verdict.oracle.equal is not None and m >= 2 and verdict.oracle.equal != verdict.algebraic:
            raise ConsistencyError(
                f"set {sorted(T)}: algebraic verdict {verdict.algebraic} but enumeration says {verdict.oracle.equal}"
            )
        report.sets.append(verdict)
    return report

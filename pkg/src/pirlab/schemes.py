"""Executable (D, e) retrieval schemes.

Every scheme is a list of rounds.  In a round the user draws, for every
(file, block) pair, a uniform codeword of the retrieval code ``D`` and adds
a 0-1 vector ``e_b`` to the codewords belonging to the wanted file.  Block
supports are positions into ``retained_servers``, not server labels.

Three families are built here:

* ``tpir``: GRS storage and retrieval codes protecting every set of ``t``
  servers, downloading ``n - k - t + 1`` coded symbols per round;
* ``infoset``: the same machinery run on an information set that avoids
  all colluding sets larger than ``t``, with unused servers punctured away;
* ``partition`` / ``striped``: ``D`` is the repetition code and ``e`` is
  constant on every connected part of a disconnected pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from pirlab.codes import (
    GrsSpec,
    LinearCode,
    full_rank_on,
    grs_code,
    is_mds,
    projection_contains,
    rank_masked_product,
    repetition,
    restrict,
    star_product,
)
from pirlab.collusion import (
    CollusionPattern,
    binomial_pattern,
    max_colluding_size,
    partition_parts,
    plan_rate,
    support_unions,
)
from pirlab.matrix import Matrix

DE_KINDS = ("tpir", "infoset")
REP_KINDS = ("partition", "striped")
SCHEME_KINDS = DE_KINDS + REP_KINDS


class SchemeError(ValueError):
    """The requested scheme cannot be built for these parameters."""


@dataclass(frozen=True)
class RoundPlan:
    """One query round: the positions where each block's ``e_b`` is 1."""

    length: int
    block_supports: tuple[tuple[int, ...], ...]

    def block_e(self, block: int) -> tuple[int, ...]:
        support = set(self.block_supports[block])
        return tuple(int(j in support) for j in range(self.length))

    @property
    def e(self) -> tuple[int, ...]:
        support = {j for s in self.block_supports for j in s}
        return tuple(int(j in support) for j in range(self.length))

    @property
    def block_positions(self) -> dict[int, int]:
        """Block -> position, for rounds reading a single symbol per block."""
        return {b: s[0] for b, s in enumerate(self.block_supports) if len(s) == 1}


@dataclass(frozen=True)
class RetrievalScheme:
    kind: str
    storage_code: LinearCode
    retrieval_code: LinearCode
    retained_servers: tuple[int, ...]
    rounds: tuple[RoundPlan, ...]
    blocks: int
    information_symbols: int
    target: CollusionPattern
    t: int | None = None
    # positions (into retained_servers) whose responses carry no e-shift
    randomness_positions: tuple[int, ...] = ()
    notes: dict = dc_field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.storage_code.n

    @property
    def symbols_per_block(self) -> int:
        return self.storage_code.k

    @property
    def downloaded(self) -> int:
        return len(self.rounds) * len(self.retained_servers)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.information_symbols, self.downloaded)

    @cached_property
    def retained_code(self) -> LinearCode:
        """Storage code punctured to the retained servers."""
        return restrict(self.storage_code, self.retained_servers)

    @cached_property
    def response_check(self) -> Matrix:
        """Parity-check matrix annihilating the interference term of the responses."""
        return star_product(self.retained_code, self.retrieval_code).parity_check

    @property
    def full_file(self) -> bool:
        return self.information_symbols == self.blocks * self.storage_code.k

    def position_of(self, server: int) -> int:
        return self.retained_servers.index(server)


def scheme_rate(scheme: RetrievalScheme) -> Fraction:
    return scheme.rate


def _positions(scheme: RetrievalScheme, servers) -> list[int]:
    index = {s: pos for pos, s in enumerate(scheme.retained_servers)}
    return sorted(index[j] for j in servers if j in index)


def first_insecure(scheme: RetrievalScheme, pattern: CollusionPattern):
    """First (set, round, block) whose projected ``e_b`` leaves ``D|_T``, else None."""
    d = scheme.retrieval_code
    for T in pattern.facets():
        pos = _positions(scheme, T)
        if not pos:
            continue
        for r, rnd in enumerate(scheme.rounds):
            for b in range(len(rnd.block_supports)):
                e = rnd.block_e(b)
                if not projection_contains(d, pos, [e[j] for j in pos]):
                    return T, r, b
    return None


def scheme_secure_against(scheme: RetrievalScheme, pattern: CollusionPattern) -> bool:
    """Algebraic security test: every block's ``e_T`` lies in ``D|_T`` for every colluding ``T``."""
    if pattern.n != scheme.n:
        raise SchemeError(f"pattern is on {pattern.n} servers, scheme on {scheme.n}")
    return first_insecure(scheme, pattern) is None


def _eval_points(code: LinearCode) -> tuple[int, ...]:
    if code.grs is not None:
        return code.grs.eval_points
    if code.n > code.field.p:
        raise SchemeError(f"no GRS evaluation points for length {code.n} over {code.field}")
    return tuple(range(code.n))


def _check_schedule(code: LinearCode, rounds: Sequence[RoundPlan], blocks: int) -> int | None:
    """Offending block if positions repeat or ``code`` is not of full rank on them."""
    for b in range(blocks):
        positions = [rnd.block_supports[b][0] for rnd in rounds]
        if len(set(positions)) != len(positions) or not full_rank_on(code, positions):
            return b
    return None


def _check_decodable(scheme: RetrievalScheme):
    h = scheme.response_check
    for r, rnd in enumerate(scheme.rounds):
        cols = [s[0] for s in rnd.block_supports]
        if h.columns(cols).rank != len(cols):
            raise SchemeError(f"round {r}: positions {cols} cannot be separated from the interference")


def _finish(scheme: RetrievalScheme) -> RetrievalScheme:
    bad = first_insecure(scheme, scheme.target)
    if bad is not None:
        T, r, b = bad
        raise AssertionError(f"constructed scheme leaks to {sorted(T)} in round {r}, block {b}")
    return scheme


def _rotation_rounds(n: int, k: int, blocks: int, slot) -> tuple[RoundPlan, ...]:
    return tuple(RoundPlan(n, tuple((slot(j, b),) for b in range(blocks))) for j in range(k))


def build_tpir_scheme(code: LinearCode, t: int, blocks: int | None = None) -> RetrievalScheme:
    """GRS-based scheme secure against every set of ``t`` servers.

    The file is cut into ``n - k - t + 1`` blocks; each of the ``k`` rounds
    downloads one new coded symbol of every block.
    """
    n, k = code.n, code.k
    if not 1 <= t:
        raise SchemeError(f"t must be positive, got {t}")
    if t > n - k:
        raise SchemeError(f"no positive rate: t={t} exceeds n-k={n - k}")
    expected = n - k - t + 1
    if blocks is not None and blocks != expected:
        raise SchemeError(f"t-PIR on [{n},{k}] with t={t} uses {expected} blocks, not {blocks}")
    blocks = expected
    points = _eval_points(code)
    d = grs_code(GrsSpec(code.field, n, t, points))

    rounds = _rotation_rounds(n, k, blocks, lambda j, b: (j * blocks + b) % n)
    if _check_schedule(code, rounds, blocks) is not None:
        # consecutive rotation repeats a position when k * blocks wraps onto itself
        rounds = _rotation_rounds(n, k, blocks, lambda j, b: (j + b) % n)
    bad = _check_schedule(code, rounds, blocks)
    if bad is not None:
        raise SchemeError(f"cannot schedule {k} distinct full-rank positions for block {bad}")

    scheme = RetrievalScheme(
        kind="tpir",
        storage_code=code,
        retrieval_code=d,
        retained_servers=tuple(range(n)),
        rounds=rounds,
        blocks=blocks,
        information_symbols=blocks * k,
        target=binomial_pattern(n, t),
        t=t,
    )
    _check_decodable(scheme)
    return _finish(scheme)


def build_infoset_scheme(code: LinearCode, pattern: CollusionPattern) -> RetrievalScheme:
    if pattern.n != code.n:
        raise SchemeError(f"pattern is on {pattern.n} servers, code has length {code.n}")
    plan = plan_rate(pattern, code.k)
    k, t = code.k, plan.t
    info = plan.info_set
    if len(info) < k:
        raise SchemeError(f"full-file download requires |I| >= k (|I|={len(info)}, k={k})")
    retained = plan.retained_servers
    points = _eval_points(code)
    d = grs_code(GrsSpec(code.field, len(retained), t, tuple(points[j] for j in retained)))
    info_pos = [retained.index(j) for j in info]
    size = len(info_pos)
    rounds = _rotation_rounds(len(retained), k, size, lambda j, b: info_pos[(b + j) % size])

    scheme = RetrievalScheme(
        kind="infoset",
        storage_code=code,
        retrieval_code=d,
        retained_servers=retained,
        rounds=rounds,
        blocks=size,
        information_symbols=size * k,
        target=pattern,
        t=t,
        notes={"plan": plan},
    )
    bad = _check_schedule(scheme.retained_code, rounds, size)
    if bad is not None:
        raise SchemeError(f"cannot schedule {k} distinct full-rank positions for block {bad}")
    _check_decodable(scheme)
    if scheme.rate != plan.rate:
        raise AssertionError(f"scheme rate {scheme.rate} differs from planned {plan.rate}")
    return _finish(scheme)


def choose_partition_support(n: int, parts: Sequence[frozenset[int]]) -> frozenset[int]:
    """Union of parts maximizing ``min(w, n - w)``; ties prefer larger ``w``, then lexicographic order."""
    best = max(
        support_unions(parts),
        key=lambda s: (min(len(s), n - len(s)), len(s), [-j for j in sorted(s)]),
    )
    return best


def _require_disconnected(code: LinearCode, pattern: CollusionPattern) -> list[frozenset[int]]:
    if pattern.n != code.n:
        raise SchemeError(f"pattern is on {pattern.n} servers, code has length {code.n}")
    parts = partition_parts(pattern)
    if len(parts) < 2:
        raise SchemeError("repetition scheme requires a disconnected pattern")
    return parts


def build_partition_scheme(code: LinearCode, pattern: CollusionPattern) -> RetrievalScheme:
    """Single-round repetition scheme with ``e`` the indicator of a union of parts."""
    parts = _require_disconnected(code, pattern)
    n, k = code.n, code.k
    support = choose_partition_support(n, parts)
    e = [int(j in support) for j in range(n)]
    decoded = rank_masked_product(code, e)
    if decoded == 0:
        raise SchemeError(f"e = {e} downloads no information from this storage code")
    w = len(support)
    if is_mds(code) and decoded != min(k, n - k, w, n - w):
        raise AssertionError(f"rank {decoded} contradicts min(k, n-k, w, n-w) for an MDS code")
    scheme = RetrievalScheme(
        kind="partition",
        storage_code=code,
        retrieval_code=repetition(code.field, n),
        retained_servers=tuple(range(n)),
        rounds=(RoundPlan(n, (tuple(sorted(support)),)),),
        blocks=1,
        information_symbols=decoded,
        target=pattern,
        t=None,
        randomness_positions=tuple(j for j in range(n) if j not in support),
    )
    return _finish(scheme)


def build_striped_partition_scheme(code: LinearCode, pattern: CollusionPattern) -> RetrievalScheme:
    """Repetition scheme downloading one stripe per non-randomness part.

    The first part only carries randomness; every other part answers for its
    own stripe.  ``k`` servers (lowest labels) are used from each part.
    """
    parts = _require_disconnected(code, pattern)
    k = code.k
    small = [sorted(p) for p in parts if len(p) < k]
    if small:
        raise SchemeError(f"each part must have size >= k for striped decoding (too small: {small})")
    chosen = [sorted(p)[:k] for p in parts]
    retained = tuple(sorted(j for p in chosen for j in p))
    pos = {s: i for i, s in enumerate(retained)}
    supports = tuple(tuple(pos[j] for j in p) for p in chosen[1:])
    stripes = len(supports)
    restricted = restrict(code, retained)
    for p in chosen:
        if not full_rank_on(restricted, [pos[j] for j in p]):
            raise SchemeError(f"storage code is not of full rank on part {p}")
    scheme = RetrievalScheme(
        kind="striped",
        storage_code=code,
        retrieval_code=repetition(code.field, len(retained)),
        retained_servers=retained,
        rounds=(RoundPlan(len(retained), supports),),
        blocks=stripes,
        information_symbols=stripes * k,
        target=pattern,
        t=None,
        randomness_positions=tuple(pos[j] for j in chosen[0]),
    )
    return _finish(scheme)


def build_scheme(kind: str, code: LinearCode, pattern: CollusionPattern, t: int | None = None) -> RetrievalScheme:
    """Dispatch by scheme kind; ``tpir`` defaults to the largest colluding set."""
    if kind == "tpir":
        return build_tpir_scheme(code, max_colluding_size(pattern) if t is None else t)
    if kind == "infoset":
        return build_infoset_scheme(code, pattern)
    if kind == "partition":
        return build_partition_scheme(code, pattern)
    if kind == "striped":
        return build_striped_partition_scheme(code, pattern)
    raise SchemeError(f"unknown scheme kind {kind!r}; expected one of {SCHEME_KINDS}")


def describe(scheme: RetrievalScheme, one_based: bool = True) -> dict:
    """JSON-ready summary; server labels are 1-based by default."""
    off = 1 if one_based else 0
    servers = scheme.retained_servers
    return {
        "kind": scheme.kind,
        "n": scheme.n,
        "k": scheme.storage_code.k,
        "t": scheme.t,
        "retrieval_code_dim": scheme.retrieval_code.k,
        "retained_servers": [s + off for s in servers],
        "blocks": scheme.blocks,
        "symbols_per_block": scheme.symbols_per_block,
        "information_symbols": scheme.information_symbols,
        "downloaded": scheme.downloaded,
        "rounds": [
            {
                "e": list(rnd.e),
                "block_servers": [[servers[j] + off for j in s] for s in rnd.block_supports],
            }
            for rnd in scheme.rounds
        ],
    }

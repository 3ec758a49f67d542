"""Linear codes over prime fields.

A :class:`LinearCode` keeps the generator it was built from (encoding uses
it verbatim) together with the cached reduced row echelon form, which is
the canonical form used for equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from pirlab.field import PrimeField
from pirlab.matrix import Matrix

DEFAULT_ENUMERATION_CAP = 10**6


class CodeError(ValueError):
    """Invalid code construction or incompatible codes."""


@dataclass(frozen=True)
class GrsSpec:
    """Parameters of a generalised Reed-Solomon code.

    Row ``i`` of the generator is ``(v_1 a_1^i, ..., v_n a_n^i)`` for the
    evaluation points ``a`` and column multipliers ``v``.
    """

    field: PrimeField
    n: int
    k: int
    eval_points: tuple[int, ...] | None = None
    multipliers: tuple[int, ...] | None = None

    def __post_init__(self):
        p = self.field.p
        if self.n < 1:
            raise CodeError(f"length must be positive, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise CodeError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.n > p:
            raise CodeError(f"GRS length {self.n} exceeds field size {p}")
        points = tuple(range(self.n)) if self.eval_points is None else tuple(int(a) % p for a in self.eval_points)
        mults = (1,) * self.n if self.multipliers is None else tuple(int(v) % p for v in self.multipliers)
        if len(points) != self.n or len(mults) != self.n:
            raise CodeError("eval_points and multipliers must have length n")
        if len(set(points)) != self.n:
            raise CodeError(f"evaluation points are not distinct: {points}")
        if 0 in mults:
            raise CodeError(f"multipliers must be nonzero: {mults}")
        object.__setattr__(self, "eval_points", points)
        object.__setattr__(self, "multipliers", mults)

    def restrict(self, coords: Sequence[int], k: int | None = None) -> GrsSpec:
        return GrsSpec(
            self.field,
            len(coords),
            self.k if k is None else k,
            tuple(self.eval_points[j] for j in coords),
            tuple(self.multipliers[j] for j in coords),
        )

    def generator_rows(self) -> list[list[int]]:
        p = self.field.p
        return [[(v * pow(a, i, p)) % p for a, v in zip(self.eval_points, self.multipliers)] for i in range(self.k)]


@dataclass(frozen=True, eq=False)
class LinearCode:
    field: PrimeField
    n: int
    gen: Matrix
    grs: GrsSpec | None = dc_field(default=None, compare=False)

    def __post_init__(self):
        if self.gen.ncols != self.n:
            raise CodeError(f"generator has {self.gen.ncols} columns, expected n={self.n}")
        if self.gen.rank != self.gen.nrows:
            raise CodeError(f"generator is not full rank (rank {self.gen.rank} < {self.gen.nrows} rows)")

    @classmethod
    def from_generator(cls, field: PrimeField, rows: Iterable[Sequence[int]], n: int | None = None) -> LinearCode:
        rows = [list(r) for r in rows]
        if n is None:
            if not rows:
                raise CodeError("length is required for the zero code")
            n = len(rows[0])
        return cls(field, n, Matrix.from_rows(field, rows, n))

    @classmethod
    def from_spanning(cls, field: PrimeField, rows: Iterable[Sequence[int]], n: int) -> LinearCode:
        """Code spanned by possibly dependent rows (reduced to an rref basis)."""
        red, _, _ = Matrix.from_rows(field, rows, n).rref()
        return cls(field, n, red)

    @classmethod
    def zero(cls, field: PrimeField, n: int) -> LinearCode:
        return cls(field, n, Matrix.zeros(field, 0, n))

    @classmethod
    def full(cls, field: PrimeField, n: int) -> LinearCode:
        return cls(field, n, Matrix.identity(field, n))

    @property
    def k(self) -> int:
        return self.gen.nrows

    @cached_property
    def _canonical(self):
        red, _, pivots = self.gen.rref()
        return red, tuple(pivots)

    @property
    def rref_gen(self) -> Matrix:
        return self._canonical[0]

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._canonical[1]

    def __eq__(self, other):
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.field == other.field and self.n == other.n and self.rref_gen.data == other.rref_gen.data

    def __hash__(self):
        return hash((self.field, self.n, self.rref_gen.data))

    def __repr__(self):
        kind = "GRS " if self.grs is not None else ""
        return f"<{kind}[{self.n},{self.k}] code over {self.field}>"

    def encode(self, message: Sequence[int]) -> tuple[int, ...]:
        if len(message) != self.k:
            raise CodeError(f"message length {len(message)} != k={self.k}")
        return self.gen.vecmul(message)

    def contains(self, word: Sequence[int]) -> bool:
        return self.gen.row_space_contains(word)

    @cached_property
    def parity_check(self) -> Matrix:
        """Generator of the dual code, i.e. ``H`` with ``gen @ H^T = 0``."""
        return self.gen.nullspace()

    def codewords(self) -> np.ndarray:
        """All ``p^k`` codewords as an int64 array (small codes only)."""
        p = self.field.p
        if self.k == 0:
            return np.zeros((1, self.n), dtype=np.int64)
        g = np.array(self.gen.data, dtype=np.int64).reshape(self.k, self.n)
        msgs = np.indices((p,) * self.k).reshape(self.k, -1).T
        return (msgs @ g) % p


def grs_code(spec: GrsSpec) -> LinearCode:
    code = LinearCode.from_generator(spec.field, spec.generator_rows(), spec.n)
    return LinearCode(spec.field, spec.n, code.gen, grs=spec)


def repetition(field: PrimeField, n: int) -> LinearCode:
    if n < 1:
        raise CodeError("repetition code needs n >= 1")
    return LinearCode.from_generator(field, [[1] * n], n)


def dual(code: LinearCode) -> LinearCode:
    return LinearCode(code.field, code.n, code.parity_check)


def _check_compatible(c: LinearCode, d: LinearCode):
    if c.field != d.field:
        raise CodeError(f"codes over different fields: {c.field} vs {d.field}")
    if c.n != d.n:
        raise CodeError(f"codes of different lengths: {c.n} vs {d.n}")


def star_product(c: LinearCode, d: LinearCode) -> LinearCode:
    """Span of all componentwise products of codewords of ``c`` and ``d``."""
    _check_compatible(c, d)
    p = c.field.p
    products = [[(a * b) % p for a, b in zip(rc, rd)] for rc in c.gen.data for rd in d.gen.data]
    out = LinearCode.from_spanning(c.field, products, c.n)
    if c.grs is not None and d.grs is not None and c.grs.eval_points == d.grs.eval_points and out.k == min(c.n, c.k + d.k - 1):
        mults = tuple((a * b) % p for a, b in zip(c.grs.multipliers, d.grs.multipliers))
        spec = GrsSpec(c.field, c.n, out.k, c.grs.eval_points, mults)
        out = LinearCode(c.field, c.n, out.gen, grs=spec)
    return out


def min_distance(code: LinearCode, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Minimum Hamming weight of a nonzero codeword, by exhaustive enumeration."""
    if code.k == 0:
        raise CodeError("minimum distance is undefined for the zero code")
    p = code.field.p
    total = p**code.k
    if total > cap:
        raise CodeError(f"{total} codewords exceed the enumeration cap {cap}; raise cap to enumerate")
    g = np.array(code.gen.data, dtype=np.int64)
    best = code.n
    # messages with leading nonzero coordinate cover every codeword up to scaling
    for lead in range(code.k):
        tail = code.k - lead - 1
        if tail:
            msgs = np.indices((p,) * tail).reshape(tail, -1).T
            words = (g[lead][None, :] + msgs @ g[lead + 1:]) % p
        else:
            words = g[lead][None, :] % p
        best = min(best, int(np.count_nonzero(words, axis=1).min()))
    return best


def _coords(code: LinearCode, coords: Iterable[int]) -> list[int]:
    coords = sorted(set(int(j) for j in coords))
    for j in coords:
        if not 0 <= j < code.n:
            raise CodeError(f"coordinate {j} out of range for length {code.n}")
    return coords


def restrict(code: LinearCode, coords: Iterable[int]) -> LinearCode:
    """Projection of ``code`` onto the given coordinates (in increasing order)."""
    coords = _coords(code, coords)
    if not coords:
        raise CodeError("cannot restrict to an empty coordinate set")
    cols = code.gen.columns(coords)
    red, rank, _ = cols.rref()
    grs = code.grs.restrict(coords, rank) if code.grs is not None and rank == min(code.k, len(coords)) else None
    if rank == code.k:
        return LinearCode(code.field, len(coords), cols, grs=grs)
    return LinearCode(code.field, len(coords), red, grs=grs)


def puncture(code: LinearCode, deleted: Iterable[int]) -> LinearCode:
    deleted = set(_coords(code, deleted))
    if len(deleted) == code.n:
        raise CodeError("cannot puncture every coordinate")
    return restrict(code, [j for j in range(code.n) if j not in deleted])


def rank_masked_product(code: LinearCode, e: Sequence[int]) -> int:
    """Rank of ``G diag(e) H^T`` with ``H`` a parity-check matrix of ``code``."""
    if len(e) != code.n:
        raise CodeError(f"mask has length {len(e)}, code has length {code.n}")
    h = code.parity_check
    if code.k == 0 or h.nrows == 0:
        return 0
    return (code.gen.scale_columns(e) @ h.T).rank


def full_rank_on(code: LinearCode, coords: Iterable[int]) -> bool:
    coords = _coords(code, coords)
    if code.k == 0:
        return True
    if len(coords) < code.k:
        return False
    return code.gen.columns(coords).rank == code.k


def is_mds(code: LinearCode) -> bool:
    """MDS test: every k columns of the generator are independent."""
    if code.k in (0, code.n):
        return True
    if code.grs is not None:
        return True
    combos = itertools.combinations(range(code.n), code.k)
    return all(code.gen.columns(s).rank == code.k for s in combos)



def projection_contains(code: LinearCode, coords: Sequence[int], word: Sequence[int]) -> bool:
    """True iff ``word`` (indexed like ``coords``) lies in the projection of ``code`` onto ``coords``."""
    coords = list(coords)
    if len(word) != len(coords):
        raise CodeError("word and coordinate list differ in length")
    if not coords:
        return True
    return code.gen.columns(coords).row_space_contains(word)

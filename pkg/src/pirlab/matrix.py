"""Dense matrices over a prime field, with exact row reduction.

Entries are kept as canonical residues (plain ints); ``Matrix.entry`` hands
out :class:`~pirlab.field.FieldElement` values for callers that want them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from pirlab.field import FieldElement, PrimeField


class SingularSystemError(ArithmeticError):
    """A linear system has no solution or no unique solution."""


def _rref_rows(rows: list[list[int]], p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    """Gauss-Jordan elimination in place; returns (nonzero rows, pivot columns)."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        lead = rows[r] = [(v * inv) % p for v in rows[r]]
        for i in range(nrows):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], lead)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


@dataclass(frozen=True)
class Matrix:
    field: PrimeField
    data: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Iterable[Sequence[int]], ncols: int | None = None) -> Matrix:
        p = field.p
        data = tuple(tuple(int(v) % p for v in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(row) != ncols for row in data):
            raise ValueError("ragged matrix rows")
        return cls(field, data, ncols)

    @classmethod
    def zeros(cls, field: PrimeField, nrows: int, ncols: int) -> Matrix:
        return cls(field, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> Matrix:
        return cls(field, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.data[i][j], self.field)

    def rows(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self.data)
        return f"Matrix[{self.nrows}x{self.ncols} over {self.field}]({body})"

    def transpose(self) -> Matrix:
        return self.T

    @property
    def T(self) -> Matrix:
        if self.nrows == 0 or self.ncols == 0:
            return Matrix.zeros(self.field, self.ncols, self.nrows)
        return Matrix(self.field, tuple(tuple(col) for col in zip(*self.data)), self.nrows)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.field != other.field:
            raise ValueError("matrices over different fields")
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        p = self.field.p
        cols = list(zip(*other.data)) if other.nrows else [() for _ in range(other.ncols)]
        out = tuple(tuple(sum(a * b for a, b in zip(row, col)) % p for col in cols) for row in self.data)
        return Matrix(self.field, out, other.ncols)

    def vecmul(self, x: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix: ``x @ self``."""
        if len(x) != self.nrows:
            raise ValueError(f"vector of length {len(x)} cannot multiply {self.shape} matrix")
        p = self.field.p
        out = [0] * self.ncols
        for xi, row in zip(x, self.data):
            if xi:
                for j, v in enumerate(row):
                    out[j] += xi * v
        return tuple(v % p for v in out)

    def columns(self, idx: Sequence[int]) -> Matrix:
        idx = list(idx)
        for j in idx:
            if not 0 <= j < self.ncols:
                raise IndexError(f"column {j} out of range for {self.ncols} columns")
        return Matrix(self.field, tuple(tuple(row[j] for j in idx) for row in self.data), len(idx))

    def scale_columns(self, diag: Sequence[int]) -> Matrix:
        """``self @ diag(diag)``."""
        p = self.field.p
        return Matrix(self.field, tuple(tuple((v * d) % p for v, d in zip(row, diag)) for row in self.data), self.ncols)

    def stack(self, other: Matrix) -> Matrix:
        if other.ncols != self.ncols:
            raise ValueError("column count mismatch")
        return Matrix(self.field, self.data + other.data, self.ncols)

    @cached_property
    def _rref(self) -> tuple[Matrix, tuple[int, ...]]:
        rows, pivots = _rref_rows(self.rows(), self.field.p, self.ncols)
        return Matrix(self.field, tuple(tuple(r) for r in rows), self.ncols), tuple(pivots)

    def rref(self) -> tuple[Matrix, int, list[int]]:
        """Reduced row echelon form with zero rows dropped, its rank, and pivot columns."""
        m, pivots = self._rref
        return m, len(pivots), list(pivots)

    @property
    def rank(self) -> int:
        return len(self._rref[1])

    def nullspace(self) -> Matrix:
        """Basis (as rows) of ``{v : self @ v = 0}``."""
        red, pivots = self._rref
        p = self.field.p
        free = [c for c in range(self.ncols) if c not in set(pivots)]
        basis = []
        for f in free:
            v = [0] * self.ncols
            v[f] = 1
            for row, pc in zip(red.data, pivots):
                v[pc] = (-row[f]) % p
            basis.append(v)
        return Matrix.from_rows(self.field, basis, self.ncols)

    def solve(self, b: Sequence[int]) -> tuple[int, ...]:
        """Solve ``self @ x = b``; requires a unique solution."""
        sol = self.solve_any(b)
        if sol is None:
            raise SingularSystemError("inconsistent linear system")
        if self.rank < self.ncols:
            raise SingularSystemError(f"system has rank {self.rank} < {self.ncols} unknowns")
        return sol

    def solve_any(self, b: Sequence[int]) -> tuple[int, ...] | None:
        """Some solution of ``self @ x = b``, or None if inconsistent."""
        if len(b) != self.nrows:
            raise ValueError(f"right-hand side has length {len(b)}, expected {self.nrows}")
        p = self.field.p
        aug = [list(row) + [int(v) % p] for row, v in zip(self.data, b)]
        rows, pivots = _rref_rows(aug, p, self.ncols + 1)
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [0] * self.ncols
        for row, pc in zip(rows, pivots):
            x[pc] = row[-1]
        return tuple(x)

    def row_space_contains(self, v: Sequence[int]) -> bool:
        """True iff ``v`` is a combination of the rows of ``self``."""
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        if not any(int(x) % self.field.p for x in v):
            return True
        if self.nrows == 0:
            return False
        return self.T.solve_any(v) is not None


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    return m.rref()

"""Prime fields F_p and their elements.

Elements are stored as canonical residues in ``[0, p)``.  Bulk code in the
rest of the package works on plain ``int`` residues for speed and only uses
:class:`FieldElement` at API boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_MODULUS = 2**31 - 1


class FieldError(ValueError):
    """Invalid field construction or mixed-field arithmetic."""


def _smallest_factor(p: int) -> int | None:
    if p % 2 == 0:
        return 2 if p != 2 else None
    f = 3
    while f * f <= p:
        if p % f == 0:
            return f
        f += 2
    return None


@dataclass(frozen=True)
class PrimeField:
    """The field of residues modulo a prime ``p``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise FieldError(f"modulus must be an integer, got {self.p!r}")
        if self.p < 2 or self.p > MAX_MODULUS:
            raise FieldError(f"modulus must lie in [2, 2^31-1], got {self.p}")
        factor = _smallest_factor(self.p)
        if factor is not None:
            raise FieldError(f"{self.p} is not prime (divisible by {factor})")

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self)

    def __repr__(self):
        return f"F_{self.p}"

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    def elements(self):
        return [FieldElement(v, self) for v in range(self.p)]

    def inv(self, a: int) -> int:
        """Inverse of a residue, as a residue."""
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def reduce(self, values) -> tuple[int, ...]:
        p = self.p
        return tuple(int(v) % p for v in values)


def field_new(p: int) -> PrimeField:
    return PrimeField(p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.p:
            raise FieldError(f"{self.value} is not a canonical residue mod {self.field.p}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(v % self.field.p, self.field)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.value)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(self.value * self.field.inv(o))

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return self._wrap(pow(self.value, exponent, self.field.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.field.p})"


def fe_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {"add", "sub", "mul"} to two elements of one field."""
    if a.field != b.field:
        raise FieldError(f"cannot combine elements of {a.field} and {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()

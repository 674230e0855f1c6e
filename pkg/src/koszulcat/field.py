"""Exact ground fields: the rationals and prime fields.

Raw field elements are plain Python objects (``gmpy2.mpq`` or
``fractions.Fraction`` over Q, ``int`` in ``range(p)`` over F_p).  The
:class:`Scalar` wrapper is a small convenience for callers who want an
element that remembers its field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

try:
    import gmpy2

    _mpq = gmpy2.mpq
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpq = Fraction


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Field:
    """A ground field.  ``p == 0`` means Q, otherwise F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def tag(self) -> str:
        return "q" if self.p == 0 else f"p={self.p}"

    @property
    def characteristic(self) -> int:
        return self.p

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __call__(self, x):
        return self.coerce(x)

    def coerce(self, x):
        if self.p:
            if isinstance(x, Scalar):
                x = x.value
            if isinstance(x, int):
                return x % self.p
            fx = Fraction(x)
            return (fx.numerator * pow(fx.denominator, -1, self.p)) % self.p
        if isinstance(x, Scalar):
            x = x.value
        return _mpq(x) if not isinstance(x, float) else _mpq(Fraction(x))

    @property
    def zero(self):
        return 0 if self.p else _mpq(0)

    @property
    def one(self):
        return 1 if self.p else _mpq(1)

    def inv(self, x):
        if not x:
            raise ZeroDivisionError("division by zero in field")
        if self.p:
            return pow(x, -1, self.p)
        return 1 / x

    def neg(self, x):
        return (-x) % self.p if self.p else -x

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def to_text(self, x) -> str:
        if self.p:
            return str(int(x))
        x = Fraction(int(x.numerator), int(x.denominator)) if _mpq is not Fraction else x
        return str(x)

    def from_text(self, s: str):
        return self.coerce(Fraction(s))

    @classmethod
    def from_tag(cls, tag: str) -> "Field":
        tag = tag.strip().lower()
        if tag in ("q", "qq", "rationals"):
            return cls(0)
        if tag.startswith("p="):
            return cls(int(tag[2:]))
        raise ValueError(f"unknown field tag {tag!r}")


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


@dataclass(frozen=True)
class Scalar:
    """A field element tagged with its field."""

    value: object
    field: Field = QQ

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.coerce(self.value))

    def _other(self, o):
        if isinstance(o, Scalar):
            if o.field != self.field:
                raise ValueError("field mismatch")
            return o.value
        return self.field.coerce(o)

    def __add__(self, o):
        return Scalar(self.field.add(self.value, self._other(o)), self.field)

    __radd__ = __add__

    def __sub__(self, o):
        return Scalar(self.field.add(self.value, self.field.neg(self._other(o))), self.field)

    def __rsub__(self, o):
        return Scalar(self._other(o), self.field) - self

    def __mul__(self, o):
        return Scalar(self.field.mul(self.value, self._other(o)), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(self.field.neg(self.value), self.field)

    def __truediv__(self, o):
        return Scalar(self.field.mul(self.value, self.field.inv(self._other(o))), self.field)

    def __rtruediv__(self, o):
        return Scalar(o, self.field) / self

    def __bool__(self):
        return bool(self.value)

    def __eq__(self, o):
        if isinstance(o, Scalar):
            return o.field == self.field and o.value == self.value
        try:
            return self.value == self.field.coerce(o)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __repr__(self):
        return f"Scalar({self.field.to_text(self.value)}, {self.field!r})"

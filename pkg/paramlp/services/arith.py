"""Scalar arithmetic in two modes.

Exact mode stores every scalar as a reduced ``fractions.Fraction`` and compares
exactly. Float mode stores binary floats and compares against zero with the
feasibility / pivot tolerances from settings. A computation never mixes modes:
every LP and pair carries the ``Arith`` it was built with.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from paramlp.config import settings
from paramlp.errors import ModeError, SchemaError

Scalar = Union[Fraction, float]
Vector = tuple  # tuple[Scalar, ...]
Matrix = tuple  # tuple[tuple[Scalar, ...], ...]

INF = math.inf

EXACT = "exact"
FLOAT = "float"

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


@dataclass(frozen=True)
class Arith:
    mode: str = EXACT
    eps_feas: float = 1e-8
    eps_piv: float = 1e-9
    eps_rank: float = 1e-10

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ModeError(f"Unknown arithmetic mode: {self.mode!r}")

    @classmethod
    def from_settings(cls, mode: str | None = None) -> "Arith":
        return cls(
            mode=mode or settings.ARITH_MODE,
            eps_feas=settings.EPS_FEAS,
            eps_piv=settings.EPS_PIV,
            eps_rank=settings.EPS_RANK,
        )

    @classmethod
    def exact(cls) -> "Arith":
        return cls.from_settings(EXACT)

    @classmethod
    def floating(cls) -> "Arith":
        return cls.from_settings(FLOAT)

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    # ── Construction ──

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.is_exact else 0.0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.is_exact else 1.0

    def parse(self, value) -> Scalar:
        """Parse a JSON-level scalar: a number or a "p/q" string."""
        if isinstance(value, bool):
            raise ModeError(f"Boolean is not a scalar: {value!r}")
        if self.is_exact:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, float):
                raise ModeError(f"Float {value!r} is not allowed in exact mode")
            if isinstance(value, str):
                match = _RATIONAL_RE.match(value)
                if match is None:
                    if _looks_decimal(value):
                        raise ModeError(f"Decimal string {value!r} is not allowed in exact mode")
                    raise SchemaError(f"Malformed scalar string: {value!r}")
                num, den = match.group(1), match.group(2)
                if den is not None and int(den) == 0:
                    raise SchemaError(f"Zero denominator in {value!r}")
                return Fraction(int(num), int(den) if den is not None else 1)
            raise SchemaError(f"Unsupported scalar type: {type(value).__name__}")

        if isinstance(value, (int, float, Fraction)):
            return float(value)
        if isinstance(value, str):
            match = _RATIONAL_RE.match(value)
            if match is not None:
                num, den = match.group(1), match.group(2)
                if den is not None and int(den) == 0:
                    raise SchemaError(f"Zero denominator in {value!r}")
                return float(Fraction(int(num), int(den) if den is not None else 1))
            try:
                return float(value)
            except ValueError:
                raise SchemaError(f"Malformed scalar string: {value!r}")
        raise SchemaError(f"Unsupported scalar type: {type(value).__name__}")

    def convert(self, value: Scalar) -> Scalar:
        """Move an already-typed scalar into this mode (exact -> float allowed)."""
        if self.is_exact:
            if isinstance(value, float):
                raise ModeError("Cannot convert a float scalar into exact mode")
            return Fraction(value)
        return float(value)

    def vector(self, values: Iterable) -> Vector:
        return tuple(self.parse(v) for v in values)

    def matrix(self, rows: Iterable[Iterable]) -> Matrix:
        return tuple(tuple(self.parse(v) for v in row) for row in rows)

    # ── Comparisons ──

    def is_zero(self, x: Scalar, eps: float | None = None) -> bool:
        if self.is_exact:
            return x == 0
        return abs(x) <= (self.eps_feas if eps is None else eps)

    def is_pos(self, x: Scalar, eps: float | None = None) -> bool:
        if self.is_exact:
            return x > 0
        return x > (self.eps_feas if eps is None else eps)

    def is_neg(self, x: Scalar, eps: float | None = None) -> bool:
        if self.is_exact:
            return x < 0
        return x < -(self.eps_feas if eps is None else eps)

    def nonneg(self, x: Scalar, eps: float | None = None) -> bool:
        return not self.is_neg(x, eps)

    def eq(self, a: Scalar, b: Scalar, eps: float | None = None) -> bool:
        if self.is_exact:
            return a == b
        if math.isinf(a) or math.isinf(b):
            return a == b
        scale = max(1.0, abs(a), abs(b))
        return abs(a - b) <= (self.eps_feas if eps is None else eps) * scale

    def sign(self, x: Scalar, eps: float | None = None) -> int:
        if self.is_pos(x, eps):
            return 1
        if self.is_neg(x, eps):
            return -1
        return 0

    # ── Formatting ──

    def format(self, x: Scalar):
        return format_scalar(x)


def format_scalar(x: Scalar):
    """JSON form of a scalar: int, "p/q", float, or "+inf"/"-inf"."""
    if isinstance(x, float):
        if math.isinf(x):
            return "+inf" if x > 0 else "-inf"
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    raise ModeError(f"Not a scalar: {x!r}")


def parse_endpoint(arith: Arith, value) -> Scalar:
    if value == "-inf":
        return -INF
    if value == "+inf" or value == "inf":
        return INF
    return arith.parse(value)



def _looks_decimal(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True

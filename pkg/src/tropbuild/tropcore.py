"""Min-plus arithmetic on Q with infinity, and tropical projective points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = math.inf


def is_inf(x) -> bool:
    return x == INF


def trop_value(x):
    """Coerce to a tropical value: an exact rational or ``inf``.

    Accepts ints, Fractions, ``"a/b"`` strings and ``"inf"``/``inf``.
    """
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "+inf", "infinity", "∞"):
            return INF
        return _simplify(Fraction(x))
    if isinstance(x, float):
        if x == INF:
            return INF
        raise TypeError("floating-point tropical values are not exact; use Fraction or 'inf'")
    if isinstance(x, bool):
        raise TypeError("booleans are not tropical values")
    if isinstance(x, (int, Fraction)):
        return _simplify(Fraction(x))
    raise TypeError(f"not a tropical value: {x!r}")


def _simplify(x: Fraction):
    return int(x) if x.denominator == 1 else x


def tadd(a, b):
    """Tropical sum (min)."""
    return a if a <= b else b


def tmul(a, b):
    """Tropical product (ordinary +, absorbing at inf)."""
    if a == INF or b == INF:
        return INF
    return a + b


def min_attained_twice(values: Sequence) -> bool:
    """Whether the minimum occurs at least twice.

    An all-infinite list counts as attaining its minimum everywhere.
    """
    if len(values) == 0:
        raise ValueError("min_attained_twice of an empty list")
    m = min(values)
    if m == INF:
        return True
    seen = 0
    for x in values:
        if x == m:
            seen += 1
            if seen == 2:
                return True
    return False


@dataclass(frozen=True)
class TropPoint:
    """A point of tropical projective space, always in canonical form
    (first finite coordinate equal to 0)."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(trop_value(x) for x in self.coords)
        shift = next((x for x in coords if x != INF), None)
        if shift is None:
            raise ValueError("tropical point with every coordinate infinite")
        if shift != 0:
            coords = tuple(x if x == INF else _simplify(Fraction(x - shift)) for x in coords)
        object.__setattr__(self, "coords", coords)

    @property
    def canonical(self) -> bool:
        return True

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def is_finite(self) -> bool:
        return all(x != INF for x in self.coords)

    def support(self) -> tuple:
        return tuple(i for i, x in enumerate(self.coords) if x != INF)

    def infinite_set(self) -> frozenset:
        return frozenset(i for i, x in enumerate(self.coords) if x == INF)

    def __str__(self):
        return "(" + ", ".join(fmt_trop(x) for x in self.coords) + ")"


def normalize(p: Iterable) -> TropPoint:
    """Canonical representative: subtract the first finite coordinate."""
    if isinstance(p, TropPoint):
        return p
    return TropPoint(tuple(p))


def project_coords(p, S: Iterable[int]) -> TropPoint:
    """Restrict to the coordinates in ``S`` (kept in the given order) and renormalize."""
    p = normalize(p)
    S = list(S)
    sub = tuple(p.coords[i] for i in S)
    if all(x == INF for x in sub):
        raise ValueError(f"projection to {S} leaves only infinite coordinates")
    return TropPoint(sub)


def shift(p: Sequence, c) -> tuple:
    """Add ``c`` to every finite coordinate."""
    return tuple(x if x == INF else x + c for x in p)


def fmt_trop(x) -> str:
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Verdict:
    """Boolean answer with an optional witness explaining a negative result."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok

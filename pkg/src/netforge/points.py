"""Exact point sets on the b-adic grid and within-box placement."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .badic import GridBox, check_width
from .errors import MalformedInput


@dataclass(frozen=True)
class NetPoints:
    """Points whose coordinates are all ``k / b**g`` with ``0 <= k < b**g``.

    ``points`` holds the integer numerators, one tuple per point.  Order is
    kept as constructed; compare with :meth:`as_set` when order is irrelevant.
    """

    base: int
    dim: int
    exponent: int
    points: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        side = check_width(self.base, self.exponent)
        if self.dim < 1:
            raise MalformedInput(f"dimension must be >= 1, got {self.dim}")
        for p in self.points:
            if len(p) != self.dim:
                raise MalformedInput(f"point {p} does not have {self.dim} coordinates")
            for x in p:
                if not 0 <= x < side:
                    raise MalformedInput(f"numerator {x} outside [0, {side})")

    @classmethod
    def from_iter(cls, base: int, dim: int, exponent: int, points: Iterable[Sequence[int]]):
        return cls(base, dim, exponent, tuple(tuple(int(x) for x in p) for p in points))

    @classmethod
    def from_boxes(cls, boxes: Sequence[GridBox]) -> "NetPoints":
        """Lower-left corners of grid boxes (all boxes share base, resolution, dim)."""
        if not boxes:
            raise MalformedInput("need at least one box")
        first = boxes[0]
        return cls(first.base, first.dim, first.resolution, tuple(bx.corner for bx in boxes))

    def __len__(self) -> int:
        return len(self.points)

    def as_set(self) -> frozenset:
        return frozenset(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(len(self.points), self.dim)

    def fractions(self) -> list[tuple[Fraction, ...]]:
        den = self.base**self.exponent
        return [tuple(Fraction(x, den) for x in p) for p in self.points]

    def rescaled(self, exponent: int) -> "NetPoints":
        """Re-express the same points at a finer denominator ``b**exponent``."""
        if exponent < self.exponent:
            raise ValueError("can only refine, use grid_corners() to coarsen")
        k = self.base ** (exponent - self.exponent)
        return NetPoints(self.base, self.dim, exponent, tuple(tuple(x * k for x in p) for p in self.points))

    def grid_corners(self, m: int) -> "NetPoints":
        """Floor every coordinate to resolution ``m`` (the containing grid box corner)."""
        if m > self.exponent:
            raise ValueError(f"points at exponent {self.exponent} cannot be read at resolution {m}")
        k = self.base ** (self.exponent - m)
        return NetPoints(self.base, self.dim, m, tuple(tuple(x // k for x in p) for p in self.points))

    def swapped(self) -> "NetPoints":
        """Reverse the coordinate order of every point."""
        return NetPoints(self.base, self.dim, self.exponent, tuple(tuple(reversed(p)) for p in self.points))


def place(points: NetPoints, mode: str = "corner", exponent: int | None = None, seed: int | None = None) -> NetPoints:
    """Move each point inside its grid box.

    ``mode`` is ``"corner"`` (unchanged), ``"center"`` or ``"random"``.
    Points are read as grid boxes at their current exponent ``m`` and
    re-emitted at ``exponent`` (default ``m + 1``), which must exceed ``m``
    for the non-corner modes.  ``"center"`` picks sub-cell ``b // 2`` on
    every axis, the exact midpoint when ``b`` is even.  ``"random"`` draws
    each sub-cell offset from PCG64 seeded with ``seed``.
    """
    m = points.exponent
    if mode == "corner":
        return points if exponent is None else points.rescaled(exponent)
    g = m + 1 if exponent is None else exponent
    if g <= m:
        raise ValueError(f"placement exponent {g} must exceed the box resolution {m}")
    k = points.base ** (g - m)
    if mode == "center":
        offset = k // 2
        shifted = (tuple(x * k + offset for x in p) for p in points.points)
    elif mode == "random":
        rng = np.random.Generator(np.random.PCG64(seed))
        offsets = rng.integers(0, k, size=(len(points), points.dim))
        shifted = (tuple(x * k + int(o) for x, o in zip(p, row)) for p, row in zip(points.points, offsets))
    else:
        raise ValueError(f"unknown placement mode {mode!r}")
    return NetPoints(points.base, points.dim, g, tuple(shifted))

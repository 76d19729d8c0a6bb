"""Exact b-adic combinatorics: shapes, elementary intervals and grid boxes.

Everything here is integer arithmetic.  An elementary interval of shape
``(d_1, ..., d_s)`` with cells ``(a_1, ..., a_s)`` is the half-open box

    prod_j [a_j / b**d_j, (a_j + 1) / b**d_j)

and a grid box at resolution ``m`` is the elementary interval of shape
``(m, ..., m)``.  Shapes are plain tuples of non-negative ints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Sequence

from .errors import WidthOverflowError

MAX_WIDTH = 2**62
INT64_MAX = 2**63 - 1

Shape = tuple[int, ...]


def check_width(b: int, m: int) -> int:
    """Return ``b**m``, raising WidthOverflowError if it exceeds 2**62."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if m < 0:
        raise ValueError(f"resolution must be >= 0, got {m}")
    # b**m can be astronomically large for bad input; bound it by bit length first
    if m * (b.bit_length() - 1) > 62:
        raise WidthOverflowError(f"{b}**{m} exceeds 2**62")
    value = b**m
    if value > MAX_WIDTH:
        raise WidthOverflowError(f"{b}**{m} exceeds 2**62")
    return value


def weight(shape: Sequence[int]) -> int:
    return sum(shape)


def shapes_of_weight(s: int, m: int) -> list[Shape]:
    """All compositions of ``m`` into ``s`` non-negative parts, lexicographically.

    >>> shapes_of_weight(2, 3)
    [(0, 3), (1, 2), (2, 1), (3, 0)]
    """
    if s < 1 or m < 0:
        raise ValueError(f"need s >= 1 and m >= 0, got s={s}, m={m}")
    return list(_compositions(s, m))


def _compositions(s: int, m: int) -> Iterator[Shape]:
    if s == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in _compositions(s - 1, m - first):
            yield (first,) + rest


@dataclass(frozen=True, order=True)
class ElementaryInterval:
    base: int
    shape: Shape
    cells: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if len(self.shape) != len(self.cells) or not self.shape:
            raise ValueError("shape and cells must have the same non-zero length")
        for d, a in zip(self.shape, self.cells):
            if d < 0:
                raise ValueError(f"negative exponent in shape {self.shape}")
            if not 0 <= a < self.base**d:
                raise ValueError(f"cell {a} out of range for exponent {d}")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def weight(self) -> int:
        return sum(self.shape)

    def bounds(self, j: int, g: int) -> tuple[int, int]:
        """Numerator bounds ``[lo, hi)`` of axis ``j`` at denominator ``b**g``.

        Requires ``g >= shape[j]``.
        """
        d = self.shape[j]
        if g < d:
            raise ValueError(f"exponent {g} coarser than interval exponent {d}")
        scale = self.base ** (g - d)
        return self.cells[j] * scale, (self.cells[j] + 1) * scale

    def contains_point(self, numerators: Sequence[int], g: int) -> bool:
        """Whether the point ``numerators / b**g`` lies in the interval.

        Works for any ``g``: coordinates are compared by cross-multiplying.
        """
        b = self.base
        for d, a, x in zip(self.shape, self.cells, numerators):
            # a / b^d <= x / b^g < (a+1) / b^d
            lhs = x * b**d
            rhs = b**g
            if not (a * rhs <= lhs < (a + 1) * rhs):
                return False
        return True

    def contains_box(self, box: "GridBox") -> bool:
        if box.base != self.base or box.dim != self.dim:
            return False
        for j, u in enumerate(box.corner):
            d = self.shape[j]
            if d > box.resolution:
                return False
            lo, hi = self.bounds(j, box.resolution)
            if not lo <= u < hi:
                return False
        return True

    def to_json(self) -> dict:
        return {"shape": list(self.shape), "cells": list(self.cells)}


@dataclass(frozen=True, order=True)
class GridBox:
    """Cubic box ``prod_j [u_j / b**m, (u_j + 1) / b**m)``."""

    base: int
    resolution: int
    corner: tuple[int, ...]

    def __post_init__(self):
        side = check_width(self.base, self.resolution)
        if not self.corner:
            raise ValueError("corner must have at least one coordinate")
        for u in self.corner:
            if not 0 <= u < side:
                raise ValueError(f"corner coordinate {u} outside [0, {side})")

    @property
    def dim(self) -> int:
        return len(self.corner)


def containing_interval(box: GridBox, shape: Sequence[int]) -> ElementaryInterval:
    """The unique interval of ``shape`` that contains ``box``.

    Cell indices are ``u_j // b**(m - d_j)``.
    """
    shape = tuple(shape)
    if len(shape) != box.dim:
        raise ValueError(f"shape {shape} has wrong dimension for box {box.corner}")
    m = box.resolution
    if any(d > m for d in shape):
        raise ValueError(f"shape {shape} has an exponent larger than resolution {m}")
    b = box.base
    cells = tuple(u // b ** (m - d) for u, d in zip(box.corner, shape))
    return ElementaryInterval(b, shape, cells)


def cover_set(box: GridBox) -> list[ElementaryInterval]:
    """Every elementary interval of volume ``b**-m`` containing ``box``.

    One interval per shape of weight ``m``, in lexicographic shape order.
    """
    return [containing_interval(box, shape) for shape in shapes_of_weight(box.dim, box.resolution)]


def count_intervals(b: int, m: int, s: int) -> int:
    """Number of elementary intervals of volume ``b**-m`` in dimension ``s``."""
    if s < 1:
        raise ValueError(f"dimension must be >= 1, got {s}")
    check_width(b, m)
    total = b**m * comb(m + s - 1, m)
    if total > INT64_MAX:
        raise WidthOverflowError(f"interval count for b={b}, m={m}, s={s} exceeds int64")
    return total


def iter_intervals(b: int, m: int, s: int) -> Iterator[ElementaryInterval]:
    """Enumerate every elementary interval of weight ``m`` (shapes, then cells)."""
    check_width(b, m)
    for shape in shapes_of_weight(s, m):
        ranges = [range(b**d) for d in shape]
        for cells in itertools.product(*ranges):
            yield ElementaryInterval(b, shape, cells)


def iter_boxes(b: int, m: int, s: int) -> Iterator[GridBox]:
    """All grid boxes at resolution ``m`` in row-major (lexicographic) order."""
    side = check_width(b, m)
    for corner in itertools.product(range(side), repeat=s):
        yield GridBox(b, m, corner)

"""Exact local, star and extreme discrepancy of b-adic point sets.

Values are :class:`fractions.Fraction`.  For planar sets the supremum over
real box corners is computed exactly: between consecutive point
coordinates the point count is constant, so on each such cell ``|Delta|``
is extremal at a cell corner, approached either from inside the cell
(count includes the boundary points) or attained on its far edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, MalformedInput
from .points import NetPoints

EXTREME_MAX_GRID = 64


@dataclass(frozen=True)
class AnchoredBox:
    """The box ``[0, x) x [0, y)``.

    ``closed`` marks a supremum approached from outside: the value is the
    limit as the corner decreases to ``(x, y)`` while still counting points
    on the upper edges.
    """

    x: Fraction
    y: Fraction
    closed: bool = False

    def __post_init__(self):
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1):
            raise ValueError(f"corner ({self.x}, {self.y}) outside the unit square")


def local_discrepancy(box: Sequence[tuple[Fraction, Fraction]], points: NetPoints) -> Fraction:
    """``#{points in box} / N - vol(box)`` for a half-open box ``prod [lo, hi)``."""
    if len(box) != points.dim:
        raise MalformedInput(f"box has {len(box)} axes, points have {points.dim}")
    n = len(points)
    if n == 0:
        raise MalformedInput("empty point set")
    lims = [(Fraction(lo), Fraction(hi)) for lo, hi in box]
    volume = Fraction(1)
    for lo, hi in lims:
        if lo > hi:
            raise MalformedInput(f"malformed interval [{lo}, {hi})")
        if lo < 0 or hi > 1:
            raise MalformedInput(f"interval [{lo}, {hi}) leaves the unit cube")
        volume *= hi - lo
    den = points.base**points.exponent
    # lo <= x/den < hi  <=>  lo*den <= x < hi*den
    scaled = [(lo * den, hi * den) for lo, hi in lims]
    inside = sum(1 for p in points.points if all(lo <= x < hi for x, (lo, hi) in zip(p, scaled)))
    return Fraction(inside, n) - volume


def _breaks(values: np.ndarray, den: int) -> np.ndarray:
    """Distinct coordinates plus the right end ``den``: the cell boundaries."""
    return np.union1d(values, [den]).astype(np.int64)


def _star_search(points: NetPoints) -> tuple[Fraction, AnchoredBox]:
    """Sweep the distinct x coordinates left to right.

    Cells of the compressed grid are ``(xs[i-1], xs[i]] x (ys[k-1], ys[k]]``
    (with ``xs[-1]`` read as 0), where ``xs``/``ys`` are the distinct point
    coordinates followed by the right end ``den``.  ``below[k]`` holds the
    number of points already swept with ``y <= ys[k]``.  All arithmetic is on
    integers scaled by ``n * den**2``.
    """
    if points.dim != 2:
        raise MalformedInput(f"star discrepancy is implemented for s = 2, got s = {points.dim}")
    n = len(points)
    if n == 0:
        raise MalformedInput("empty point set")
    den = points.base**points.exponent
    if n * den * den >= 2**62:
        raise BudgetExceeded("discrepancy numerators would overflow int64")
    scale = den * den
    arr = points.as_array()
    xs, ys = _breaks(arr[:, 0], den), _breaks(arr[:, 1], den)
    ix = np.searchsorted(xs, arr[:, 0])
    iy = np.searchsorted(ys, arr[:, 1])
    order = np.argsort(ix, kind="stable")
    ix, iy = ix[order], iy[order]
    starts = np.searchsorted(ix, np.arange(len(xs) + 1))
    ys_n = ys * n
    below = np.zeros(len(ys), dtype=np.int64)
    shifted = np.zeros(len(ys), dtype=np.int64)
    best = (-1, None)
    for i, x in enumerate(xs.tolist()):
        # Under-full: corner exactly at (xs[i], ys[k]); inside are the swept
        # points strictly below ys[k], i.e. below[k - 1].
        shifted[1:] = below[:-1]
        under = x * ys_n - shifted * scale
        k = int(under.argmax())
        if under[k] > best[0]:
            best = (int(under[k]), (x, int(ys[k]), False))
        lo, hi = starts[i], starts[i + 1]
        if lo == hi:
            continue
        below += np.cumsum(np.bincount(iy[lo:hi], minlength=len(ys)))
        # Over-full: corner just above (xs[i], ys[k]), boundary points
        # counted, volume tending to xs[i] * ys[k].  ys[-1] = den is excluded.
        over = below[:-1] * scale - x * ys_n[:-1]
        k = int(over.argmax())
        if over[k] > best[0]:
            best = (int(over[k]), (x, int(ys[k]), True))
    value, (x, y, closed) = best
    return Fraction(value, n * scale), AnchoredBox(Fraction(x, den), Fraction(y, den), closed)


def star_discrepancy(points: NetPoints) -> Fraction:
    """Supremum of ``|Delta|`` over anchored boxes ``[0, x) x [0, y)``, exactly."""
    return _star_search(points)[0]


def star_discrepancy_witness(points: NetPoints) -> tuple[Fraction, AnchoredBox]:
    """Star discrepancy together with an anchored box attaining (or approaching) it."""
    return _star_search(points)


def _axis_ranges(grid: int):
    """Per-axis candidates ``(first, last, min_len, max_len)`` in grid units.

    ``first..last`` are the included pixel columns (``first > last`` for an
    empty range).  ``min_len``/``max_len`` are the infimum and supremum of the
    interval length over all intervals selecting exactly those columns.
    """
    out = [(1, 0, 0, 1)]
    for i in range(grid):
        for j in range(i, grid):
            out.append((i, j, j - i, j + 1 - max(i - 1, 0)))
    return out


def extreme_discrepancy(points: NetPoints, max_grid: int = EXTREME_MAX_GRID) -> Fraction:
    """Supremum of ``|Delta|`` over all boxes ``[x1, x2) x [y1, y2)``.

    Enumerates every pair of column and row ranges of the ``b**g`` pixel
    grid, so ``b**g`` is limited to ``max_grid``.
    """
    if points.dim != 2:
        raise MalformedInput(f"extreme discrepancy is implemented for s = 2, got s = {points.dim}")
    grid = points.base**points.exponent
    if grid > max_grid:
        raise BudgetExceeded(f"grid of {grid} exceeds the extreme-discrepancy limit {max_grid}")
    n = len(points)
    if n == 0:
        raise MalformedInput("empty point set")
    arr = points.as_array()
    pixels = np.zeros((grid, grid), dtype=np.int64)
    np.add.at(pixels, (arr[:, 0], arr[:, 1]), 1)
    prefix = np.zeros((grid + 1, grid + 1), dtype=np.int64)
    prefix[1:, 1:] = pixels.cumsum(axis=0).cumsum(axis=1)

    ranges = np.array(_axis_ranges(grid), dtype=np.int64)
    first, last, min_len, max_len = ranges.T
    empty = first > last
    lo = np.where(empty, 0, first)
    hi = np.where(empty, 0, last + 1)
    scale = grid * grid
    best = 0
    for fx, lx, mnx, mxx in _axis_ranges(grid):
        if fx > lx:
            counts = np.zeros(len(ranges), dtype=np.int64)
        else:
            column = prefix[lx + 1] - prefix[fx]
            counts = np.where(empty, 0, column[hi] - column[lo])
        over = counts * scale - mnx * min_len * n
        under = mxx * max_len * n - counts * scale
        best = max(best, int(over.max()), int(under.max()))
    return Fraction(best, n * scale)


def c_b(b: int) -> Fraction:
    """Leading constant of the (0,m,2)-net discrepancy bound."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    return Fraction(b * b, b + 1) if b % 2 == 0 else Fraction(b - 1)


def bound_0m2(b: int, m: int) -> Fraction:
    """``(c_b * m + 9 + 4 / b) / b**m``."""
    if m < 0:
        raise ValueError(f"resolution must be >= 0, got {m}")
    return (c_b(b) * m + 9 + Fraction(4, b)) / b**m


def decimal_string(value: Fraction, digits: int = 12) -> str:
    """Render a fraction with ``digits`` significant digits (display only)."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def fraction_json(value: Fraction) -> dict:
    return {"num": value.numerator, "den": value.denominator, "decimal": decimal_string(value)}

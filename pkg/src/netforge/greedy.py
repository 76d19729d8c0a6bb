"""Greedy box packing in any dimension.

Boxes of side ``b**-m`` are chosen one at a time.  After each choice every
elementary interval of volume ``b**-m`` containing the chosen box is marked
as occupied, and a grid box stays available only while none of its
containing intervals is marked.  In the plane the run always fills
``b**m`` boxes and the result is a (0,m,2)-net; for ``s >= 3`` it may stall.

Random choices use numpy's PCG64 bit generator seeded with the policy seed,
drawing one ``Generator.integers`` index into the row-major list of
currently available boxes per step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .badic import ElementaryInterval, GridBox, check_width, cover_set, shapes_of_weight
from .errors import BudgetExceeded, InvalidChoice
from .points import NetPoints

# The availability mask holds b**(m*s) booleans.
MAX_GRID_CELLS = 1 << 27

try:
    from numba import njit
except ImportError:  # pragma: no cover - numpy path below is complete
    njit = None


def _clear_rect(mask, row_counts, x0, x1, y0, y1):
    """Mark boxes ``[x0, x1) x [y0, y1)`` unavailable; return how many were available."""
    removed = 0
    for x in range(x0, x1):
        lost = 0
        for y in range(y0, y1):
            if mask[x, y]:
                mask[x, y] = False
                lost += 1
        row_counts[x] -= lost
        removed += lost
    return removed


def _choose_plane(table_rows, mask, row_counts, u, v, b, m):
    """One planar step; ``table_rows[d]`` is the table of shape ``(d, m - d)``.

    Returns -1 if the box is unavailable, else the number of boxes removed.
    """
    for d in range(m + 1):
        w1 = b ** (m - d)
        w2 = b**d
        if table_rows[d, (u // w1) * b ** (m - d) + v // w2]:
            return -1
    removed = 0
    for d in range(m + 1):
        w1 = b ** (m - d)
        w2 = b**d
        table_rows[d, (u // w1) * b ** (m - d) + v // w2] = True
        x0 = u - u % w1
        y0 = v - v % w2
        removed += _clear_rect(mask, row_counts, x0, x0 + w1, y0, y0 + w2)
    return removed


def _nth_available(mask, row_counts, index):
    """Row-major position of the ``index``-th available box (0-based)."""
    for x in range(row_counts.shape[0]):
        if index < row_counts[x]:
            for y in range(mask.shape[1]):
                if mask[x, y]:
                    if index == 0:
                        return x, y
                    index -= 1
        else:
            index -= row_counts[x]
    return -1, -1


if njit is not None:
    _clear_rect = njit(cache=True, nogil=True)(_clear_rect)
    _choose_plane = njit(cache=True, nogil=True)(_choose_plane)
    _nth_available = njit(cache=True, nogil=True)(_nth_available)
    _PLANE_JIT = True
else:  # pragma: no cover
    _PLANE_JIT = False


@dataclass(frozen=True)
class Lexicographic:
    """Take the first available box in row-major order."""

    def describe(self) -> str:
        return "lex"


@dataclass(frozen=True)
class SeededUniform:
    seed: int

    def describe(self) -> str:
        return "random"


@dataclass(frozen=True)
class Scripted:
    boxes: tuple

    def __init__(self, boxes):
        object.__setattr__(self, "boxes", tuple(tuple(c) for c in boxes))

    def describe(self) -> str:
        return "scripted"


ChoicePolicy = Union[Lexicographic, SeededUniform, Scripted]


class AvailabilityState:
    """Occupancy tables for one greedy run.

    ``tables[shape]`` is a flat boolean array over the ``b**m`` cell tuples
    of that shape, True where the interval already contains a chosen box.
    The tables are authoritative.  ``mask`` caches, per grid box, whether it
    is still available, and ``row_counts`` the number of available boxes
    per first-axis column; both exist only so that counting and uniform
    sampling do not rescan all ``b**(m*s)`` boxes at every step.
    """

    def __init__(self, b: int, m: int, s: int):
        side = check_width(b, m)
        if s < 1:
            raise ValueError(f"dimension must be >= 1, got {s}")
        if side**s > MAX_GRID_CELLS:
            raise BudgetExceeded(f"grid of {side}**{s} boxes is too large for the availability mask")
        self.b, self.m, self.s = b, m, s
        self.side = side
        self.shapes = shapes_of_weight(s, m)
        # One backing array; for s == 2 row d is shape (d, m - d).
        self._table_rows = np.zeros((len(self.shapes), side), dtype=bool)
        self.tables = dict(zip(self.shapes, self._table_rows))
        self.mask = np.ones((side,) * s, dtype=bool)
        self.row_counts = np.full(side, side ** (s - 1), dtype=np.int64)
        self.total = side**s
        self.chosen: list[GridBox] = []

    def copy(self) -> "AvailabilityState":
        other = object.__new__(AvailabilityState)
        other.b, other.m, other.s, other.side = self.b, self.m, self.s, self.side
        other.shapes = self.shapes
        other._table_rows = self._table_rows.copy()
        other.tables = dict(zip(self.shapes, other._table_rows))
        other.mask = self.mask.copy()
        other.row_counts = self.row_counts.copy()
        other.total = self.total
        other.chosen = list(self.chosen)
        return other

    def _flat_cell(self, shape, corner) -> int:
        idx = 0
        for d, u in zip(shape, corner):
            idx = idx * self.b**d + u // self.b ** (self.m - d)
        return idx

    def is_available(self, corner: Sequence[int]) -> bool:
        """Availability read from the occupancy tables alone."""
        if len(corner) != self.s or not all(0 <= u < self.side for u in corner):
            return False
        return not any(self.tables[shape][self._flat_cell(shape, corner)] for shape in self.shapes)

    def available_count(self) -> int:
        return self.total

    def available_corners(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in c) for c in np.argwhere(self.mask)]

    def choose(self, corner: Sequence[int]) -> GridBox:
        corner = tuple(int(u) for u in corner)
        if _PLANE_JIT and self.s == 2:
            if len(corner) != 2 or not all(0 <= u < self.side for u in corner):
                raise InvalidChoice(f"box {corner} is outside the grid")
            removed = _choose_plane(self._table_rows, self.mask, self.row_counts, corner[0], corner[1], self.b, self.m)
            if removed < 0:
                raise InvalidChoice(f"box {corner} is not available at step {len(self.chosen) + 1}")
            self.total -= removed
            box = GridBox(self.b, self.m, corner)
            self.chosen.append(box)
            return box
        if not self.is_available(corner):
            raise InvalidChoice(f"box {corner} is not available at step {len(self.chosen) + 1}")
        box = GridBox(self.b, self.m, corner)
        b, m = self.b, self.m
        for shape in self.shapes:
            self.tables[shape][self._flat_cell(shape, corner)] = True
            region = []
            for u, d in zip(corner, shape):
                width = b ** (m - d)
                lo = u - u % width
                region.append(slice(lo, lo + width))
            region = tuple(region)
            block = self.mask[region]
            rows = block.shape[0]
            if block.size == rows:
                lost = block.reshape(rows).view(np.int8)
                removed = int(np.count_nonzero(lost))
            elif rows == 1:
                removed = int(np.count_nonzero(block))
                lost = removed
            else:
                lost = np.count_nonzero(block.reshape(rows, -1), axis=1)
                removed = int(lost.sum())
            if removed:
                self.row_counts[region[0]] -= lost
                self.total -= removed
                self.mask[region] = False
        self.chosen.append(box)
        return box

    def marked_intervals(self) -> list[ElementaryInterval]:
        out = []
        for box in self.chosen:
            out.extend(cover_set(box))
        return out


@dataclass
class RunOutcome:
    """Result of a greedy run.

    ``complete`` is True when ``b**m`` boxes were placed.  A stalled run
    carries ``witness``: the intervals marked so far, which together cover
    every grid box (checked by :func:`certify_stall`).
    """

    b: int
    m: int
    s: int
    boxes: list[GridBox]
    complete: bool
    witness: list[ElementaryInterval] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.boxes)

    def points(self) -> NetPoints:
        return NetPoints.from_boxes(self.boxes)


def _pick(state: AvailabilityState, policy, rng) -> tuple[int, ...]:
    if _PLANE_JIT and state.s == 2:
        index = 0 if isinstance(policy, Lexicographic) else int(rng.integers(state.available_count()))
        x, y = _nth_available(state.mask, state.row_counts, index)
        return (int(x), int(y))
    if isinstance(policy, Lexicographic):
        row = int(np.flatnonzero(state.row_counts)[0])
        rest = np.argwhere(state.mask[row])[0]
        return (row,) + tuple(int(v) for v in rest)
    if isinstance(policy, SeededUniform):
        index = int(rng.integers(state.available_count()))
        cum = np.cumsum(state.row_counts)
        row = int(np.searchsorted(cum, index, side="right"))
        offset = index - (int(cum[row - 1]) if row else 0)
        rest = np.argwhere(state.mask[row])[offset]
        return (row,) + tuple(int(v) for v in rest)
    raise TypeError(f"unsupported policy {policy!r}")


def greedy_run(b: int, m: int, s: int, policy: ChoicePolicy) -> RunOutcome:
    """Run the greedy packing until no box is available.

    A Scripted policy is replayed choice by choice and must cover the whole
    run: an unavailable entry, a script that ends while boxes are still
    available, or entries left over after the run stops all raise
    InvalidChoice.  ``m == 0`` returns the unit box without consulting the
    policy.
    """
    side = check_width(b, m)
    if s < 1:
        raise ValueError(f"dimension must be >= 1, got {s}")
    if m == 0:
        return RunOutcome(b, m, s, [GridBox(b, 0, (0,) * s)], True)
    state = AvailabilityState(b, m, s)
    rng = np.random.Generator(np.random.PCG64(policy.seed)) if isinstance(policy, SeededUniform) else None
    script = iter(policy.boxes) if isinstance(policy, Scripted) else None
    # Lemma-1 style bound: never more than b**m boxes.
    while state.available_count() > 0:
        if len(state.chosen) >= side:
            raise AssertionError("more than b**m boxes available to choose")
        if script is not None:
            try:
                corner = next(script)
            except StopIteration:
                raise InvalidChoice(
                    f"script ended after {len(state.chosen)} choices with "
                    f"{state.available_count()} boxes still available"
                ) from None
        else:
            corner = _pick(state, policy, rng)
        state.choose(corner)
    if script is not None:
        leftover = next(script, None)
        if leftover is not None:
            raise InvalidChoice(f"box {leftover} is not available at step {len(state.chosen) + 1}")
    complete = len(state.chosen) == side
    witness = [] if complete else state.marked_intervals()
    return RunOutcome(b, m, s, list(state.chosen), complete, witness)


def certify_stall(outcome: RunOutcome) -> bool:
    """Check by enumeration that the witness intervals cover every grid box."""
    if outcome.complete:
        return False
    side = outcome.b**outcome.m
    for corner in itertools.product(range(side), repeat=outcome.s):
        box = GridBox(outcome.b, outcome.m, corner)
        if not any(e.contains_box(box) for e in outcome.witness):
            return False
    return True


def stall_search(b: int, m: int, s: int, depth: int, budget: int = 10**7):
    """Smallest choice prefix after which nothing is available.

    Prefixes are searched by length first, then lexicographically on the
    corner tuples, so the returned prefix is canonical.  Returns a list of
    corners, or None if no prefix of length ``<= depth`` stalls before
    ``b**m`` boxes.  ``budget`` bounds the number of states visited.
    """
    if s == 2 or s < 1:
        return None
    side = check_width(b, m)
    root = AvailabilityState(b, m, s)
    nodes = 0

    def dfs(state, length):
        nonlocal nodes
        if len(state.chosen) == length:
            return None
        for corner in state.available_corners():
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"stall search exceeded {budget} nodes", nodes)
            child = state.copy()
            child.choose(corner)
            if len(child.chosen) == length:
                if child.available_count() == 0 and length < side:
                    return [box.corner for box in child.chosen]
                continue
            if child.available_count() == 0:
                continue
            found = dfs(child, length)
            if found is not None:
                return found
        return None

    for length in range(1, min(depth, side - 1) + 1):
        found = dfs(root, length)
        if found is not None:
            return found
    return None

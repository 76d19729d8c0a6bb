"""Exhaustive (t,m,s)-net checks and the small-scale existence search."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from .badic import ElementaryInterval, check_width, count_intervals, shapes_of_weight
from .errors import BudgetExceeded, MalformedInput
from .points import NetPoints

DEFAULT_BUDGET = 10**9


@dataclass
class NetReport:
    passed: bool
    b: int
    m: int
    s: int
    t: int
    violations: list[tuple[ElementaryInterval, int]] = field(default_factory=list)
    checked: int = 0

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "b": self.b,
            "m": self.m,
            "s": self.s,
            "t": self.t,
            "checked": self.checked,
            "violations": [dict(e.to_json(), count=c) for e, c in self.violations],
        }


def _resolution(points: NetPoints) -> int:
    """The ``m`` with ``len(points) == b**m``."""
    b, n = points.base, len(points)
    m, size = 0, 1
    while size < n:
        size *= b
        m += 1
    if size != n:
        raise MalformedInput(f"{n} points is not a power of the base {b}")
    return m


def _cell_counts(corners: np.ndarray, b: int, m: int, shape) -> np.ndarray:
    """Points per interval of ``shape``, flattened in row-major cell order."""
    flat = np.zeros(len(corners), dtype=np.int64)
    for j, d in enumerate(shape):
        flat = flat * b**d + corners[:, j] // b ** (m - d)
    return np.bincount(flat, minlength=b ** sum(shape))


def _unflatten(index: int, b: int, shape) -> tuple[int, ...]:
    cells = []
    for d in reversed(shape):
        index, a = divmod(index, b**d)
        cells.append(a)
    return tuple(reversed(cells))


def is_net(points: NetPoints, t: int, m: int | None = None) -> NetReport:
    """Count points in every elementary interval of volume ``b**(t-m)``.

    Points are first floored to their resolution-``m`` grid boxes, which does
    not change membership in any interval being checked.  Violations list
    every interval whose count differs from ``b**t``, including empty ones,
    in lexicographic (shape, cells) order.
    """
    b, s = points.base, points.dim
    inferred = _resolution(points)
    if m is None:
        m = inferred
    elif m != inferred:
        raise MalformedInput(f"expected {b}**{m} points, got {len(points)}")
    if not 0 <= t <= m:
        raise ValueError(f"need 0 <= t <= m, got t={t}, m={m}")
    if points.exponent < m:
        raise MalformedInput(f"coordinates at exponent {points.exponent} are coarser than m={m}")
    check_width(b, m)
    corners = points.grid_corners(m).as_array()
    target = b**t
    violations = []
    for shape in shapes_of_weight(s, m - t):
        counts = _cell_counts(corners, b, m, shape)
        for index in np.flatnonzero(counts != target):
            cells = _unflatten(int(index), b, shape)
            violations.append((ElementaryInterval(b, shape, cells), int(counts[index])))
    return NetReport(not violations, b, m, s, t, violations, count_intervals(b, m - t, s))


def strength(points: NetPoints) -> int:
    """Smallest ``t`` for which the points form a (t,m,s)-net."""
    m = _resolution(points)
    for t in range(m + 1):
        if is_net(points, t, m).passed:
            return t
    raise AssertionError("t = m always passes")


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    raw = os.environ.get("NETFORGE_BUDGET")
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise MalformedInput(f"NETFORGE_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise MalformedInput("NETFORGE_BUDGET must be positive")
    return value


@dataclass
class SearchResult:
    witness: NetPoints | None
    nodes: int


def exhaustive_search(b: int, m: int, s: int, budget: int | None = None) -> NetPoints | None:
    """Find a (0,m,s)-net in base ``b`` by backtracking, or prove none exists.

    See :func:`search_with_stats` for the method.  Raises BudgetExceeded
    (never returns None) when the node budget runs out.
    """
    return search_with_stats(b, m, s, budget).witness


def search_with_stats(b: int, m: int, s: int, budget: int | None = None) -> SearchResult:
    """Backtracking over point positions with one symmetry reduction.

    A (0,m,s)-net has exactly one point in every first-axis strip of width
    ``b**-m``, and the point set is unordered, so point ``k`` is placed in
    strip ``k`` (first grid coordinate ``k``).  The remaining ``s - 1``
    coordinates are tried in lexicographic order and a placement is pruned
    as soon as some elementary interval of volume ``b**-m`` would hold two
    points.  A node is one attempted placement.
    """
    if budget is None:
        budget = budget_from_env()
    side = check_width(b, m)
    if s < 1:
        raise ValueError(f"dimension must be >= 1, got {s}")
    # First-axis-only shapes are satisfied by the strip assignment itself.
    shapes = [sh for sh in shapes_of_weight(s, m) if sh[0] != m]
    weights = [[b ** (m - d) for d in sh] for sh in shapes]
    candidates = list(itertools.product(range(side), repeat=s - 1))
    occupied = [set() for _ in shapes]
    placed: list[tuple[int, ...]] = []
    nodes = 0

    def keys(point):
        return [tuple(u // w for u, w in zip(point, ws)) for ws in weights]

    def extend(k: int) -> bool:
        nonlocal nodes
        if k == side:
            return True
        for rest in candidates:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"search exceeded budget of {budget} nodes", nodes)
            point = (k,) + rest
            ks = keys(point)
            if any(key in occ for key, occ in zip(ks, occupied)):
                continue
            for key, occ in zip(ks, occupied):
                occ.add(key)
            placed.append(point)
            if extend(k + 1):
                return True
            placed.pop()
            for key, occ in zip(ks, occupied):
                occ.discard(key)
        return False

    if extend(0):
        return SearchResult(NetPoints(b, s, m, tuple(placed)), nodes)
    return SearchResult(None, nodes)

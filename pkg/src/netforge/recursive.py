"""Recursive (0,m,2)-net synthesis by scaling, stacking and digit injection.

Level ``n`` takes ``b`` nets of level ``n - 1`` (all at denominator
``b**(n-1)``), squeezes part ``j`` into the vertical strip ``[j/b, (j+1)/b)``
and then fills in the new last digit of the second coordinate from a
permutation chosen by the point's row: ``y' = b*y + pi_y(x_1)`` where
``x_1`` is the leading base-b digit of ``x``.  With identity permutations
this reproduces the Hammersley net.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .badic import check_width
from .errors import MalformedInput
from .points import NetPoints


def digit_reverse(i: int, b: int, m: int) -> int:
    """Reverse the ``m`` base-``b`` digits of ``i``."""
    out = 0
    for _ in range(m):
        i, digit = divmod(i, b)
        out = out * b + digit
    return out


def hammersley(b: int, m: int) -> NetPoints:
    """The Hammersley net ``{(rev(i) / b**m, i / b**m)}``.

    The first coordinate is the digit reversal of the index, the second is
    the index itself.
    """
    n = check_width(b, m)
    return NetPoints(b, 2, m, tuple((digit_reverse(i, b, m), i) for i in range(n)))


@dataclass(frozen=True)
class PermutationFamily:
    """Permutations of ``range(b)`` for levels ``1..m``; level ``n`` holds ``b**(n-1)``.

    ``levels[n - 1][r]`` is the permutation applied to row ``r`` at level ``n``,
    stored as an index list (``perm[digit]`` is the image of ``digit``).
    """

    base: int
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        b = self.base
        if b < 2:
            raise MalformedInput(f"base must be >= 2, got {b}")
        check_width(b, len(self.levels))
        target = tuple(range(b))
        for n, level in enumerate(self.levels, start=1):
            if len(level) != b ** (n - 1):
                raise MalformedInput(f"level {n} needs {b ** (n - 1)} permutations, got {len(level)}")
            for perm in level:
                if tuple(sorted(perm)) != target:
                    raise MalformedInput(f"level {n}: {list(perm)} is not a permutation of 0..{b - 1}")

    @property
    def m(self) -> int:
        return len(self.levels)

    @classmethod
    def build(cls, base: int, levels: Sequence[Sequence[Sequence[int]]]) -> "PermutationFamily":
        return cls(base, tuple(tuple(tuple(int(v) for v in p) for p in level) for level in levels))

    @classmethod
    def identity(cls, b: int, m: int) -> "PermutationFamily":
        ident = tuple(range(b))
        return cls(b, tuple((ident,) * b**n for n in range(m)))

    @classmethod
    def random(cls, b: int, m: int, seed: int) -> "PermutationFamily":
        """Uniform permutation per slot from a PCG64 stream seeded with ``seed``."""
        check_width(b, m)
        rng = np.random.Generator(np.random.PCG64(seed))
        levels = []
        for n in range(m):
            levels.append(tuple(tuple(int(v) for v in rng.permutation(b)) for _ in range(b**n)))
        return cls(b, tuple(levels))

    def to_json(self) -> dict:
        return {"b": self.base, "m": self.m, "levels": [[list(p) for p in level] for level in self.levels]}

    @classmethod
    def from_json(cls, doc) -> "PermutationFamily":
        if isinstance(doc, str):
            doc = json.loads(doc)
        try:
            b, m, levels = doc["b"], doc["m"], doc["levels"]
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"permutation family needs keys b, m, levels: {exc}") from None
        if not isinstance(levels, list) or len(levels) != m:
            raise MalformedInput(f"expected {m} levels")
        try:
            return cls.build(int(b), levels)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, MalformedInput):
                raise
            raise MalformedInput(str(exc)) from None


@dataclass(frozen=True)
class StackedPoints:
    """Intermediate of one level: x numerators over ``b**n``, y over ``b**(n-1)``."""

    base: int
    level: int
    points: tuple[tuple[int, int], ...]


def scale_stack(parts: Sequence[NetPoints]) -> StackedPoints:
    """Place part ``j`` in the strip ``[j/b, (j+1)/b)`` by ``x -> (x + j) / b``."""
    if not parts:
        raise MalformedInput("need b parts, got none")
    b = parts[0].base
    if len(parts) != b:
        raise MalformedInput(f"need exactly {b} parts, got {len(parts)}")
    level = parts[0].exponent + 1
    width = b ** (level - 1)
    out = []
    for j, part in enumerate(parts):
        if part.base != b or part.dim != 2:
            raise MalformedInput("all parts must be planar point sets in the same base")
        if part.exponent != level - 1:
            raise MalformedInput(f"part {j} has exponent {part.exponent}, expected {level - 1}")
        if len(part) != width:
            raise MalformedInput(f"part {j} has {len(part)} points, expected {width}")
        out.extend((x + j * width, y) for x, y in part.points)
    return StackedPoints(b, level, tuple(out))


def psi_apply(stacked: StackedPoints, perms: Sequence[Sequence[int]]) -> NetPoints:
    """Append the digit ``perms[y][x_1]`` to every second coordinate."""
    b, n = stacked.base, stacked.level
    rows = b ** (n - 1)
    if len(perms) != rows:
        raise MalformedInput(f"level {n} needs {rows} permutations, got {len(perms)}")
    out = []
    for x, y in stacked.points:
        if not (0 <= x < b**n and 0 <= y < rows):
            raise MalformedInput(f"point ({x}, {y}) out of range at level {n}")
        leading = x // rows
        out.append((x, b * y + perms[y][leading]))
    return NetPoints(b, 2, n, tuple(out))


def stack_nets(parts: Sequence[NetPoints], perms: Sequence[Sequence[int]]) -> NetPoints:
    """Combine ``b`` level-(n-1) nets into one level-n net."""
    return psi_apply(scale_stack(parts), perms)


def recursive_run(b: int, m: int, family: PermutationFamily, check_level=None) -> NetPoints:
    """Build the level-``m`` net driven by ``family``.

    Every level reuses the previous net for all ``b`` strips.  If given,
    ``check_level(points)`` is called on each intermediate net.
    """
    check_width(b, m)
    if family.base != b or family.m != m:
        raise MalformedInput(f"family is for b={family.base}, m={family.m}; wanted b={b}, m={m}")
    current = NetPoints(b, 2, 0, ((0, 0),))
    for level in family.levels:
        current = stack_nets([current] * b, level)
        if check_level is not None:
            check_level(current)
    return current

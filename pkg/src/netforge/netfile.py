"""NetFileV1: the JSON interchange format for point sets.

Canonical form is ``json.dumps(doc, sort_keys=True, separators=(",", ":"))``
followed by a newline; :func:`emit` always writes it, so parsing and
re-emitting a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import MalformedInput
from .points import NetPoints

VERSION = 1
ALGORITHMS = ("greedy", "recursive", "hammersley", "search")
PROVENANCE_KEYS = {"algorithm", "seed", "policy", "permutations", "placement"}


@dataclass
class NetFile:
    points: NetPoints
    m: int
    provenance: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        p = self.points
        return {
            "version": VERSION,
            "b": p.base,
            "m": self.m,
            "s": p.dim,
            "g": p.exponent,
            "points": [list(pt) for pt in p.points],
            "provenance": {k: v for k, v in self.provenance.items() if v is not None},
        }


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def emit(netfile: NetFile) -> str:
    return canonical_json(netfile.to_doc())


def _int(doc, key, minimum=0):
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise MalformedInput(f"field {key!r} must be an integer >= {minimum}, got {value!r}")
    return value


def parse(text: str) -> NetFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedInput("top level must be a JSON object")
    if doc.get("version") != VERSION:
        raise MalformedInput(f"unsupported version {doc.get('version')!r}")
    extra = set(doc) - {"version", "b", "m", "s", "g", "points", "provenance"}
    if extra:
        raise MalformedInput(f"unknown fields {sorted(extra)}")
    b = _int(doc, "b", 2)
    m = _int(doc, "m")
    s = _int(doc, "s", 1)
    g = _int(doc, "g")
    if g < m:
        raise MalformedInput(f"g={g} must be >= m={m}")
    raw = doc.get("points")
    if not isinstance(raw, list):
        raise MalformedInput("points must be a list")
    if len(raw) != b**m:
        raise MalformedInput(f"expected {b}**{m} = {b ** m} points, got {len(raw)}")
    for pt in raw:
        if not isinstance(pt, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in pt):
            raise MalformedInput(f"point {pt!r} must be a list of integers")
    provenance = doc.get("provenance", {})
    if not isinstance(provenance, dict):
        raise MalformedInput("provenance must be an object")
    unknown = set(provenance) - PROVENANCE_KEYS
    if unknown:
        raise MalformedInput(f"unknown provenance fields {sorted(unknown)}")
    if "algorithm" in provenance and provenance["algorithm"] not in ALGORITHMS:
        raise MalformedInput(f"unknown algorithm {provenance['algorithm']!r}")
    points = NetPoints(b, s, g, tuple(tuple(pt) for pt in raw))
    return NetFile(points, m, provenance)


def read(path: str) -> NetFile:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from None

"""Shared fixtures: the worked width/angle example and its expected encodings."""

from __future__ import annotations

from pathlib import Path

import pytest

from diffconcepts.encoder import context_of, encode, preprocess
from diffconcepts.samples import worked_example

ROOT = Path(__file__).resolve().parents[1]
SAMPLE_CSV = ROOT / "samples" / "worked_example.csv"

ATTRS = ("a", "w")

# Unit intervals [j, j+1]: (a, w) symbols.
UNIT_NOTATION = (
    [("=", ">")] * 2
    + [(">", ">")] * 4
    + [("=", ">")] * 3
    + [("=", "=")] * 2
    + [(">", "=")] * 4
    + [("=", "=")]
)

BREAKPOINTS = [0, 2, 6, 9, 11, 15, 16]

# First union round over the units: [j, j+2] -> composed (a, w) tokens.
PAIR_NOTATION = {
    (0, 2): ("=", ">"),
    (1, 3): ("=>", ">"),
    (2, 4): (">", ">"),
    (3, 5): (">", ">"),
    (4, 6): (">", ">"),
    (5, 7): (">=", ">"),
    (6, 8): ("=", ">"),
    (7, 9): ("=", ">"),
    (8, 10): ("=", ">="),
    (9, 11): ("=", "="),
    (10, 12): ("=>", "="),
    (11, 13): (">", "="),
    (12, 14): (">", "="),
    (13, 15): (">", "="),
    (14, 16): (">=", "="),
}

# The 16 units plus the 15 pairs.
ENLARGED = {(j, j + 1): UNIT_NOTATION[j] for j in range(16)} | PAIR_NOTATION

# Pruning keeps every pair and the last unit only.
PRUNED = PAIR_NOTATION | {(15, 16): ("=", "=")}

# Fixpoint objects: interval -> (a token, w token).
ENCODED = {
    (0, 2): ("=", ">"),
    (0, 6): ("=>", ">"),
    (0, 9): ("=>=", ">"),
    (0, 11): ("=>=", ">="),
    (0, 15): ("=>=>", ">="),
    (0, 16): ("=>=>=", ">="),
    (2, 6): (">", ">"),
    (2, 9): (">=", ">"),
    (2, 11): (">=", ">="),
    (2, 15): (">=>", ">="),
    (2, 16): (">=>=", ">="),
    (6, 9): ("=", ">"),
    (6, 11): ("=", ">="),
    (6, 15): ("=>", ">="),
    (6, 16): ("=>=", ">="),
    (9, 11): ("=", "="),
    (9, 15): ("=>", "="),
    (9, 16): ("=>=", "="),
    (11, 15): (">", "="),
    (11, 16): (">=", "="),
    (15, 16): ("=", "="),
}

ENCODED_ATTRIBUTES = [
    "a:=",
    "a:=>",
    "a:=>=",
    "a:=>=>",
    "a:=>=>=",
    "a:>",
    "a:>=",
    "a:>=>",
    "a:>=>=",
    "w:=",
    "w:>",
    "w:>=",
]

# Concepts of the unit context in output order: (intent, unit starts j of [j,j+1]).
UNIT_CONCEPTS = [
    ((), list(range(16))),
    (("w:>",), list(range(9))),
    (("a:=",), [0, 1, 6, 7, 8, 9, 10, 15]),
    (("a:>",), [2, 3, 4, 5, 11, 12, 13, 14]),
    (("w:=",), list(range(9, 16))),
    (("a:=", "w:>"), [0, 1, 6, 7, 8]),
    (("a:>", "w:="), [11, 12, 13, 14]),
    (("a:>", "w:>"), [2, 3, 4, 5]),
    (("a:=", "w:="), [9, 10, 15]),
    (("a:=", "a:>", "w:=", "w:>"), []),
]

# Concepts of the fixpoint context in output order: (intent, extent intervals).
ENCODED_CONCEPTS = [
    ((), sorted(ENCODED)),
    (
        ("w:>=",),
        [(i, j) for i in (0, 2, 6) for j in (11, 15, 16)],
    ),
    (("w:=",), [(9, 11), (9, 15), (9, 16), (11, 15), (11, 16), (15, 16)]),
    (("w:>",), [(0, 2), (0, 6), (0, 9), (2, 6), (2, 9), (6, 9)]),
    (("a:=",), [(0, 2), (6, 9), (6, 11), (9, 11), (15, 16)]),
    (("a:=>=",), [(0, 9), (0, 11), (6, 16), (9, 16)]),
    (("a:=>",), [(0, 6), (6, 15), (9, 15)]),
    (("a:>=",), [(2, 9), (2, 11), (11, 16)]),
    (("a:=", "w:="), [(9, 11), (15, 16)]),
    (("a:=", "w:>"), [(0, 2), (6, 9)]),
    (("a:=>=", "w:>="), [(0, 11), (6, 16)]),
    (("a:>",), [(2, 6), (11, 15)]),
    (("a:=", "w:>="), [(6, 11)]),
    (("a:=>", "w:="), [(9, 15)]),
    (("a:=>", "w:>"), [(0, 6)]),
    (("a:=>", "w:>="), [(6, 15)]),
    (("a:=>=", "w:="), [(9, 16)]),
    (("a:=>=", "w:>"), [(0, 9)]),
    (("a:=>=>", "w:>="), [(0, 15)]),
    (("a:=>=>=", "w:>="), [(0, 16)]),
    (("a:>", "w:="), [(11, 15)]),
    (("a:>", "w:>"), [(2, 6)]),
    (("a:>=", "w:="), [(11, 16)]),
    (("a:>=", "w:>"), [(2, 9)]),
    (("a:>=", "w:>="), [(2, 11)]),
    (("a:>=>", "w:>="), [(2, 15)]),
    (("a:>=>=", "w:>="), [(2, 16)]),
    (tuple(ENCODED_ATTRIBUTES), []),
]


def notation_of(item) -> tuple[str, ...]:
    return tuple(token.text for _, token in item.notation)


@pytest.fixture
def series():
    return worked_example()


@pytest.fixture
def units(series):
    return preprocess(series, ATTRS, 0.0)


@pytest.fixture
def unit_context(units):
    return context_of(units)


@pytest.fixture
def context(series):
    return encode(series, ATTRS, 0.0)

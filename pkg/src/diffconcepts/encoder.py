"""Curve feature extraction: from sample series to a formal context.

Unit intervals ``[j, j+1]`` carry one comparison symbol per attribute. Unions of
contiguous intervals compose their tokens, and an interval contained in a
larger one with identical notation is redundant. The fixpoint of
union-then-prune is the set of intervals between every pair of breakpoints,
which is what ``encode`` builds directly.
"""

from __future__ import annotations

import bisect
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from diffconcepts import config
from diffconcepts.core import (
    QualifiedToken,
    Token,
    compose_tokens,
    token_of,
    validate_attribute_name,
)
from diffconcepts.errors import (
    CapacityError,
    InvalidArgumentError,
    InvalidValueError,
    SchemaError,
)

logger = logging.getLogger(__name__)

Sample = Mapping[str, float]


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """A named curve: ``M`` samples over an ordered attribute schema.

    ``values`` has shape ``(M, k)``; row ``j`` is sample ``s_j``.
    """

    name: str
    attributes: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        attributes = tuple(self.attributes)
        if not attributes:
            raise SchemaError("a series needs at least one attribute")
        for attribute in attributes:
            try:
                validate_attribute_name(attribute)
            except InvalidArgumentError as exc:
                raise SchemaError(str(exc)) from exc
        if len(set(attributes)) != len(attributes):
            raise SchemaError(f"duplicate attribute names in {list(attributes)}")

        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(attributes):
            raise SchemaError(
                f"values must have shape (M, {len(attributes)}), got {values.shape}"
            )
        if values.shape[0] < 1:
            raise InvalidArgumentError("a series needs at least one sample")
        if not np.isfinite(values).all():
            row, col = np.argwhere(~np.isfinite(values))[0]
            raise InvalidValueError(
                f"sample {row} has a non-finite value for {attributes[col]!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_samples(
        cls,
        name: str,
        samples: Sequence[Sample],
        attributes: Sequence[str] | None = None,
    ) -> SampleSeries:
        """Build a series from per-sample mappings sharing one key order."""
        if not samples:
            raise InvalidArgumentError("a series needs at least one sample")
        schema = tuple(attributes) if attributes is not None else tuple(samples[0])
        rows = []
        for index, sample in enumerate(samples):
            if tuple(sample) != schema:
                raise SchemaError(
                    f"sample {index} has attributes {list(sample)}, "
                    f"expected {list(schema)}"
                )
            rows.append([sample[name] for name in schema])
        return cls(name, schema, np.array(rows, dtype=float))

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def last_index(self) -> int:
        """``N``: the index of the final sample."""
        return len(self) - 1

    def sample(self, index: int) -> dict[str, float]:
        return dict(zip(self.attributes, self.values[index].tolist()))

    def column(self, attribute: str) -> np.ndarray:
        try:
            position = self.attributes.index(attribute)
        except ValueError:
            raise SchemaError(
                f"unknown attribute {attribute!r}; series {self.name!r} has "
                f"{list(self.attributes)}"
            ) from None
        return self.values[:, position]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampleSeries):
            return NotImplemented
        return (
            self.name == other.name
            and self.attributes == other.attributes
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True, order=True)
class Interval:
    """Closed index interval ``[start, end]`` over sample indices."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise InvalidArgumentError(
                f"interval needs 0 <= start < end, got [{self.start},{self.end}]"
            )

    def contains(self, other: Interval) -> bool:
        return self.start <= other.start and other.end <= self.end

    @property
    def label(self) -> str:
        return f"{self.start}..{self.end}"

    def __str__(self) -> str:
        return f"[{self.start},{self.end}]"


@dataclass(frozen=True)
class AttributedInterval:
    """An interval with one token per selected attribute."""

    interval: Interval
    notation: tuple[tuple[str, Token], ...]

    def __post_init__(self):
        notation = tuple((name, token) for name, token in self.notation)
        if not notation:
            raise InvalidArgumentError("notation must cover at least one attribute")
        names = [name for name, _ in notation]
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"duplicate attributes in notation {names}")
        object.__setattr__(self, "notation", notation)

    @classmethod
    def of(cls, start: int, end: int, notation: Mapping[str, str | Token]):
        """Convenience constructor from ``{"a": "=>", ...}``."""
        return cls(
            Interval(start, end),
            tuple(
                (name, token if isinstance(token, Token) else Token.parse(token))
                for name, token in notation.items()
            ),
        )

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.notation)

    def token(self, attribute: str) -> Token:
        for name, token in self.notation:
            if name == attribute:
                return token
        raise SchemaError(f"interval {self.interval} has no attribute {attribute!r}")

    def tokens(self) -> tuple[QualifiedToken, ...]:
        return tuple(QualifiedToken(name, token) for name, token in self.notation)


@dataclass(frozen=True, eq=False)
class FormalContext:
    """Intervals x qualified tokens incidence table.

    Objects are sorted by ``(start, end)`` and attributes by
    ``(attribute name, token text)``; ``incidence[i, j]`` tells whether object
    ``i`` carries attribute ``j``.
    """

    objects: tuple[Interval, ...]
    attributes: tuple[QualifiedToken, ...]
    incidence: np.ndarray

    def __post_init__(self):
        objects = tuple(self.objects)
        attributes = tuple(self.attributes)
        incidence = np.array(self.incidence, dtype=bool)
        expected = (len(objects), len(attributes))
        if incidence.size == 0 and 0 in expected:
            incidence = incidence.reshape(expected)
        if incidence.shape != expected:
            raise InvalidArgumentError(
                f"incidence must have shape {expected}, got {incidence.shape}"
            )
        for left, right in zip(objects, objects[1:]):
            if not left < right:
                raise InvalidArgumentError(
                    f"objects must be strictly increasing, got {left} before {right}"
                )
        keys = [attribute.sort_key() for attribute in attributes]
        for left, right in zip(keys, keys[1:]):
            if not left < right:
                raise InvalidArgumentError(
                    "attributes must be strictly increasing, got "
                    f"{':'.join(left)} before {':'.join(right)}"
                )
        incidence.setflags(write=False)
        object.__setattr__(self, "objects", objects)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "incidence", incidence)

    @classmethod
    def empty(cls) -> FormalContext:
        return cls((), (), np.zeros((0, 0), dtype=bool))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.objects), len(self.attributes))

    @cached_property
    def attribute_index(self) -> dict[QualifiedToken, int]:
        return {attribute: i for i, attribute in enumerate(self.attributes)}

    @cached_property
    def object_index(self) -> dict[Interval, int]:
        return {interval: i for i, interval in enumerate(self.objects)}

    def tokens_of(self, index: int) -> tuple[QualifiedToken, ...]:
        return tuple(
            self.attributes[j] for j in np.flatnonzero(self.incidence[index])
        )

    def rows(self) -> list[tuple[Interval, tuple[QualifiedToken, ...]]]:
        return [(obj, self.tokens_of(i)) for i, obj in enumerate(self.objects)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalContext):
            return NotImplemented
        return (
            self.objects == other.objects
            and self.attributes == other.attributes
            and np.array_equal(self.incidence, other.incidence)
        )

    __hash__ = None


def _resolve_eps(eps: float | None) -> float:
    if eps is None:
        return config.get_default_eps()
    if not math.isfinite(eps) or eps < 0:
        raise InvalidValueError(f"eps must be finite and non-negative, got {eps!r}")
    return float(eps)


def _check_attributes(series: SampleSeries, attrs: Sequence[str]) -> tuple[str, ...]:
    attrs = tuple(attrs)
    if not attrs:
        raise SchemaError("select at least one attribute")
    if len(set(attrs)) != len(attrs):
        raise SchemaError(f"duplicate attributes in selection {list(attrs)}")
    unknown = [name for name in attrs if name not in series.attributes]
    if unknown:
        raise SchemaError(
            f"unknown attribute(s) {unknown}; series {series.name!r} has "
            f"{list(series.attributes)}"
        )
    return attrs


def unit_codes(
    series: SampleSeries, attrs: Sequence[str], eps: float | None = None
) -> np.ndarray:
    """Comparison codes (-1, 0, 1) of every unit interval, shape ``(N, k)``.

    Row ``j`` compares ``s_j`` with ``s_{j+1}`` exactly as ``compare_values``.
    """
    attrs = _check_attributes(series, attrs)
    eps = _resolve_eps(eps)
    values = np.column_stack([series.column(name) for name in attrs])
    prev, following = values[:-1], values[1:]
    codes = np.where(
        following > prev + eps, 1, np.where(following < prev - eps, -1, 0)
    )
    return codes.astype(np.int8)


def preprocess(
    series: SampleSeries, attrs: Sequence[str], eps: float | None = None
) -> list[AttributedInterval]:
    """Annotate every unit interval ``[j, j+1]`` with its comparison symbols."""
    attrs = _check_attributes(series, attrs)
    codes = unit_codes(series, attrs, eps)
    units = []
    for j, row in enumerate(codes.tolist()):
        notation = tuple(
            (name, token_of((code,))) for name, code in zip(attrs, row)
        )
        units.append(AttributedInterval(Interval(j, j + 1), notation))
    return units


def breakpoints(units: Sequence[AttributedInterval], n: int) -> list[int]:
    """Indices where the unit notation changes, plus both ends.

    Args:
        units: The ``n`` unit intervals returned by ``preprocess``, in order
        n: Index of the last sample

    Returns:
        Sorted breakpoints; empty when ``n`` is 0.
    """
    if n == 0:
        return []
    if len(units) != n:
        raise InvalidArgumentError(f"expected {n} unit intervals, got {len(units)}")
    for j, unit in enumerate(units):
        if unit.interval != Interval(j, j + 1):
            raise InvalidArgumentError(
                f"unit {j} must be [{j},{j + 1}], got {unit.interval}"
            )
    interior = [
        j for j in range(1, n) if units[j - 1].notation != units[j].notation
    ]
    return [0, *interior, n]


def hull(interval: Interval, points: Sequence[int]) -> Interval:
    """Smallest breakpoint interval containing ``interval``."""
    if not points or interval.start < points[0] or interval.end > points[-1]:
        raise InvalidArgumentError(f"{interval} is outside the breakpoint range")
    start = points[bisect.bisect_right(points, interval.start) - 1]
    end = points[bisect.bisect_left(points, interval.end)]
    return Interval(start, end)


def encode_intervals(
    series: SampleSeries,
    attrs: Sequence[str],
    eps: float | None = None,
    *,
    max_breakpoints: int | None = None,
) -> list[AttributedInterval]:
    """The redundancy-free closure of all interval unions.

    Objects are every pair of breakpoints ``[b_p, b_q]`` with ``p < q``; each
    attribute's token is the collapse of its unit symbols over the pair.
    """
    attrs = _check_attributes(series, attrs)
    units = preprocess(series, attrs, eps)
    points = breakpoints(units, series.last_index)

    cap = max_breakpoints
    if cap is None:
        cap = config.get_max_breakpoints()
    if len(points) > cap:
        raise CapacityError(
            f"series {series.name!r} has {len(points)} breakpoints, "
            f"exceeding the breakpoint cap of {cap}"
        )
    logger.debug(
        "series %r: %d samples, %d breakpoints", series.name, len(series), len(points)
    )

    # Units are constant between consecutive breakpoints.
    segments = [
        tuple(token.first.code for _, token in units[start].notation)
        for start in points[:-1]
    ]
    intervals: list[AttributedInterval] = []
    for p in range(len(points) - 1):
        runs: list[list[int]] = [[] for _ in attrs]
        tokens: list[Token] = [None] * len(attrs)  # type: ignore[list-item]
        for q in range(p + 1, len(points)):
            for k, code in enumerate(segments[q - 1]):
                if not runs[k] or runs[k][-1] != code:
                    runs[k].append(code)
                    tokens[k] = token_of(runs[k])
            intervals.append(
                AttributedInterval(
                    Interval(points[p], points[q]), tuple(zip(attrs, tokens))
                )
            )
    return intervals


def context_of(intervals: Iterable[AttributedInterval]) -> FormalContext:
    """Build the canonical formal context of a set of attributed intervals."""
    by_interval: dict[Interval, AttributedInterval] = {}
    names: frozenset[str] | None = None
    for item in intervals:
        item_names = frozenset(item.attributes)
        if names is None:
            names = item_names
        elif item_names != names:
            raise InvalidArgumentError(
                f"interval {item.interval} has attributes {sorted(item_names)}, "
                f"expected {sorted(names)}"
            )
        existing = by_interval.get(item.interval)
        if existing is not None and dict(existing.notation) != dict(item.notation):
            raise InvalidArgumentError(
                f"interval {item.interval} appears with two different notations"
            )
        by_interval[item.interval] = item

    if not by_interval:
        return FormalContext.empty()

    objects = sorted(by_interval)
    qualified: dict[tuple[str, Token], QualifiedToken] = {}
    rows: list[list[QualifiedToken]] = []
    for interval in objects:
        row = []
        for name, token in by_interval[interval].notation:
            key = (name, token)
            attribute = qualified.get(key)
            if attribute is None:
                attribute = qualified[key] = QualifiedToken(name, token)
            row.append(attribute)
        rows.append(row)

    attributes = sorted(qualified.values(), key=QualifiedToken.sort_key)
    column = {attribute: j for j, attribute in enumerate(attributes)}
    incidence = np.zeros((len(objects), len(attributes)), dtype=bool)
    row_idx = [i for i, row in enumerate(rows) for _ in row]
    col_idx = [column[attribute] for row in rows for attribute in row]
    incidence[row_idx, col_idx] = True
    logger.debug(
        "context with %d objects and %d attributes", len(objects), len(attributes)
    )
    return FormalContext(tuple(objects), tuple(attributes), incidence)


def encode(
    series: SampleSeries,
    attrs: Sequence[str],
    eps: float | None = None,
    *,
    max_breakpoints: int | None = None,
) -> FormalContext:
    """Encode a series into the formal context of its fixpoint interval set."""
    return context_of(
        encode_intervals(series, attrs, eps, max_breakpoints=max_breakpoints)
    )


def union_pass(current: Iterable[AttributedInterval]) -> set[AttributedInterval]:
    """The input plus one union of every contiguous pair ``[a, b]``, ``[b, c]``.

    A new interval ``[a, c]`` composes the tokens of its halves attribute by
    attribute. Intervals already present keep their own notation.
    """
    items = list(current)
    if not items:
        return set()

    names = items[0].attributes
    enlarged: dict[Interval, AttributedInterval] = {}
    by_start: dict[int, list[AttributedInterval]] = defaultdict(list)
    for item in items:
        if item.attributes != names:
            raise InvalidArgumentError(
                f"interval {item.interval} has attributes {list(item.attributes)}, "
                f"expected {list(names)}"
            )
        existing = enlarged.get(item.interval)
        if existing is not None and existing.notation != item.notation:
            raise InvalidArgumentError(
                f"interval {item.interval} appears with two different notations"
            )
        enlarged[item.interval] = item
        by_start[item.interval.start].append(item)

    for left in list(enlarged.values()):
        for right in by_start.get(left.interval.end, ()):
            union = Interval(left.interval.start, right.interval.end)
            if union in enlarged:
                continue
            notation = tuple(
                (name, compose_tokens(left_token, right_token))
                for (name, left_token), (_, right_token) in zip(
                    left.notation, right.notation
                )
            )
            enlarged[union] = AttributedInterval(union, notation)
    return set(enlarged.values())


def prune_redundant(
    items: Iterable[AttributedInterval],
) -> set[AttributedInterval]:
    """Drop every interval contained in a distinct one with identical notation."""
    by_notation: dict[tuple, list[Interval]] = defaultdict(list)
    candidates = list(items)
    for item in candidates:
        by_notation[item.notation].append(item.interval)
    return {
        item
        for item in candidates
        if not any(
            other != item.interval and other.contains(item.interval)
            for other in by_notation[item.notation]
        )
    }


def union_prune_pass(
    current: Iterable[AttributedInterval],
) -> set[AttributedInterval]:
    """One literal round of union-then-prune over an interval set."""
    return prune_redundant(union_pass(current))

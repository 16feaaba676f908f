"""Cross-curve concept algebra.

Concepts of different curves are identified by intent only; extents are
intervals local to each curve.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from diffconcepts.core import QualifiedToken
from diffconcepts.encoder import FormalContext, Interval, SampleSeries, encode
from diffconcepts.errors import DiffConceptsError, InvalidArgumentError
from diffconcepts.fca import FormalConcept, concepts, derive_extent

logger = logging.getLogger(__name__)

Intent = frozenset[QualifiedToken]
Curve = tuple[str, SampleSeries]

ORIENTATIONS = ("row-minus-col", "col-minus-row")


@dataclass(frozen=True)
class IntentSignature:
    """The set of concept intents of one curve."""

    intents: frozenset[Intent]

    def __len__(self) -> int:
        return len(self.intents)

    def __iter__(self) -> Iterator[Intent]:
        return iter(self.intents)

    def __contains__(self, intent: object) -> bool:
        return intent in self.intents


class Relation(str, Enum):
    """How two concept sets compare."""

    EQUAL = "equal"
    SUBSET = "subset"
    SUPERSET = "superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    """Pairwise concept-set difference sizes; the diagonal is zero."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        size = len(self.labels)
        if counts.shape != (size, size):
            raise InvalidArgumentError(
                f"counts must be {size}x{size}, got shape {counts.shape}"
            )
        if (counts < 0).any() or np.diagonal(counts).any():
            raise InvalidArgumentError(
                "counts must be non-negative with a zero diagonal"
            )
        counts.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "counts", counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiffMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(
            self.counts, other.counts
        )

    __hash__ = None


@dataclass(frozen=True)
class Realization:
    """Whether an attribute set is carried jointly by some object."""

    realized: bool
    witnesses: tuple[Interval, ...]

    def __bool__(self) -> bool:
        return self.realized


def _top_bottom(context: FormalContext, found: Sequence[FormalConcept]):
    n_objects, n_attributes = context.shape
    top = next((c for c in found if len(c.extent) == n_objects), None)
    bottom = next((c for c in found if len(c.intent) == n_attributes), None)
    return top, bottom


def intent_signature(
    context: FormalContext,
    found: Sequence[FormalConcept],
    *,
    include_top: bool = True,
    include_bottom: bool = True,
) -> IntentSignature:
    """Rendered intents of ``found``, concepts of ``context``."""
    top, bottom = _top_bottom(context, found)
    intents = set()
    for concept in found:
        if not include_top and concept == top:
            continue
        if not include_bottom and concept == bottom:
            continue
        intents.add(frozenset(context.attributes[j] for j in concept.intent))
    return IntentSignature(frozenset(intents))


def concept_diff(sig_a: IntentSignature, sig_b: IntentSignature) -> frozenset[Intent]:
    """Intents of ``sig_a`` missing from ``sig_b``."""
    return sig_a.intents - sig_b.intents


def relation(sig_a: IntentSignature, sig_b: IntentSignature) -> Relation:
    a_minus_b = concept_diff(sig_a, sig_b)
    b_minus_a = concept_diff(sig_b, sig_a)
    if not a_minus_b and not b_minus_a:
        return Relation.EQUAL
    if not a_minus_b:
        return Relation.SUBSET
    if not b_minus_a:
        return Relation.SUPERSET
    return Relation.INCOMPARABLE


def _annotated(exc: DiffConceptsError, name: str) -> DiffConceptsError:
    return type(exc)(f"curve {name!r}: {exc}")


def signatures(
    curves: Sequence[Curve],
    attrs: Sequence[str],
    eps: float | None = None,
    *,
    include_top: bool = True,
    include_bottom: bool = True,
    max_breakpoints: int | None = None,
    max_concepts: int | None = None,
    workers: int = 1,
) -> list[tuple[str, IntentSignature]]:
    """Encode every curve and collect its intent signature, in input order."""

    def signature_of(curve: Curve) -> tuple[str, IntentSignature]:
        name, series = curve
        try:
            context = encode(series, attrs, eps, max_breakpoints=max_breakpoints)
            found = concepts(context, max_concepts=max_concepts)
        except DiffConceptsError as exc:
            raise _annotated(exc, name) from exc
        logger.debug("curve %r: %d concepts", name, len(found))
        return name, intent_signature(
            context, found, include_top=include_top, include_bottom=include_bottom
        )

    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(curves) < 2:
        return [signature_of(curve) for curve in curves]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(signature_of, curves))


def diff_matrix(
    curves: Sequence[Curve],
    attrs: Sequence[str],
    eps: float | None = None,
    *,
    include_top: bool = True,
    include_bottom: bool = True,
    orientation: str = "row-minus-col",
    max_breakpoints: int | None = None,
    max_concepts: int | None = None,
    workers: int = 1,
) -> DiffMatrix:
    """Sizes of the concept-set differences between every pair of curves.

    With the default orientation ``counts[i][j] = |C_i - C_j|``;
    ``"col-minus-row"`` transposes it.
    """
    if len(curves) < 2:
        raise InvalidArgumentError("a difference matrix needs at least two curves")
    if orientation not in ORIENTATIONS:
        raise InvalidArgumentError(
            f"orientation must be one of {', '.join(ORIENTATIONS)}, "
            f"got {orientation!r}"
        )

    signed = signatures(
        curves,
        attrs,
        eps,
        include_top=include_top,
        include_bottom=include_bottom,
        max_breakpoints=max_breakpoints,
        max_concepts=max_concepts,
        workers=workers,
    )
    size = len(signed)
    counts = np.zeros((size, size), dtype=np.int64)
    for i, (_, sig_i) in enumerate(signed):
        for j, (_, sig_j) in enumerate(signed):
            if i != j:
                counts[i, j] = len(concept_diff(sig_i, sig_j))
    if orientation == "col-minus-row":
        counts = counts.T
    return DiffMatrix(tuple(name for name, _ in signed), counts)


def common_intents(
    curves: Sequence[Curve],
    attrs: Sequence[str],
    eps: float | None = None,
    *,
    include_empty: bool = False,
    max_breakpoints: int | None = None,
    max_concepts: int | None = None,
    workers: int = 1,
) -> frozenset[Intent]:
    """Intents present in the concept set of every curve.

    The empty intent is left out unless ``include_empty`` is set.
    """
    if not curves:
        raise InvalidArgumentError("common intents need at least one curve")
    signed = signatures(
        curves,
        attrs,
        eps,
        max_breakpoints=max_breakpoints,
        max_concepts=max_concepts,
        workers=workers,
    )
    common = frozenset.intersection(*(sig.intents for _, sig in signed))
    if not include_empty:
        common = common - {frozenset()}
    return common


def realizes(
    context: FormalContext, attr_set: Iterable[QualifiedToken | str]
) -> Realization:
    """Whether some object carries every token of ``attr_set``.

    Tokens absent from the context, or text that is not a qualified token,
    make the set unrealizable. The witnesses are the objects of the set's
    extent.
    """
    columns = []
    for item in attr_set:
        try:
            token = (
                item if isinstance(item, QualifiedToken) else QualifiedToken.parse(item)
            )
        except InvalidArgumentError:
            return Realization(False, ())
        column = context.attribute_index.get(token)
        if column is None:
            return Realization(False, ())
        columns.append(column)
    extent = derive_extent(context, columns)
    witnesses = tuple(context.objects[i] for i in sorted(extent))
    return Realization(bool(witnesses), witnesses)


def fully_discriminates(matrix: DiffMatrix) -> bool:
    """True when no curve's concept set is equal to or inside another's."""
    size = len(matrix.labels)
    off_diagonal = ~np.eye(size, dtype=bool)
    return bool((matrix.counts[off_diagonal] > 0).all())


def separates_groups(matrix: DiffMatrix, groups: Sequence[Sequence[str]]) -> bool:
    """True when every curve differs from every curve of another group."""
    position = {}
    for index, label in enumerate(matrix.labels):
        position.setdefault(label, index)
    membership: dict[int, int] = {}
    for group_id, group in enumerate(groups):
        for label in group:
            if label not in position:
                raise InvalidArgumentError(f"unknown curve label {label!r}")
            membership[position[label]] = group_id
    for i, group_i in membership.items():
        for j, group_j in membership.items():
            if group_i != group_j and matrix.counts[i, j] == 0:
                return False
    return True

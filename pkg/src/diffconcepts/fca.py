"""Formal Concept Analysis over interval contexts.

Concepts are enumerated with a Close-by-One traversal over attribute bitsets
and ordered deterministically: larger extents first, then by the rendered
intent. The lattice order is extent inclusion; each concept finds its covers
as the minimal closures of its intent plus one attribute.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from diffconcepts import config
from diffconcepts.encoder import FormalContext, Interval
from diffconcepts.errors import CapacityError, InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormalConcept:
    """A closed (extent, intent) pair of object and attribute indices."""

    extent: frozenset[int]
    intent: frozenset[int]


@dataclass(frozen=True)
class ConceptLattice:
    """Concepts ordered by extent inclusion.

    ``covers`` holds ``(lower, upper)`` index pairs of the Hasse diagram.
    """

    concepts: tuple[FormalConcept, ...]
    covers: frozenset[tuple[int, int]]
    top: int
    bottom: int

    @cached_property
    def graph(self) -> nx.DiGraph:
        """Hasse diagram with edges from lower to upper concept."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.concepts)))
        graph.add_edges_from(self.covers)
        return graph

    def upper_covers(self, index: int) -> list[int]:
        return sorted(self.graph.successors(index))

    def lower_covers(self, index: int) -> list[int]:
        return sorted(self.graph.predecessors(index))

    def leq(self, i: int, j: int) -> bool:
        return self.concepts[i].extent <= self.concepts[j].extent

    @cached_property
    def _by_extent(self) -> dict[frozenset[int], int]:
        return {concept.extent: i for i, concept in enumerate(self.concepts)}

    @cached_property
    def _by_intent(self) -> dict[frozenset[int], int]:
        return {concept.intent: i for i, concept in enumerate(self.concepts)}

    def meet(self, i: int, j: int) -> int:
        """Greatest common lower bound: the concept of the shared extent."""
        extent = self.concepts[i].extent & self.concepts[j].extent
        try:
            return self._by_extent[extent]
        except KeyError:
            raise InvalidArgumentError(
                f"concepts {i} and {j} have no meet in this lattice"
            ) from None

    def join(self, i: int, j: int) -> int:
        """Least common upper bound: the concept of the shared intent."""
        intent = self.concepts[i].intent & self.concepts[j].intent
        try:
            return self._by_intent[intent]
        except KeyError:
            raise InvalidArgumentError(
                f"concepts {i} and {j} have no join in this lattice"
            ) from None

    def __len__(self) -> int:
        return len(self.concepts)


def _check_indices(indices: Iterable[int], limit: int, kind: str) -> list[int]:
    checked = []
    for index in indices:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)):
            raise InvalidArgumentError(f"{kind} index must be an integer: {index!r}")
        if not 0 <= index < limit:
            raise InvalidArgumentError(
                f"{kind} index {index} out of range (0..{limit - 1})"
            )
        checked.append(int(index))
    return checked


def derive_extent(context: FormalContext, attr_set: Iterable[int]) -> frozenset[int]:
    """Objects incident to every attribute of ``attr_set`` (all when empty)."""
    columns = _check_indices(attr_set, len(context.attributes), "attribute")
    if not columns:
        return frozenset(range(len(context.objects)))
    mask = context.incidence[:, columns].all(axis=1)
    return frozenset(np.flatnonzero(mask).tolist())


def derive_intent(context: FormalContext, obj_set: Iterable[int]) -> frozenset[int]:
    """Attributes shared by every object of ``obj_set`` (all when empty)."""
    rows = _check_indices(obj_set, len(context.objects), "object")
    if not rows:
        return frozenset(range(len(context.attributes)))
    mask = context.incidence[rows, :].all(axis=0)
    return frozenset(np.flatnonzero(mask).tolist())


def _bits(indices: Iterable[int]) -> int:
    mask = 0
    for index in indices:
        mask |= 1 << index
    return mask


def _members(mask: int) -> frozenset[int]:
    if not mask:
        return frozenset()
    size = (mask.bit_length() + 7) // 8
    raw = np.frombuffer(mask.to_bytes(size, "little"), dtype=np.uint8)
    return frozenset(np.flatnonzero(np.unpackbits(raw, bitorder="little")).tolist())


def _column_masks(context: FormalContext) -> list[int]:
    return [_bits(np.flatnonzero(col).tolist()) for col in context.incidence.T]


def _closer(columns: Sequence[int]) -> Callable[[int], int]:
    """Intent of an extent bitset: every attribute whose column contains it."""

    def intent_of(extent: int) -> int:
        intent = 0
        for j, column in enumerate(columns):
            if column & extent == extent:
                intent |= 1 << j
        return intent

    return intent_of


def render_intent(context: FormalContext, concept: FormalConcept) -> tuple[str, ...]:
    """Qualified token texts of the intent, in canonical attribute order."""
    return tuple(context.attributes[j].text for j in sorted(concept.intent))


def render_extent(
    context: FormalContext, concept: FormalConcept
) -> tuple[Interval, ...]:
    return tuple(context.objects[i] for i in sorted(concept.extent))


def concepts(
    context: FormalContext, *, max_concepts: int | None = None
) -> list[FormalConcept]:
    """Enumerate every formal concept of ``context`` exactly once.

    Args:
        context: The formal context
        max_concepts: Cap on the number of concepts; defaults to
            DIFFCONCEPTS_MAX_CONCEPTS or 100000

    Returns:
        Concepts by descending extent size, then by rendered intent. The top
        concept comes first and the bottom concept last.
    """
    cap = max_concepts if max_concepts is not None else config.get_max_concepts()
    n_objects, n_attributes = context.shape
    columns = _column_masks(context)
    intent_of = _closer(columns)

    all_objects = (1 << n_objects) - 1
    found: list[tuple[int, int]] = []
    stack = [(all_objects, intent_of(all_objects), 0)]
    while stack:
        extent, intent, start = stack.pop()
        found.append((extent, intent))
        if len(found) > cap:
            raise CapacityError(
                f"context has more than {cap} concepts, exceeding the concept cap"
            )
        children = []
        for j in range(start, n_attributes):
            bit = 1 << j
            if intent & bit:
                continue
            child_extent = extent & columns[j]
            child_intent = intent_of(child_extent)
            prefix = bit - 1
            # Canonicity: no attribute before j may be added by the closure.
            if child_intent & prefix == intent & prefix:
                children.append((child_extent, child_intent, j + 1))
        stack.extend(reversed(children))

    result = [FormalConcept(_members(ext), _members(itt)) for ext, itt in found]
    result.sort(key=lambda c: (-len(c.extent), render_intent(context, c)))
    logger.debug("context %s yields %d concepts", context.shape, len(result))
    return result


def lattice(
    context: FormalContext, concepts: Sequence[FormalConcept]
) -> ConceptLattice:
    """Order ``concepts`` by extent inclusion and keep the cover pairs."""
    found = tuple(concepts)
    if not found:
        raise InvalidArgumentError("a lattice needs at least one concept")

    n_objects, n_attributes = context.shape
    for index, concept in enumerate(found):
        if (
            derive_intent(context, concept.extent) != concept.intent
            or derive_extent(context, concept.intent) != concept.extent
        ):
            raise InvalidArgumentError(f"concept {index} is not a closed pair")
    if len({concept.extent for concept in found}) != len(found):
        raise InvalidArgumentError("concepts must be distinct")

    top = [i for i, c in enumerate(found) if len(c.extent) == n_objects]
    bottom = [i for i, c in enumerate(found) if len(c.intent) == n_attributes]
    if not top or not bottom:
        raise InvalidArgumentError(
            "concepts must include the top and bottom concepts of the context"
        )

    columns = _column_masks(context)
    intent_of = _closer(columns)
    by_intent = {_bits(concept.intent): i for i, concept in enumerate(found)}
    every_attribute = (1 << n_attributes) - 1
    covers = set()
    for upper, concept in enumerate(found):
        extent, intent = _bits(concept.extent), _bits(concept.intent)
        # lower neighbours: minimal closures of the intent plus one attribute
        candidates = minimal = every_attribute & ~intent
        while candidates:
            bit = candidates & -candidates
            candidates ^= bit
            lower_intent = intent_of(extent & columns[bit.bit_length() - 1])
            if lower_intent & ~intent & ~bit & minimal:
                minimal &= ~bit
                continue
            if lower_intent not in by_intent:
                raise InvalidArgumentError(
                    "concepts must hold every concept of the context"
                )
            covers.add((by_intent[lower_intent], upper))
    logger.debug("lattice of %d concepts has %d covers", len(found), len(covers))
    return ConceptLattice(found, frozenset(covers), top[0], bottom[0])

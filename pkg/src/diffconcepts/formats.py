"""Stable text renderings of contexts, concepts, lattices and matrices.

Every export is deterministic: identical inputs give identical text.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

from diffconcepts.analysis import DiffMatrix, Intent, Relation
from diffconcepts.core import QualifiedToken
from diffconcepts.encoder import FormalContext, Interval
from diffconcepts.errors import DiffConceptsError, ParseError
from diffconcepts.fca import ConceptLattice, FormalConcept, render_extent, render_intent


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def _intent_key(intent: Intent) -> tuple[int, tuple[tuple[str, str], ...]]:
    return (len(intent), tuple(sorted(token.sort_key() for token in intent)))


def intent_texts(intent: Iterable[QualifiedToken]) -> list[str]:
    """Rendered tokens of an intent in canonical attribute order."""
    return [token.text for token in sorted(intent, key=QualifiedToken.sort_key)]


def format_intent(intent: Iterable[QualifiedToken]) -> str:
    """Render an intent the way the comparison tables print it: ``{a:>, w:<}``."""
    return "{" + ", ".join(intent_texts(intent)) + "}"


def sorted_intents(intents: Iterable[Intent]) -> list[Intent]:
    """Smaller intents first, then by their rendered tokens."""
    return sorted(intents, key=_intent_key)


def export_context_json(context: FormalContext) -> str:
    return _dumps(
        {
            "objects": [[obj.start, obj.end] for obj in context.objects],
            "attributes": [attribute.text for attribute in context.attributes],
            "incidence": context.incidence.astype(int).tolist(),
        }
    )


def _interval(value: Any, where: str) -> Interval:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    ):
        raise ParseError(f"{where} must be a [start, end] pair of integers")
    try:
        return Interval(value[0], value[1])
    except DiffConceptsError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def parse_context_json(text: str) -> FormalContext:
    """Inverse of ``export_context_json``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno
        ) from exc
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    for key in ("objects", "attributes", "incidence"):
        if not isinstance(data.get(key), list):
            raise ParseError(f"missing field {key!r} (a list)")

    objects = [
        _interval(value, f"objects[{i}]") for i, value in enumerate(data["objects"])
    ]
    attributes = []
    for i, value in enumerate(data["attributes"]):
        if not isinstance(value, str):
            raise ParseError(f"attributes[{i}] must be a string")
        try:
            attributes.append(QualifiedToken.parse(value))
        except DiffConceptsError as exc:
            raise ParseError(f"attributes[{i}]: {exc}") from exc

    rows = data["incidence"]
    if len(rows) != len(objects):
        raise ParseError(f"expected {len(objects)} incidence rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(attributes):
            raise ParseError(f"incidence[{i}] must list {len(attributes)} cells")
        if any(cell not in (0, 1) or isinstance(cell, float) for cell in row):
            raise ParseError(f"incidence[{i}] cells must be 0 or 1")

    incidence = np.array(rows, dtype=bool).reshape(len(objects), len(attributes))
    try:
        return FormalContext(tuple(objects), tuple(attributes), incidence)
    except DiffConceptsError as exc:
        raise ParseError(str(exc)) from exc


def _concept_records(
    context: FormalContext, concepts: Sequence[FormalConcept]
) -> list[dict[str, Any]]:
    return [
        {
            "id": number,
            "intent": list(render_intent(context, concept)),
            "extent": [
                [obj.start, obj.end] for obj in render_extent(context, concept)
            ],
        }
        for number, concept in enumerate(concepts, start=1)
    ]


def export_concepts_json(
    context: FormalContext, concepts: Sequence[FormalConcept]
) -> str:
    """Concept records numbered from 1 in the given (canonical) order."""
    return _dumps(_concept_records(context, concepts))


def _cover_ids(lattice: ConceptLattice) -> list[tuple[int, int]]:
    return sorted((lower + 1, upper + 1) for lower, upper in lattice.covers)


def export_lattice_json(context: FormalContext, lattice: ConceptLattice) -> str:
    return _dumps(
        {
            "concepts": _concept_records(context, lattice.concepts),
            "covers": [list(pair) for pair in _cover_ids(lattice)],
            "top": lattice.top + 1,
            "bottom": lattice.bottom + 1,
        }
    )


def _dot_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_lattice_dot(context: FormalContext, lattice: ConceptLattice) -> str:
    """Graphviz digraph of the Hasse diagram, drawn bottom to top.

    Node labels show intents, tooltips the extent intervals as ``i..j``.
    """
    lines = [
        "digraph lattice {",
        "  rankdir=BT;",
        "  node [shape=box];",
    ]
    for number, concept in enumerate(lattice.concepts, start=1):
        label = "{" + ", ".join(render_intent(context, concept)) + "}"
        tooltip = " ".join(obj.label for obj in render_extent(context, concept))
        lines.append(
            f"  C{number} [label={_dot_string(label)}, "
            f"tooltip={_dot_string(tooltip)}];"
        )
    for lower, upper in _cover_ids(lattice):
        lines.append(f"  C{lower} -> C{upper};")
    lines.append("}")
    return "\n".join(lines)


def export_matrix_csv(matrix: DiffMatrix) -> str:
    """One row and one column per curve; the diagonal cell is left blank."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["", *matrix.labels])
    for i, label in enumerate(matrix.labels):
        cells = [
            "" if i == j else str(count)
            for j, count in enumerate(matrix.counts[i].tolist())
        ]
        writer.writerow([label, *cells])
    return buffer.getvalue()


def parse_matrix_csv(text: str) -> DiffMatrix:
    """Inverse of ``export_matrix_csv``; blank diagonal cells read as 0."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ParseError("empty input")
    header = rows[0]
    if not header or header[0] != "":
        raise ParseError("header must start with an empty cell", row=1, column=1)
    labels = tuple(header[1:])
    size = len(labels)
    if len(rows) - 1 != size:
        raise ParseError(f"expected {size} matrix rows, got {len(rows) - 1}")

    counts = np.zeros((size, size), dtype=np.int64)
    for i, row in enumerate(rows[1:]):
        number = i + 2
        if len(row) != size + 1:
            raise ParseError(f"expected {size + 1} cells, got {len(row)}", row=number)
        if row[0] != labels[i]:
            raise ParseError(
                f"row label {row[0]!r} does not match column {labels[i]!r}",
                row=number,
                column=1,
            )
        for j, cell in enumerate(row[1:]):
            if i == j and cell == "":
                continue
            try:
                counts[i, j] = int(cell)
            except ValueError:
                raise ParseError(
                    f"non-integer cell {cell!r}", row=number, column=j + 2
                ) from None
    try:
        return DiffMatrix(labels, counts)
    except DiffConceptsError as exc:
        raise ParseError(str(exc)) from exc


def export_matrix_json(matrix: DiffMatrix, *, orientation: str | None = None) -> str:
    data: dict[str, Any] = {"labels": list(matrix.labels)}
    if orientation is not None:
        data["orientation"] = orientation
    data["counts"] = matrix.counts.tolist()
    return _dumps(data)


def export_diff_json(
    names: tuple[str, str],
    a_minus_b: Iterable[Intent],
    b_minus_a: Iterable[Intent],
    relation: Relation,
) -> str:
    """Both directions of a two-curve concept-set comparison."""
    first, second = names
    return _dumps(
        {
            "curves": [first, second],
            "relation": relation.value,
            "a_minus_b": [intent_texts(i) for i in sorted_intents(a_minus_b)],
            "b_minus_a": [intent_texts(i) for i in sorted_intents(b_minus_a)],
        }
    )


def export_common_json(names: Sequence[str], intents: Iterable[Intent]) -> str:
    return _dumps(
        {
            "curves": list(names),
            "intents": [intent_texts(i) for i in sorted_intents(intents)],
        }
    )

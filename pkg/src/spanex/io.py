"""Canonical JSON serialization of annotated datasets.

The on-disk shape is validated against ``schemas/dataset.schema.json`` before
any object construction, so malformed input fails with a JSON-pointer path
instead of a stack trace from deep inside the data model.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .types import (
    Dataset,
    DatasetName,
    Instance,
    Interaction,
    InteractionType,
    Label,
    Level,
    Part,
    Span,
    SpanexError,
)


class SchemaValidationError(SpanexError):
    def __init__(self, message: str, pointer: str):
        self.pointer = pointer
        super().__init__(f"{pointer}: {message}")


def _dataset_schema() -> dict:
    text = resources.files("spanex").joinpath("schemas/dataset.schema.json").read_text()
    return json.loads(text)


_VALIDATOR = jsonschema.Draft202012Validator(_dataset_schema())


def validate_dataset_dict(obj: Any) -> None:
    errors = list(_VALIDATOR.iter_errors(obj))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        pointer = "/" + "/".join(str(p) for p in best.absolute_path)
        raise SchemaValidationError(best.message, pointer)


def span_to_json(span: Span | None) -> list[int] | None:
    return None if span is None else [span.start, span.end]


def interaction_to_dict(it: Interaction) -> dict:
    return {
        "type": it.type.value,
        "level": it.level.value,
        "span_p1": span_to_json(it.span_p1),
        "span_p2": span_to_json(it.span_p2),
    }


def interaction_from_dict(obj: dict) -> Interaction:
    def span(raw: list[int] | None, part: Part) -> Span | None:
        return None if raw is None else Span(part, raw[0], raw[1])

    return Interaction(
        type=InteractionType(obj["type"]),
        level=Level(obj["level"]),
        span_p1=span(obj["span_p1"], Part.P1),
        span_p2=span(obj["span_p2"], Part.P2),
    )


def instance_to_dict(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "label": inst.label.value,
        "part1_tokens": list(inst.part1_tokens),
        "part2_tokens": list(inst.part2_tokens),
        "annotations": {
            ann: [interaction_to_dict(it) for it in ints]
            for ann, ints in inst.annotations.items()
        },
    }


def instance_from_dict(obj: dict, dataset: DatasetName) -> Instance:
    return Instance(
        id=obj["id"],
        dataset=dataset,
        label=Label(obj["label"]),
        part1_tokens=tuple(obj["part1_tokens"]),
        part2_tokens=tuple(obj["part2_tokens"]),
        annotations={
            ann: tuple(interaction_from_dict(i) for i in ints)
            for ann, ints in obj["annotations"].items()
        },
    )


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "dataset": dataset.name.value,
        "instances": [instance_to_dict(i) for i in dataset.instances],
    }


def dataset_from_dict(obj: dict) -> Dataset:
    validate_dataset_dict(obj)
    name = DatasetName(obj["dataset"])
    return Dataset(
        name=name,
        instances=tuple(instance_from_dict(o, name) for o in obj["instances"]),
    )


def dumps(dataset: Dataset) -> str:
    return json.dumps(dataset_to_dict(dataset), indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Dataset:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"not valid JSON: {exc}", "/") from exc
    return dataset_from_dict(obj)


def load_json(path: str | Path) -> Dataset:
    return loads(Path(path).read_text())


def store_json(dataset: Dataset, path: str | Path) -> None:
    Path(path).write_text(dumps(dataset))

#!/usr/bin/env python3
"""Regenerate the bundled mock-SNLI corpus and the fixtures derived from it.

Outputs (all committed; rerunning must be a no-op unless the table changes):

  src/spanex/data/snli_mock.json     bundled 20-instance sample corpus
  tests/fixtures/snli_mock.json      the same corpus, used by the test suite
  tests/fixtures/fever_brat/         a 3-instance FEVER corpus in brat layout
  tests/fixtures/conformance_requests.json   30 oracle-protocol requests

The corpus is written so that the keyword oracle's argmax equals the gold
label on every instance and the label-constraint checker reports zero
violations after augmentation; the script asserts both before writing.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from spanex.augment import augment_dataset
from spanex.brat import dump_brat_dir, load_brat_dir
from spanex.constraints import check_dataset
from spanex.io import dataset_to_dict, dumps, loads, store_json
from spanex.oracle import mock_oracle
from spanex.oracle.protocol import PROTOCOL_VERSION
from spanex.types import (
    Dataset,
    DatasetName,
    Instance,
    Interaction,
    InteractionType,
    Label,
    Level,
    Part,
    Span,
)

TYPE_CODES = {
    "syn": InteractionType.SYNONYM,
    "ant": InteractionType.ANTONYM,
    "h12": InteractionType.HYPERNYM_P1_P2,
    "h21": InteractionType.HYPERNYM_P2_P1,
}
LEVEL_CODES = {"lo": Level.LOW, "hi": Level.HIGH}

# Each row: (id, label, part1, part2, [(annotator, type, level, p1 phrase, p2 phrase), ...])
# Phrases are whitespace token sequences located in the part; "@2" suffix picks
# the second occurrence.  The first three instances are deliberately tiny so
# their graphs, partitions and perturbation probabilities can be worked out on
# paper; the rest add span-length, chunking and disagreement variety.
CORPUS = [
    (
        "mock-001",
        "Entailment",
        "kids match",
        "children match",
        [
            ("ann1", "syn", "lo", "kids", "children"),
            ("ann1", "syn", "lo", "match", "match"),
            ("ann1", "syn", "hi", "kids match", "children match"),
            ("ann2", "syn", "lo", "kids", "children"),
            ("ann2", "syn", "lo", "match", "match"),
            ("ann2", "syn", "hi", "kids match", "children match"),
            ("ann3", "h21", "lo", "kids", "children"),
            ("ann3", "syn", "lo", "match", "match"),
            ("ann3", "syn", "hi", "kids match", "children match"),
        ],
    ),
    (
        "mock-002",
        "Contradiction",
        "answers wrong",
        "never answers",
        [
            ("ann1", "ant", "lo", "wrong", "never"),
            ("ann1", "syn", "lo", "answers", "answers"),
            ("ann1", "ant", "hi", "answers wrong", "never answers"),
            ("ann2", "ant", "lo", "wrong", "never"),
            ("ann2", "ant", "hi", "answers wrong", "never answers"),
            ("ann3", "ant", "lo", "wrong", "never"),
            ("ann3", "ant", "hi", "answers wrong", "never answers"),
        ],
    ),
    (
        "mock-003",
        "Neutral",
        "maybe rain",
        "maybe rain soon",
        [
            ("ann1", "syn", "lo", "rain", "rain"),
            ("ann1", "syn", "hi", "maybe rain", "maybe rain"),
            ("ann2", "syn", "lo", "rain", "rain"),
            ("ann2", "syn", "hi", "maybe rain", "maybe rain soon"),
            ("ann3", "syn", "lo", "rain", "rain"),
            ("ann3", "syn", "hi", "maybe rain", "maybe rain"),
        ],
    ),
    (
        "mock-004",
        "Entailment",
        "two boys kick a ball and agree",
        "two kids kick a ball and agree",
        [
            ("ann1", "syn", "lo", "boys", "kids"),
            ("ann1", "syn", "lo", "kick a ball", "kick a ball"),
            ("ann1", "syn", "lo", "and agree", "and agree"),
            ("ann1", "syn", "hi", "two boys", "two kids"),
            ("ann1", "syn", "hi", "kick a ball and agree", "kick a ball and agree"),
            ("ann2", "syn", "lo", "boys", "kids"),
            ("ann2", "syn", "lo", "kick a ball", "kick a ball"),
            ("ann2", "syn", "lo", "and agree", "and agree"),
            ("ann2", "syn", "hi", "two boys", "two kids"),
            ("ann2", "syn", "hi", "kick a ball and agree", "kick a ball and agree"),
            ("ann3", "h21", "lo", "boys", "kids"),
            ("ann3", "syn", "lo", "kick a ball", "kick a ball"),
            ("ann3", "syn", "lo", "and agree", "and agree"),
            ("ann3", "syn", "hi", "two boys", "two kids"),
            ("ann3", "syn", "hi", "kick a ball and agree", "kick a ball and agree"),
        ],
    ),
    (
        "mock-005",
        "Contradiction",
        "the big door is open",
        "the small door is never open",
        [
            ("ann1", "ant", "lo", "big", "small"),
            ("ann1", "ant", "lo", "open", "never open"),
            ("ann1", "ant", "hi", "the big door is open", "the small door is never open"),
            ("ann2", "ant", "lo", "big", "small"),
            ("ann2", "ant", "lo", "open", "never open"),
            ("ann2", "ant", "hi", "the big door is open", "the small door is never open"),
            ("ann3", "ant", "lo", "big", "small"),
            ("ann3", "ant", "hi", "the big door is open", "the small door is never open"),
        ],
    ),
    (
        "mock-006",
        "Neutral",
        "a man reads maybe a book",
        "a man maybe reads a new novel",
        [
            ("ann1", "h12", "lo", "a book", "a new novel"),
            ("ann1", "h12", "hi", "a book", "a new novel"),
            ("ann2", "h12", "lo", "a book", "novel"),
            ("ann2", "h12", "hi", "a book", "a new novel"),
        ],
    ),
    (
        "mock-007",
        "Entailment",
        "a small dog barks and they agree",
        "an animal barks and they agree",
        [
            ("ann1", "h21", "lo", "a small dog", "an animal"),
            ("ann1", "syn", "lo", "and they agree", "and they agree"),
            ("ann1", "h21", "hi", "a small dog barks", "an animal barks"),
            ("ann1", "syn", "hi", "and they agree", "and they agree"),
            ("ann2", "h21", "lo", "a small dog", "an animal"),
            ("ann2", "syn", "lo", "and they agree", "and they agree"),
            ("ann2", "h21", "hi", "a small dog barks", "an animal barks"),
            ("ann2", "syn", "hi", "and they agree", "and they agree"),
            ("ann3", "h21", "lo", "small dog", "an animal"),
            ("ann3", "syn", "lo", "and they agree", "and they agree"),
            ("ann3", "h21", "hi", "a small dog barks", "an animal barks"),
            ("ann3", "syn", "hi", "and they agree", "and they agree"),
        ],
    ),
    (
        "mock-008",
        "Contradiction",
        "she always wins and the lights are on",
        "she never wins and the lights are off",
        [
            ("ann1", "ant", "lo", "always", "never"),
            ("ann1", "ant", "lo", "on", "off"),
            ("ann1", "ant", "hi", "she always wins", "she never wins"),
            ("ann1", "ant", "hi", "the lights are on", "the lights are off"),
            ("ann2", "ant", "lo", "always", "never"),
            ("ann2", "ant", "lo", "are on", "are off"),
            ("ann2", "ant", "hi", "she always wins", "she never wins"),
            ("ann2", "ant", "hi", "the lights are on", "the lights are off"),
            ("ann3", "ant", "lo", "always", "never"),
            ("ann3", "ant", "hi", "she always wins", "she never wins"),
        ],
    ),
    (
        "mock-009",
        "Neutral",
        "the chef cooks extra pasta",
        "the chef cooks extra pasta quietly today",
        [
            ("ann1", "syn", "lo", "the chef", "the chef"),
            ("ann1", "syn", "lo", "cooks extra pasta", "cooks extra pasta"),
            ("ann1", "syn", "hi", "the chef cooks extra pasta", "the chef cooks extra pasta"),
            ("ann2", "syn", "lo", "chef", "chef"),
            ("ann2", "syn", "lo", "extra pasta", "extra pasta"),
            ("ann2", "syn", "hi", "the chef cooks extra pasta", "the chef cooks extra pasta"),
            ("ann3", "syn", "lo", "extra pasta", "extra pasta"),
            ("ann3", "syn", "hi", "the chef cooks extra pasta", "the chef cooks extra pasta"),
        ],
    ),
    (
        "mock-010",
        "Entailment",
        "the team will match the record set last year",
        "the team will match the record",
        [
            ("ann1", "syn", "lo", "the team", "the team"),
            ("ann1", "syn", "lo", "will match", "will match"),
            ("ann1", "syn", "lo", "the record", "the record"),
            ("ann1", "syn", "hi", "the team will match the record", "the team will match the record"),
            ("ann2", "syn", "lo", "the team", "the team"),
            ("ann2", "syn", "lo", "will match the record", "will match the record"),
            ("ann2", "syn", "hi", "the team will match the record", "the team will match the record"),
            ("ann3", "syn", "lo", "the team", "the team"),
            ("ann3", "syn", "lo", "will match", "will match"),
            ("ann3", "syn", "lo", "the record", "the record"),
            ("ann3", "syn", "hi", "the team will match the record", "the team will match the record"),
        ],
    ),
    (
        "mock-011",
        "Contradiction",
        "this answer is wrong",
        "this answer is never wrong",
        [
            ("ann1", "ant", "lo", "wrong", "never wrong"),
            ("ann1", "ant", "hi", "this answer is wrong", "this answer is never wrong"),
            ("ann2", "ant", "lo", "wrong", "never wrong"),
            ("ann2", "ant", "hi", "this answer is wrong", "this answer is never wrong"),
            ("ann3", "ant", "lo", "wrong", "never wrong"),
            ("ann3", "ant", "hi", "this answer is wrong", "this answer is never wrong"),
        ],
    ),
    (
        "mock-012",
        "Neutral",
        "some animals sleep maybe",
        "some dogs sleep maybe today",
        [
            ("ann1", "h12", "lo", "animals", "dogs"),
            ("ann1", "h12", "hi", "some animals sleep", "some dogs sleep"),
            ("ann2", "h12", "lo", "some animals", "some dogs"),
            ("ann2", "h12", "hi", "some animals sleep", "some dogs sleep"),
            ("ann3", "h12", "lo", "animals", "dogs"),
            ("ann3", "h12", "hi", "some animals sleep", "some dogs sleep"),
        ],
    ),
    (
        "mock-013",
        "Entailment",
        "a happy child smiles and they agree today",
        "a kid smiles and they agree today",
        [
            ("ann1", "syn", "lo", "a happy child", "a kid"),
            ("ann1", "syn", "lo", "and they agree today", "and they agree today"),
            ("ann1", "syn", "hi", "a happy child smiles", "a kid smiles"),
            ("ann1", "syn", "hi", "and they agree today", "and they agree today"),
            ("ann2", "syn", "lo", "happy child", "a kid"),
            ("ann2", "syn", "lo", "and they agree today", "and they agree today"),
            ("ann2", "syn", "hi", "a happy child smiles", "a kid smiles"),
            ("ann2", "syn", "hi", "and they agree today", "and they agree today"),
            ("ann3", "h21", "lo", "a happy child", "a kid"),
            ("ann3", "syn", "lo", "and they agree today", "and they agree today"),
            ("ann3", "syn", "hi", "a happy child smiles", "a kid smiles"),
            ("ann3", "syn", "hi", "and they agree today", "and they agree today"),
        ],
    ),
    (
        "mock-014",
        "Contradiction",
        "the cat drinks milk",
        "the cat never drinks milk",
        [
            ("ann1", "ant", "lo", "drinks", "never drinks"),
            ("ann1", "ant", "hi", "the cat drinks milk", "the cat never drinks milk"),
            ("ann2", "ant", "lo", "drinks", "never drinks"),
            ("ann2", "ant", "hi", "the cat drinks milk", "the cat never drinks milk"),
            ("ann3", "ant", "lo", "drinks milk", "never drinks milk"),
            ("ann3", "ant", "hi", "the cat drinks milk", "the cat never drinks milk"),
        ],
    ),
    (
        "mock-015",
        "Neutral",
        "an artist paints maybe a mural on the wall",
        "an artist paints maybe a big mural",
        [
            ("ann1", "syn", "lo", "an artist", "an artist"),
            ("ann1", "syn", "hi", "an artist paints", "an artist paints"),
            ("ann2", "syn", "lo", "artist", "artist"),
            ("ann2", "syn", "hi", "an artist paints", "an artist paints"),
            ("ann3", "syn", "lo", "an artist", "an artist"),
            ("ann3", "syn", "hi", "an artist paints", "an artist paints"),
        ],
    ),
    (
        "mock-016",
        "Entailment",
        "birds sing and match the tune",
        "birds sing and match the tune",
        [
            ("ann1", "syn", "lo", "and match the tune", "and match the tune"),
            ("ann1", "syn", "hi", "birds sing and match the tune", "birds sing and match the tune"),
            ("ann2", "syn", "lo", "and match the tune", "and match the tune"),
            ("ann2", "syn", "hi", "birds sing and match the tune", "birds sing and match the tune"),
            ("ann3", "syn", "lo", "and match the tune", "and match the tune"),
            ("ann3", "syn", "hi", "birds sing and match the tune", "birds sing and match the tune"),
        ],
    ),
    (
        "mock-017",
        "Contradiction",
        "the opposite team never agrees",
        "the team agrees always",
        [
            ("ann1", "ant", "lo", "never agrees", "agrees always"),
            ("ann1", "ant", "hi", "the opposite team never agrees", "the team agrees always"),
            ("ann2", "ant", "lo", "never agrees", "agrees always"),
            ("ann2", "ant", "hi", "the opposite team never agrees", "the team agrees always"),
            ("ann3", "ant", "lo", "never agrees", "agrees always"),
        ],
    ),
    (
        "mock-018",
        "Neutral",
        "students study unknown topics",
        "students study unknown topics and experiments maybe",
        [
            ("ann1", "syn", "lo", "study unknown topics", "study unknown topics"),
            ("ann1", "syn", "hi", "students study unknown topics", "students study unknown topics"),
            ("ann2", "syn", "lo", "study unknown topics", "study unknown topics"),
            ("ann2", "syn", "hi", "students study unknown topics", "students study unknown topics"),
            ("ann3", "syn", "lo", "study unknown topics", "study unknown topics"),
            ("ann3", "syn", "hi", "students study unknown topics", "students study unknown topics"),
        ],
    ),
    (
        "mock-019",
        "Entailment",
        "the red car and the blue car agree",
        "the two cars agree",
        [
            ("ann1", "h21", "lo", "the red car and the blue car", "the two cars"),
            ("ann1", "h21", "hi", "the red car and the blue car", "the two cars"),
            ("ann2", "h21", "lo", "the red car and the blue car", "the two cars"),
            ("ann2", "h21", "hi", "the red car and the blue car", "the two cars"),
            ("ann3", "h21", "lo", "the red car", "the two cars"),
            ("ann3", "h21", "hi", "the red car and the blue car", "the two cars"),
        ],
    ),
    (
        "mock-020",
        "Contradiction",
        "the tall man opens the window and is wrong",
        "the short man closes the window and is never wrong",
        [
            ("ann1", "ant", "lo", "tall", "short"),
            ("ann1", "ant", "lo", "opens", "closes"),
            ("ann1", "ant", "lo", "is wrong", "is never wrong"),
            ("ann1", "ant", "hi", "the tall man", "the short man"),
            ("ann1", "ant", "hi", "opens the window", "closes the window"),
            ("ann1", "ant", "hi", "is wrong", "is never wrong"),
            ("ann2", "ant", "lo", "tall", "short"),
            ("ann2", "ant", "lo", "opens", "closes"),
            ("ann2", "ant", "lo", "wrong", "never wrong"),
            ("ann2", "ant", "hi", "the tall man", "the short man"),
            ("ann2", "ant", "hi", "opens the window", "closes the window"),
            ("ann2", "ant", "hi", "is wrong", "is never wrong"),
            ("ann3", "ant", "lo", "tall", "short"),
            ("ann3", "ant", "lo", "opens", "closes"),
            ("ann3", "ant", "hi", "the tall man", "the short man"),
        ],
    ),
]

# FEVER-style mini corpus for the brat round-trip fixtures.  Part 1 is the
# evidence sentence prefixed with its source page, part 2 the claim.
FEVER = [
    (
        "fever-001",
        "Entailment",
        "[ Rivers ] the nile matches the longest river title",
        "the nile matches the longest river title",
        [
            ("ann1", "syn", "lo", "the nile", "the nile"),
            ("ann1", "syn", "lo", "matches the longest river title", "matches the longest river title"),
            ("ann1", "syn", "hi", "the nile matches the longest river title", "the nile matches the longest river title"),
            ("ann2", "syn", "lo", "the nile", "the nile"),
            ("ann2", "syn", "lo", "matches the longest river title", "matches the longest river title"),
            ("ann2", "syn", "hi", "the nile matches the longest river title", "the nile matches the longest river title"),
        ],
    ),
    (
        "fever-002",
        "Contradiction",
        "[ Cities ] the town was never the capital",
        "the town was once the capital",
        [
            ("ann1", "ant", "lo", "never", "once"),
            ("ann1", "ant", "hi", "was never the capital", "was once the capital"),
            ("ann2", "ant", "lo", "was never", "was once"),
            ("ann2", "ant", "hi", "was never the capital", "was once the capital"),
        ],
    ),
    (
        "fever-003",
        "Neutral",
        "[ Planets ] the probe maybe found water",
        "the probe maybe found frozen water",
        [
            ("ann1", "syn", "lo", "the probe", "the probe"),
            ("ann1", "h12", "lo", "water", "frozen water"),
            ("ann1", "syn", "hi", "the probe maybe found", "the probe maybe found"),
            ("ann2", "syn", "lo", "the probe", "the probe"),
            ("ann2", "syn", "hi", "the probe maybe found", "the probe maybe found"),
        ],
    ),
]


def span_of(tokens: tuple[str, ...], phrase: str, part: Part) -> Span:
    """Locate a whitespace phrase in a token tuple; "@n" picks occurrence n."""
    occurrence = 1
    if "@" in phrase:
        phrase, _, suffix = phrase.rpartition("@")
        occurrence = int(suffix)
    want = phrase.split()
    seen = 0
    for start in range(len(tokens) - len(want) + 1):
        if list(tokens[start : start + len(want)]) == want:
            seen += 1
            if seen == occurrence:
                return Span(part, start, start + len(want))
    raise SystemExit(f"phrase {phrase!r} (occurrence {occurrence}) not in {tokens}")


def build_instance(row, dataset: DatasetName) -> Instance:
    iid, label, p1_text, p2_text, rows = row
    p1 = tuple(p1_text.split())
    p2 = tuple(p2_text.split())
    annotations: dict[str, list[Interaction]] = {}
    for annotator, t, lvl, ph1, ph2 in rows:
        it = Interaction(
            type=TYPE_CODES[t],
            level=LEVEL_CODES[lvl],
            span_p1=span_of(p1, ph1, Part.P1),
            span_p2=span_of(p2, ph2, Part.P2),
        )
        annotations.setdefault(annotator, []).append(it)
    return Instance(
        id=iid,
        dataset=dataset,
        label=Label(label),
        part1_tokens=p1,
        part2_tokens=p2,
        annotations={a: tuple(v) for a, v in annotations.items()},
    )


def build_corpus() -> Dataset:
    return Dataset(
        name=DatasetName.SNLI,
        instances=tuple(build_instance(r, DatasetName.SNLI) for r in CORPUS),
    )


def build_fever() -> Dataset:
    return Dataset(
        name=DatasetName.FEVER,
        instances=tuple(build_instance(r, DatasetName.FEVER) for r in FEVER),
    )


def self_check(dataset: Dataset) -> None:
    violations = check_dataset(dataset, augment_first=True)
    for v in violations:
        print(f"  VIOLATION {v.instance_id}/{v.annotator}: {v.rule}: {v.message}", file=sys.stderr)
    assert not violations, f"{len(violations)} label-constraint violations"

    oracle = mock_oracle()
    order = ["Entailment", "Neutral", "Contradiction"]
    for inst in dataset:
        got = order[oracle.predict(list(inst.part1_tokens), list(inst.part2_tokens)).predicted]
        assert got == inst.label.value, f"{inst.id}: oracle says {got}, gold {inst.label.value}"

    # Augmentation must never alter the human rows it starts from.
    augmented = augment_dataset(dataset)
    for inst, aug in zip(dataset, augmented):
        for ann in inst.annotators():
            human = [it for it in aug.interactions(ann) if it.type.is_human]
            assert sorted(human, key=lambda i: i.sort_key()) == sorted(
                inst.interactions(ann), key=lambda i: i.sort_key()
            ), f"{inst.id}/{ann}: augmentation disturbed human interactions"


def conformance_requests(dataset: Dataset) -> list[dict]:
    """30 protocol requests: 2 meta, then predict/encode over corpus slices.

    Several entries repeat an earlier request verbatim so a runner can check
    response determinism by comparing the two answers.
    """
    requests: list[dict] = []
    first_seen: dict[str, str] = {}

    def add(op: str, body: dict, note: str) -> None:
        rid = f"c-{len(requests) + 1:03d}"
        key = op + json.dumps(body, sort_keys=True)
        if key in first_seen:
            note = f"{note} (repeat of {first_seen[key]})"
        else:
            first_seen[key] = rid
        requests.append({"id": rid, "op": op, "note": note, "request": body})

    add("meta", {"version": PROTOCOL_VERSION}, "meta")
    add("meta", {"version": PROTOCOL_VERSION}, "meta")

    pair = lambda inst: {
        "version": PROTOCOL_VERSION,
        "part1_tokens": list(inst.part1_tokens),
        "part2_tokens": list(inst.part2_tokens),
    }
    instances = list(dataset)
    for inst in instances[:12]:
        add("predict", pair(inst), f"predict {inst.id}")
    add("predict", pair(instances[0]), f"predict {instances[0].id}")
    for inst in instances[12:]:
        add("encode", pair(inst), f"encode {inst.id}")
    for inst in instances[:5]:
        add("encode", pair(inst), f"encode {inst.id}")
    add("encode", pair(instances[12]), f"encode {instances[12].id}")
    add(
        "encode",
        {
            "version": PROTOCOL_VERSION,
            "part1_tokens": ["one"],
            "part2_tokens": ["word"],
        },
        "minimal two-token pair",
    )
    assert len(requests) == 30, len(requests)
    return requests


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check-only", action="store_true", help="validate the tables, write nothing")
    args = parser.parse_args()

    corpus = build_corpus()
    self_check(corpus)
    fever = build_fever()
    violations = check_dataset(fever, augment_first=True)
    assert not violations, violations

    if args.check_only:
        print("tables OK")
        return 0

    fixtures = ROOT / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)

    store_json(corpus, fixtures / "snli_mock.json")
    store_json(corpus, ROOT / "src" / "spanex" / "data" / "snli_mock.json")
    print(f"wrote snli_mock.json ({len(corpus)} instances)")

    brat_root = fixtures / "fever_brat"
    dump_brat_dir(fever, brat_root)
    back = load_brat_dir(brat_root)
    assert dataset_to_dict(back) == dataset_to_dict(fever), "brat round trip drifted"
    print(f"wrote fever_brat/ ({len(fever)} instances)")

    reqs = conformance_requests(corpus)
    out = fixtures / "conformance_requests.json"
    out.write_text(json.dumps({"requests": reqs}, indent=2) + "\n")
    print(f"wrote conformance_requests.json ({len(reqs)} requests)")

    # Round trip the corpus through the serializer as a final sanity pass.
    assert dumps(loads(dumps(corpus))) == dumps(corpus)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

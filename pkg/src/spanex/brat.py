"""brat standoff (.ann/.txt) reading and writing.

Layout conventions
------------------
* The ``.txt`` holds part 1, a single newline, then part 2.  Character offsets
  in ``.ann`` index into this whole text.
* Span (T) labels encode the annotation level: ``Premise``/``Hypothesis`` for
  phrase level, ``PremiseLeaf``/``HypothesisLeaf`` (aka ``pleaf``/``hleaf``)
  for word level.  Which part a span belongs to follows from its offsets.
* Relation (R) labels: ``Synonym``, ``Antonym``, ``Synonym-SYS`` and
  ``Hypernym``; for the latter Arg1 is the side containing the hypernym, which
  fixes the direction.  ``Hypernym-P1-P2``/``Hypernym-P2-P1`` are accepted as
  explicit spellings.
* Danglers are span-only annotations labeled ``Dangler``/``DanglerLeaf``; any
  other unreferenced T line is kept as a plain span without an interaction.

A directory of documents looks like::

    DIR/meta.json                 {"dataset": "SNLI", "labels": {"<id>": "Entailment", ...}}
    DIR/txt/<id>.txt
    DIR/ann/<annotator>/<id>.ann

"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .tokenize import OffsetError, char_range_to_token_range, detokenize, token_char_offsets, tokenize_with_offsets
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


class BratParseError(SpanexError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if line_no is not None else message)


_T_LINE = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_R_LINE = re.compile(r"^(R\d+)\t(\S+) Arg1:(\S+) Arg2:(\S+)\s*$")

_HIGH_LABELS = {"premise", "hypothesis", "part1", "part2", "evidence", "claim", "high"}
_LOW_LABELS = {"pleaf", "hleaf", "premiseleaf", "hypothesisleaf", "leaf", "low"}
_DANGLER_LABELS = {"dangler": Level.HIGH, "danglerleaf": Level.LOW}

_CANON_SPAN_LABEL = {
    (Part.P1, Level.HIGH): "Premise",
    (Part.P2, Level.HIGH): "Hypothesis",
    (Part.P1, Level.LOW): "PremiseLeaf",
    (Part.P2, Level.LOW): "HypothesisLeaf",
}
_CANON_DANGLER_LABEL = {Level.HIGH: "Dangler", Level.LOW: "DanglerLeaf"}


def _norm(label: str) -> str:
    return label.lower().replace("-", "").replace("_", "")


@dataclass(frozen=True)
class BratSpan:
    tid: str
    label: str
    span: Span
    level: Level
    dangler: bool
    text: str


@dataclass(frozen=True)
class BratDocument:
    part1_text: str
    part2_text: str
    part1_tokens: tuple[str, ...]
    part2_tokens: tuple[str, ...]
    spans: dict[str, BratSpan]
    interactions: tuple[Interaction, ...]


def parse_brat(ann_text: str, txt_text: str, part_boundary: int) -> BratDocument:
    """Parse one brat document into token spans and interactions.

    ``part_boundary`` is the character offset where part 2 begins in
    ``txt_text`` (the character before it is the separator).  Interactions
    come back in file order, where a relation line or a dangler span line
    each contribute one interaction.
    """
    if not 1 < part_boundary <= len(txt_text):
        raise BratParseError(
            f"part boundary {part_boundary} outside text of length {len(txt_text)}"
        )
    part1_text = txt_text[: part_boundary - 1]
    part2_text = txt_text[part_boundary:].rstrip("\n")
    p1_tokens, p1_offsets = tokenize_with_offsets(part1_text)
    p2_tokens, p2_offsets = tokenize_with_offsets(part2_text)
    if not p1_tokens or not p2_tokens:
        raise BratParseError("both parts must contain at least one token")
    p2_base = part_boundary  # char offset where part 2 begins

    spans: dict[str, BratSpan] = {}
    # First pass: T lines (so relations may reference spans defined later).
    for line_no, line in enumerate(ann_text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("T"):
            m = _T_LINE.match(line)
            if not m:
                if ";" in line:
                    raise BratParseError("discontinuous spans are not supported", line_no)
                raise BratParseError(f"malformed span line: {line!r}", line_no)
            tid, label, start_s, end_s, covered = m.groups()
            if tid in spans:
                raise BratParseError(f"duplicate span id {tid}", line_no)
            start, end = int(start_s), int(end_s)
            if end > len(txt_text) or start >= end:
                raise BratParseError(f"span offsets [{start}, {end}) outside text", line_no)
            if txt_text[start:end] != covered:
                raise BratParseError(
                    f"covered text mismatch for {tid}: file says {covered!r}, "
                    f"text has {txt_text[start:end]!r}",
                    line_no,
                )
            if end <= len(part1_text):
                part, rel_start, offsets = Part.P1, start, p1_offsets
            elif start >= p2_base:
                part, rel_start, offsets = Part.P2, start - p2_base, p2_offsets
            else:
                raise BratParseError(f"span {tid} crosses the part boundary", line_no)
            norm = _norm(label)
            dangler = norm in _DANGLER_LABELS
            if dangler:
                level = _DANGLER_LABELS[norm]
            elif norm in _HIGH_LABELS:
                level = Level.HIGH
            elif norm in _LOW_LABELS:
                level = Level.LOW
            else:
                raise BratParseError(f"unknown span label {label!r}", line_no)
            try:
                tok_start, tok_end = char_range_to_token_range(
                    offsets, rel_start, rel_start + (end - start)
                )
            except OffsetError as exc:
                raise BratParseError(str(exc), line_no) from exc
            spans[tid] = BratSpan(
                tid=tid,
                label=label,
                span=Span(part, tok_start, tok_end),
                level=level,
                dangler=dangler,
                text=covered,
            )

    # Second pass: relations and dangler spans, in file order.
    interactions: list[Interaction] = []
    for line_no, line in enumerate(ann_text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("T"):
            m = _T_LINE.match(line)
            bs = spans[m.group(1)]
            if bs.dangler:
                itype = (
                    InteractionType.DANGLER_SYS_P1
                    if bs.span.part is Part.P1
                    else InteractionType.DANGLER_SYS_P2
                )
                interactions.append(
                    Interaction(
                        type=itype,
                        level=bs.level,
                        span_p1=bs.span if bs.span.part is Part.P1 else None,
                        span_p2=bs.span if bs.span.part is Part.P2 else None,
                    )
                )
            continue
        if line.startswith("R"):
            m = _R_LINE.match(line)
            if not m:
                raise BratParseError(f"malformed relation line: {line!r}", line_no)
            _rid, rtype, arg1, arg2 = m.groups()
            for arg in (arg1, arg2):
                if arg not in spans:
                    raise BratParseError(f"relation references unknown span {arg}", line_no)
                if spans[arg].dangler:
                    raise BratParseError(f"dangler span {arg} used in a relation", line_no)
            s1, s2 = spans[arg1], spans[arg2]
            if s1.span.part is s2.span.part:
                raise BratParseError(
                    f"relation {rtype} connects two spans on the same part", line_no
                )
            if s1.level is not s2.level:
                raise BratParseError("relation arguments are on different levels", line_no)
            norm = _norm(rtype)
            if norm == "synonym":
                itype = InteractionType.SYNONYM
            elif norm == "antonym":
                itype = InteractionType.ANTONYM
            elif norm == "synonymsys":
                itype = InteractionType.SYNONYM_SYS
            elif norm == "hypernym":
                # Arg1 holds the hypernym; its part fixes the direction.
                itype = (
                    InteractionType.HYPERNYM_P1_P2
                    if s1.span.part is Part.P1
                    else InteractionType.HYPERNYM_P2_P1
                )
            elif norm in ("hypernymp1p2", "hypernymptoh"):
                itype = InteractionType.HYPERNYM_P1_P2
            elif norm in ("hypernymp2p1", "hypernymhtop"):
                itype = InteractionType.HYPERNYM_P2_P1
            else:
                raise BratParseError(f"unknown relation type {rtype!r}", line_no)
            on_p1 = s1 if s1.span.part is Part.P1 else s2
            on_p2 = s2 if on_p1 is s1 else s1
            interactions.append(
                Interaction(
                    type=itype, level=s1.level, span_p1=on_p1.span, span_p2=on_p2.span
                )
            )
            continue
        raise BratParseError(f"unsupported annotation line: {line!r}", line_no)

    return BratDocument(
        part1_text=part1_text,
        part2_text=part2_text,
        part1_tokens=tuple(p1_tokens),
        part2_tokens=tuple(p2_tokens),
        spans=spans,
        interactions=tuple(interactions),
    )


def parse_standoff(ann_text: str, txt_text: str) -> BratDocument:
    """Like :func:`parse_brat` with the boundary at the first newline."""
    if "\n" not in txt_text:
        raise BratParseError("txt must contain part 1 and part 2 separated by a newline")
    return parse_brat(ann_text, txt_text, txt_text.index("\n") + 1)


def render_standoff(
    part1_tokens: tuple[str, ...] | list[str],
    part2_tokens: tuple[str, ...] | list[str],
    interactions: tuple[Interaction, ...] | list[Interaction],
) -> tuple[str, str]:
    """Render interactions to ``(txt_text, ann_text)``.

    Inverse of :func:`parse_standoff`: parsing the output reproduces the
    interaction list exactly (tokens are space-joined, so this is only a true
    inverse for documents in canonical spacing, which covers everything this
    package writes).
    """
    part1_text = detokenize(part1_tokens)
    part2_text = detokenize(part2_tokens)
    txt_text = part1_text + "\n" + part2_text
    p1_char = token_char_offsets(part1_tokens)
    p2_char = token_char_offsets(part2_tokens)
    p2_base = len(part1_text) + 1

    t_lines: list[str] = []
    tids: dict[tuple, str] = {}

    def span_chars(span: Span) -> tuple[int, int, str]:
        offs = p1_char if span.part is Part.P1 else p2_char
        base = 0 if span.part is Part.P1 else p2_base
        start = offs[span.start][0] + base
        end = offs[span.end - 1][1] + base
        return start, end, txt_text[start:end]

    def tid_for(span: Span, level: Level, dangler: bool) -> str:
        key = (span.part, span.start, span.end, level, dangler)
        if key not in tids:
            label = (
                _CANON_DANGLER_LABEL[level] if dangler else _CANON_SPAN_LABEL[(span.part, level)]
            )
            start, end, covered = span_chars(span)
            tid = f"T{len(tids) + 1}"
            tids[key] = tid
            t_lines.append(f"{tid}\t{label} {start} {end}\t{covered}")
        return tids[key]

    paired_t: list[str] = []
    body: list[str] = []
    rid = 0
    for it in interactions:
        if it.type.is_dangler:
            span = it.span_p1 if it.span_p1 is not None else it.span_p2
            assert span is not None
            # Danglers are never deduplicated: each one must parse back to its
            # own interaction for the round-trip to be exact.
            start, end, covered = span_chars(span)
            tid = f"T{len(tids) + 1}"
            tids[(span.part, span.start, span.end, it.level, True, tid)] = tid
            body.append(f"{tid}\t{_CANON_DANGLER_LABEL[it.level]} {start} {end}\t{covered}")
        else:
            assert it.span_p1 is not None and it.span_p2 is not None
            if it.type is InteractionType.HYPERNYM_P1_P2:
                rtype, arg1, arg2 = "Hypernym", it.span_p1, it.span_p2
            elif it.type is InteractionType.HYPERNYM_P2_P1:
                rtype, arg1, arg2 = "Hypernym", it.span_p2, it.span_p1
            else:
                rtype, arg1, arg2 = it.type.value, it.span_p1, it.span_p2
            before = len(t_lines)
            t1 = tid_for(arg1, it.level, dangler=False)
            t2 = tid_for(arg2, it.level, dangler=False)
            paired_t.extend(t_lines[before:])
            rid += 1
            body.append(f"R{rid}\t{rtype} Arg1:{t1} Arg2:{t2}")

    ann_text = "\n".join(paired_t + body)
    if ann_text:
        ann_text += "\n"
    return txt_text, ann_text


def load_brat_dir(root: str | Path) -> Dataset:
    """Convert a directory of brat documents (see module docstring) to a dataset."""
    root = Path(root)
    meta_path = root / "meta.json"
    if not meta_path.is_file():
        raise BratParseError(f"missing {meta_path}")
    meta = json.loads(meta_path.read_text())
    try:
        ds_name = DatasetName(meta["dataset"])
        labels = {k: Label(v) for k, v in meta["labels"].items()}
    except (KeyError, ValueError) as exc:
        raise BratParseError(f"bad meta.json: {exc}") from exc

    txt_dir = root / "txt"
    ann_root = root / "ann"
    annotators = sorted(p.name for p in ann_root.iterdir() if p.is_dir()) if ann_root.is_dir() else []
    instances = []
    for txt_path in sorted(txt_dir.glob("*.txt")):
        doc_id = txt_path.stem
        if doc_id not in labels:
            raise BratParseError(f"no label for document {doc_id!r} in meta.json")
        txt_text = txt_path.read_text()
        annotations: dict[str, tuple[Interaction, ...]] = {}
        doc = None
        for annotator in annotators:
            ann_path = ann_root / annotator / f"{doc_id}.ann"
            if not ann_path.is_file():
                continue
            try:
                doc = parse_standoff(ann_path.read_text(), txt_text)
            except BratParseError as exc:
                raise BratParseError(f"{ann_path}: {exc}") from exc
            annotations[annotator] = doc.interactions
        if doc is None:
            doc = parse_standoff("", txt_text)
        instances.append(
            Instance(
                id=doc_id,
                dataset=ds_name,
                label=labels[doc_id],
                part1_tokens=doc.part1_tokens,
                part2_tokens=doc.part2_tokens,
                annotations=annotations,
            )
        )
    return Dataset(name=ds_name, instances=tuple(instances))


def dump_brat_dir(dataset: Dataset, root: str | Path) -> None:
    """Write a dataset back out as a brat directory (inverse of load_brat_dir)."""
    root = Path(root)
    (root / "txt").mkdir(parents=True, exist_ok=True)
    meta = {
        "dataset": dataset.name.value,
        "labels": {inst.id: inst.label.value for inst in dataset},
    }
    (root / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    for inst in dataset:
        txt = None
        for annotator in inst.annotators():
            txt, ann = render_standoff(inst.part1_tokens, inst.part2_tokens, inst.annotations[annotator])
            ann_dir = root / "ann" / annotator
            ann_dir.mkdir(parents=True, exist_ok=True)
            (ann_dir / f"{inst.id}.ann").write_text(ann)
        if txt is None:
            txt, _ = render_standoff(inst.part1_tokens, inst.part2_tokens, ())
        (root / "txt" / f"{inst.id}.txt").write_text(txt)

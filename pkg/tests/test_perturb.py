"""Selections, Remove/Keep perturbations, and the comp/suff duality."""
import random

import pytest

from spanex.explain import extract_explanation
from spanex.perturb import (
    BaselineSource,
    DegenerateSelectionError,
    ExtractedTopKSource,
    HumanTypeSource,
    PerturbError,
    PerturbMode,
    TokenSelection,
    perturb,
    selection_from_annotations,
    selection_from_explanation,
    selection_from_interaction,
    selection_from_spans,
)
from spanex.types import Instance, InteractionType, Label, Level, Part, Span


def _sel(inst, p1, p2):
    return TokenSelection(inst.id, frozenset(p1), frozenset(p2), ExtractedTopKSource(k=1))


def test_remove_and_keep_preserve_order(corpus):
    inst = corpus.get("mock-004")  # "two boys kick a ball and agree"
    sel = _sel(inst, {1, 3}, {0})
    r1, r2 = perturb(inst, sel, PerturbMode.REMOVE)
    assert r1 == ["two", "kick", "ball", "and", "agree"]
    assert r2 == list(inst.part2_tokens)[1:]
    k1, k2 = perturb(inst, sel, PerturbMode.KEEP)
    assert k1 == ["boys", "a"]
    assert k2 == ["two"]


def test_keep_raises_on_empty_part(corpus):
    inst = corpus.get("mock-001")
    with pytest.raises(DegenerateSelectionError):
        perturb(inst, _sel(inst, set(), {0}), PerturbMode.KEEP)
    with pytest.raises(DegenerateSelectionError):
        perturb(inst, _sel(inst, {0}, set()), PerturbMode.KEEP)
    # Remove of an empty selection is the identity, not an error.
    r1, r2 = perturb(inst, _sel(inst, set(), set()), PerturbMode.REMOVE)
    assert r1 == list(inst.part1_tokens) and r2 == list(inst.part2_tokens)


def test_selection_validation(corpus):
    inst = corpus.get("mock-001")
    with pytest.raises(PerturbError):
        perturb(inst, _sel(inst, {99}, set()), PerturbMode.REMOVE)
    other = corpus.get("mock-002")
    with pytest.raises(PerturbError):
        perturb(other, _sel(inst, {0}, {0}), PerturbMode.REMOVE)


def test_selection_from_spans(corpus):
    inst = corpus.get("mock-004")
    sel = selection_from_spans(
        inst,
        [Span(Part.P1, 0, 2), Span(Part.P1, 1, 3), Span(Part.P2, 6, 7)],
        ExtractedTopKSource(k=2),
    )
    assert sel.p1 == {0, 1, 2}
    assert sel.p2 == {6}
    assert sel.size == 4
    assert not sel.is_empty


def test_selection_from_annotations_unions_one_cell(corpus):
    # mock-001 / ann1 low-level synonyms: kids<->children and match<->match.
    inst = corpus.get("mock-001")
    sel = selection_from_annotations(inst, "ann1", InteractionType.SYNONYM, Level.LOW)
    assert sel.p1 == {0, 1} and sel.p2 == {0, 1}
    assert sel.source == HumanTypeSource(InteractionType.SYNONYM, Level.LOW, "ann1")
    # A cell the annotator never used comes back empty rather than failing.
    empty = selection_from_annotations(inst, "ann1", InteractionType.ANTONYM, Level.LOW)
    assert empty.is_empty


def test_selection_from_interaction(corpus):
    inst = corpus.get("mock-002")
    ann = next(it for it in inst.interactions("ann1") if it.type is InteractionType.ANTONYM)
    sel = selection_from_interaction(inst, ann, "ann1")
    assert sel.p1 and sel.p2
    assert sel.source.annotator == "ann1"


def test_selection_from_explanation(oracle, corpus):
    inst = corpus.get("mock-001")
    exp = extract_explanation(inst, oracle)
    sel = selection_from_explanation(inst, exp, k=1)
    assert sel.p1 == {1} and sel.p2 == {1}
    with pytest.raises(PerturbError):
        selection_from_explanation(corpus.get("mock-002"), exp, k=1)


def test_complement_partitions_the_instance(corpus):
    inst = corpus.get("mock-005")
    sel = _sel(inst, {0, 2}, {1})
    comp = sel.complement(inst)
    assert sel.p1 | comp.p1 == set(range(len(inst.part1_tokens)))
    assert sel.p1 & comp.p1 == set()
    assert sel.p2 | comp.p2 == set(range(len(inst.part2_tokens)))
    assert comp.source == sel.source


def test_remove_equals_keep_of_complement(corpus):
    # The duality the eval metrics lean on, checked tokenwise over random
    # selections on every corpus instance.
    rng = random.Random(21)
    for inst in corpus:
        n1, n2 = len(inst.part1_tokens), len(inst.part2_tokens)
        for _ in range(25):
            sel = _sel(
                inst,
                {i for i in range(n1) if rng.random() < 0.4},
                {i for i in range(n2) if rng.random() < 0.4},
            )
            removed = perturb(inst, sel, PerturbMode.REMOVE)
            comp = sel.complement(inst)
            if not comp.p1 or not comp.p2:
                with pytest.raises(DegenerateSelectionError):
                    perturb(inst, comp, PerturbMode.KEEP)
                continue
            assert perturb(inst, comp, PerturbMode.KEEP) == removed


def test_source_keys_distinguish_units():
    keys = {
        HumanTypeSource(InteractionType.SYNONYM, Level.LOW, "ann1").key(),
        HumanTypeSource(InteractionType.SYNONYM, Level.HIGH, "ann1").key(),
        HumanTypeSource(InteractionType.SYNONYM, Level.LOW, "ann2").key(),
        HumanTypeSource(InteractionType.ANTONYM, Level.LOW, "ann1").key(),
        ExtractedTopKSource(k=1).key(),
        ExtractedTopKSource(k=3).key(),
        BaselineSource("Random-Phrase", Level.LOW, "ann1").key(),
        BaselineSource("Part-Phrase", Level.LOW, "ann1").key(),
    }
    assert len(keys) == 8


def test_selection_key_includes_instance():
    a = TokenSelection("i1", frozenset(), frozenset(), ExtractedTopKSource(k=1))
    b = TokenSelection("i2", frozenset(), frozenset(), ExtractedTopKSource(k=1))
    assert a.key() != b.key()

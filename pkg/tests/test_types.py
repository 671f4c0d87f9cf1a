import pytest

from spanex.types import (
    DatasetName,
    Dataset,
    Instance,
    Interaction,
    InteractionType,
    Label,
    Level,
    Part,
    Span,
    ValidationError,
)


def span1(start, end):
    return Span(Part.P1, start, end)


def span2(start, end):
    return Span(Part.P2, start, end)


def test_span_basics():
    s = span1(1, 3)
    assert len(s) == 2
    assert list(s.indices()) == [1, 2]
    assert s.tokens(("a", "b", "c", "d")) == ("b", "c")
    assert s.overlaps(span1(2, 5))
    assert not s.overlaps(span1(3, 5))  # half-open: touching is not overlap
    assert not s.overlaps(span2(1, 3))  # different parts never overlap
    assert span1(0, 4).contains(s)


def test_span_rejects_degenerate_ranges():
    with pytest.raises(ValidationError):
        Span(Part.P1, 2, 2)
    with pytest.raises(ValidationError):
        Span(Part.P1, -1, 2)
    with pytest.raises(ValidationError):
        Span(Part.P1, 0, "2")


def test_paired_interaction_needs_both_spans():
    with pytest.raises(ValidationError):
        Interaction(InteractionType.SYNONYM, Level.LOW, span1(0, 1), None)
    it = Interaction(InteractionType.SYNONYM, Level.LOW, span1(0, 1), span2(0, 2))
    assert it.spans == (it.span_p1, it.span_p2)
    assert it.span_on(Part.P1) is it.span_p1
    assert it.span_on(Part.P2) is it.span_p2


def test_dangler_carries_exactly_its_own_span():
    d1 = Interaction(InteractionType.DANGLER_SYS_P1, Level.HIGH, span1(0, 1), None)
    assert d1.spans == (d1.span_p1,)
    with pytest.raises(ValidationError):
        Interaction(InteractionType.DANGLER_SYS_P1, Level.HIGH, None, span2(0, 1))
    with pytest.raises(ValidationError):
        Interaction(InteractionType.DANGLER_SYS_P2, Level.HIGH, span1(0, 1), span2(0, 1))


def test_spans_must_sit_on_their_declared_part():
    with pytest.raises(ValidationError):
        Interaction(InteractionType.SYNONYM, Level.LOW, span2(0, 1), span2(0, 1))


def test_type_predicates():
    assert InteractionType.SYNONYM.is_human
    assert InteractionType.ANTONYM.is_human
    assert not InteractionType.SYNONYM_SYS.is_human
    assert InteractionType.DANGLER_SYS_P1.is_dangler
    assert not InteractionType.SYNONYM_SYS.is_dangler


def make_instance(**kw):
    base = dict(
        id="x-1",
        dataset=DatasetName.SNLI,
        label=Label.NEUTRAL,
        part1_tokens=("a", "b"),
        part2_tokens=("c",),
    )
    base.update(kw)
    return Instance(**base)


def test_instance_bounds_checking():
    bad = Interaction(InteractionType.SYNONYM, Level.LOW, span1(0, 3), span2(0, 1))
    with pytest.raises(ValidationError):
        make_instance(annotations={"ann1": (bad,)})
    with pytest.raises(ValidationError):
        make_instance(part2_tokens=())


def test_instance_accessors():
    it = Interaction(InteractionType.SYNONYM, Level.LOW, span1(0, 1), span2(0, 1))
    inst = make_instance(annotations={"b": (it,), "a": ()})
    assert inst.annotators() == ("a", "b")
    assert inst.interactions("b") == (it,)
    assert inst.tokens(Part.P1) == ("a", "b")
    inst2 = inst.with_annotations({"c": (it,)})
    assert inst2.annotators() == ("c",)
    assert inst.annotators() == ("a", "b")  # original untouched


def test_dataset_lookup_and_duplicate_ids():
    a, b = make_instance(id="i-1"), make_instance(id="i-2")
    ds = Dataset(name=DatasetName.SNLI, instances=(a, b))
    assert len(ds) == 2
    assert ds.get("i-2") is b
    with pytest.raises(KeyError):
        ds.get("i-3")
    with pytest.raises(ValidationError):
        Dataset(name=DatasetName.SNLI, instances=(a, make_instance(id="i-1")))


def test_sort_key_orders_by_position_then_type():
    early = Interaction(InteractionType.SYNONYM, Level.LOW, span1(0, 1), span2(0, 1))
    late = Interaction(InteractionType.SYNONYM, Level.LOW, span1(1, 2), span2(0, 1))
    assert early.sort_key() < late.sort_key()

"""Sanity checks for the bundled mock-SNLI corpus.

The expected numbers below were counted by hand from the table in
tools/make_fixtures.py, so a generator bug that drops or duplicates rows
shows up here rather than silently shifting downstream goldens.
"""
from collections import Counter

from conftest import FIXTURES

from spanex.constraints import check_dataset
from spanex.io import dataset_to_dict, load_json
from spanex.types import DatasetName, InteractionType, Label


def test_corpus_shape(corpus):
    assert corpus.name is DatasetName.SNLI
    assert len(corpus) == 20
    assert [inst.id for inst in corpus] == [f"mock-{i:03d}" for i in range(1, 21)]


def test_label_distribution(corpus):
    by_label = Counter(inst.label for inst in corpus)
    assert by_label[Label.ENTAILMENT] == 7
    assert by_label[Label.NEUTRAL] == 6
    assert by_label[Label.CONTRADICTION] == 7


def test_hand_counted_interaction_totals(corpus):
    by_type = Counter()
    total = 0
    for inst in corpus:
        for ann in inst.annotators():
            for it in inst.interactions(ann):
                by_type[it.type] += 1
                total += 1
    assert total == 164
    assert by_type[InteractionType.SYNONYM] == 83
    assert by_type[InteractionType.ANTONYM] == 56
    assert by_type[InteractionType.HYPERNYM_P1_P2] == 10
    assert by_type[InteractionType.HYPERNYM_P2_P1] == 15
    # Humans never annotate system types.
    assert all(t.is_human for t in by_type)


def test_annotator_panels(corpus):
    for inst in corpus:
        if inst.id == "mock-006":
            assert inst.annotators() == ("ann1", "ann2")
        else:
            assert inst.annotators() == ("ann1", "ann2", "ann3")


def test_no_label_constraint_violations(corpus):
    assert check_dataset(corpus, augment_first=True) == []


def test_mock_oracle_agrees_with_gold(corpus, oracle):
    order = [Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION]
    for inst in corpus:
        res = oracle.predict(list(inst.part1_tokens), list(inst.part2_tokens))
        assert order[res.predicted] is inst.label, inst.id
        assert res.confidence > 0.5, inst.id


def test_bundled_copy_matches_fixture(corpus):
    import spanex

    bundled = load_json(FIXTURES.parent.parent / "src" / "spanex" / "data" / "snli_mock.json")
    assert dataset_to_dict(bundled) == dataset_to_dict(corpus)
    assert spanex.__version__  # corpus and package ship together

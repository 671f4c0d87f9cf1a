"""Interaction matching and Fleiss' kappa.

Kappa values are checked against ``fleiss_kappa_reference`` (the textbook
formula written out independently) and relaxed components against a
fixpoint-iteration closure oracle.
"""
import random

import numpy as np
import pytest

from oracles import fleiss_kappa_reference, relaxed_components_reference

from spanex.agreement import (
    AgreementError,
    KAPPA_CATEGORIES,
    MatchMode,
    fleiss_kappa,
    fleiss_kappa_table,
    groups_to_table,
    match_interactions,
    summarize,
)
from spanex.types import (
    DatasetName,
    Instance,
    Interaction,
    InteractionType,
    Label,
    Level,
    Part,
    Span,
)


def make(annotations):
    return Instance(
        id="agr-1",
        dataset=DatasetName.SNLI,
        label=Label.NEUTRAL,
        part1_tokens=tuple("abcdefgh"),
        part2_tokens=tuple("stuvwxyz"),
        annotations=annotations,
    )


def syn(s1, e1, s2, e2, level=Level.LOW, t=InteractionType.SYNONYM):
    return Interaction(t, level, Span(Part.P1, s1, e1), Span(Part.P2, s2, e2))


def test_exact_groups_need_identical_span_tuples():
    inst = make(
        {
            "ann1": (syn(0, 2, 0, 2),),
            "ann2": (syn(0, 2, 0, 2, t=InteractionType.HYPERNYM_P2_P1),),
            "ann3": (syn(0, 2, 0, 3),),
        }
    )
    groups = match_interactions(inst, MatchMode.EXACT, Level.LOW)
    sizes = sorted(g.size for g in groups)
    assert sizes == [1, 2]
    full = next(g for g in groups if g.size == 2)
    assert full.ratings() == {
        "ann1": InteractionType.SYNONYM,
        "ann2": InteractionType.HYPERNYM_P2_P1,
    }


def test_exact_duplicates_split_into_layers():
    # One annotator repeating identical spans must not inflate a group.
    inst = make({"ann1": (syn(0, 1, 0, 1), syn(0, 1, 0, 1)), "ann2": (syn(0, 1, 0, 1),)})
    groups = match_interactions(inst, MatchMode.EXACT, Level.LOW)
    assert sorted(g.size for g in groups) == [1, 2]
    for g in groups:
        assert len(g.members) == len(set(a for a, _ in g.members))


def test_relaxed_needs_overlap_on_both_parts():
    inst = make(
        {
            "ann1": (syn(0, 2, 0, 2),),
            "ann2": (syn(1, 3, 4, 6),),  # P1 overlaps, P2 does not
        }
    )
    groups = match_interactions(inst, MatchMode.RELAXED, Level.LOW)
    assert sorted(g.size for g in groups) == [1, 1]


def test_relaxed_chains_are_transitive_components():
    # a~b and b~c but not a~c: all three in one group.
    a, b, c = syn(0, 2, 0, 2), syn(1, 4, 1, 4), syn(3, 5, 3, 5)
    inst = make({"ann1": (a,), "ann2": (b,), "ann3": (c,)})
    groups = match_interactions(inst, MatchMode.RELAXED, Level.LOW)
    assert [g.size for g in groups] == [3]


def test_levels_do_not_mix():
    inst = make({"ann1": (syn(0, 2, 0, 2, level=Level.HIGH),), "ann2": (syn(0, 2, 0, 2),)})
    assert [g.size for g in match_interactions(inst, MatchMode.EXACT, Level.LOW)] == [1]
    assert [g.size for g in match_interactions(inst, MatchMode.EXACT, Level.HIGH)] == [1]


def test_relaxed_components_match_reference_on_random_spansets():
    rng = random.Random(23)
    annotators = ["ann1", "ann2", "ann3"]
    for trial in range(300):
        members = []
        for _ in range(rng.randint(0, 8)):
            s1 = rng.randrange(8)
            s2 = rng.randrange(8)
            members.append(
                (
                    rng.choice(annotators),
                    syn(s1, rng.randint(s1 + 1, 8), s2, rng.randint(s2 + 1, 8)),
                )
            )
        ann_map: dict[str, list] = {a: [] for a in annotators}
        for a, it in members:
            ann_map[a].append(it)
        inst = make({a: tuple(v) for a, v in ann_map.items() if v})
        groups = match_interactions(inst, MatchMode.RELAXED, Level.LOW)

        # Reference closure over the flattened member list.
        flat = [
            (a, it)
            for a in sorted(ann_map)
            for it in ann_map[a]
        ]
        pairs = [
            ((it.span_p1.start, it.span_p1.end), (it.span_p2.start, it.span_p2.end))
            for _, it in flat
        ]
        want = relaxed_components_reference(pairs)
        got = set()
        for g in groups:
            ids = frozenset(
                i
                for i, (a, it) in enumerate(flat)
                if any(b == a and jt is it for b, jt in g.members)
            )
            got.add(ids)
        assert got == want, trial
        # Every member lands in exactly one group.
        assert sum(len(g.members) for g in groups) == len(flat)


def test_kappa_pinned_two_group_table():
    # Two items, three raters: [[2,1,0,0],[0,3,0,0]].
    # P_1 = ((4+1)-3)/6 = 1/3, P_2 = (9-3)/6 = 1, Pbar = 2/3.
    # p = (1/3, 2/3, 0, 0), Pe = 1/9 + 4/9 = 5/9.
    # kappa = (2/3 - 5/9) / (1 - 5/9) = (1/9)/(4/9) = 1/4.
    table = np.array([[2, 1, 0, 0], [0, 3, 0, 0]])
    assert abs(fleiss_kappa_table(table) - 0.25) < 1e-12
    assert abs(fleiss_kappa_reference(table.tolist()) - 0.25) < 1e-12


def test_kappa_unanimous_is_exactly_one():
    for cat in range(4):
        table = np.zeros((3, 4), dtype=int)
        table[:, cat] = 3
        assert fleiss_kappa_table(table) == 1.0


def test_kappa_matches_reference_on_random_tables():
    rng = np.random.default_rng(5)
    for _ in range(200):
        items = rng.integers(1, 10)
        table = rng.multinomial(3, [0.4, 0.3, 0.2, 0.1], size=items)
        got = fleiss_kappa_table(table)
        want = fleiss_kappa_reference(table.tolist())
        assert abs(got - want) < 1e-12


def test_kappa_relabel_invariance():
    rng = np.random.default_rng(17)
    for _ in range(100):
        items = rng.integers(2, 8)
        table = rng.multinomial(4, [0.25] * 4, size=items)
        base = fleiss_kappa_table(table)
        perm = rng.permutation(4)
        assert abs(fleiss_kappa_table(table[:, perm]) - base) < 1e-12


def test_kappa_table_validation():
    with pytest.raises(AgreementError):
        fleiss_kappa_table(np.array([[1, 2], [2, 2]]))  # ragged rater counts
    with pytest.raises(AgreementError):
        fleiss_kappa_table(np.array([[1, 0]]))  # single rating per item
    with pytest.raises(AgreementError):
        fleiss_kappa_table(np.array([[1.5, 1.5]]))


def test_groups_to_table_uses_full_panel_groups_only():
    inst = make(
        {
            "ann1": (syn(0, 1, 0, 1), syn(2, 3, 2, 3)),
            "ann2": (syn(0, 1, 0, 1), syn(2, 3, 2, 3)),
            "ann3": (syn(0, 1, 0, 1, t=InteractionType.ANTONYM),),
        }
    )
    groups = match_interactions(inst, MatchMode.EXACT, Level.LOW)
    table = groups_to_table(groups, raters=3)
    assert table.shape == (1, len(KAPPA_CATEGORIES))
    assert table[0, 0] == 2 and table[0, 1] == 1  # Syn, Syn, Ant
    assert fleiss_kappa([], raters=3) is None


def test_summarize_on_the_corpus(corpus):
    report = summarize(corpus)
    assert report.annotators == ("ann1", "ann2", "ann3")
    assert len(report.cells) == 4
    for mode in MatchMode:
        for level in (Level.LOW, Level.HIGH):
            cell = report.cell(mode, level)
            assert cell.total_groups > 0
            assert cell.kappa is not None
            assert -1.0 <= cell.kappa <= 1.0
    # Relaxed groups can only merge exact ones, never split them.
    for level in (Level.LOW, Level.HIGH):
        exact = report.cell(MatchMode.EXACT, level)
        relaxed = report.cell(MatchMode.RELAXED, level)
        assert relaxed.total_groups <= exact.total_groups
        # The corpus sprinkles deliberate type disagreement at low level.
        if level is Level.LOW:
            assert cellwise_disagreement(corpus)
    d = report.to_dict()
    assert {c["mode"] for c in d["cells"]} == {"exact", "relaxed"}
    rows = report.to_csv_rows()
    assert rows[0] == ["mode", "level", "annotators", "groups", "kappa", "kappa_groups"]
    # Each cell contributes one row per observed group size plus a total row.
    totals = [(r[0], r[1]) for r in rows[1:] if r[2] == "total"]
    assert sorted(totals) == sorted(
        (m.value, lv) for m in MatchMode for lv in ("high", "low")
    )


def cellwise_disagreement(corpus):
    for inst in corpus:
        for g in match_interactions(inst, MatchMode.EXACT, Level.LOW):
            if g.size >= 2 and len(set(g.ratings().values())) > 1:
                return True
    return False

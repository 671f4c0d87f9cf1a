"""Label/annotation consistency rules.

Each rule relates the instance's gold label to the interaction types an
annotator used.  The checks assume augmentation has been applied (danglers
present); :func:`check_dataset` augments a working copy by default.

Rule catalog
------------
``contradiction-has-antonym``
    A Contradiction instance carries at least one Antonym interaction.
``antonym-implies-contradiction``
    Antonym interactions appear only on Contradiction instances.
``neutral-has-new-info``
    A Neutral instance shows unsupported Part-2 material: a Hypernym-P1-P2
    (the general term sits in part 1) or a Part-2 dangler.
``entailment-p2-supported``
    On an Entailment instance every Part-2 token lies in the Part-2 span of
    some supporting interaction (Synonym, Synonym-SYS or Hypernym-P2-P1),
    at either level.
``entailment-no-hypernym-p1-p2``
    An Entailment instance carries no Hypernym-P1-P2: part 2 never
    generalizes beyond part 1 there.
``entailment-no-p2-dangler``
    An Entailment instance leaves no Part-2 dangler at any level.
"""
from __future__ import annotations

from .augment import augment_dataset
from .types import (
    Dataset,
    Instance,
    InteractionType,
    Label,
    P2_SUPPORTING_TYPES,
    Violation,
)

RULE_CONTRA_ANTONYM = "contradiction-has-antonym"
RULE_ANTONYM_ONLY_CONTRA = "antonym-implies-contradiction"
RULE_NEUTRAL_NEW_INFO = "neutral-has-new-info"
RULE_ENTAIL_P2_SUPPORTED = "entailment-p2-supported"
RULE_ENTAIL_NO_HYPERNYM_P1_P2 = "entailment-no-hypernym-p1-p2"
RULE_ENTAIL_NO_P2_DANGLER = "entailment-no-p2-dangler"

ALL_RULES = (
    RULE_CONTRA_ANTONYM,
    RULE_ANTONYM_ONLY_CONTRA,
    RULE_NEUTRAL_NEW_INFO,
    RULE_ENTAIL_P2_SUPPORTED,
    RULE_ENTAIL_NO_HYPERNYM_P1_P2,
    RULE_ENTAIL_NO_P2_DANGLER,
)


def validate_label_constraints(instance: Instance, annotator: str) -> list[Violation]:
    ints = instance.interactions(annotator)
    types = {it.type for it in ints}
    label = instance.label
    out: list[Violation] = []

    def violate(rule: str, message: str) -> None:
        out.append(Violation(instance.id, annotator, rule, message))

    if label is Label.CONTRADICTION and InteractionType.ANTONYM not in types:
        violate(RULE_CONTRA_ANTONYM, "contradiction instance has no Antonym interaction")
    if InteractionType.ANTONYM in types and label is not Label.CONTRADICTION:
        violate(
            RULE_ANTONYM_ONLY_CONTRA,
            f"Antonym interaction on a {label.value} instance",
        )
    if label is Label.NEUTRAL:
        if (
            InteractionType.HYPERNYM_P1_P2 not in types
            and InteractionType.DANGLER_SYS_P2 not in types
        ):
            violate(
                RULE_NEUTRAL_NEW_INFO,
                "neutral instance has neither a Hypernym-P1-P2 nor a part-2 dangler",
            )
    if label is Label.ENTAILMENT:
        supported: set[int] = set()
        for it in ints:
            if it.type in P2_SUPPORTING_TYPES and it.span_p2 is not None:
                supported.update(it.span_p2.indices())
        missing = [i for i in range(len(instance.part2_tokens)) if i not in supported]
        if missing:
            words = ", ".join(repr(instance.part2_tokens[i]) for i in missing)
            violate(
                RULE_ENTAIL_P2_SUPPORTED,
                f"part-2 tokens not covered by any supporting interaction: {words}",
            )
        if InteractionType.HYPERNYM_P1_P2 in types:
            violate(
                RULE_ENTAIL_NO_HYPERNYM_P1_P2,
                "entailment instance carries a Hypernym-P1-P2 interaction",
            )
        if InteractionType.DANGLER_SYS_P2 in types:
            violate(RULE_ENTAIL_NO_P2_DANGLER, "entailment instance leaves a part-2 dangler")
    return out


def check_instance(instance: Instance) -> list[Violation]:
    out: list[Violation] = []
    for annotator in instance.annotators():
        out.extend(validate_label_constraints(instance, annotator))
    return out


def check_dataset(dataset: Dataset, augment_first: bool = True) -> list[Violation]:
    """All violations in the dataset, instance order then annotator order."""
    if augment_first:
        dataset = augment_dataset(dataset)
    out: list[Violation] = []
    for inst in dataset:
        out.extend(check_instance(inst))
    return out

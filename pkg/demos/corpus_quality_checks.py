"""Corpus statistics, inter-annotator agreement, and label-consistency checks.

    python3 demos/corpus_quality_checks.py
"""
import dataclasses
from importlib import resources

from spanex.agreement import MatchMode, summarize
from spanex.constraints import check_dataset
from spanex.io import load_json
from spanex.stats import summarize_dataset
from spanex.types import Dataset, Label, Level

corpus = load_json(resources.files("spanex").joinpath("data/snli_mock.json"))

stats = summarize_dataset(corpus)
print(f"{stats.dataset}: {stats.n_instances} instances, labels {stats.labels}")
for row in stats.type_level:
    if row.count:  # system rows are all zero before augmentation
        print(f"   {row.type.value:<16} {row.level.value:<5} n={row.count:<4} mean span len {row.mean_span_length:.2f}")

# Agreement: exact span identity vs relaxed both-sides-overlap matching.
report = summarize(corpus)
for mode in (MatchMode.EXACT, MatchMode.RELAXED):
    for level in (Level.LOW, Level.HIGH):
        cell = report.cell(mode, level)
        kappa = "n/a" if cell.kappa is None else f"{cell.kappa:.3f}"
        print(f"{mode.value:<8} {level.value:<5} groups by panel size {dict(cell.counts)}  kappa {kappa}")

# Label-constraint audit.  The bundled corpus is clean; flipping one gold
# label manufactures a violation to show the report shape.
assert check_dataset(corpus) == []
print("\nbundled corpus: no violations")

broken = Dataset(
    name=corpus.name,
    instances=tuple(
        dataclasses.replace(inst, label=Label.CONTRADICTION) if inst.id == "mock-001" else inst
        for inst in corpus
    ),
)
for v in check_dataset(broken):
    print(f"violation {v.instance_id}/{v.annotator}: [{v.rule}] {v.message}")

"""Span-interaction explanations for sequence-pair classifiers.

The package covers the full path from annotated data to faithfulness numbers:
brat import and canonical JSON, system-side augmentation (surface matches and
uncovered-run danglers), label-constraint validation, inter-annotator
agreement, attention-head selection, bipartite attention graphs, directed
Louvain community detection, span-pair explanation extraction, and
perturbation-based evaluation with reference baselines.  A deterministic mock
oracle makes everything runnable without a trained model.
"""

__version__ = "0.1.0"

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
    ValidationError,
    Violation,
)
from .tokenize import tokenize, tokenize_with_offsets, detokenize
from .brat import parse_brat, parse_standoff, render_standoff, load_brat_dir, dump_brat_dir
from .augment import (
    augment_danglers,
    augment_dataset,
    augment_instance,
    augment_synonym_sys,
)
from .constraints import check_dataset, check_instance, validate_label_constraints
from .io import load_json, store_json, validate_dataset_dict
from .agreement import (
    AgreementReport,
    MatchGroup,
    MatchMode,
    fleiss_kappa,
    fleiss_kappa_table,
    match_interactions,
    summarize,
)
from .stats import summarize_dataset
from .graph import InteractionGraph, build_graph, graph_to_dict
from .louvain import (
    ModularityState,
    MoveRecord,
    Partition,
    UndefinedModularityError,
    directed_modularity,
    louvain,
)
from .heads import (
    METHOD_CLASSIFIER_WEIGHT,
    METHOD_SCALAR_MIX,
    ScalarMixHyper,
    ScalarMixModel,
    classifier_weight_head,
    classifier_weight_scores,
    load_scalar_mix,
    save_scalar_mix,
    scalar_mix_head,
    scalar_mix_train,
    select_head,
    split_heads,
)
from .explain import (
    Explanation,
    SpanPair,
    communities_to_spans,
    extract_explanation,
    load_explanations,
    rank_span_pairs,
    save_explanations,
)
from .perturb import (
    BaselineSource,
    DegenerateSelectionError,
    ExtractedTopKSource,
    HumanTypeSource,
    PerturbMode,
    TokenSelection,
    perturb,
    selection_from_annotations,
    selection_from_explanation,
    selection_from_spans,
)
from .metrics import EvalRecord, aopc_curve, aopc_single, pha
from .baselines import (
    BASELINE_KINDS,
    PART_PHRASE,
    RANDOM_PHRASE,
    BaselineSpec,
    build_baseline_spec,
    sample_baseline,
)
from .conformance import (
    ConformanceReport,
    http_responder,
    load_requests,
    run_conformance,
)
from .evaluate import EvalConfig, EvalReport, evaluate_dataset
from .oracle import (
    EncodeResult,
    HttpOracle,
    JsonlOracle,
    MockOracle,
    MockOracleConfig,
    Oracle,
    OracleError,
    OracleMeta,
    PredictResult,
    mock_oracle,
    resolve_oracle,
)

"""litriage: two-class literature triage over descriptor-indexed corpora.

Mines signed indicator descriptors from a labeled corpus pair by chi-square
testing, scores documents by summing indicator signs, tunes the decision
threshold by cross-validation, and ships a naive Bayes bag-of-words baseline
plus a McNemar comparison harness.
"""

__version__ = "0.1.0"

from .chisq import (
    CRITICAL_VALUE_P05,
    ChiSquareResult,
    Indicator,
    IndicatorProfile,
    build_indicator_profile,
    chi_square,
    evaluate_table,
    indicator_of,
    load_indicator_profile,
    pvalue_chisq_df1,
    save_indicator_profile,
)
from .contingency import (
    ContingencyTable,
    ExpectedTable,
    FrequencyProfile,
    build_profile,
    expected,
    load_profile,
    merge_profiles,
    save_profile,
    table_for,
)
from .corpus import (
    Citation,
    DomainLabel,
    FoldAssignment,
    apply_exclusion,
    default_check_tags,
    label_by_reference,
    parse_jsonl,
    parse_medline_xml,
    parse_tsv,
    read_exclusion_list,
    read_reference_list,
    split_folds,
    write_jsonl,
)
from .errors import (
    AlignmentError,
    CorpusFormatError,
    DegenerateCorpusError,
    DegenerateTableError,
    LitriageError,
    MissingArtifactError,
)
from .evaluation import (
    ConfusionCounts,
    CrossValReport,
    KappaResult,
    McNemarResult,
    MetricSet,
    cohen_kappa,
    confusion,
    cross_validate,
    mcnemar,
    metrics,
    optimize_threshold,
    threshold_sweep,
)
from .scoring import (
    ScoreReport,
    Threshold,
    classify,
    score_citation,
    score_corpus,
)

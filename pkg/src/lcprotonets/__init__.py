"""Multi-label few-shot classification with label-combination prototypes.

The pipeline: embed items elsewhere, load them as EmbeddedItem records,
enumerate the label combinations of a support set into an LCPrototypeStore,
and classify queries by nearest cosine distance over those prototypes.
Episodic sampling, two per-label baselines, metrics, a linear-adapter
trainer, synthetic data, and a scaling benchmark round out the toolkit.
"""
from .baselines import (
    DEFAULT_MLPN_THRESHOLD,
    SingletonPrototypeSet,
    build_mlpn,
    mlpn_classify,
    ovr_classify,
)
from .episodes import (
    Episode,
    EpisodeSpec,
    LabelSplit,
    sample_episode,
    split_labels,
    task_label_pool,
)
from .errors import (
    DimensionMismatchError,
    EmptyStoreError,
    InsufficientItemsError,
    InsufficientLabelsError,
    LabelCardinalityError,
    LCProtoError,
    ManifestError,
    NonFiniteError,
    SplitSizeError,
    UncoveredLabelError,
    ZeroVectorError,
)
from .evaluation import (
    EvaluationConfig,
    EvaluationReport,
    evaluate,
    predict_episode,
    render_report,
)
from .items import EmbeddedItem, stack_embeddings
from .labels import (
    DEFAULT_CARDINALITY_CAP,
    LabelSet,
    LabelVocabulary,
    LCClassSet,
    expand_multi_hot,
    lc_classes,
    power_set,
)
from .manifest import (
    ManifestData,
    load_adapter,
    load_manifest,
    load_split,
    save_adapter,
    write_manifest,
    write_split,
)
from .metrics import (
    PredictionBatch,
    RunSummary,
    confidence_interval,
    macro_f1,
    micro_f1,
)
from .prototypes import (
    DEFAULT_TIE_EPSILON,
    LCPrototypeStore,
    build_store,
    classify,
    classify_batch,
    cosine_distance,
    dedup_store,
    distance_matrix,
    mlpn_scores,
)
from .scaling import ScalingRow, run_scaling
from .synth import SynthConfig, SynthResult, generate
from .training import (
    AdapterState,
    TrainConfig,
    TrainResult,
    adam_step,
    episode_loss,
    loss_gradient,
    train_adapter,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterState",
    "DEFAULT_CARDINALITY_CAP",
    "DEFAULT_MLPN_THRESHOLD",
    "DEFAULT_TIE_EPSILON",
    "DimensionMismatchError",
    "EmbeddedItem",
    "EmptyStoreError",
    "Episode",
    "EpisodeSpec",
    "EvaluationConfig",
    "EvaluationReport",
    "InsufficientItemsError",
    "InsufficientLabelsError",
    "LCClassSet",
    "LCProtoError",
    "LCPrototypeStore",
    "LabelCardinalityError",
    "LabelSet",
    "LabelSplit",
    "LabelVocabulary",
    "ManifestData",
    "ManifestError",
    "NonFiniteError",
    "PredictionBatch",
    "RunSummary",
    "ScalingRow",
    "SingletonPrototypeSet",
    "SplitSizeError",
    "SynthConfig",
    "SynthResult",
    "TrainConfig",
    "TrainResult",
    "UncoveredLabelError",
    "ZeroVectorError",
    "adam_step",
    "build_mlpn",
    "build_store",
    "classify",
    "classify_batch",
    "confidence_interval",
    "cosine_distance",
    "dedup_store",
    "distance_matrix",
    "episode_loss",
    "evaluate",
    "expand_multi_hot",
    "generate",
    "lc_classes",
    "load_adapter",
    "load_manifest",
    "load_split",
    "loss_gradient",
    "macro_f1",
    "micro_f1",
    "mlpn_classify",
    "mlpn_scores",
    "ovr_classify",
    "power_set",
    "predict_episode",
    "render_report",
    "run_scaling",
    "sample_episode",
    "save_adapter",
    "split_labels",
    "stack_embeddings",
    "task_label_pool",
    "train_adapter",
    "write_manifest",
    "write_split",
]

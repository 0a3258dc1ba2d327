"""latentwander: retrieval and latent-map exploration for AV archives."""

from .core import (
    ClipRecord,
    DatasetStats,
    Embedding,
    Emotion,
    EmotionScores,
    compute_stats,
    load_clips,
    save_clips,
)
from .encoder import (
    EncoderConfig,
    SynthConfig,
    encode_text,
    encode_vector,
    generate_synthetic_dataset,
    remote_encode,
)
from .latentmap import (
    GridMap,
    LatentPoint,
    ProjectionConfig,
    build_grid_map,
    grid_lookup,
    import_points,
    neighbors,
    project_pca,
)
from .pipeline import (
    DEFAULT_LEXICON,
    SegmentationConfig,
    ShotBoundaryList,
    SuffixLexicon,
    augment_caption,
    merge_short_shots,
    rebalance_batch,
    rebalance_emotion,
    strip_emotion_suffix,
)
from .retrieval import (
    EvalReport,
    RetrievalResult,
    VectorIndex,
    build_index,
    evaluate,
    query_strategy_filter,
    query_strategy_full,
)

__version__ = "0.1.0"

__all__ = [
    "ClipRecord",
    "DatasetStats",
    "Embedding",
    "Emotion",
    "EmotionScores",
    "compute_stats",
    "load_clips",
    "save_clips",
    "EncoderConfig",
    "SynthConfig",
    "encode_text",
    "encode_vector",
    "generate_synthetic_dataset",
    "remote_encode",
    "GridMap",
    "LatentPoint",
    "ProjectionConfig",
    "build_grid_map",
    "grid_lookup",
    "import_points",
    "neighbors",
    "project_pca",
    "DEFAULT_LEXICON",
    "SegmentationConfig",
    "ShotBoundaryList",
    "SuffixLexicon",
    "augment_caption",
    "merge_short_shots",
    "rebalance_batch",
    "rebalance_emotion",
    "strip_emotion_suffix",
    "EvalReport",
    "RetrievalResult",
    "VectorIndex",
    "build_index",
    "evaluate",
    "query_strategy_filter",
    "query_strategy_full",
    "__version__",
]

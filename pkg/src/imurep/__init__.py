"""Real-time exercise segmentation, DTW template classification and rep counting."""

from .classifier import (
    REJECTED,
    Classification,
    Classified,
    CountEvent,
    CountState,
    Pipeline,
    SegmentDetected,
    Summary,
    classify_segment,
    run_pipeline,
    update_counts,
)
from .config import PipelineConfig, load_config, parse_config
from .dtw import AxisStats, ScoreBreakdown, axis_stats, dtw_distance, weight_for
from .evaluation import (
    ConfusionMatrix,
    MetricsReport,
    TruthInterval,
    classification_metrics,
    match_events,
    segmentation_metrics,
)
from .segmentation import (
    Discontinuity,
    Peak,
    Segment,
    StreamSegmenter,
    detect_peaks,
    extract_segments,
    segment_series,
)
from .series import (
    AccelSample,
    ScalarSeries,
    TriaxialSeries,
    estimate_baseline,
    short_term_energy,
    synthetic_norm,
)
from .templates import Template, TemplateStore, load_templates, make_template, save_templates

__version__ = "0.1.0"

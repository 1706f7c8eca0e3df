"""Local gradient hexa pattern descriptors and a retrieval benchmark harness."""

from .config import (
    BINNING_KINDS,
    Descriptor,
    ExtractionConfig,
    GaborSpec,
    LghpParams,
    bins_per_histogram,
)
from .dataset_io import (
    DatasetManifest,
    ManifestEntry,
    add_awgn,
    awgn_noise,
    load_image,
    resize_bilinear,
    scan_dataset,
    write_pgm,
)
from .descriptor import (
    DIRECTION_PAIRS,
    DIRECTIONS,
    GradientField,
    PatternCodeMap,
    compute_gradient,
    compute_lbp_baseline,
    compute_lghp_maps,
    compute_pattern_map,
    render_feature_image,
)
from .evaluation import (
    EvalReport,
    RecognitionRun,
    SplitSpec,
    apr,
    arr,
    cross_validate,
    noise_eval,
    precision_at,
    recall_at,
    recognition_loo,
    recognition_split,
    retrieval_sweep,
)
from .gabor import (
    DEFAULT_BANK_SPECS,
    GaborKernel,
    bank_from_specs,
    build_gabor_descriptor,
    default_bank,
    gabor_kernel,
    gabor_responses,
)
from .histograms import (
    build_descriptor,
    build_lbp_descriptor,
    histogram_map,
    u2_bin,
)
from .index_store import DatasetIndex, load_index, save_index
from .matching import RankedEntry, l1_distance, nn_classify, rank_all
from .pipeline import extract_dataset, extract_descriptor

__version__ = "0.1.0"

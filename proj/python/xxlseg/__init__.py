"""Instance segmentation postprocessing and evaluation for large CT volumes.

Volumes are numpy arrays indexed ``[z, y, x]``: ``uint32`` for labels and
``float32`` for intensities.
"""

from ._xxlseg import (
    Error,
    InvalidArgument,
    IoError,
    SliceStack,
    __version__,
    build_correlation_matrix,
    cc_postprocess_proposal,
    connected_components,
    diagonal_stats,
    generate_phantom,
    labels_to_three_class,
    load_volume,
    morphology,
    random_phantom_spec,
    run_fusion_pipeline,
    run_watershed_pipeline,
    save_volume,
    set_thread_count,
    thread_count,
    tv_denoise,
)

__all__ = [
    "Error",
    "InvalidArgument",
    "IoError",
    "SliceStack",
    "__version__",
    "build_correlation_matrix",
    "cc_postprocess_proposal",
    "connected_components",
    "diagonal_stats",
    "generate_phantom",
    "labels_to_three_class",
    "load_volume",
    "morphology",
    "random_phantom_spec",
    "run_fusion_pipeline",
    "run_watershed_pipeline",
    "save_volume",
    "set_thread_count",
    "thread_count",
    "tv_denoise",
]

"""Compressed-domain RGBD action recognition.

Thin re-export of the pybind11 core: block-matching motion fields, trajectory
descriptors (HOG/HOF/MBH over RGB plus depth-gradient histograms), GMM Fisher
vectors and a linear one-vs-rest SVM, with synthetic corpus generation and an
end-to-end pipeline driver.
"""

from ._core import (
    ConfigError,
    DataError,
    Error,
    EvalReport,
    FpsReport,
    GmmCodebook,
    MotionField,
    NumericError,
    SvmModel,
    average_precision,
    concat_channels,
    default_config_json,
    estimate_motion,
    evaluate,
    extract_sequence,
    fisher_encode,
    fisher_encode_raw,
    format_report_table,
    load_codebook,
    load_svm,
    log_likelihood,
    measure_fps,
    posteriors,
    predict_class,
    predict_scores,
    run_pipeline,
    save_codebook,
    save_svm,
    select_interest_points,
    synth_corpus,
    synth_sequence,
    train_gmm,
    train_svm,
    validate_config_json,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "EvalReport",
    "FpsReport",
    "GmmCodebook",
    "MotionField",
    "NumericError",
    "SvmModel",
    "average_precision",
    "concat_channels",
    "default_config_json",
    "estimate_motion",
    "evaluate",
    "extract_sequence",
    "fisher_encode",
    "fisher_encode_raw",
    "format_report_table",
    "load_codebook",
    "load_svm",
    "log_likelihood",
    "measure_fps",
    "posteriors",
    "predict_class",
    "predict_scores",
    "run_pipeline",
    "save_codebook",
    "save_svm",
    "select_interest_points",
    "synth_corpus",
    "synth_sequence",
    "train_gmm",
    "train_svm",
    "validate_config_json",
]

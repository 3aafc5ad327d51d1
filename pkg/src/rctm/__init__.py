"""Robust chaotic tent map PRBG with dynamics and randomness-test toolkits."""

from .analysis import (
    EntropySweepResult,
    KeySensitivityResult,
    KeySpaceReport,
    SweepResult,
    correlation_sweep,
    differential,
    entropy_sweep,
    histogram_uniformity,
    key_sensitivity_run,
    keyspace_report,
    pearson_correlation,
)
from .core import (
    InvalidKeyError,
    MapKey,
    Trajectory,
    ctm_key,
    ctm_step,
    iterate,
    iterate_batch,
    log_derivative,
    make_key,
    rctm_step,
    region_bounds,
)
from .dynamics import (
    BifurcationPoint,
    BifurcationResult,
    LyapunovEstimate,
    bifurcation_sample,
    lyapunov,
    lyapunov_expected,
    lyapunov_grid,
    phase_coverage,
)
from .ent import EntReport, byte_entropy, ent_battery
from .nist import TestReport, min_proportion, nist_battery, nist_test, stream_report
from .prbg import (
    BitStream,
    generate_bits,
    generate_quantized,
    pack_bytes,
    quantize_bytes,
    segmented_streams,
    unpack_bits,
)

__version__ = "0.1.0"

__all__ = [
    "BifurcationPoint",
    "BifurcationResult",
    "BitStream",
    "EntReport",
    "EntropySweepResult",
    "InvalidKeyError",
    "KeySensitivityResult",
    "KeySpaceReport",
    "LyapunovEstimate",
    "MapKey",
    "SweepResult",
    "TestReport",
    "Trajectory",
    "bifurcation_sample",
    "byte_entropy",
    "correlation_sweep",
    "ctm_key",
    "ctm_step",
    "differential",
    "ent_battery",
    "entropy_sweep",
    "generate_bits",
    "generate_quantized",
    "histogram_uniformity",
    "iterate",
    "iterate_batch",
    "key_sensitivity_run",
    "keyspace_report",
    "log_derivative",
    "lyapunov",
    "lyapunov_expected",
    "lyapunov_grid",
    "make_key",
    "min_proportion",
    "nist_battery",
    "nist_test",
    "pack_bytes",
    "pearson_correlation",
    "phase_coverage",
    "quantize_bytes",
    "rctm_step",
    "region_bounds",
    "segmented_streams",
    "stream_report",
    "unpack_bits",
]

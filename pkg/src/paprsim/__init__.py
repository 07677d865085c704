"""OFDM peak-to-average power ratio reduction: techniques, gradients, experiments."""

from ._kernels import active_backend
from .clipping import ClipConfig, clip
from .companding import CompandConfig, compand, expand, recover_v_prime
from .core import (
    FrequencyFrame,
    NoiseSpec,
    TimeFrame,
    awgn,
    fft,
    fft_batch,
    ifft,
    ifft_batch,
)
from .errors import (
    ConfigError,
    EndOfStreamError,
    FileError,
    FormatError,
    PaprSimError,
    ShapeError,
    SideInfoError,
    UndefinedInputError,
)
from .gradients import (
    GradCheckReport,
    LossWeights,
    SoftClipConfig,
    combined_loss,
    grad_check,
    papr_loss,
    soft_clip,
)
from .harness import (
    ExperimentSpec,
    RunRecord,
    TechniqueConfig,
    parse_config,
    run_ccdf_experiment,
    run_distortion_sweep,
)
from .metrics import (
    CcdfCurve,
    DistortionReport,
    PaprSample,
    default_threshold_grid,
    distortion,
    estimate_ccdf,
    papr_db,
)
from .phase_factors import PhaseFactorSequence, SideInfo, quaternary_sequence
from .pts import PtsConfig, pts_receive, pts_transmit
from .slm import SlmConfig, slm_receive, slm_transmit
from .sources import QAM16_CONSTELLATION, SourceSpec, generate_frame, make_source
from .symf import read_symf, write_symf

__version__ = "0.1.0"

__all__ = [
    "active_backend",
    "ClipConfig",
    "clip",
    "CompandConfig",
    "compand",
    "expand",
    "recover_v_prime",
    "FrequencyFrame",
    "NoiseSpec",
    "TimeFrame",
    "awgn",
    "fft",
    "fft_batch",
    "ifft",
    "ifft_batch",
    "ConfigError",
    "EndOfStreamError",
    "FileError",
    "FormatError",
    "PaprSimError",
    "ShapeError",
    "SideInfoError",
    "UndefinedInputError",
    "GradCheckReport",
    "LossWeights",
    "SoftClipConfig",
    "combined_loss",
    "grad_check",
    "papr_loss",
    "soft_clip",
    "ExperimentSpec",
    "RunRecord",
    "TechniqueConfig",
    "parse_config",
    "run_ccdf_experiment",
    "run_distortion_sweep",
    "CcdfCurve",
    "DistortionReport",
    "PaprSample",
    "default_threshold_grid",
    "distortion",
    "estimate_ccdf",
    "papr_db",
    "PhaseFactorSequence",
    "SideInfo",
    "quaternary_sequence",
    "PtsConfig",
    "pts_receive",
    "pts_transmit",
    "SlmConfig",
    "slm_receive",
    "slm_transmit",
    "QAM16_CONSTELLATION",
    "SourceSpec",
    "generate_frame",
    "make_source",
    "read_symf",
    "write_symf",
]

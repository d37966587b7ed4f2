"""FMCW radar target-detection laboratory.

Simulation of multi-channel chirp frames, range-Doppler processing,
truncated-statistics noise estimation, iterative peak extraction with
sidelobe subtraction, classical sliding-window detectors, and a Monte
Carlo evaluation harness.
"""

from .baselines import SLIDING_KINDS, WindowConfig, calibrate_scale, reference_statistic, sliding_cfar, ts_cfar
from .clean import (
    RefinedPeak,
    TemplatePatch,
    build_template,
    candan_delta,
    fit_gains,
    observed_patch,
    reconstruct_pcut,
    refine_peak,
    subtract_and_update,
)
from .config import RunConfig, ScenarioConfig, available_presets, load_config, load_preset
from .cubeio import read_rdc1, write_rdc1
from .detector import Detection, DetectionSet, DetectorConfig, adaptive_threshold, alpha_from_pfa, detect
from .errors import (
    CfarLabError,
    ConfigurationError,
    CubeParseError,
    DegenerateInputError,
    EstimationError,
    NumericalError,
)
from .evaluation import (
    DEFAULT_CALIBRATION_SEED,
    DETECTOR_TAGS,
    MatchConfig,
    McConfig,
    MetricsReport,
    RmseReport,
    match_detections,
    metrics,
    monte_carlo,
    noise_rmse,
    qq_data,
    run_detector,
    truth_bins,
)
from .noise import GammaNoiseModel, TruncConfig, estimate_noise, invert_gamma_cdf, truncated_mean_expected, truncation_gain
from .sim import (
    C_LIGHT,
    DataCube,
    RadarParams,
    Scenario,
    TargetTruth,
    random_scenario,
    synthesize_cube,
    table1_params,
)
from .spectrum import RdStack, dirichlet, nca, rd_transform

__version__ = "0.1.0"

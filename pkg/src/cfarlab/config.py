"""Structured-text run configuration (.cfg files) and committed presets.

A run configuration mirrors the radar parameters, the scenario draw, the
detector and window settings, the Monte Carlo plan and the matching
tolerances.  Unknown sections or keys are rejected so that typos fail
loudly instead of silently falling back to defaults.
"""

import configparser
from dataclasses import dataclass, field
from importlib import resources

from .baselines import WindowConfig
from .detector import DetectorConfig
from .errors import ConfigurationError
from .evaluation import DETECTOR_TAGS, MatchConfig, McConfig
from .noise import TruncConfig
from .sim import C_LIGHT, RadarParams, table1_params


@dataclass(frozen=True)
class ScenarioConfig:
    """Scene-drawing settings for simulation-driven commands."""

    n_targets: int = 20
    snr_db: float = 0.0
    stationary_fraction_max: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one command invocation."""

    params: RadarParams = field(default_factory=table1_params)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    window: WindowConfig = field(default_factory=WindowConfig)
    montecarlo: McConfig = field(default_factory=McConfig)
    match: MatchConfig = field(default_factory=MatchConfig)
    out_dir: str = "."


def _float_list(text):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _int_list(text):
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _str_list(text):
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _os_rank(text):
    return None if text.strip().lower() == "median" else int(text)


_SCHEMA = {
    "radar": {
        "f_c": float,
        "k_slope": float,
        "b": float,
        "f_s": float,
        "n": int,
        "m": int,
        "t_c": float,
        "t_pri": float,
        "n_rx": int,
        "d": float,
    },
    "scenario": {
        "n_targets": int,
        "snr_db": float,
        "stationary_fraction_max": float,
    },
    "detector": {
        "p_fa": float,
        "slow_half_window": int,
        "patch_half_width": int,
        "k_max": int,
        "threshold_norm": str,
    },
    "trunc": {
        "p_fa_internal": float,
        "tol": float,
        "eps": float,
        "max_iter": int,
        "init": str,
    },
    "window": {
        "train_fast": int,
        "train_slow": int,
        "guard": int,
        "os_rank": _os_rank,
        "tm_trim": int,
    },
    "montecarlo": {
        "trials": int,
        "snr_grid": _float_list,
        "pfa_grid": _float_list,
        "target_counts": _int_list,
        "base_seed": int,
        "detectors": _str_list,
    },
    "match": {
        "range_tol": int,
        "doppler_tol": int,
    },
    "output": {
        "out_dir": str,
    },
}


def available_presets():
    """Names of the committed preset configurations."""
    root = resources.files("cfarlab") / "presets"
    return sorted(p.name[: -len(".cfg")] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_preset(name):
    """Parse one committed preset by name."""
    path = resources.files("cfarlab") / "presets" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(available_presets())}"
        )
    return parse_config_text(path.read_text(), source=f"preset {name}")


def load_config(path):
    """Parse a run configuration from a .cfg file on disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def parse_config_text(text, source="<config>"):
    """Parse configuration text into a :class:`RunConfig`.

    Every section and key must appear in the schema; values are converted
    by the per-key converter and validated by the target dataclasses.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc

    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"{source}: unknown section [{section}]")
        schema = _SCHEMA[section]
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigurationError(f"{source}: unknown key {key!r} in [{section}]")
            try:
                values[section][key] = schema[key](raw)
            except (ValueError, TypeError) as exc:
                raise ConfigurationError(
                    f"{source}: bad value for {section}.{key}: {raw!r}"
                ) from exc

    radar = values.get("radar", {})
    if radar:
        base = table1_params()
        merged = {
            "f_c": radar.get("f_c", base.f_c),
            "k_slope": radar.get("k_slope", base.k_slope),
            "f_s": radar.get("f_s", base.f_s),
            "n": radar.get("n", base.n),
            "m": radar.get("m", base.m),
            "t_pri": radar.get("t_pri", base.t_pri),
            "n_rx": radar.get("n_rx", base.n_rx),
        }
        merged["b"] = radar.get("b", base.b)
        merged["t_c"] = radar.get("t_c", merged["b"] / merged["k_slope"])
        merged["d"] = radar.get("d", 0.5 * C_LIGHT / merged["f_c"])
        params = RadarParams(**merged)
    else:
        params = table1_params()

    trunc = TruncConfig(**values.get("trunc", {}))
    det_kwargs = dict(values.get("detector", {}))
    detector = DetectorConfig(trunc=trunc, **det_kwargs)
    window = WindowConfig(**values.get("window", {}))
    montecarlo = McConfig(**values.get("montecarlo", {}))
    unknown = set(montecarlo.detectors) - set(DETECTOR_TAGS)
    if unknown:
        raise ConfigurationError(f"{source}: unknown detectors {sorted(unknown)}")
    match = MatchConfig(**values.get("match", {}))
    scenario = ScenarioConfig(**values.get("scenario", {}))
    out_dir = values.get("output", {}).get("out_dir", ".")

    return RunConfig(
        params=params,
        scenario=scenario,
        detector=detector,
        window=window,
        montecarlo=montecarlo,
        match=match,
        out_dir=out_dir,
    )

import os as _os

_presets = _os.path.join(_os.path.dirname(__file__), "presets")
if "MFGCACHE_PRESET_DIR" not in _os.environ and _os.path.isdir(_presets):
    _os.environ["MFGCACHE_PRESET_DIR"] = _presets

from ._core import (  # noqa: E402
    ConfigError,
    Error,
    Fading,
    MissingArtifact,
    NumericError,
    RadioEnvironment,
    active_probability,
    average_rate,
    crp_mean_popularities,
    expected_distinct_files,
    mean_field_interference,
    optimal_caching_fraction,
    preset_names,
    run,
    solve,
)

__all__ = [
    "ConfigError",
    "Error",
    "Fading",
    "MissingArtifact",
    "NumericError",
    "RadioEnvironment",
    "active_probability",
    "average_rate",
    "crp_mean_popularities",
    "expected_distinct_files",
    "mean_field_interference",
    "optimal_caching_fraction",
    "preset_names",
    "run",
    "solve",
]

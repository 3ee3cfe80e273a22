"""Acoustic wave simulation, seismogram acquisition, and dataset tooling."""

from .acquisition import Interrogator, Seismogram, probe, resample, sample_count
from .core import (
    Grid,
    ScalarField,
    constant_field,
    field_from_function,
    interpolate,
    laplacian,
    make_grid,
)
from .dataset import (
    DatasetRecord,
    DatasetSpec,
    Manifest,
    crc32c,
    derive_seed,
    generate,
    load_dataset,
    load_manifest,
)
from .errors import (
    ConfigurationError,
    FormatError,
    InstabilityError,
    IntegrityError,
    OutOfDomainError,
)
from .harness import EvalReport, Regressor, evaluate, features, fit, predict
from .media import (
    SpeedField,
    TimeModulation,
    constant_medium,
    gradient_medium,
    layered_medium,
    speed_at,
)
from .npyio import load_array, save_array
from .solver import (
    Boundary,
    SimConfig,
    SimResult,
    WaveState,
    cfl_dt,
    discrete_energy,
    quiescent_state,
    run,
    step,
)
from .source import SourceSpec, Wavelet, force_field, wavelet_value

__version__ = "0.1.0"

__all__ = [
    "Boundary", "ConfigurationError", "DatasetRecord", "DatasetSpec",
    "EvalReport", "FormatError", "Grid", "InstabilityError", "IntegrityError",
    "Interrogator", "Manifest", "OutOfDomainError", "Regressor", "ScalarField",
    "Seismogram", "SimConfig", "SimResult", "SourceSpec", "SpeedField",
    "TimeModulation", "WaveState", "Wavelet", "cfl_dt", "constant_field",
    "constant_medium", "crc32c", "derive_seed", "discrete_energy", "evaluate",
    "features", "field_from_function", "fit", "force_field", "generate",
    "gradient_medium", "interpolate", "laplacian", "layered_medium",
    "load_array", "load_dataset", "load_manifest", "make_grid", "predict",
    "probe", "quiescent_state", "resample", "run", "sample_count", "save_array",
    "speed_at", "step", "wavelet_value",
]

"""Entropy-based early anomaly detection for sensor-network time series."""

from entropy_eads.entropy_core import (
    BoundaryRange,
    StateHistogram,
    accumulate,
    classify_reading,
    cumulative_states,
    entropy,
    probabilities,
    window_entropy,
)
from entropy_eads.errors import (
    ConfigurationError,
    DegenerateDataError,
    EmptyWindowError,
    RejectedInputError,
)

__all__ = [
    "BoundaryRange",
    "StateHistogram",
    "accumulate",
    "classify_reading",
    "cumulative_states",
    "entropy",
    "probabilities",
    "window_entropy",
    "ConfigurationError",
    "DegenerateDataError",
    "EmptyWindowError",
    "RejectedInputError",
]

__version__ = "0.1.0"

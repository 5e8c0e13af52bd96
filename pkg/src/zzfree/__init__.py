"""Static and drive-induced ZZ analysis for coupled superconducting qubits."""

from .errors import ConfigError, DegeneracyError, DivergenceError, ZZFreeError

__all__ = ["ConfigError", "DegeneracyError", "DivergenceError", "ZZFreeError"]
__version__ = "0.1.0"

"""Typed numerical-guard errors."""

# default guard on perturbative denominators, GHz (1 MHz)
EPS_DIV = 1e-3


class ZZFreeError(Exception):
    """Base class for package errors."""

    guard = "generic"


class DivergenceError(ZZFreeError, ArithmeticError):
    """A perturbative denominator fell below the divergence guard."""

    guard = "divergence"


class DegeneracyError(ZZFreeError, ArithmeticError):
    """Eigenvectors cannot be assigned to blocks unambiguously."""

    guard = "degeneracy"


class ConfigError(ZZFreeError, ValueError):
    """Malformed or inconsistent run configuration."""

    guard = "config"


def guard_denominator(x, name="denominator", eps=EPS_DIV):
    """Return ``x`` or raise if ``|x| < eps``."""
    if abs(x) < eps:
        raise DivergenceError(f"{name} = {x:.3e} GHz is below the divergence guard {eps:g} GHz")
    return x

"""Benchmark devices and named figure configurations."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .circuit import CircuitSpec
from .qubit_models import ModeSpectrum

# absolute target-qubit frequency used to resolve the detuning-only device tables
W2_CT = 5.292
W2_TT = 4.914


@dataclass(frozen=True)
class DevicePreset:
    """One benchmark device. Frequencies and couplings in GHz."""

    id: int
    q1_type: str
    d1: float
    d2: float
    g1c: float
    g2c: float
    g12: float
    Delta: float
    Delta2: float
    w2: float

    @property
    def w1(self):
        return self.w2 - self.Delta

    @property
    def wc(self):
        return self.w2 + self.Delta2

    @property
    def pairing(self):
        return "ct" if self.q1_type == "csfq" else "tt"

    def to_spec(self, truncations=(5, 5, 5)) -> CircuitSpec:
        return CircuitSpec.from_params(self.w1, self.d1, self.w2, self.d2, self.wc, self.g1c, self.g2c,
                                       self.g12, truncations, q1_label=self.q1_type, device=self.id)


def _table():
    out = {}
    for i, (D, D2) in enumerate([(0.07, 1.1), (0.07, 1.2), (0.105, 1.2), (0.15, 1.2), (0.18, 1.2)], 1):
        out[i] = DevicePreset(i, "csfq", 0.6, -0.33, 0.08, 0.08, 0.0, D, D2, W2_CT)
    for i, (D, D2) in enumerate([(-0.2, 1.4), (-0.15, 1.4), (-0.1, 1.4), (-0.05, 1.4), (-0.07, 2.0)], 6):
        out[i] = DevicePreset(i, "transmon", -0.33, -0.33, 0.098, 0.083, 0.0025, D, D2, W2_TT)
    return out


PRESETS = _table()


def preset(id: int) -> DevicePreset:
    try:
        return PRESETS[int(id)]
    except (KeyError, ValueError):
        raise KeyError(f"unknown device id {id!r}; valid ids are 1..10") from None


def device_spec(id, truncations=(5, 5, 5), w2=None) -> CircuitSpec:
    p = preset(id)
    if w2 is not None:
        p = replace(p, w2=w2)
    return p.to_spec(truncations)


def with_detuning(spec: CircuitSpec, Delta: float) -> CircuitSpec:
    """Shift qubit 1 rigidly so that ``w2 - w1 = Delta``; its ladder shape is kept."""
    shift = (spec.w2 - Delta) - spec.w1
    e = spec.q1.energies + shift * np.arange(spec.q1.n_levels)
    return replace(spec, q1=ModeSpectrum(e, spec.q1.label))


def with_params(spec: CircuitSpec, **kw) -> CircuitSpec:
    """Rebuild a Duffing-based spec with some parameters changed.

    Accepted keys: ``w1, d1, w2, d2, wc, g1c, g2c, g12, Delta, truncations``.
    """
    base = dict(w1=spec.w1, d1=spec.d1, w2=spec.w2, d2=spec.d2, wc=spec.wc, g1c=spec.g1c, g2c=spec.g2c,
                g12=spec.g12, truncations=spec.truncations)
    Delta = kw.pop("Delta", None)
    unknown = set(kw) - set(base)
    if unknown:
        raise KeyError(f"unknown parameters {sorted(unknown)}")
    base.update(kw)
    if Delta is not None:
        base["w1"] = base["w2"] - Delta
    return CircuitSpec.from_params(base["w1"], base["d1"], base["w2"], base["d2"], base["wc"], base["g1c"],
                                   base["g2c"], base["g12"], base["truncations"], q1_label=spec.q1.label,
                                   q2_label=spec.q2.label, **spec.meta)


@dataclass(frozen=True)
class FigureConfig:
    name: str
    spec: CircuitSpec
    axes: dict
    fixed: dict


def figure_config(name: str, truncations=(5, 5, 5)) -> FigureConfig:
    """Base device and sweep axes of a named static-ZZ figure panel."""
    if name in ("fig3a", "fig3b"):
        d1 = 0.6
        spec = CircuitSpec.from_params(W2_CT - 0.1, d1, W2_CT, -0.33, 6.492, 0.08, 0.08, 0.0, truncations,
                                       q1_label="csfq")
        if name == "fig3a":
            axes = {"d1": np.round(np.linspace(0.1, 1.0, 19), 6), "Delta": np.round(np.linspace(-0.4, 0.4, 161), 6)}
        else:
            axes = {"Delta": np.round(np.linspace(0.02, 0.3, 141), 6)}
        return FigureConfig(name, spec, axes, {"wc": 6.492, "w2": W2_CT, "d2": -0.33, "g": 0.08})
    if name in ("fig3d", "fig3e"):
        spec = CircuitSpec.from_params(W2_TT + 0.1, -0.33, W2_TT, -0.33, 6.31, 0.098, 0.083, 0.0, truncations)
        if name == "fig3d":
            axes = {"g12": np.array([0.0, 0.0025, 0.005]), "Delta": np.round(np.linspace(-0.4, -0.05, 71), 6)}
        else:
            axes = {"g12": np.array([0.0, 0.0025, 0.005]), "g2c": np.round(np.linspace(0.02, 0.12, 101), 6)}
        return FigureConfig(name, spec, axes, {"wc": 6.31, "w2": W2_TT, "d1": -0.33, "d2": -0.33, "g1c": 0.098})
    raise KeyError(f"unknown figure {name!r}; expected fig3a, fig3b, fig3d or fig3e")


def preset_to_dict(p: DevicePreset) -> dict:
    return asdict(p)


def preset_from_dict(d: dict) -> DevicePreset:
    return DevicePreset(**d)

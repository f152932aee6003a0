"""Run configuration: line-oriented `key = value` files with [section] headers.

Sections: radial, angular, state, grid, mc, scan, output.  Unknown sections,
unknown keys and malformed values are hard errors, so a typo cannot silently
change a run.  All times in a config are in units of 1/omega_c.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .angular import (BagelAngular, CardioidAngular, DumbbellAngular,
                      KneadedCardioidAngular, SphereAngular)
from .dynmap import MapFamily
from .ensemble import SeparableEnsemble, load_angular_table, load_radial_table
from .montecarlo import SamplerConfig
from .radial import ExponentialCutoffRadial, GaussianRadial, ReciprocalSquareRadial
from .su2 import DensityMatrix


class ConfigError(Exception):
    """Anything wrong with a configuration file; message carries diagnostics."""


_RADIAL_KINDS = ("gaussian", "exp-cutoff", "exponential-cutoff", "reciprocal-square", "tabulated")
_ANGULAR_KINDS = ("sphere", "bagel", "dumbbell", "cardioid", "kneaded", "tabulated")

_SCHEMA = {
    "radial": {"kind", "omega_c", "table"},
    "angular": {"kind", "a", "table"},
    "state": {"theta0", "bloch"},
    "grid": {"t_max", "n_points"},
    "mc": {"seed", "samples", "chunk"},
    "scan": {"parameter", "values"},
    "output": set(),
}

_ANGLE_RE = re.compile(r"^\s*([0-9.]+)?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def parse_angle(text: str) -> float:
    """Angles as plain radians or in terms of pi: '0.25pi', 'pi/4', 'pi'."""
    m = _ANGLE_RE.match(text)
    if m:
        num = float(m.group(1)) if m.group(1) else 1.0
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


@dataclass
class RunConfig:
    """Validated, typed view of a configuration file."""

    radial_kind: str = "gaussian"
    omega_c: float = 1.0
    radial_table: str | None = None
    angular_kind: str = "sphere"
    asymmetry: float | None = None
    angular_table: str | None = None
    theta0: float = 0.0
    bloch: tuple | None = None
    t_max: float = 10.0
    n_points: int = 501
    seed: int = 12345
    samples: int = 100000
    chunk: int = 4096
    scan_parameter: str | None = None
    scan_values: list = field(default_factory=list)
    base_dir: str = "."

    # -- builders ------------------------------------------------------------
    def _resolve(self, path):
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    def build_radial(self):
        kind = self.radial_kind
        if kind == "gaussian":
            return GaussianRadial(self.omega_c)
        if kind in ("exp-cutoff", "exponential-cutoff"):
            return ExponentialCutoffRadial(self.omega_c)
        if kind == "reciprocal-square":
            return ReciprocalSquareRadial(self.omega_c)
        try:
            return load_radial_table(self._resolve(self.radial_table))
        except (OSError, ValueError) as err:
            raise ConfigError(f"radial table: {err}") from err

    def build_angular(self, asymmetry=None):
        kind = self.angular_kind
        if kind == "sphere":
            return SphereAngular()
        if kind == "bagel":
            return BagelAngular()
        if kind == "dumbbell":
            return DumbbellAngular()
        if kind == "cardioid":
            return CardioidAngular()
        if kind == "kneaded":
            a = self.asymmetry if asymmetry is None else asymmetry
            return KneadedCardioidAngular(a)
        try:
            return load_angular_table(self._resolve(self.angular_table))
        except (OSError, ValueError) as err:
            raise ConfigError(f"angular table: {err}") from err

    def build_ensemble(self, asymmetry=None) -> SeparableEnsemble:
        try:
            return SeparableEnsemble(self.build_radial(), self.build_angular(asymmetry))
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def build_family(self, asymmetry=None) -> MapFamily:
        return MapFamily.from_ensemble(self.build_ensemble(asymmetry))

    def initial_state(self) -> DensityMatrix:
        if self.bloch is not None:
            return DensityMatrix(np.asarray(self.bloch))
        return DensityMatrix([math.sin(self.theta0), 0.0, math.cos(self.theta0)])

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max / self.omega_c, self.n_points)

    def sampler_config(self, seed=None, samples=None) -> SamplerConfig:
        return SamplerConfig(seed=self.seed if seed is None else seed,
                             n_samples=self.samples if samples is None else samples,
                             chunk=self.chunk)


def _get(parser, section, key, convert, default, errors):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        return convert(raw)
    except ConfigError as err:
        errors.append(f"[{section}] {key}: {err}")
    except ValueError:
        errors.append(f"[{section}] {key}: cannot parse {raw!r}")
    return default


def _float_list(text: str):
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    if not parts:
        raise ValueError("empty list")
    return [float(p) for p in parts]


def load_config(path) -> RunConfig:
    """Parse and validate a configuration file; raises ConfigError with diagnostics."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path) as handle:
            parser.read_file(handle, source=str(path))
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    except configparser.Error as err:
        raise ConfigError(f"config parse failure: {err}") from err

    errors = []
    for section in parser.sections():
        if section not in _SCHEMA:
            errors.append(f"unknown section [{section}]")
            continue
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                errors.append(f"[{section}] unknown key {key!r}")

    cfg = RunConfig(base_dir=os.path.dirname(os.path.abspath(path)))

    if parser.has_section("radial"):
        cfg.radial_kind = _get(parser, "radial", "kind", str.strip, cfg.radial_kind, errors)
        cfg.omega_c = _get(parser, "radial", "omega_c", float, cfg.omega_c, errors)
        cfg.radial_table = _get(parser, "radial", "table", str.strip, None, errors)
    if parser.has_section("angular"):
        cfg.angular_kind = _get(parser, "angular", "kind", str.strip, cfg.angular_kind, errors)
        cfg.asymmetry = _get(parser, "angular", "a", float, None, errors)
        cfg.angular_table = _get(parser, "angular", "table", str.strip, None, errors)
    if parser.has_section("state"):
        cfg.theta0 = _get(parser, "state", "theta0", parse_angle, cfg.theta0, errors)
        bloch = _get(parser, "state", "bloch", _float_list, None, errors)
        if bloch is not None:
            if len(bloch) != 3:
                errors.append("[state] bloch: need exactly three components")
            elif parser.has_option("state", "theta0"):
                errors.append("[state] give either theta0 or bloch, not both")
            else:
                cfg.bloch = tuple(bloch)
    if parser.has_section("grid"):
        cfg.t_max = _get(parser, "grid", "t_max", float, cfg.t_max, errors)
        cfg.n_points = _get(parser, "grid", "n_points", int, cfg.n_points, errors)
    if parser.has_section("mc"):
        cfg.seed = _get(parser, "mc", "seed", int, cfg.seed, errors)
        cfg.samples = _get(parser, "mc", "samples", int, cfg.samples, errors)
        cfg.chunk = _get(parser, "mc", "chunk", int, cfg.chunk, errors)
    if parser.has_section("scan"):
        cfg.scan_parameter = _get(parser, "scan", "parameter", str.strip, None, errors)
        cfg.scan_values = _get(parser, "scan", "values", _float_list, [], errors)

    # cross-field validation
    if cfg.radial_kind not in _RADIAL_KINDS:
        errors.append(f"[radial] kind must be one of {', '.join(_RADIAL_KINDS)}")
    elif cfg.radial_kind == "tabulated" and not cfg.radial_table:
        errors.append("[radial] tabulated kind needs a table path")
    if cfg.angular_kind not in _ANGULAR_KINDS:
        errors.append(f"[angular] kind must be one of {', '.join(_ANGULAR_KINDS)}")
    elif cfg.angular_kind == "tabulated" and not cfg.angular_table:
        errors.append("[angular] tabulated kind needs a table path")
    if cfg.angular_kind == "kneaded":
        if cfg.asymmetry is None:
            errors.append("[angular] kneaded kind needs the asymmetry key a")
        elif not 0.0 <= cfg.asymmetry <= 1.0:
            errors.append("[angular] a must lie in [0, 1]")
    elif cfg.asymmetry is not None:
        errors.append("[angular] key 'a' only applies to the kneaded kind")
    if not cfg.omega_c > 0.0:
        errors.append("[radial] omega_c must be positive")
    if cfg.n_points < 2:
        errors.append("[grid] n_points must be at least 2")
    if not cfg.t_max > 0.0:
        errors.append("[grid] t_max must be positive")
    if cfg.samples < 1:
        errors.append("[mc] samples must be at least 1")
    if cfg.chunk < 1:
        errors.append("[mc] chunk must be at least 1")

    if errors:
        raise ConfigError("; ".join(errors))
    return cfg

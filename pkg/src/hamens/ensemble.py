"""Separable probability distributions over Hamiltonian parameters.

The joint density factorizes as p(omega, theta, phi) = P(omega) Theta(theta, phi)
with the normalization split between the two parts: the radial weight
integrates to 1/xi and the angular density to xi, so the joint measure has
unit mass.  Built-ins carry xi = 1; tabulated parts may split differently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .angular import AngularModel, TabulatedAngular
from .radial import RadialModel, TabulatedRadial


@dataclass(frozen=True)
class SeparableEnsemble:
    """A radial model paired with an angular model, with the split constant xi.

    Construction verifies the joint normalization: radial mass times angular
    mass must be 1 to within 1e-9.
    """

    radial: RadialModel
    angular: AngularModel
    xi: float = field(init=False)

    def __post_init__(self):
        xi = float(self.angular.xi())
        joint = self.radial.mass() * xi
        if abs(joint - 1.0) > 1e-9:
            raise ValueError(
                f"joint normalization violated: radial mass * angular mass = {joint!r}")
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True)
class RadialExpectations:
    """Time-dependent radial expectations and their exact derivatives.

    cos_t(t) = <cos omega t>, sin_t(t) = <sin omega t>; dcos_t/dsin_t are the
    closed-form time derivatives (quadrature-backed for tabulated models).
    """

    cos_t: Callable
    sin_t: Callable
    dcos_t: Callable
    dsin_t: Callable

    @classmethod
    def from_radial(cls, radial: RadialModel) -> "RadialExpectations":
        return cls(cos_t=radial.cos_expectation, sin_t=radial.sin_expectation,
                   dcos_t=radial.dcos_expectation, dsin_t=radial.dsin_expectation)


def _read_csv(path, expected_headers):
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty table") from None
        names = [h.strip() for h in header]
        if names != list(expected_headers):
            raise ValueError(
                f"{path}: expected header {','.join(expected_headers)}, got {','.join(names)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_headers):
                raise ValueError(f"{path}:{lineno}: expected {len(expected_headers)} columns")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric entry") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def load_radial_table(path) -> TabulatedRadial:
    """Load a radial model from a two-column CSV (header 'omega,P')."""
    data = _read_csv(path, ("omega", "P"))
    return TabulatedRadial(omega=data[:, 0], density=data[:, 1])


def load_angular_table(path) -> TabulatedAngular:
    """Load an angular model from a three-column CSV (header 'theta,phi,Theta').

    Rows must enumerate a rectangular grid; the order is free.
    """
    data = _read_csv(path, ("theta", "phi", "Theta"))
    thetas = np.unique(data[:, 0])
    phis = np.unique(data[:, 1])
    if thetas.size * phis.size != data.shape[0]:
        raise ValueError(f"{path}: rows do not form a rectangular (theta, phi) grid")
    values = np.full((thetas.size, phis.size), np.nan)
    ti = np.searchsorted(thetas, data[:, 0])
    pi = np.searchsorted(phis, data[:, 1])
    values[ti, pi] = data[:, 2]
    if np.any(np.isnan(values)):
        raise ValueError(f"{path}: duplicate or missing grid nodes")
    return TabulatedAngular(theta=thetas, phi=phis, values=values)

"""Time-local generators of the ensemble-averaged dynamics.

Between poles the exact channel M(t) defines a generator L(t) = Mdot M^-1 on
Bloch vectors.  For a unital qubit channel with real symmetric Kossakowski
matrix the split is unique:

    L = hz [z]_x + K - tr(K) I ,

with [z]_x the rotation generator about z (the effective level spacing) and
K = [gamma_jk] the Kossakowski matrix in the convention

    drho/dt = -i [hz sigma_z / 2, rho]
              + sum_jk (gamma_jk / 2)(sigma_j rho sigma_k - {sigma_k sigma_j, rho}/2).

Note the explicit factor 1/2 on the dissipator: rates here are twice as
small as in conventions that absorb it.

Closed forms are provided per symmetry class (isotropic, anisotropic
diagonal, azimuthal with level spacing, off-diagonal xy rate); the general
extraction route reproduces them and supplies the rates no closed form
exists for.  All time derivatives are closed-form; denominators close to
zero raise PoleError rather than extrapolating."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynmap import MapFamily, diagonal_components, diagonal_derivatives, map_at, map_derivative
from .radial import RadialModel

#: relative size of the excluded window around a vanishing denominator
POLE_THRESHOLD = 1e-8

_Z_CROSS = np.array([[0.0, -1.0, 0.0],
                     [1.0, 0.0, 0.0],
                     [0.0, 0.0, 0.0]])


class PoleError(ValueError):
    """A generator denominator is inside its pole exclusion window."""

    def __init__(self, message, time=None, denominator=None):
        super().__init__(message)
        self.time = time
        self.denominator = denominator


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """Effective level spacing plus Kossakowski matrix at one time."""

    hz: float
    kossakowski: np.ndarray
    time: float

    def __post_init__(self):
        k = np.array(self.kossakowski, dtype=float).reshape(3, 3)
        if np.max(np.abs(k - k.T)) > 1e-12 * max(1.0, float(np.max(np.abs(k)))):
            raise ValueError("Kossakowski matrix must be symmetric")
        k = 0.5 * (k + k.T)
        k.setflags(write=False)
        object.__setattr__(self, "kossakowski", k)

    def kossakowski_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.kossakowski)

    def kossakowski_eigensystem(self):
        return np.linalg.eigh(self.kossakowski)

    def bloch_generator(self) -> np.ndarray:
        """The 3x3 generator acting on Bloch vectors, drdt = G r."""
        k = self.kossakowski
        return self.hz * _Z_CROSS + k - np.trace(k) * np.eye(3)


@dataclass(frozen=True, eq=False)
class RateTrajectory:
    """Rate series on a time grid; entries are NaN inside pole windows."""

    grid: np.ndarray
    rates: dict
    poles: list

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)


def _require(denominator: float, t: float, what: str) -> float:
    if abs(denominator) < POLE_THRESHOLD:
        raise PoleError(f"{what} inside pole window at t={t!r} (|den|={abs(denominator):.3e})",
                        time=t, denominator=denominator)
    return denominator


def isotropic_rate(radial: RadialModel, t: float) -> float:
    """Common decay rate of the three Pauli channels under full rotational symmetry.

    gamma = -wdot / 2w for the mixing weight w = (2 <cos omega t> + 1)/3.
    """
    c = radial.cos_expectation(t)
    dc = radial.dcos_expectation(t)
    w = (2.0 * c + 1.0) / 3.0
    _require(w, t, "mixing weight")
    return -dc / (3.0 * w)


def anisotropic_rates(fam: MapFamily, t: float) -> np.ndarray:
    """Per-axis rates for diagonal maps: gamma_j = fdot_j/2f_j - sum_{k!=j} fdot_k/2f_k."""
    f = diagonal_components(fam, t)
    df = diagonal_derivatives(fam, t)
    for j, name in enumerate("xyz"):
        _require(f[j], t, f"f_{name}")
    logd = df / (2.0 * f)
    return 2.0 * logd - np.sum(logd)


def azimuthal_generator(fam: MapFamily, t: float) -> LindbladGenerator:
    """Generator for azimuthally symmetric geometries (f_x = f_y).

    The broken xy-reflection shows up as a first z-moment, which adds the
    effective level spacing hz and reshapes gamma_z; gamma_x = gamma_y stay
    locked to f_z.
    """
    f = diagonal_components(fam, t)
    df = diagonal_derivatives(fam, t)
    if abs(f[0] - f[1]) > 1e-10 * max(1.0, abs(f[0])):
        raise ValueError("azimuthal closed form requires equal x/y second moments")
    nz = float(fam.moments.first[2])
    s = float(fam.expectations.sin_t(t))
    ds = float(fam.expectations.dsin_t(t))
    _require(f[2], t, "f_z")
    d = _require(f[0] * f[0] + nz * nz * s * s, t, "level-spacing denominator")
    gx = -df[2] / (2.0 * f[2])
    hz = nz * (f[0] * ds - df[0] * s) / d
    gz = -f[0] * df[0] / d - gx - nz * nz * s * ds / d
    return LindbladGenerator(hz=hz, kossakowski=np.diag([gx, gx, gz]), time=float(t))


def offdiagonal_rate(fam: MapFamily, t: float) -> float:
    """Coupled xy decay channel opened by azimuthal symmetry breaking.

    gamma_xy = <n_z> [ (fdot_x - fdot_y) s - (f_x - f_y) sdot ] / 2D with
    D = f_x f_y + <n_z>^2 s^2; swapping the x and y axes flips its sign.
    """
    f = diagonal_components(fam, t)
    df = diagonal_derivatives(fam, t)
    nz = float(fam.moments.first[2])
    s = float(fam.expectations.sin_t(t))
    ds = float(fam.expectations.dsin_t(t))
    d = _require(f[0] * f[1] + nz * nz * s * s, t, "off-diagonal denominator")
    return nz * ((df[0] - df[1]) * s - (f[0] - f[1]) * ds) / (2.0 * d)


def extract_generator(fam: MapFamily, t: float) -> LindbladGenerator:
    """General route: L = Mdot M^-1, split into level spacing and Kossakowski matrix.

    Works for every symmetry class (it is the defining construction); the
    closed-form routes above are its per-class reductions.  Requires the
    precession axis to be z, which holds whenever the first moments point
    along z (all built-ins).
    """
    m = map_at(fam, t).m
    det = np.linalg.det(m)
    if abs(det) < POLE_THRESHOLD:
        raise PoleError(f"map not invertible at t={t!r} (|det|={abs(det):.3e})",
                        time=t, denominator=det)
    ell = map_derivative(fam, t) @ np.linalg.inv(m)
    sym = 0.5 * (ell + ell.T)
    anti = 0.5 * (ell - ell.T)
    h = np.array([anti[2, 1], anti[0, 2], anti[1, 0]])
    scale = max(1.0, abs(h[2]))
    if max(abs(h[0]), abs(h[1])) > 1e-10 * scale:
        raise ValueError("precession axis is not z; generator form unsupported "
                         "(first moments must point along z)")
    k = sym - 0.5 * np.trace(sym) * np.eye(3)
    return LindbladGenerator(hz=float(h[2]), kossakowski=k, time=float(t))


def _denominators(fam: MapFamily):
    """Named denominator functions whose roots make the generator singular."""
    nz = float(fam.moments.first[2])

    def fx(t):
        return diagonal_components(fam, t)[..., 0]

    def fy(t):
        return diagonal_components(fam, t)[..., 1]

    def fz(t):
        return diagonal_components(fam, t)[..., 2]

    def dxy(t):
        f = diagonal_components(fam, t)
        s = np.asarray(fam.expectations.sin_t(t))
        return f[..., 0] * f[..., 1] + nz * nz * s * s

    return {"fx": fx, "fy": fy, "fz": fz, "D": dxy}


def _bisect(func, lo, hi, iterations=100):
    flo = func(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * max(1.0, abs(mid)):
            break
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0.0) != (fmid < 0.0):
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def pole_scan(fam: MapFamily, window, denominators: Sequence[str] | None = None):
    """Generator singularities in a time window, by sign-change bracketing + bisection.

    By default every candidate denominator root (f_x, f_y, f_z, D) is located
    and then kept only where the map determinant f_z * D actually vanishes:
    with a first z-moment present, an isolated f_x or f_y root leaves the map
    invertible (D > 0 there), while in the reflection-symmetric case D = f_x^2
    only touches zero and the f_x scan is what catches the pole.  Passing an
    explicit ``denominators`` tuple returns the raw roots of those functions
    instead.  Sorted, deduplicated; empty when the generator is regular.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError("window must have positive length")
    explicit = denominators is not None
    names = denominators if explicit else ("fx", "fy", "fz", "D")
    omega_c = getattr(fam.ensemble.radial, "omega_c", 1.0)
    n = int(min(200001, max(2001, 400 * (hi - lo) * omega_c)))
    grid = np.linspace(lo, hi, n)
    funcs = _denominators(fam)
    roots = []
    for name in names:
        func = funcs[name]
        vals = np.asarray(func(grid))
        signs = np.sign(vals)
        flips = np.nonzero((signs[:-1] != signs[1:]) & (signs[:-1] != 0.0))[0]
        for i in flips:
            roots.append(_bisect(lambda t, f=func: float(f(t)), grid[i], grid[i + 1]))
    if not explicit:
        fz, dxy = funcs["fz"], funcs["D"]
        roots = [r for r in roots
                 if min(abs(float(fz(r))), abs(float(dxy(r)))) < 1e-9]
    roots.sort()
    merged = []
    for r in roots:
        if not merged or abs(r - merged[-1]) > 1e-9 * max(1.0, abs(r)):
            merged.append(r)
    return merged


def rate_trajectory(fam: MapFamily, grid) -> RateTrajectory:
    """Evaluate the extracted generator on a grid; NaN inside pole windows."""
    grid = np.asarray(grid, dtype=float)
    names = ("gamma_x", "gamma_y", "gamma_z", "gamma_xy", "omega_bar", "kossakowski_min")
    rates = {name: np.full(grid.shape, np.nan) for name in names}
    for i, t in enumerate(grid):
        try:
            gen = extract_generator(fam, float(t))
        except PoleError:
            continue
        k = gen.kossakowski
        rates["gamma_x"][i] = k[0, 0]
        rates["gamma_y"][i] = k[1, 1]
        rates["gamma_z"][i] = k[2, 2]
        rates["gamma_xy"][i] = k[0, 1]
        rates["omega_bar"][i] = gen.hz
        rates["kossakowski_min"][i] = gen.kossakowski_eigenvalues()[0]
    poles = pole_scan(fam, (float(grid[0]), float(grid[-1]))) if grid.size > 1 else []
    return RateTrajectory(grid=grid, rates=rates, poles=poles)


def divisibility_flags(traj: RateTrajectory):
    """Classify pole-free intervals by the sign of the smallest Kossakowski eigenvalue.

    Returns a list of (t_start, t_end, divisible) with divisible = True where
    the Kossakowski matrix is positive semidefinite; boundaries fall on the
    sign changes (linearly interpolated) and on pole windows.
    """
    t = traj.grid
    m = traj.rates["kossakowski_min"]
    intervals = []
    start = None
    label = None
    prev_t = None
    prev_m = None
    for i in range(t.size):
        if not np.isfinite(m[i]):
            if start is not None:
                intervals.append((start, prev_t, label))
                start = None
            prev_t = None
            prev_m = None
            continue
        here = bool(m[i] >= 0.0)
        if start is None:
            start, label = t[i], here
        elif here != label:
            crossing = prev_t + (t[i] - prev_t) * (0.0 - prev_m) / (m[i] - prev_m)
            intervals.append((start, crossing, label))
            start, label = crossing, here
        prev_t, prev_m = t[i], m[i]
    if start is not None and prev_t is not None:
        intervals.append((start, prev_t, label))
    return intervals


def short_time_positive_window(fam: MapFamily, t_probe=None) -> float:
    """First sign change of the smallest Kossakowski eigenvalue.

    The eigenvalues rise to positive values at the beginning; the returned
    time bounds the window on which the matrix stays positive semidefinite.
    """
    omega_c = getattr(fam.ensemble.radial, "omega_c", 1.0)
    if t_probe is None:
        t_probe = np.concatenate([np.geomspace(1e-6, 0.1, 60), np.linspace(0.1, 8.0, 1600)]) / omega_c
    prev_t = None
    for t in t_probe:
        try:
            lam = extract_generator(fam, float(t)).kossakowski_eigenvalues()[0]
        except PoleError:
            return prev_t if prev_t is not None else 0.0
        if lam < 0.0:
            return prev_t if prev_t is not None else 0.0
        prev_t = t
    return prev_t

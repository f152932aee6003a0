"""Self-validation suites: every fast route checked against an independent one.

Four suites, each reported as (check, metric, threshold, passed):

* closed-form radial expectations against adaptive quadrature,
* the exact map against the Monte-Carlo sampler (stderr-scaled),
* generator extraction against the per-symmetry-class closed forms,
* master-equation integration against direct map application.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angular import (BagelAngular, CardioidAngular, DumbbellAngular,
                      KneadedCardioidAngular, SphereAngular)
from .dynmap import MapFamily, bloch_trajectory, map_at
from .ensemble import SeparableEnsemble
from .generator import (PoleError, anisotropic_rates, azimuthal_generator,
                        extract_generator, isotropic_rate, offdiagonal_rate, pole_scan)
from .montecarlo import mc_average
from .propagation import integrate_master
from .radial import (ExponentialCutoffRadial, GaussianRadial, ReciprocalSquareRadial,
                     expectation_quadrature)


@dataclass(frozen=True)
class CheckResult:
    check: str
    metric: float
    threshold: float
    passed: bool


def _result(check, metric, threshold):
    return CheckResult(check=check, metric=float(metric), threshold=float(threshold),
                       passed=bool(metric <= threshold))


def builtin_radials(omega_c: float):
    return [("gaussian", GaussianRadial(omega_c)),
            ("exp-cutoff", ExponentialCutoffRadial(omega_c)),
            ("reciprocal-square", ReciprocalSquareRadial(omega_c))]


def builtin_angulars(asymmetry: float = 0.3):
    return [("sphere", SphereAngular()),
            ("bagel", BagelAngular()),
            ("dumbbell", DumbbellAngular()),
            ("cardioid", CardioidAngular()),
            ("kneaded", KneadedCardioidAngular(asymmetry))]


def builtin_families(omega_c: float = 1.0, asymmetry: float = 0.3):
    """All 15 (radial x angular) built-in pairs as map families."""
    out = []
    for rname, radial in builtin_radials(omega_c):
        for aname, angular in builtin_angulars(asymmetry):
            fam = MapFamily.from_ensemble(SeparableEnsemble(radial, angular))
            out.append((f"{rname}+{aname}", fam))
    return out


def pole_free_times(fam, times, margin):
    poles = pole_scan(fam, (float(times[0]) if times[0] > 0 else 1e-9, float(times[-1])))
    if not poles:
        return np.asarray(times)
    times = np.asarray(times)
    dist = np.min(np.abs(times[:, None] - np.asarray(poles)[None, :]), axis=1)
    return times[dist > margin]


def check_radial_quadrature(omega_c: float = 1.0, threshold: float = 1e-9):
    """Closed-form cos/sin expectations vs the adaptive-quadrature oracle."""
    worst = 0.0
    times = np.array([0.05, 0.3, 1.0, 2.5, 5.0, 8.0]) / omega_c
    for _, radial in builtin_radials(omega_c):
        for t in times:
            worst = max(worst, abs(radial.cos_expectation(t) - expectation_quadrature(radial, np.cos, t)))
            worst = max(worst, abs(radial.sin_expectation(t) - expectation_quadrature(radial, np.sin, t)))
    return [_result("radial-closed-form-vs-quadrature", worst, threshold)]


def check_mc_vs_map(rho0, cfg, omega_c: float = 1.0, asymmetry: float = 0.3,
                    threshold: float = 4.0, workers: int = 1):
    """Componentwise |MC - exact| in units of the MC standard error."""
    worst = 0.0
    times = np.array([0.2, 1.0, 3.0, 8.0]) / omega_c
    for _, fam in builtin_families(omega_c, asymmetry):
        for t in times:
            est = mc_average(fam.ensemble, rho0, t, cfg, workers=workers)
            exact = map_at(fam, t).apply(rho0).bloch
            stderr = np.maximum(est.bloch_stderr, 1e-300)
            worst = max(worst, float(np.max(np.abs(est.bloch_mean - exact) / stderr)))
    return [_result("mc-vs-map-stderr-units", worst, threshold)]


def check_extraction(omega_c: float = 1.0, asymmetry: float = 0.3, threshold: float = 1e-8):
    """Generator extraction vs the per-class closed forms, away from poles."""
    worst = 0.0
    grid = np.linspace(0.05, 6.0, 80) / omega_c
    for name, fam in builtin_families(omega_c, asymmetry):
        angular = name.split("+")[1]
        for t in pole_free_times(fam, grid, margin=0.1 / omega_c):
            try:
                gen = extract_generator(fam, t)
            except PoleError:
                continue
            k = gen.kossakowski
            if angular == "sphere":
                rate = isotropic_rate(fam.ensemble.radial, t)
                diff = max(np.max(np.abs(k - rate * np.eye(3))), abs(gen.hz))
            elif angular in ("bagel", "dumbbell"):
                rates = anisotropic_rates(fam, t)
                diff = max(np.max(np.abs(k - np.diag(rates))), abs(gen.hz))
            elif angular == "cardioid":
                ref = azimuthal_generator(fam, t)
                diff = max(np.max(np.abs(k - ref.kossakowski)), abs(gen.hz - ref.hz))
            else:  # kneaded: the off-diagonal rate is the closed form on record
                diff = abs(k[0, 1] - offdiagonal_rate(fam, t))
            worst = max(worst, float(diff))
    return [_result("extraction-vs-closed-forms", worst, threshold)]


def check_roundtrip(rho0, omega_c: float = 1.0, asymmetry: float = 0.3,
                    threshold: float = 1e-6):
    """Integrated master equation vs direct map application on pole-free spans."""
    worst = 0.0
    for name, fam in builtin_families(omega_c, asymmetry):
        poles = pole_scan(fam, (1e-9, 6.0 / omega_c))
        t_end = min(0.9 * poles[0], 4.0 / omega_c) if poles else 4.0 / omega_c
        t_eval = np.linspace(0.0, t_end, 21)
        traj = integrate_master(lambda t, fam=fam: extract_generator(fam, t),
                                rho0, (0.0, t_end), t_eval=t_eval)
        exact = bloch_trajectory(fam, rho0, t_eval)
        dist = 0.5 * np.linalg.norm(traj.bloch - exact, axis=1)
        worst = max(worst, float(np.max(dist)))
    return [_result("integrator-roundtrip-trace-distance", worst, threshold)]


def run_checks(rho0, cfg, omega_c: float = 1.0, asymmetry: float = 0.3, workers: int = 1):
    """Run all four suites; returns the combined list of results."""
    results = []
    results += check_radial_quadrature(omega_c)
    results += check_mc_vs_map(rho0, cfg, omega_c, asymmetry, workers=workers)
    results += check_extraction(omega_c, asymmetry)
    results += check_roundtrip(rho0, omega_c, asymmetry)
    return results

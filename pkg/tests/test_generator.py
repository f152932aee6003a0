"""Time-local generators: closed forms, extraction, poles, divisibility."""

import math

import numpy as np
import pytest

from hamens import (BagelAngular, CardioidAngular, DirectionalMoments, DumbbellAngular,
                    ExponentialCutoffRadial, GaussianRadial, KneadedCardioidAngular,
                    MapFamily, PoleError, ReciprocalSquareRadial, SeparableEnsemble,
                    SphereAngular, anisotropic_rates, azimuthal_generator,
                    divisibility_flags, extract_generator, isotropic_rate,
                    offdiagonal_rate, pole_scan, rate_trajectory,
                    short_time_positive_window)
from hamens.ensemble import RadialExpectations
from hamens.radial import RadialModel
from hamens.validation import builtin_families, pole_free_times


def family(radial, angular):
    return MapFamily.from_ensemble(SeparableEnsemble(radial, angular))


# ---------------------------------------------------------------------------
# reference closed forms for the isotropic rate, one per radial family
# ---------------------------------------------------------------------------

def iso_gaussian(x):
    return x * (3 - x * x) / (2 * (1 - x * x) + np.exp(x * x / 2))


def iso_exp_cutoff(x):
    u = x * x
    return 4 * x * ((3 - u) * (1 + u) + 2 * (1 - 6 * u + u * u)) / \
        (2 * (1 - 6 * u + u * u) * (1 + u) + (1 + u) ** 5)


def iso_reciprocal_square(x):
    return (np.sin(x) - x * np.cos(x)) / (2 * x * np.sin(x) + x * x)


ISO_FORMS = {
    GaussianRadial: iso_gaussian,
    ExponentialCutoffRadial: iso_exp_cutoff,
    ReciprocalSquareRadial: iso_reciprocal_square,
}

# per-axis closed forms for the two reflection-symmetric geometries
BAGEL_FORMS = {
    GaussianRadial: (
        lambda x: 3 * x * (3 - x * x) / (6 * (1 - x * x) + 2 * np.exp(x * x / 2)),
        lambda x: 5 * x * (3 - x * x) / (5 * (1 - x * x) + 3 * np.exp(x * x / 2)),
    ),
    ExponentialCutoffRadial: (
        lambda x, u=None: 6 * x * (((3 - x**2) * (1 + x**2) + 2 * (1 - 6 * x**2 + x**4))
                                   / (3 * (1 - 6 * x**2 + x**4) * (1 + x**2) + (1 + x**2) ** 5)),
        lambda x: 20 * x * (((3 - x**2) * (1 + x**2) + 2 * (1 - 6 * x**2 + x**4))
                            / (5 * (1 - 6 * x**2 + x**4) * (1 + x**2) + 3 * (1 + x**2) ** 5)),
    ),
    ReciprocalSquareRadial: (
        lambda x: 3 * (np.sin(x) - x * np.cos(x)) / (6 * x * np.sin(x) + 2 * x * x),
        lambda x: 5 * (np.sin(x) - x * np.cos(x)) / (5 * x * np.sin(x) + 3 * x * x),
    ),
}
DUMBBELL_FORMS = {
    GaussianRadial: (
        lambda x: x * (3 - x * x) / (2 * (1 - x * x) + 3 * np.exp(x * x / 2)),
        lambda x: 4 * x * (3 - x * x) / (4 * (1 - x * x) + np.exp(x * x / 2)),
    ),
    ExponentialCutoffRadial: (
        lambda x: 4 * x * (((3 - x**2) * (1 + x**2) + 2 * (1 - 6 * x**2 + x**4))
                           / (2 * (1 - 6 * x**2 + x**4) * (1 + x**2) + 3 * (1 + x**2) ** 5)),
        lambda x: 16 * x * (((3 - x**2) * (1 + x**2) + 2 * (1 - 6 * x**2 + x**4))
                            / (4 * (1 - 6 * x**2 + x**4) * (1 + x**2) + (1 + x**2) ** 5)),
    ),
    ReciprocalSquareRadial: (
        lambda x: (np.sin(x) - x * np.cos(x)) / (2 * x * np.sin(x) + 3 * x * x),
        lambda x: 4 * (np.sin(x) - x * np.cos(x)) / (4 * x * np.sin(x) + x * x),
    ),
}


def test_isotropic_rate_matches_reference_forms():
    for radial_cls, form in ISO_FORMS.items():
        r = radial_cls(1.0)
        for x in np.linspace(0.05, 1.5, 40):
            assert isotropic_rate(r, x) == pytest.approx(form(x), abs=1e-12)


def test_isotropic_rate_trivials():
    assert isotropic_rate(GaussianRadial(), 0.0) == 0.0
    # initial slope equals the squared cutoff
    slopes = [isotropic_rate(GaussianRadial(2.0), t) / t for t in (1e-4, 2e-4)]
    assert slopes[0] == pytest.approx(4.0, rel=1e-3)
    assert isotropic_rate(ReciprocalSquareRadial(1.0), math.pi) == pytest.approx(1 / math.pi, rel=1e-12)


def test_isotropic_rate_matches_finite_differences():
    # -wdot/2w with central differences at step 1e-6, relative 1e-6
    h = 1e-6
    for radial_cls in ISO_FORMS:
        r = radial_cls(1.0)
        for t in np.linspace(0.01, 1.5, 60):
            w = lambda tt: (2 * r.cos_expectation(tt) + 1) / 3
            fd = -(w(t + h) - w(t - h)) / (2 * h) / (2 * w(t))
            assert isotropic_rate(r, t) == pytest.approx(fd, rel=1e-6)


def test_anisotropic_rates_match_reference_forms():
    for angular, forms in [(BagelAngular(), BAGEL_FORMS), (DumbbellAngular(), DUMBBELL_FORMS)]:
        for radial_cls, (gx_form, gz_aux) in forms.items():
            fam = family(radial_cls(1.0), angular)
            xs = pole_free_times(fam, np.linspace(0.05, 6.0, 90), margin=0.08)
            for x in xs:
                gx, gy, gz = anisotropic_rates(fam, x)
                assert gy == pytest.approx(gx, abs=1e-14)
                assert gx == pytest.approx(gx_form(x), abs=1e-10)
                assert gz == pytest.approx(gz_aux(x) - gx_form(x), abs=1e-10)


def test_anisotropic_reduces_to_isotropic_for_sphere():
    fam = family(GaussianRadial(), SphereAngular())
    for t in (0.3, 1.0, 2.7):
        rates = anisotropic_rates(fam, t)
        assert np.allclose(rates, isotropic_rate(fam.ensemble.radial, t), atol=1e-14)


def test_bagel_reciprocal_square_amplitude_ordering():
    # the wider equatorial moments make the transverse channel louder
    fam = family(ReciprocalSquareRadial(1.0), BagelAngular())
    xs = np.linspace(1e-3, 20.0, 40001)
    rates = np.array([anisotropic_rates(fam, x) for x in xs])
    assert np.max(np.abs(rates[:, 0])) > np.max(np.abs(rates[:, 2]))


def test_azimuthal_generator_initial_level_spacing():
    # hz(0+) = <n_z> <omega>; the mean frequency is the quadrature oracle
    for radial_cls, mean in [(GaussianRadial, 2 * math.sqrt(2 / math.pi)),
                             (ExponentialCutoffRadial, 4.0)]:
        fam = family(radial_cls(1.0), CardioidAngular())
        gen = azimuthal_generator(fam, 1e-12)
        oracle = RadialModel.mean_omega(fam.ensemble.radial)
        assert gen.hz == pytest.approx(-mean / 3, rel=1e-9)
        assert gen.hz == pytest.approx(-oracle / 3, rel=1e-9)


def test_azimuthal_generator_reduces_when_reflection_symmetric():
    for angular in (SphereAngular(), BagelAngular(), DumbbellAngular()):
        fam = family(GaussianRadial(), angular)
        for t in (0.4, 1.0):
            gen = azimuthal_generator(fam, t)
            assert gen.hz == 0.0
            assert np.allclose(np.diag(gen.kossakowski), anisotropic_rates(fam, t), atol=1e-12)


def test_azimuthal_generator_transverse_rates_match_spherical():
    # balanced second moments: gamma_x equals the fully symmetric rate
    fam = family(GaussianRadial(), CardioidAngular())
    for t in (0.3, 0.9, 2.0):
        gen = azimuthal_generator(fam, t)
        assert gen.kossakowski[0, 0] == pytest.approx(isotropic_rate(fam.ensemble.radial, t), abs=1e-13)


def test_offdiagonal_rate_vanishes_at_zero_asymmetry():
    fam = family(GaussianRadial(), KneadedCardioidAngular(0.0))
    for t in np.linspace(0.1, 6.0, 30):
        assert offdiagonal_rate(fam, t) == pytest.approx(0.0, abs=1e-15)


def test_offdiagonal_rate_linear_in_small_asymmetry():
    # the numerator is exactly linear in a; the denominator picks up an
    # O(a^2) correction, negligible at this time for a <= 1e-2
    vals = {}
    for a in (1e-3, 1e-2):
        fam = family(GaussianRadial(), KneadedCardioidAngular(a))
        vals[a] = offdiagonal_rate(fam, 0.3) / a
    assert vals[1e-3] == pytest.approx(vals[1e-2], rel=1e-6)


def test_diagonal_component_gap_is_linear_in_asymmetry():
    from hamens.dynmap import diagonal_components
    a = 0.37
    fam = family(GaussianRadial(), KneadedCardioidAngular(a))
    for t in (0.2, 1.1):
        f = diagonal_components(fam, t)
        c = fam.ensemble.radial.cos_expectation(t)
        assert f[0] - f[1] == pytest.approx((a / 3) * (1 - c), abs=1e-14)


def test_extract_generator_matches_closed_forms_everywhere():
    for name, fam in builtin_families():
        angular = name.split("+")[1]
        grid = pole_free_times(fam, np.linspace(0.05, 6.0, 60), margin=0.1)
        for t in grid:
            gen = extract_generator(fam, t)
            k = gen.kossakowski
            assert np.max(np.abs(k - k.T)) < 1e-12
            if angular == "sphere":
                assert np.allclose(k, isotropic_rate(fam.ensemble.radial, t) * np.eye(3), atol=1e-8)
                assert gen.hz == pytest.approx(0.0, abs=1e-10)
            elif angular in ("bagel", "dumbbell"):
                assert np.allclose(k, np.diag(anisotropic_rates(fam, t)), atol=1e-8)
            elif angular == "cardioid":
                ref = azimuthal_generator(fam, t)
                assert np.allclose(k, ref.kossakowski, atol=1e-8)
                assert gen.hz == pytest.approx(ref.hz, abs=1e-8)
            else:
                assert k[0, 1] == pytest.approx(offdiagonal_rate(fam, t), abs=1e-8)


def test_extract_generator_kneaded_example_point():
    fam = family(GaussianRadial(), KneadedCardioidAngular(0.3))
    gen = extract_generator(fam, 0.4)
    assert gen.kossakowski[0, 1] == pytest.approx(offdiagonal_rate(fam, 0.4), abs=1e-8)


def test_extract_generator_short_time_positivity():
    for _, fam in builtin_families():
        eig = extract_generator(fam, 1e-4).kossakowski_eigenvalues()
        assert eig[0] >= -1e-12


def test_reduction_kneaded_to_cardioid():
    fam_eps = family(GaussianRadial(), KneadedCardioidAngular(1e-6))
    fam_card = family(GaussianRadial(), CardioidAngular())
    for t in (0.2, 0.8, 1.7):
        g_eps = extract_generator(fam_eps, t)
        g_card = extract_generator(fam_card, t)
        assert np.max(np.abs(g_eps.kossakowski - g_card.kossakowski)) < 1e-4
        assert abs(g_eps.hz - g_card.hz) < 1e-4


def test_reduction_zeroed_first_moment_gives_diagonal_rates():
    # cardioid second moments with the first moment forced to zero
    base = family(GaussianRadial(), CardioidAngular())
    fam = MapFamily(ensemble=base.ensemble,
                    moments=DirectionalMoments(np.zeros(3), base.moments.second),
                    expectations=RadialExpectations.from_radial(base.ensemble.radial))
    for t in (0.3, 1.2):
        gen = extract_generator(fam, t)
        assert gen.hz == 0.0
        assert np.allclose(gen.kossakowski, np.diag(anisotropic_rates(fam, t)), atol=1e-12)
        # balanced moments: this is the fully symmetric rate again
        assert np.allclose(np.diag(gen.kossakowski),
                           isotropic_rate(base.ensemble.radial, t), atol=1e-12)


def test_reduction_nearly_equal_moments_to_isotropic():
    eps = 1e-6
    base = family(GaussianRadial(), SphereAngular())
    second = np.diag([1 / 3 + eps, 1 / 3 - eps, 1 / 3])
    fam = MapFamily(ensemble=base.ensemble,
                    moments=DirectionalMoments(np.zeros(3), second),
                    expectations=RadialExpectations.from_radial(base.ensemble.radial))
    for t in (0.4, 1.0):
        rates = anisotropic_rates(fam, t)
        assert np.max(np.abs(rates - isotropic_rate(base.ensemble.radial, t))) < 1e-4


def test_map_derivatives_match_finite_differences():
    from hamens.dynmap import diagonal_components, diagonal_derivatives
    h = 1e-6
    for _, fam in builtin_families():
        ts = np.linspace(0.05, 5.0, 30)
        df = diagonal_derivatives(fam, ts)
        fd = (diagonal_components(fam, ts + h) - diagonal_components(fam, ts - h)) / (2 * h)
        assert np.max(np.abs(df - fd) / np.maximum(np.abs(df), 1e-2)) < 1e-6


# ---------------------------------------------------------------------------
# poles
# ---------------------------------------------------------------------------

def test_pole_scan_sphere_is_regular():
    for radial in (GaussianRadial(), ExponentialCutoffRadial(), ReciprocalSquareRadial()):
        fam = family(radial, SphereAngular())
        assert pole_scan(fam, (1e-6, 5.0)) == []


def test_pole_scan_bagel_gaussian_two_roots():
    fam = family(GaussianRadial(), BagelAngular())
    roots = pole_scan(fam, (1e-6, 3.0))
    assert len(roots) == 2
    # independent bracketing of 3(1 - x^2) + exp(x^2/2) on the same window
    den = lambda x: 3 * (1 - x * x) + math.exp(x * x / 2)
    for root in roots:
        assert den(root - 1e-7) * den(root + 1e-7) < 0
    sq = [r * r for r in roots]
    assert 1.7 <= sq[0] <= 1.9
    assert 4.9 <= sq[1] <= 5.2


def test_pole_scan_bagel_reciprocal_square_regular():
    fam = family(ReciprocalSquareRadial(), BagelAngular())
    assert pole_scan(fam, (1e-6, 20.0)) == []


def test_pole_scan_dumbbell_gaussian_z_channel():
    # the longitudinal channel is singular (f_x roots), the transverse one is not
    fam = family(GaussianRadial(), DumbbellAngular())
    assert len(pole_scan(fam, (1e-6, 4.0), denominators=("fx",))) == 2
    assert pole_scan(fam, (1e-6, 4.0), denominators=("fz",)) == []


@pytest.mark.parametrize("radial_cls,with_poles,without", [
    (GaussianRadial, 0.3, 0.1),
    (ExponentialCutoffRadial, 0.7, 0.3),
])
def test_pole_scan_kneaded_asymmetry_thresholds(radial_cls, with_poles, without):
    fam_hot = family(radial_cls(1.0), KneadedCardioidAngular(with_poles))
    fam_cold = family(radial_cls(1.0), KneadedCardioidAngular(without))
    assert len(pole_scan(fam_hot, (1e-6, 10.0), denominators=("D",))) >= 2
    assert pole_scan(fam_cold, (1e-6, 10.0), denominators=("D",)) == []


def test_pole_scan_kneaded_reciprocal_square_regular_even_at_large_asymmetry():
    fam = family(ReciprocalSquareRadial(), KneadedCardioidAngular(0.9))
    assert pole_scan(fam, (1e-6, 20.0), denominators=("D",)) == []


def test_pole_scan_kneaded_ignores_harmless_fy_roots():
    # with a first z-moment present, an isolated f_y root leaves the map
    # invertible: only the two D sign changes are generator singularities
    fam = family(GaussianRadial(), KneadedCardioidAngular(0.3))
    fy_roots = pole_scan(fam, (1e-6, 4.0), denominators=("fy",))
    assert len(fy_roots) == 2
    true_poles = pole_scan(fam, (1e-6, 4.0))
    assert len(true_poles) == 2
    d_roots = pole_scan(fam, (1e-6, 4.0), denominators=("D",))
    assert np.allclose(true_poles, d_roots, atol=1e-9)
    for r in fy_roots:
        assert min(abs(r - p) for p in true_poles) > 1e-2
        extract_generator(fam, r)  # regular there


def test_rates_raise_inside_pole_window():
    fam = family(GaussianRadial(), BagelAngular())
    pole = pole_scan(fam, (1e-6, 3.0))[0]
    with pytest.raises(PoleError):
        anisotropic_rates(fam, pole)
    with pytest.raises(PoleError):
        extract_generator(fam, pole)


def test_rate_trajectory_marks_pole_window_and_lists_poles():
    fam = family(GaussianRadial(), BagelAngular())
    poles = pole_scan(fam, (1e-6, 3.0))
    grid = np.sort(np.concatenate([np.linspace(0.01, 3.0, 100), poles]))
    traj = rate_trajectory(fam, grid)
    assert np.allclose(traj.poles, poles, atol=1e-9)
    for pole in poles:
        i = int(np.argmin(np.abs(grid - pole)))
        assert not np.isfinite(traj.rates["gamma_x"][i])
    finite = np.isfinite(traj.rates["gamma_x"])
    assert finite.sum() >= 100


# ---------------------------------------------------------------------------
# divisibility
# ---------------------------------------------------------------------------

def test_divisibility_sphere_gaussian_two_regimes():
    fam = family(GaussianRadial(), SphereAngular())
    traj = rate_trajectory(fam, np.linspace(0.01, 8.0, 400))
    flags = divisibility_flags(traj)
    assert [f[2] for f in flags] == [True, False]
    # the boundary is the sign change of the rate at x = sqrt(3)
    assert flags[0][1] == pytest.approx(math.sqrt(3.0), abs=1e-3)


def test_divisibility_constant_positive_is_single_interval():
    from hamens.generator import RateTrajectory
    grid = np.linspace(0.0, 1.0, 11)
    traj = RateTrajectory(grid=grid, rates={"kossakowski_min": np.ones(11)}, poles=[])
    assert divisibility_flags(traj) == [(0.0, 1.0, True)]


def test_divisibility_reciprocal_square_alternates():
    fam = family(ReciprocalSquareRadial(), SphereAngular())
    traj = rate_trajectory(fam, np.linspace(0.01, 20.0, 1000))
    flags = divisibility_flags(traj)
    labels = [f[2] for f in flags]
    assert len(labels) >= 4
    assert all(a != b for a, b in zip(labels, labels[1:]))


def test_short_time_positive_window_all_pairs():
    for name, fam in builtin_families():
        t1 = short_time_positive_window(fam)
        assert t1 > 0.3, name

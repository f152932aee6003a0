"""Panel-based Gauss-Legendre quadrature tuned for oscillatory weighted integrals.

Two entry points:

* ``panel_integrate`` -- adaptive 1D integration over a panel decomposition,
  used for radial expectations <f(omega t)>_P.  Panels are split at the
  half-periods of the oscillatory factor; trailing panels whose weight
  envelope falls below a relative floor are dropped.
* ``sphere_integral`` -- product quadrature over the solid angle
  (Gauss-Legendre in cos(theta) x trapezoid in phi), refined by doubling
  until two successive refinements agree.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    """Integration failed to converge; carries the residual error estimate."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


@lru_cache(maxsize=32)
def _gauss_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_values(f, a, b, order):
    x, w = _gauss_nodes(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(w @ f(mid + half * x))


def _batch_panel_values(f, lo, hi, order):
    """GL estimate of every panel at once; lo/hi are arrays of panel edges."""
    x, w = _gauss_nodes(order)
    mid = 0.5 * (lo + hi)[:, None]
    half = 0.5 * (hi - lo)[:, None]
    vals = f((mid + half * x[None, :]).ravel()).reshape(lo.size, order)
    return (half[:, 0]) * (vals @ w)


def panel_integrate(f, a, b, *, breakpoints=(), rel_tol=1e-11, abs_tol=1e-14,
                    order=24, max_splits=2000, weight=None, weight_floor=1e-14):
    """Integrate ``f`` over [a, b] with adaptive panel refinement.

    ``breakpoints`` pre-split the interval (typically at half-periods of an
    oscillatory factor).  If ``weight`` is given, panels whose weight envelope
    is below ``weight_floor`` times the global peak are discarded: the tail
    contributes nothing at the target accuracy.  Raises QuadratureError with
    the residual estimate when refinement stalls.
    """
    edges = np.array([a] + [float(t) for t in sorted(breakpoints) if a < t < b] + [b])
    lo, hi = edges[:-1], edges[1:]

    if weight is not None and lo.size > 1:
        mids = 0.5 * (lo + hi)
        env_pts = np.abs(weight(np.concatenate([edges, mids])))
        edge_env, mid_env = env_pts[: edges.size], env_pts[edges.size:]
        peak = float(np.max(env_pts))
        if peak > 0.0:
            env = np.maximum(np.maximum(edge_env[:-1], edge_env[1:]), mid_env)
            keep = env >= weight_floor * peak
            if np.any(keep):
                lo, hi = lo[keep], hi[keep]

    # one refinement pass: coarse/fine estimate per panel, split the bad ones
    coarse = _batch_panel_values(f, lo, hi, order)
    fine = _batch_panel_values(f, lo, hi, 2 * order)
    work = [(lo[i], hi[i], coarse[i], fine[i]) for i in range(lo.size)]
    splits = 0
    while True:
        total = sum(fine for _, _, _, fine in work)
        errors = [abs(fine - coarse) for _, _, coarse, fine in work]
        residual = sum(errors)
        tol = max(abs_tol, rel_tol * abs(total))
        if residual <= tol:
            return total
        if splits >= max_splits:
            raise QuadratureError(
                f"panel refinement stalled after {splits} splits (residual {residual:.3e})",
                residual=residual)
        worst = int(np.argmax(errors))
        lo, hi, _, _ = work.pop(worst)
        mid = 0.5 * (lo + hi)
        for p, q in ((lo, mid), (mid, hi)):
            work.append((p, q, _panel_values(f, p, q, order), _panel_values(f, p, q, 2 * order)))
        splits += 1


def sphere_integral(fn, *, n_theta=64, n_phi=128, rel_tol=1e-11, max_doublings=5):
    """Integrate ``fn(theta, phi)`` over the solid angle sin(theta) dtheta dphi.

    Gauss-Legendre in theta (the sin(theta) Jacobian kept explicit, so ring
    and lobe profiles stay entire functions of the node variable) crossed
    with a trapezoid rule in phi, doubling both orders until two successive
    refinements differ by less than ``rel_tol`` (relative to max(1, |I|)).
    """
    def evaluate(nt, nph):
        x, wx = _gauss_nodes(nt)
        theta = 0.5 * np.pi * (x + 1.0)
        wtheta = 0.5 * np.pi * wx * np.sin(theta)
        phi = np.linspace(0.0, 2.0 * np.pi, nph + 1)
        wphi = np.full(nph + 1, 2.0 * np.pi / nph)
        wphi[0] *= 0.5
        wphi[-1] *= 0.5
        vals = fn(theta[:, None], phi[None, :])
        vals = np.broadcast_to(vals, (nt, nph + 1))
        return float(wtheta @ vals @ wphi)

    prev = evaluate(n_theta, n_phi)
    for level in range(1, max_doublings + 1):
        cur = evaluate(n_theta * 2 ** level, n_phi * 2 ** level)
        if abs(cur - prev) < rel_tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"solid-angle quadrature did not settle at {rel_tol}", residual=abs(cur - prev))

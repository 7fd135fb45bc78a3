"""Shooting-method oracle for 1D Dirichlet problems ``-u'' = g(x, u)``.

This path shares no code with the finite-difference solvers: it integrates
the initial value problem ``u(a) = 0, u'(a) = s`` with classical RK4 and
bisects on the slope ``s``.  It is used to freeze golden profiles.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import BracketingError, ConfigurationError

__all__ = [
    "Shot",
    "ShootingResult",
    "integrate_shot",
    "shoot_1d",
    "shoot_sandwiched",
    "pointwise_rhs",
    "write_profile",
    "read_profile",
]

BISECTIONS = 60


@dataclass
class Shot:
    slope: float
    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    failed: bool

    @property
    def end_value(self):
        return -math.inf if self.failed else float(self.u[-1])


@dataclass
class ShootingResult:
    values: np.ndarray
    miss: float
    slope: float
    shot: Shot


def _stations(a, b, step, grade):
    """Integration stations: uniform, or graded geometrically towards both ends.

    With ``grade = r`` each step is ``min(step, r*(x - a), r*(b - x))``,
    starting ``1e-16 (b - a)`` inside ``a`` (linear data there) and ending ``1e-10 (b - a)``
    before ``b``; this resolves integrable endpoint singularities of ``g``.
    """
    if grade is None:
        n = max(1, int(math.ceil((b - a) / step - 1e-9)))
        return a + (b - a) * np.arange(n + 1) / n
    L = b - a
    xs = [a, a + 1e-16 * L]
    x = xs[-1]
    while b - x > 1e-10 * L:
        x = min(x + min(step, grade * (x - a), grade * (b - x)), b)
        xs.append(x)
    if xs[-1] < b:
        xs.append(b)
    return np.array(xs)


def integrate_shot(g, a, b, slope, step, floor=None, grade=None):
    """RK4 for ``u'' = -g(x, u)``, ``u(a) = 0``, ``u'(a) = slope``.

    With ``floor`` set, ``g`` is evaluated at ``max(u, floor)`` and a
    trajectory that drops below ``floor`` after the first step is stopped
    and marked failed.  ``grade`` switches on endpoint-graded steps.
    """
    xs = _stations(a, b, step, grade)
    n = xs.size - 1
    us = np.empty(n + 1)
    vs = np.empty(n + 1)
    x, u, v = a, 0.0, float(slope)
    us[0], vs[0] = u, v
    first = 1
    if grade is not None:
        # linear start data at the first (tiny) offset keeps g away from u = 0
        x, u = xs[1], float(slope) * (xs[1] - a)
        us[1], vs[1] = u, v
        first = 2
    if floor is None:
        G = g
    else:
        def G(x, u):
            return g(x, u if u > floor else floor)
    for i in range(first, n + 1):
        hstep = xs[i] - x
        half = 0.5 * hstep
        k1u, k1v = v, -G(x, u)
        k2u, k2v = v + half * k1v, -G(x + half, u + half * k1u)
        k3u, k3v = v + half * k2v, -G(x + half, u + half * k2u)
        k4u, k4v = v + hstep * k3v, -G(x + hstep, u + hstep * k3u)
        u += hstep / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += hstep / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        x = xs[i]
        us[i], vs[i] = u, v
        if floor is not None and u < floor and i < n:
            return Shot(slope, xs[: i + 1], us[: i + 1], vs[: i + 1], failed=True)
        if not math.isfinite(u):
            return Shot(slope, xs[: i + 1], us[: i + 1], vs[: i + 1], failed=True)
    return Shot(slope, xs, us, vs, failed=False)


def shoot_1d(g, a, b, slope_lo, slope_hi, step=None, floor=None, nodes=None, bisections=BISECTIONS, grade=None):
    """Solve ``-u'' = g(x, u)``, ``u(a) = u(b) = 0`` by shooting on ``u'(a)``.

    The bracket must enclose a sign change of the end value ``u(b; s)``;
    failed shots count as undershoot.  For ``g`` singular at ``u = 0`` pass
    ``floor`` and ``grade`` (e.g. 0.05).  Returns the trajectory of the final
    non-failed shot interpolated (cubic Hermite) onto ``nodes`` (default:
    the RK4 steps) and ``miss = |u(b)|``.
    """
    if not a < b:
        raise ConfigurationError(f"need a < b, got ({a}, {b})")
    step = 1e-4 * (b - a) if step is None else step
    if step > 1e-4 * (b - a) * (1 + 1e-12):
        raise ConfigurationError("step must not exceed 1e-4 * (b - a)")
    if not slope_lo < slope_hi:
        raise BracketingError(f"empty slope bracket [{slope_lo}, {slope_hi}]")
    lo = integrate_shot(g, a, b, slope_lo, step, floor, grade)
    hi = integrate_shot(g, a, b, slope_hi, step, floor, grade)
    s_lo, s_hi = np.sign(lo.end_value), np.sign(hi.end_value)
    if s_lo == 0:
        best = lo
    elif s_hi == 0:
        best = hi
    elif s_lo == s_hi:
        raise BracketingError(
            f"no sign change of u(b) on [{slope_lo}, {slope_hi}] "
            f"(end values {lo.end_value:g}, {hi.end_value:g})"
        )
    else:
        best = None
        for _ in range(bisections):
            mid_slope = 0.5 * (lo.slope + hi.slope)
            if mid_slope in (lo.slope, hi.slope):
                break
            mid = integrate_shot(g, a, b, mid_slope, step, floor, grade)
            s_mid = np.sign(mid.end_value)
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        candidates = [s for s in (lo, hi) if not s.failed]
        if not candidates:
            raise BracketingError("every shot near the root failed")
        best = min(candidates, key=lambda s: abs(s.u[-1]))
    if nodes is None:
        values = best.u.copy()
    else:
        spline = CubicHermiteSpline(best.x, best.u, best.du)
        values = spline(np.asarray(nodes, dtype=float))
    return ShootingResult(values=values, miss=abs(float(best.u[-1])), slope=best.slope, shot=best)


def shoot_sandwiched(g, nodes, sub, sup, step=None, floor=None, grade=None, n_scan=40, slack=1e-6):
    """Shoot for the solution lying between a sub/supersolution pair.

    ``sub`` and ``sup`` are nodal values on ``nodes`` (vanishing at both
    ends).  Their one-sided slopes at ``nodes[0]``, widened by a factor 2,
    bracket ``u'(a)``; every sign change of the miss on a geometric scan of
    that bracket is bisected, and the unique root whose profile stays
    within ``[sub, sup]`` (relative ``slack``) is returned.
    """
    x = np.asarray(nodes, dtype=float)
    a, b = float(x[0]), float(x[-1])
    h = x[1] - x[0]
    lo, hi = 0.5 * max(sub[1], 0.0) / h, 2.0 * sup[1] / h
    if not 0 < hi:
        raise BracketingError("supersolution has no positive slope at the left end")
    lo = max(lo, 1e-12 * hi)
    step = 1e-4 * (b - a) if step is None else step
    slopes = np.geomspace(lo, hi, n_scan)
    ends = [integrate_shot(g, a, b, s, step, floor, grade).end_value for s in slopes]
    scale = max(1.0, float(np.max(sup)))
    found, outside = [], 0
    for s0, s1, e0, e1 in zip(slopes[:-1], slopes[1:], ends[:-1], ends[1:]):
        if np.sign(e0) == np.sign(e1):
            continue
        try:
            res = shoot_1d(g, a, b, s0, s1, step=step, floor=floor, nodes=x, grade=grade)
        except BracketingError:
            continue
        if np.all(res.values >= sub - slack * scale) and np.all(res.values <= sup + slack * scale):
            found.append(res)
        else:
            outside += 1
    if len(found) != 1:
        raise BracketingError(f"expected one sandwiched root, found {len(found)} ({outside} outside the pair)")
    return found[0]


def pointwise_rhs(lam, weight, f, k, floor=0.0):
    """Scalar ``g(x, u) = lam m(x) (f(u) - k)`` for the shooting integrator.

    ``u`` is clamped below by ``floor`` (``0`` for F1/F2; pass a positive
    floor for F3).
    """
    lam, k = float(lam), float(k)
    if weight.kind == "constant":
        mval = float(weight.params["value"])

        def m(x):
            return mval
    else:
        def m(x):
            return float(weight(x))
    if f.family == "F1":
        p = f.p

        def fv(u):
            return max(u, floor) ** p
    elif f.family == "F2":
        c = f.c

        def fv(u):
            u = max(u, floor)
            return c * u / (1.0 + u)
    else:
        p = f.p

        def fv(u):
            return max(u, floor) ** (-p)

    def g(x, u):
        return lam * m(x) * (fv(u) - k)

    return g


def write_profile(path, x, u):
    """Golden-file format: one ``x value`` pair per line, 17 significant digits."""
    with open(path, "w") as fh:
        for xi, ui in zip(np.asarray(x).ravel(), np.asarray(u).ravel()):
            fh.write(f"{xi:.17g} {ui:.17g}\n")


def read_profile(path):
    data = np.loadtxt(path, ndmin=2)
    return data[:, 0], data[:, 1]

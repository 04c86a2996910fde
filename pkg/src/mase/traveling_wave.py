"""Traveling-wave profiles from the planar system of the steady equation.

A profile U(xi) traveling at speed ``c`` satisfies, after one integration of
the steady weak equation (integration constant ``A``) and application of
(1 - d^2/dx^2),

    D(U) U'' + 7 (U')^2 + F(U) = 0,
    D(U) = c + 1 + 14 U,
    F(U) = A - (c - 1) U + 3 U^2 - 2 U^3 + 3 U^4.

The planar system (U, V=U') conserves

    H(U, V) = D(U) V^2 + 2 G(U),      G' = F,  G(0) = 0,

even in V, so bounded orbits are symmetric about the U-axis and profiles are
even about their extrema.  On a level set H = E the squared slope is
W(U) = (E - 2G(U)) / D(U); simple roots of E - 2G are turning points, and the
line D(U) = 0 is singular: orbits reaching it with finite limiting slope give
peaked waves, with unbounded slope cusped ones.  Smooth solitary and periodic
profiles are built by quadrature of dxi = dU / sqrt(W), with a square-root
substitution absorbing the turning-point singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import (
    CompositionError,
    EnergyMismatchError,
    NonexistenceError,
    SingularLineError,
)
from .grid import Field, Grid

__all__ = [
    "TWParams",
    "PhasePoint",
    "Regularity",
    "TWProfile",
    "uxx_coeff_poly",
    "force_poly",
    "potential_poly",
    "level_polynomial",
    "planar_field",
    "first_integral",
    "first_integral_uv",
    "singular_line",
    "turning_points",
    "level_tangencies",
    "slope_squared",
    "integrate_orbit",
    "solitary_profile",
    "periodic_profile",
    "orbit_segment",
    "mirror_profile",
    "compose_segments",
    "concatenate_segments_unchecked",
    "peaked_composite",
    "evaluate_profile",
    "profile_to_field",
]

SINGULAR_GUARD = 1e-12
PARAM_MATCH_TOL = 1e-10


@dataclass(frozen=True)
class TWParams:
    """Speed c, integration constant A and first-integral level E."""

    speed: float
    integration_constant: float = 0.0
    energy: float = 0.0

    def __post_init__(self):
        for name in ("speed", "integration_constant", "energy"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class PhasePoint:
    elevation: float
    slope: float

    def __post_init__(self):
        if not (np.isfinite(self.elevation) and np.isfinite(self.slope)):
            raise ValueError("phase point must be finite")


class Regularity(str, Enum):
    SMOOTH_SOLITARY = "smooth_solitary"
    SMOOTH_PERIODIC = "smooth_periodic"
    PEAKED = "peaked"
    CUSPED = "cusped"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class TWProfile:
    """Sampled traveling-wave profile (or wave segment).

    ``slopes`` carries the exact phase-plane slope at each sample when the
    profile came from quadrature; it keeps downstream residual tests free of
    spectral differentiation artifacts at corners.  ``evaluator`` is an
    optional callable xi -> U attached by the constructors for accurate
    off-sample evaluation; it is not serialized.
    """

    params: TWParams
    xi: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    regularity: Regularity
    period: float | None = None
    slopes: np.ndarray | None = field(default=None, repr=False)
    evaluator: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        if xi.shape != vals.shape or xi.ndim != 1:
            raise ValueError("xi and values must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(vals))):
            raise ValueError("profile samples must be finite")
        if np.any(np.diff(xi) <= 0):
            raise ValueError("xi must be strictly increasing")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "values", vals)
        if self.slopes is not None:
            sl = np.asarray(self.slopes, dtype=np.float64)
            if sl.shape != vals.shape:
                raise ValueError("slopes must match values in shape")
            object.__setattr__(self, "slopes", sl)

    @property
    def amplitude(self) -> float:
        return float(np.max(np.abs(self.values)))


# ---------------------------------------------------------------------------
# the planar system


def uxx_coeff_poly(params: TWParams) -> Polynomial:
    """Coefficient of U'' in the profile equation: c + 1 + 14 U."""
    return Polynomial([params.speed + 1.0, 14.0])


def force_poly(params: TWParams) -> Polynomial:
    """F(U) = A - (c-1) U + 3 U^2 - 2 U^3 + 3 U^4."""
    c, a = params.speed, params.integration_constant
    return Polynomial([a, -(c - 1.0), 3.0, -2.0, 3.0])


def potential_poly(params: TWParams) -> Polynomial:
    """Antiderivative G of F with G(0) = 0; 2G is the potential in H."""
    c, a = params.speed, params.integration_constant
    return Polynomial([0.0, a, -(c - 1.0) / 2.0, 1.0, -0.5, 0.6])


def level_polynomial(params: TWParams) -> Polynomial:
    """E - 2 G(U); its simple roots are the turning points of the level."""
    return Polynomial([params.energy]) - 2.0 * potential_poly(params)


def singular_line(params: TWParams) -> float:
    """Elevation where the U'' coefficient vanishes: U = -(c+1)/14."""
    return -(params.speed + 1.0) / 14.0


def planar_field(p: PhasePoint, params: TWParams) -> PhasePoint:
    """Tangent vector (U', V') = (V, -(7V^2 + F(U)) / D(U)) of the planar system."""
    d = uxx_coeff_poly(params)(p.elevation)
    if abs(d) <= SINGULAR_GUARD:
        raise SingularLineError(
            f"elevation {p.elevation!r} is within {SINGULAR_GUARD} of the singular line"
        )
    f = force_poly(params)(p.elevation)
    return PhasePoint(p.slope, -(7.0 * p.slope**2 + f) / d)


def first_integral_uv(u, v, params: TWParams):
    """H(U, V) = D(U) V^2 + 2 G(U), vectorized over arrays."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return uxx_coeff_poly(params)(u) * (v * v) + 2.0 * potential_poly(params)(u)


def first_integral(p: PhasePoint, params: TWParams) -> float:
    return float(first_integral_uv(p.elevation, p.slope, params))


def slope_squared(u, params: TWParams):
    """Squared profile slope W(U) = (E - 2G(U)) / D(U) on the level set."""
    u = np.asarray(u, dtype=np.float64)
    return level_polynomial(params)(u) / uxx_coeff_poly(params)(u)


def _bisect(fn: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError("bisection bracket does not change sign")
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0.0:
            return m
        if fa * fm < 0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _scan_roots(poly: Polynomial, bracket: tuple[float, float], n_scan: int = 8001) -> list[float]:
    lo, hi = bracket
    grid = np.linspace(lo, hi, n_scan)
    vals = poly(grid)
    roots = [float(g) for g, v in zip(grid, vals) if v == 0.0]
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    for i in sign_change:
        roots.append(_bisect(poly, float(grid[i]), float(grid[i + 1])))
    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > 1e-9:
            deduped.append(r)
    return deduped


def level_tangencies(params: TWParams, bracket: tuple[float, float] = (-10.0, 10.0)) -> list[float]:
    """Elevations where the level just touches E - 2G = 0 (even-order roots).

    These are equilibria (F = 0) whose potential level equals E; a sign scan
    cannot see them, so they are isolated from the roots of F.
    """
    p = level_polynomial(params)
    scale = max(1.0, abs(params.energy))
    out = []
    for r in _scan_roots(force_poly(params), bracket):
        if abs(p(r)) <= 1e-10 * scale:
            out.append(r)
    return out


def turning_points(params: TWParams, bracket: tuple[float, float] = (-10.0, 10.0)) -> list[float]:
    """All real roots of E - 2G(U) on the bracket, in increasing order.

    Sign-change bisection to 1e-12 for simple roots; tangency (even-order)
    roots are recovered from the equilibria of F and merged in.
    """
    roots = _scan_roots(level_polynomial(params), bracket)
    for r in level_tangencies(params, bracket):
        if not any(abs(r - q) <= 1e-9 for q in roots):
            roots.append(r)
    return sorted(roots)


def integrate_orbit(
    start: PhasePoint,
    params: TWParams,
    step_size: float,
    n_steps: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 integration of the planar system; conservation oracle."""
    d_poly = uxx_coeff_poly(params)
    f_poly = force_poly(params)

    def rhs(y: np.ndarray) -> np.ndarray:
        d = d_poly(y[0])
        if abs(d) <= SINGULAR_GUARD:
            raise SingularLineError("orbit reached the singular line")
        return np.array([y[1], -(7.0 * y[1] ** 2 + f_poly(y[0])) / d])

    y = np.array([start.elevation, start.slope], dtype=np.float64)
    us = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    us[0], vs[0] = y
    for i in range(n_steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * step_size * k1)
        k3 = rhs(y + 0.5 * step_size * k2)
        k4 = rhs(y + step_size * k3)
        y = y + (step_size / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        us[i + 1], vs[i + 1] = y
    return us, vs


# ---------------------------------------------------------------------------
# quadrature machinery

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _panel_integrals(fn: Callable[[np.ndarray], np.ndarray], knots: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of fn over each [knots[i], knots[i+1]]."""
    a = knots[:-1]
    half = 0.5 * np.diff(knots)
    mid = a + half
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = fn(pts.ravel()).reshape(pts.shape)
    return half * (vals @ _GL_WEIGHTS)


def _cumulative(fn: Callable[[np.ndarray], np.ndarray], knots: np.ndarray) -> np.ndarray:
    out = np.zeros(len(knots))
    out[1:] = np.cumsum(_panel_integrals(fn, knots))
    return out


def _deflate(poly: Polynomial, root: float) -> Polynomial:
    """poly // (U - root); the remainder (~= poly(root)) is discarded."""
    coefs = poly.coef
    out = np.zeros(len(coefs) - 1)
    acc = 0.0
    for i in range(len(coefs) - 1, 0, -1):
        acc = coefs[i] + root * acc
        out[i - 1] = acc
    return Polynomial(out)


def _is_level_root(params: TWParams, u: float) -> bool:
    p = level_polynomial(params)
    scale = max(1.0, abs(params.energy), float(np.max(np.abs(p.coef))))
    return abs(p(u)) <= 1e-9 * scale


def _segment_w(params: TWParams, u_from: float, u_to: float):
    """Squared-slope evaluator for a segment, with singular contacts canceled.

    When an endpoint sits on the singular line and the level passes through
    it (a corner), the common factor of E - 2G and D = 14 (U - U_s) is
    divided out, leaving the finite corner slope; a singular endpoint off the
    level (a cusp) is rejected.
    """
    level = level_polynomial(params)
    u_s = singular_line(params)
    scale = max(1.0, float(np.max(np.abs(level.coef))))
    on_line = [
        e for e in (u_from, u_to) if abs(e - u_s) <= 1e-10 * max(1.0, abs(u_s))
    ]
    if on_line:
        if abs(level(u_s)) > 1e-9 * scale:
            raise NonexistenceError(
                "segment endpoint reaches the singular line off the level (cusp); "
                "unbounded-slope segments are not composable"
            )
        num = _deflate(level, u_s)

        def den_fn(u):
            return np.full_like(np.asarray(u, dtype=np.float64), 14.0)

        def w_fn(u):
            return num(u) / 14.0

        return w_fn, num, den_fn
    d_poly = uxx_coeff_poly(params)

    def den_fn(u):
        return d_poly(u)

    def w_fn(u):
        return level(u) / d_poly(u)

    return w_fn, level, den_fn


def _segment_knots(
    params: TWParams,
    u_from: float,
    u_to: float,
    n_panels: int = 400,
):
    """Quadrature table (xi, U, V) for a monotone orbit piece on one level.

    Endpoints may be simple turning points (where the inverse-slope integrand
    has a square-root singularity, removed by U = root +/- s^2), singular
    contacts with finite corner slope, or regular points.  xi starts at 0 at
    ``u_from``.  Also returns the squared-slope evaluator used.
    """
    if u_from == u_to:
        raise ValueError("segment endpoints must differ")
    w_fn, w_num, w_den = _segment_w(params, u_from, u_to)
    direction = 1.0 if u_to > u_from else -1.0
    mid = 0.5 * (u_from + u_to)
    num_scale = max(1.0, float(np.max(np.abs(w_num.coef))))

    def is_turning(e: float) -> bool:
        return abs(w_num(e)) <= 1e-9 * num_scale

    def knots_from_end(end: float, inner: float):
        """Return (u_knots, xi cumulative from ``end`` toward ``inner``)."""
        if is_turning(end):
            # W(u) = (u - end) * reduced(u) / den(u); the sqrt singularity
            # cancels under u = end + sign * s^2
            reduced = _deflate(w_num, end)

            def integrand(s: np.ndarray) -> np.ndarray:
                u = end + np.sign(inner - end) * s * s
                return 2.0 / np.sqrt(np.abs(reduced(u) / w_den(u)))

            s_knots = np.linspace(0.0, np.sqrt(abs(inner - end)), n_panels + 1)
            xi = _cumulative(integrand, s_knots)
            u_knots = end + np.sign(inner - end) * s_knots**2
            return u_knots, xi
        u_knots = np.linspace(end, inner, n_panels + 1)

        def integrand(u: np.ndarray) -> np.ndarray:
            return 1.0 / np.sqrt(np.abs(w_fn(u)))

        xi = np.abs(_cumulative(integrand, u_knots))
        return u_knots, xi

    u_a, xi_a = knots_from_end(u_from, mid)
    u_b, xi_b = knots_from_end(u_to, mid)

    # assemble: xi measured from u_from; the b-side runs backwards
    len_a = xi_a[-1]
    len_b = xi_b[-1]
    u_knots = np.concatenate([u_a, u_b[::-1][1:]])
    xi_knots = np.concatenate([xi_a, len_a + (len_b - xi_b[::-1][1:])])
    w_vals = np.abs(w_fn(u_knots))
    if is_turning(u_from):
        w_vals[0] = 0.0
    if is_turning(u_to):
        w_vals[-1] = 0.0
    v_knots = direction * np.sqrt(w_vals)

    # guard against duplicate xi from the double endpoint
    good = np.concatenate([[True], np.diff(xi_knots) > 1e-15])
    return xi_knots[good], u_knots[good], v_knots[good], w_fn, is_turning


def _resample_uniform(xi_knots, u_knots, v_knots, n_samples):
    spline = CubicHermiteSpline(xi_knots, u_knots, v_knots)
    xi = np.linspace(xi_knots[0], xi_knots[-1], n_samples)
    return xi, spline(xi), spline, xi_knots[-1]


# ---------------------------------------------------------------------------
# profile constructors


def _saddle_decay_rate(params: TWParams) -> float:
    ratio = force_poly(params).deriv()(0.0) / uxx_coeff_poly(params)(0.0)
    return float(np.sqrt(max(-ratio, 0.0)))


def solitary_profile(
    c: float,
    n_points: int = 4096,
    window: float | None = None,
    branch: str = "auto",
    bracket: float = 10.0,
) -> TWProfile:
    """Solitary wave of speed c by quadrature of the homoclinic level A = E = 0.

    The crest is the nearest simple root of -2G on the chosen branch
    (``auto`` tries positive elevations first).  Square-root substitution at
    the crest, exponential parametrization along the saddle tail, and an
    analytic exponential continuation beyond the tabulated range.  The result
    is even about xi = 0 and sampled uniformly over the window.
    """
    params = TWParams(float(c), 0.0, 0.0)
    d0 = uxx_coeff_poly(params)(0.0)
    fprime0 = force_poly(params).deriv()(0.0)
    if abs(d0) <= SINGULAR_GUARD:
        raise NonexistenceError("origin lies on the singular line; no decaying orbit")
    if fprime0 / d0 >= 0:
        raise NonexistenceError(
            f"origin is not a saddle at speed {c}: F'(0)/D(0) = {fprime0 / d0:.3g} >= 0"
        )
    # -2G(U) = U^2 * q(U); roots of q are the crest candidates
    q = Polynomial([params.speed - 1.0, -2.0, 1.0, -1.2])
    u_singular = singular_line(params)

    def branch_outcome(sign: float):
        roots = [r for r in _scan_roots(q, (0.0, bracket) if sign > 0 else (-bracket, 0.0))
                 if r * sign > 1e-12]
        first_root = min(roots, key=abs) if roots else None
        contact = None
        if sign * u_singular > 1e-12 and (
            first_root is None or abs(u_singular) < abs(first_root)
        ):
            contact = u_singular
        return first_root, contact

    order = {"auto": [1.0, -1.0], "positive": [1.0], "negative": [-1.0]}[branch]
    chosen = None
    for sign in order:
        first_root, contact = branch_outcome(sign)
        if contact is not None or first_root is not None:
            chosen = (sign, first_root, contact)
            break
    if chosen is None:
        raise NonexistenceError(
            f"no admissible turning point on [{-bracket}, {bracket}] at speed {c}"
        )
    sign, first_root, contact = chosen

    if contact is not None:
        return _contact_solitary(params, contact, n_points, window)

    u_max = _bisect(q, first_root - 1e-6, first_root + 1e-6) if q(first_root) != 0 else first_root
    # verify the orbit stays clear of the singular line and W > 0 inside
    probe = np.linspace(0.1 * u_max, 0.999 * u_max, 257)
    w_probe = slope_squared(probe, params)
    if np.any(w_probe <= 0):
        raise NonexistenceError(
            f"level is not traversable between 0 and {u_max:.6g} at speed {c}"
        )

    kappa = _saddle_decay_rate(params)
    u_mid = 0.5 * u_max
    p_level = level_polynomial(params)
    d_poly = uxx_coeff_poly(params)
    reduced = _deflate(p_level, u_max)

    # crest half: U = u_max - sign*s^2 down to u_mid
    def crest_integrand(s: np.ndarray) -> np.ndarray:
        u = u_max - np.sign(u_max) * s * s
        g = np.abs(reduced(u) / d_poly(u))
        return 2.0 / np.sqrt(g)

    s_knots = np.linspace(0.0, np.sqrt(abs(u_max - u_mid)), 321)
    xi_crest = _cumulative(crest_integrand, s_knots)
    u_crest = u_max - np.sign(u_max) * s_knots**2

    # tail: U = u_mid * exp(-tau) toward zero
    tail_rel = 1e-9
    tau_max = float(np.log(abs(u_mid) / (tail_rel * abs(u_max))))

    def tail_integrand(tau: np.ndarray) -> np.ndarray:
        u = u_mid * np.exp(-tau)
        return np.abs(u) / np.sqrt(np.abs(slope_squared(u, params)))

    tau_knots = np.linspace(0.0, tau_max, max(64, int(tau_max / 0.02)) + 1)
    xi_tail = xi_crest[-1] + _cumulative(tail_integrand, tau_knots)
    u_tail = u_mid * np.exp(-tau_knots)

    xi_knots = np.concatenate([xi_crest, xi_tail[1:]])
    u_knots = np.concatenate([u_crest, u_tail[1:]])
    v_knots = -np.sign(u_max) * np.sqrt(np.abs(slope_squared(u_knots, params)))
    v_knots[0] = 0.0
    spline = CubicHermiteSpline(xi_knots, u_knots, v_knots)
    xi_cut = float(xi_knots[-1])
    u_cut = float(u_knots[-1])

    def eval_half(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        out = np.empty_like(s)
        inside = s <= xi_cut
        out[inside] = spline(s[inside])
        out[~inside] = u_cut * np.exp(-kappa * (s[~inside] - xi_cut))
        return out

    def evaluator(x: np.ndarray) -> np.ndarray:
        return eval_half(np.abs(np.asarray(x, dtype=np.float64)))

    if window is None:
        # window ends where the tail reaches 1e-7 of the crest
        target = 1e-7 * abs(u_max)
        if abs(u_cut) <= target:
            half_window = xi_cut - np.log(target / abs(u_cut)) / kappa
        else:
            half_window = float(np.interp(np.log(target / abs(u_mid)) / -1.0,
                                          tau_knots, xi_tail - 0.0))
        window = 2.0 * float(half_window)
    xi = (np.arange(n_points) - n_points // 2) * (window / n_points)
    values = evaluator(xi)
    w_xi = np.abs(slope_squared(values, params))
    slopes = -np.sign(xi) * np.sign(u_max) * np.sqrt(w_xi)
    return TWProfile(
        params=params,
        xi=xi,
        values=values,
        regularity=Regularity.SMOOTH_SOLITARY,
        period=None,
        slopes=slopes,
        evaluator=evaluator,
    )


def _contact_solitary(
    params: TWParams, u_contact: float, n_points: int, window: float | None
) -> TWProfile:
    """Solitary orbit reaching the singular line: peaked or cusped wave."""
    p_level = level_polynomial(params)
    scale = max(1.0, float(np.max(np.abs(p_level.coef))))
    f_contact = force_poly(params)(u_contact)
    if abs(p_level(u_contact)) <= 1e-9 * scale:
        # level passes through the contact point: finite corner slope
        if f_contact >= 0:
            raise NonexistenceError(
                "contact with the singular line admits no real corner slope"
            )
        regularity = Regularity.PEAKED
    else:
        regularity = Regularity.CUSPED

    kappa = _saddle_decay_rate(params)
    sign = np.sign(u_contact)
    u_mid = 0.5 * u_contact
    d_poly = uxx_coeff_poly(params)

    # contact half: U = u_contact - sign*s^2; the integrand stays integrable
    # for both the peaked (W -> const) and cusped (W ~ 1/(U-Us)) contact
    def contact_integrand(s: np.ndarray) -> np.ndarray:
        u = u_contact - sign * s * s
        w = np.abs(p_level(u) / d_poly(u))
        return 2.0 * s / np.sqrt(w)

    s_knots = np.linspace(0.0, np.sqrt(abs(u_contact - u_mid)), 801)[1:]
    s_knots = np.concatenate([[1e-9], s_knots])
    xi_contact = _cumulative(contact_integrand, s_knots)
    u_contact_knots = u_contact - sign * s_knots**2

    tail_rel = 1e-9
    tau_max = float(np.log(abs(u_mid) / (tail_rel * abs(u_contact))))

    def tail_integrand(tau: np.ndarray) -> np.ndarray:
        u = u_mid * np.exp(-tau)
        return np.abs(u) / np.sqrt(np.abs(slope_squared(u, params)))

    tau_knots = np.linspace(0.0, tau_max, max(64, int(tau_max / 0.02)) + 1)
    xi_tail = xi_contact[-1] + _cumulative(tail_integrand, tau_knots)
    u_tail = u_mid * np.exp(-tau_knots)

    xi_knots = np.concatenate([xi_contact, xi_tail[1:]])
    u_knots = np.concatenate([u_contact_knots, u_tail[1:]])
    pchip = PchipInterpolator(xi_knots, u_knots)
    xi_cut = float(xi_knots[-1])
    u_cut = float(u_knots[-1])

    def evaluator(x: np.ndarray) -> np.ndarray:
        s = np.abs(np.asarray(x, dtype=np.float64))
        out = np.empty_like(s)
        inside = s <= xi_cut
        out[inside] = pchip(s[inside])
        out[~inside] = u_cut * np.exp(-kappa * (s[~inside] - xi_cut))
        return np.where(s < xi_knots[0], u_contact, out)

    if window is None:
        target = 1e-7 * abs(u_contact)
        window = 2.0 * (xi_cut - np.log(target / abs(u_cut)) / kappa)
    xi = (np.arange(n_points) - n_points // 2) * (window / n_points)
    values = evaluator(xi)
    # the slope is unbounded at a cusp contact; cap non-finite entries with
    # the interpolant's derivative there
    with np.errstate(divide="ignore", invalid="ignore"):
        slopes = -np.sign(xi) * sign * np.sqrt(np.abs(slope_squared(values, params)))
    bad = ~np.isfinite(slopes)
    if np.any(bad):
        fallback = pchip.derivative()(np.abs(xi[bad])) * -np.sign(xi[bad])
        slopes[bad] = fallback
    return TWProfile(
        params=params,
        xi=xi,
        values=values,
        regularity=regularity,
        period=None,
        slopes=slopes,
        evaluator=evaluator,
    )


def periodic_profile(
    params: TWParams,
    pair: tuple[float, float] | None = None,
    n_points: int = 4096,
    bracket: tuple[float, float] = (-10.0, 10.0),
) -> TWProfile:
    """Periodic wave between two adjacent simple turning points.

    With ``pair`` unset, the first adjacent root pair with positive squared
    slope in between and a sign-definite U'' coefficient is used.  The crest
    sits at xi = 0 and the sampled window covers one period.
    """
    if pair is None:
        roots = turning_points(params, bracket)
        tangent = set(level_tangencies(params, bracket))
        pair = None
        for u1, u2 in zip(roots, roots[1:]):
            if u1 in tangent or u2 in tangent:
                continue
            probe = np.linspace(u1, u2, 129)[1:-1]
            d_vals = uxx_coeff_poly(params)(probe)
            if np.any(d_vals == 0) or np.sign(d_vals.min()) != np.sign(d_vals.max()):
                continue
            if np.all(slope_squared(probe, params) > 0):
                pair = (u1, u2)
                break
        if pair is None:
            raise NonexistenceError(
                "no adjacent turning-point pair bounds a periodic orbit at this level"
            )
    u1, u2 = sorted(pair)
    probe = np.linspace(u1, u2, 513)[1:-1]
    d_vals = uxx_coeff_poly(params)(probe)
    if np.sign(d_vals.min()) != np.sign(d_vals.max()):
        raise NonexistenceError("the singular line crosses the requested orbit")
    if np.any(slope_squared(probe, params) <= 0):
        raise NonexistenceError("squared slope is not positive between the turning points")

    xi_k, u_k, v_k, _, _ = _segment_knots(params, u2, u1, n_panels=600)
    half = CubicHermiteSpline(xi_k, u_k, v_k)
    half_len = float(xi_k[-1])
    period = 2.0 * half_len

    def evaluator(x: np.ndarray) -> np.ndarray:
        s = np.mod(np.asarray(x, dtype=np.float64), period)
        s = np.where(s > half_len, period - s, s)
        return half(s)

    xi = (np.arange(n_points) - n_points // 2) * (period / n_points)
    values = evaluator(xi)
    slopes = -np.sign(np.mod(xi + 0.5 * period, period) - 0.5 * period) * np.sqrt(
        np.maximum(slope_squared(values, params), 0.0)
    )
    return TWProfile(
        params=params,
        xi=xi,
        values=values,
        regularity=Regularity.SMOOTH_PERIODIC,
        period=period,
        slopes=slopes,
        evaluator=evaluator,
    )


# ---------------------------------------------------------------------------
# wave segments and composition


def orbit_segment(
    params: TWParams,
    u_from: float,
    u_to: float,
    n_samples: int = 2049,
) -> TWProfile:
    """Monotone wave segment between two elevations on one level set.

    Endpoints may be simple turning points or regular points with positive
    squared slope (for instance the singular-line contact of a peaked wave).
    """
    xi_k, u_k, v_k, w_fn, is_turning = _segment_knots(params, u_from, u_to)
    xi, values, spline, _ = _resample_uniform(xi_k, u_k, v_k, n_samples)
    direction = 1.0 if u_to > u_from else -1.0
    slopes = direction * np.sqrt(np.abs(w_fn(values)))
    if is_turning(u_from):
        slopes[0] = 0.0
    if is_turning(u_to):
        slopes[-1] = 0.0
    return TWProfile(
        params=params,
        xi=xi,
        values=values,
        regularity=Regularity.COMPOSITE,
        period=None,
        slopes=slopes,
        evaluator=spline,
    )


def mirror_profile(p: TWProfile) -> TWProfile:
    """Reflection of a segment in xi (slopes change sign)."""
    length = p.xi[-1] - p.xi[0]
    xi = p.xi[0] + (length - (p.xi[::-1] - p.xi[0]))
    base_eval = p.evaluator
    lo, hi = p.xi[0], p.xi[-1]

    def evaluator(x):
        return base_eval(hi - (np.asarray(x, dtype=np.float64) - lo))

    return TWProfile(
        params=p.params,
        xi=xi,
        values=p.values[::-1].copy(),
        regularity=p.regularity,
        period=p.period,
        slopes=None if p.slopes is None else -p.slopes[::-1].copy(),
        evaluator=evaluator if base_eval else None,
    )


def _params_gap(a: TWParams, b: TWParams) -> float:
    return max(
        abs(a.speed - b.speed),
        abs(a.integration_constant - b.integration_constant),
        abs(a.energy - b.energy),
    )


def concatenate_segments_unchecked(segments: Sequence[TWProfile]) -> TWProfile:
    """Raw concatenation of segments, continuity assumed but not enforced.

    Exists so experiments can build deliberately inconsistent composites (for
    instance joining segments from different first-integral levels); regular
    code should call compose_segments.
    """
    if not segments:
        raise ValueError("need at least one segment")
    offsets = [0.0]
    for seg in segments:
        offsets.append(offsets[-1] + float(seg.xi[-1] - seg.xi[0]))
    xi_parts = []
    val_parts = []
    slope_parts = []
    for seg, off in zip(segments, offsets):
        rel = seg.xi - seg.xi[0] + off
        sl = seg.slopes if seg.slopes is not None else np.gradient(seg.values, seg.xi)
        if xi_parts:
            rel, vals, sl = rel[1:], seg.values[1:], sl[1:]
        else:
            vals = seg.values
        xi_parts.append(rel)
        val_parts.append(vals)
        slope_parts.append(sl)
    xi = np.concatenate(xi_parts)
    values = np.concatenate(val_parts)
    slopes = np.concatenate(slope_parts)

    bounds = np.array(offsets)
    evals = [seg.evaluator for seg in segments]
    starts = [seg.xi[0] for seg in segments]

    def evaluator(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.empty_like(x)
        idx = np.clip(np.searchsorted(bounds, x, side="right") - 1, 0, len(segments) - 1)
        for i, (ev, seg) in enumerate(zip(evals, segments)):
            m = idx == i
            if not np.any(m):
                continue
            local = x[m] - bounds[i] + starts[i]
            if ev is not None:
                out[m] = ev(local)
            else:
                out[m] = np.interp(local, seg.xi, seg.values)
        return out

    return TWProfile(
        params=segments[0].params,
        xi=xi,
        values=values,
        regularity=Regularity.COMPOSITE,
        period=None,
        slopes=slopes,
        evaluator=evaluator,
    )


def compose_segments(segments: Sequence[TWProfile], params: TWParams) -> TWProfile:
    """Join same-level wave segments into a continuous composite profile.

    All segments must share (c, A, E) with ``params`` to 1e-10 and join
    continuously in U.  Junctions where the slope flips sign on the same
    level are corners (peaked waves); the composite is checked to be even
    about every junction, which is exactly what staying on one level set
    guarantees.
    """
    if not segments:
        raise ValueError("need at least one segment")
    for seg in segments:
        gap = _params_gap(seg.params, params)
        if gap > PARAM_MATCH_TOL:
            if abs(seg.params.energy - params.energy) > PARAM_MATCH_TOL:
                raise EnergyMismatchError(abs(seg.params.energy - params.energy))
            raise CompositionError(
                f"segment parameters differ from the composite's by {gap:.3e}"
            )
    amp = max(max(np.max(np.abs(s.values)) for s in segments), 1e-30)
    for left, right in zip(segments, segments[1:]):
        jump = abs(float(left.values[-1]) - float(right.values[0]))
        if jump > 1e-8 * max(1.0, amp):
            raise CompositionError(f"segments do not join continuously: |dU| = {jump:.3e}")

    composite = concatenate_segments_unchecked(segments)

    # junction classification and evenness check
    lengths = [float(s.xi[-1] - s.xi[0]) for s in segments]
    offsets = np.concatenate([[0.0], np.cumsum(lengths)])
    peaked = False
    for i in range(1, len(segments)):
        v_l = segments[i - 1].slopes[-1] if segments[i - 1].slopes is not None else 0.0
        v_r = segments[i].slopes[0] if segments[i].slopes is not None else 0.0
        if abs(v_l + v_r) <= 1e-8 * max(1.0, abs(v_l)) and abs(v_l) > 1e-8:
            peaked = True
        reach = min(lengths[i - 1], lengths[i])
        s = np.linspace(0.0, reach, 65)[1:]
        left_vals = composite.evaluator(offsets[i] - s)
        right_vals = composite.evaluator(offsets[i] + s)
        gap = float(np.max(np.abs(left_vals - right_vals)))
        if gap > 1e-8 * max(1.0, amp):
            raise CompositionError(
                f"composite is not symmetric about junction {i}: max gap {gap:.3e}"
            )

    total = float(composite.xi[-1] - composite.xi[0])
    u_wrap = abs(float(composite.values[0]) - float(composite.values[-1]))
    period = total if u_wrap <= 1e-8 * max(1.0, amp) else None
    return TWProfile(
        params=params,
        xi=composite.xi,
        values=composite.values,
        regularity=Regularity.PEAKED if peaked else Regularity.COMPOSITE,
        period=period,
        slopes=composite.slopes,
        evaluator=composite.evaluator,
    )


def peaked_composite(
    speed: float,
    integration_constant: float,
    n_samples: int = 4097,
    bracket: tuple[float, float] = (-10.0, 10.0),
) -> TWProfile:
    """Peaked periodic wave on the level through the singular line.

    The level E = 2 G(U_s) contains the singular elevation U_s with finite
    limiting slope sqrt(-F(U_s)/7) (requires F(U_s) < 0).  The wave is the
    segment from the nearest admissible turning point up to U_s, mirrored
    about the corner; troughs sit at the periodic wrap.
    """
    base = TWParams(speed, integration_constant, 0.0)
    u_s = singular_line(base)
    f_s = force_poly(base)(u_s)
    if f_s >= 0:
        raise NonexistenceError(
            f"F(U_s) = {f_s:.3g} >= 0: the singular line carries no real corner slope"
        )
    energy = float(2.0 * potential_poly(base)(u_s))
    params = TWParams(speed, integration_constant, energy)

    roots = [r for r in turning_points(params, bracket) if abs(r - u_s) > 1e-8]
    candidates = []
    for r in roots:
        lo, hi = sorted((r, u_s))
        probe = np.linspace(lo, hi, 257)[1:-1]
        w = slope_squared(probe, params)
        d_vals = uxx_coeff_poly(params)(probe)
        if np.all(w > 0) and np.sign(d_vals.min()) == np.sign(d_vals.max()):
            candidates.append(r)
    if not candidates:
        raise NonexistenceError(
            "no turning point adjoins the singular contact on this level"
        )
    # prefer a trough below the contact so the corner is the crest
    below = [r for r in candidates if r < u_s]
    pool = below if below else candidates
    u_t = min(pool, key=lambda r: abs(r - u_s))

    rise = orbit_segment(params, u_t, u_s, n_samples=(n_samples + 1) // 2)
    fall = mirror_profile(rise)
    return compose_segments([rise, fall], params)


# ---------------------------------------------------------------------------
# evaluation and gridding


def evaluate_profile(profile: TWProfile, xi) -> np.ndarray:
    """Profile elevation at arbitrary coordinates (evaluator or PCHIP fallback)."""
    xi = np.asarray(xi, dtype=np.float64)
    if profile.evaluator is not None:
        return np.asarray(profile.evaluator(xi), dtype=np.float64)
    interp = PchipInterpolator(profile.xi, profile.values, extrapolate=False)
    out = interp(xi)
    return np.where(np.isnan(out), 0.0, out)


def profile_to_field(profile: TWProfile, grid: Grid, center: float = 0.0) -> Field:
    """Sample a profile onto a periodic grid as initial data.

    Solitary profiles are periodized by summing the three nearest images;
    periodic profiles require the grid length to be an integer number of
    periods.
    """
    x = grid.points - center
    if profile.period is None:
        half = 0.5 * grid.length
        xi = np.mod(x + half, grid.length) - half
        vals = sum(evaluate_profile(profile, xi + m * grid.length) for m in (-1, 0, 1))
    else:
        n_per = grid.length / profile.period
        if abs(n_per - round(n_per)) > 1e-8 * max(1.0, n_per):
            raise ValueError(
                f"grid length {grid.length} is not a whole number of periods "
                f"({profile.period})"
            )
        vals = evaluate_profile(profile, np.mod(x, profile.period))
    return Field(grid, vals)

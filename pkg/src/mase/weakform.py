"""Quadrature evaluation of the equation's distributional statements.

Three residuals: the steady traveling-wave identity

    int (cU + U + 7U^2) psi_x - (1-dxx)^{-1} R(U) psi_x dx = 0,

the unsteady weak identity

    int int u phi_t - (u + 7u^2) phi_x + (1-dxx)^{-1} R(u) phi_x dt dx = 0,

and the reflection bracket identity used in the symmetric-implies-traveling
argument.  Brackets pair fields against the x-derivative of the test
function, as they appear in the weak form; reflecting the test function
flips the sign of that pairing, which is exactly the identity checked by
reflection_bracket_check.

Test functions are compactly supported bumps with closed-form derivatives;
residuals are normalized by the test-function mass so tolerances compare
across widths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import erf

from .errors import SupportError
from .evolution import Trajectory
from .grid import Field, Grid
from .operators import helmholtz_inverse, reaction_term, spectral_derivative
from .traveling_wave import TWProfile

__all__ = [
    "BumpKind",
    "TestFunction",
    "ResidualReport",
    "steady_weak_residual",
    "unsteady_weak_residual",
    "reflection_bracket_check",
    "steady_residual_report",
    "random_bumps",
]

_GAUSS_SIGMA = 0.1  # in units of the half-width; edge value exp(-50) ~ 2e-22


class BumpKind(str, Enum):
    POLYNOMIAL = "polynomial_bump"
    GAUSSIAN = "gaussian_bump_truncated"


@dataclass(frozen=True)
class TestFunction:
    """Smooth compactly supported bump on [center - width, center + width].

    The polynomial bump (1 - y^2)^4 vanishes with its first three derivatives
    exactly at the support boundary; the truncated Gaussian does so to ~1e-16.
    """

    __test__ = False  # not a pytest class, despite the name

    center: float
    width: float
    kind: BumpKind = BumpKind.POLYNOMIAL

    def __post_init__(self):
        if not (np.isfinite(self.center) and np.isfinite(self.width)) or self.width <= 0:
            raise ValueError("test function needs finite center and positive width")
        object.__setattr__(self, "kind", BumpKind(self.kind))

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.width, self.center + self.width)

    def _profile(self, y: np.ndarray, order: int) -> np.ndarray:
        if self.kind is BumpKind.POLYNOMIAL:
            q = 1.0 - y * y
            if order == 0:
                return q**4
            if order == 1:
                return -8.0 * y * q**3
            if order == 2:
                return q * q * (56.0 * y * y - 8.0)
            if order == 3:
                return 48.0 * y * q * (3.0 - 7.0 * y * y)
        else:
            s2 = _GAUSS_SIGMA**2
            g = np.exp(-y * y / (2.0 * s2))
            if order == 0:
                return g
            if order == 1:
                return -(y / s2) * g
            if order == 2:
                return (y * y / s2**2 - 1.0 / s2) * g
            if order == 3:
                return (3.0 * y / s2**2 - y**3 / s2**3) * g
        raise ValueError(f"derivative order must be 0..3, got {order}")

    def derivative(self, x, order: int = 0, period: float | None = None) -> np.ndarray:
        """Bump derivative at x; with ``period`` the coordinate wraps."""
        x = np.asarray(x, dtype=np.float64)
        dx = x - self.center
        if period is not None:
            dx = np.mod(dx + 0.5 * period, period) - 0.5 * period
        y = dx / self.width
        out = np.where(np.abs(y) < 1.0, self._profile(np.clip(y, -1.0, 1.0), order), 0.0)
        return out / self.width**order

    def value(self, x, period: float | None = None) -> np.ndarray:
        return self.derivative(x, 0, period)

    def mass(self) -> float:
        """Integral of |bump| (the bump is non-negative)."""
        if self.kind is BumpKind.POLYNOMIAL:
            return float(self.width * 256.0 / 315.0)
        s = _GAUSS_SIGMA
        return float(self.width * s * np.sqrt(2.0 * np.pi) * erf(1.0 / (s * np.sqrt(2.0))))

    def reflected(self, axis: float, period: float | None = None) -> "TestFunction":
        center = 2.0 * axis - self.center
        if period is not None:
            center = float(np.mod(center, period))
        return TestFunction(center, self.width, self.kind)

    def descriptor(self) -> dict:
        return {"center": self.center, "width": self.width, "kind": self.kind.value}


@dataclass(frozen=True)
class ResidualReport:
    per_test_function: tuple[tuple[dict, float], ...]
    normalization: float

    def __post_init__(self):
        if self.normalization <= 0:
            raise ValueError("normalization must be positive")

    def max_residual(self) -> float:
        return max(abs(r) for _, r in self.per_test_function)


# ---------------------------------------------------------------------------
# quadrature helpers


def _profile_grid(profile: TWProfile) -> tuple[Grid, float]:
    xi = profile.xi
    d = np.diff(xi)
    # tolerance wide enough for 12-significant-digit CSV round trips
    if np.max(d) - np.min(d) > 1e-6 * np.mean(d):
        raise ValueError("weak residuals need a uniformly sampled profile")
    spacing = float(np.mean(d))
    return Grid(len(xi), spacing * len(xi)), float(xi[0])


def _profile_reaction(profile: TWProfile, grid: Grid) -> np.ndarray:
    u = profile.values
    if profile.slopes is not None:
        ux = profile.slopes
    else:
        ux = spectral_derivative(Field(grid, u), 1).values
    return 2.0 * u + 10.0 * u**2 - 2.0 * u**3 + 3.0 * u**4 - 7.0 * ux**2


def _oversample(values: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited refinement by Fourier zero padding."""
    n = len(values)
    spec = np.fft.rfft(values)
    fine = np.zeros(factor * n // 2 + 1, dtype=complex)
    fine[: len(spec)] = spec
    if n % 2 == 0:
        fine[n // 2] *= 0.5  # split the Nyquist mode symmetrically
    return np.fft.irfft(fine, factor * n) * factor


# ---------------------------------------------------------------------------
# residual operations


def steady_weak_residual(profile: TWProfile, psi: TestFunction) -> float:
    """Normalized quadrature of the steady traveling-wave identity.

    Trapezoid rule on the profile's own grid; the nonlocal term uses the
    Helmholtz multiplier, and R(U) uses the profile's phase-plane slopes when
    available (spectral differentiation otherwise).
    """
    grid, x0 = _profile_grid(profile)
    lo, hi = psi.support
    if lo < profile.xi[0] or hi > profile.xi[-1]:
        raise SupportError(
            f"test function support [{lo:.3g}, {hi:.3g}] exceeds the sampled window "
            f"[{profile.xi[0]:.3g}, {profile.xi[-1]:.3g}]"
        )
    if grid.spacing > psi.width / 32.0:
        raise ValueError(
            f"profile spacing {grid.spacing:.3g} too coarse for width {psi.width:.3g}"
        )
    u = profile.values
    r = _profile_reaction(profile, grid)
    p = helmholtz_inverse(Field(grid, r)).values
    c = profile.params.speed
    psi_x = psi.derivative(profile.xi, 1)
    integrand = ((c + 1.0) * u + 7.0 * u**2 - p) * psi_x
    return float(grid.spacing * np.sum(integrand) / psi.mass())


def unsteady_weak_residual(traj: Trajectory, phi: TestFunction, rho: TestFunction) -> float:
    """Normalized space-time quadrature of the weak evolution identity.

    ``phi`` is the spatial bump, ``rho`` the temporal one; the product test
    function must be supported strictly inside the domain and the recorded
    time window.
    """
    grid = traj.grid
    times = traj.times()
    lo, hi = phi.support
    if lo < 0.0 or hi > grid.length:
        raise SupportError("spatial test function leaves the domain")
    t_lo, t_hi = rho.support
    if t_lo <= times[0] or t_hi >= times[-1]:
        raise SupportError("temporal test function leaves the recorded window")

    x = grid.points
    phi_v = phi.value(x)
    phi_x = phi.derivative(x, 1)
    slices = np.empty(len(times))
    for i, s in enumerate(traj.snapshots):
        if times[i] < t_lo - 2 * rho.width or times[i] > t_hi + 2 * rho.width:
            slices[i] = 0.0
            continue
        u = s.u.values
        ux = spectral_derivative(s.u, 1).values
        r = 2.0 * u + 10.0 * u**2 - 2.0 * u**3 + 3.0 * u**4 - 7.0 * ux**2
        p = helmholtz_inverse(Field(grid, r)).values
        rho_v = float(rho.value(times[i]))
        rho_t = float(rho.derivative(times[i], 1))
        integrand = u * phi_v * rho_t - (u + 7.0 * u**2) * phi_x * rho_v + p * phi_x * rho_v
        slices[i] = grid.spacing * np.sum(integrand)
    total = float(np.trapezoid(slices, times))
    return total / (phi.mass() * rho.mass())


def reflection_bracket_check(
    u: Field, lam: float, phi: TestFunction, oversample: int = 8
) -> tuple[float, float]:
    """Both sides of the reflection bracket identity, paired against phi_x.

    Returns (lhs, rhs) with

        lhs = <P(R(u_lam)), phi_x>,   rhs = <P(R(u)), (phi_lam)_x>,

    where u_lam is the reflected field and phi_lam the reflected bump; the
    identity lhs = -rhs holds because reflection commutes with R and the
    even convolution kernel while flipping the test-function derivative.
    """
    from .symmetry import reflect

    grid = u.grid
    if 2.0 * phi.width >= grid.length:
        raise SupportError("test function is too wide for the domain")
    u_lam = reflect(u, lam)
    p_lam = helmholtz_inverse(reaction_term(u_lam)).values
    p_u = helmholtz_inverse(reaction_term(u)).values

    n_fine = oversample * grid.n_points
    h_fine = grid.length / n_fine
    x_fine = np.arange(n_fine) * h_fine
    p_lam_f = _oversample(p_lam, oversample)
    p_u_f = _oversample(p_u, oversample)

    phi_x = phi.derivative(x_fine, 1, period=grid.length)
    # the bump is even about its center, so the reflected descriptor's own
    # derivative equals d/dx [phi(2 lam - x)]
    phi_refl = phi.reflected(lam, period=grid.length)
    phi_lam_x = phi_refl.derivative(x_fine, 1, period=grid.length)

    lhs = float(h_fine * np.sum(p_lam_f * phi_x))
    rhs = float(h_fine * np.sum(p_u_f * phi_lam_x))
    return lhs, rhs


def steady_residual_report(profile: TWProfile, psis: list[TestFunction]) -> ResidualReport:
    entries = tuple(
        (psi.descriptor(), steady_weak_residual(profile, psi)) for psi in psis
    )
    mean_mass = float(np.mean([psi.mass() for psi in psis]))
    return ResidualReport(entries, mean_mass)


def random_bumps(
    rng: np.random.Generator,
    n: int,
    domain: tuple[float, float],
    width_range: tuple[float, float],
    kind: BumpKind = BumpKind.POLYNOMIAL,
) -> list[TestFunction]:
    """Random test-function family with supports inside the given interval."""
    lo, hi = domain
    out = []
    for _ in range(n):
        w = rng.uniform(*width_range)
        c = rng.uniform(lo + w, hi - w)
        out.append(TestFunction(c, w, kind))
    return out

"""Potential profile solver and kinetic reconstruction along characteristics.

The monotone profile solves the first integral (d phi/dx)^2 = 2 V(phi), which
is integrated in the potential variable:

    x(phi) = int_phi^phi_b d s / sqrt(2 V(s)),

evaluated in t = log|phi| so the integrand stays bounded all the way into the
exponential tail.  The distribution function is then recovered pointwise from
the far-field and boundary data transported along the energy characteristics
xi1^2/2 - phi(x) = const.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.interpolate import CubicSpline

from ._quad import cumulative_gl, gl_panel, gl_rule
from .dists import flux
from .errors import (
    DomainError,
    InsufficientDecay,
    NoSolutionCriterion,
    NoSolutionEmptyB,
    PhiBOutOfRange,
)
from .kernels import rho_i_minus, rho_i_plus
from .sagdeev import MARGINAL_EMPTY, MARGINAL_SOLVABLE, STRICT, VIOLATED, SagdeevData

#: The profile is integrated down to this fraction of |phi_b|; below it the
#: analytic exponential tail takes over (strict case).
TAIL_FRACTION = 1e-6

_N_X = 10_000


@dataclass(frozen=True)
class PotentialProfile:
    """Monotone potential profile on a uniform x grid plus its analytic tail."""

    data: SagdeevData
    phi_b: float
    x_grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    tail_rate: float | None  # sqrt(d2V0) in the strict case, else None
    tail_start: tuple  # (x*, phi*) matching point
    marginal: bool
    trivial: bool = False
    # inversion machinery (log-potential grid, x at those nodes)
    _t_grid: np.ndarray = None
    _x_of_t: np.ndarray = None
    _t_spline: object = None

    @property
    def side(self) -> str:
        return self.data.side

    def _x_of_m(self, m):
        """x at potential magnitude m, by quadrature from the nearest node."""
        t = np.log(m)
        j = np.clip(np.searchsorted(self._t_grid, t), 0, len(self._t_grid) - 1)
        tj = self._t_grid[j]
        corr = gl_panel(self._integrand_t, t, tj, n=16)
        return self._x_of_t[j] + corr

    def _integrand_t(self, t):
        m = np.exp(np.asarray(t, dtype=float))
        return m / np.sqrt(2.0 * self.data.V_of(self.data.sign * m))

    def phi_at(self, x):
        """Potential at arbitrary x >= 0 (vectorized), including the tail."""
        if self.trivial:
            return np.zeros_like(np.asarray(x, dtype=float))
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x).astype(float)
        if np.any(x < 0.0):
            raise DomainError("x must be nonnegative")
        x_max, m_tail = self.tail_start
        out = np.empty_like(x)
        inside = x <= x_max
        if np.any(inside):
            out[inside] = self._invert(x[inside])
        if np.any(~inside):
            if self.tail_rate is None:
                raise DomainError(
                    "marginal profile has no tail; x exceeds the computed range"
                )
            out[~inside] = m_tail * np.exp(-self.tail_rate * (x[~inside] - x_max))
        out *= self.data.sign
        return float(out[0]) if scalar else out

    def _invert(self, x):
        """Magnitude m(x) on the pre-tail range via spline guess + Newton."""
        t = self._t_spline(x)
        m = np.exp(np.clip(t, self._t_grid[0], self._t_grid[-1]))
        m_b = math.exp(self._t_grid[-1])
        for _ in range(2):
            v = self.data.V_of(self.data.sign * m)
            m = m + (self._x_of_m(m) - x) * np.sqrt(2.0 * v)
            m = np.clip(m, math.exp(self._t_grid[0]), m_b)
        return m


def solve_phi(data: SagdeevData, phi_b: float, n_x: int = _N_X) -> PotentialProfile:
    """Solve the first-integral boundary value problem for the potential."""
    if phi_b == 0.0:
        x_grid = np.linspace(0.0, 10.0, n_x)
        zero = np.zeros_like(x_grid)
        return PotentialProfile(
            data, 0.0, x_grid, zero, zero.copy(), None, (math.inf, 0.0),
            marginal=False, trivial=True,
        )

    if data.classification == VIOLATED:
        raise NoSolutionCriterion("Bohm criterion violated: no solution exists")
    if data.classification == MARGINAL_EMPTY:
        raise NoSolutionEmptyB("marginal criterion with empty positivity set B")
    if data.sign * phi_b <= 0.0:
        raise DomainError("phi_b sign does not match the built side")

    m_b = abs(phi_b)
    edge = abs(data.b_edge) if data.b_edge is not None else 0.0
    if not m_b < edge:
        raise PhiBOutOfRange(
            f"|phi_b| = {m_b:.6g} is not below the positivity edge {edge:.6g}"
        )

    m_tail = TAIL_FRACTION * m_b
    t_grid = np.linspace(math.log(m_tail), math.log(m_b), n_x)

    proto = PotentialProfile(
        data, phi_b, None, None, None, None, (None, None),
        marginal=False, _t_grid=t_grid, _x_of_t=None,
    )
    pieces = cumulative_gl(proto._integrand_t, t_grid, n=6)
    x_of_t = pieces[-1] - pieces  # x decreases as |phi| grows; x(t_b) = 0
    x_max = float(x_of_t[0])
    t_spline = CubicSpline(x_of_t[::-1], t_grid[::-1])

    marginal = data.classification == MARGINAL_SOLVABLE
    tail_rate = math.sqrt(data.d2V0) if data.classification == STRICT else None

    profile = PotentialProfile(
        data, phi_b, None, None, None, tail_rate, (x_max, m_tail),
        marginal=marginal, _t_grid=t_grid, _x_of_t=x_of_t, _t_spline=t_spline,
    )

    x_grid = np.linspace(0.0, x_max, n_x)
    m = profile._invert(x_grid)
    m[0] = m_b  # boundary value is exact by construction
    m[-1] = m_tail
    phi = data.sign * m
    dphi = -data.sign * np.sqrt(2.0 * np.maximum(data.V_of(phi), 0.0))

    return PotentialProfile(
        data, phi_b, x_grid, phi, dphi, tail_rate, (x_max, m_tail),
        marginal=marginal, _t_grid=t_grid, _x_of_t=x_of_t, _t_spline=t_spline,
    )


@dataclass(frozen=True)
class SheathSolution:
    """Solved profile together with the moment curves of the reconstructed f."""

    profile: PotentialProfile
    rho: np.ndarray
    flux_curve: np.ndarray

    @property
    def ctx(self):
        return self.profile.data.ctx

    @property
    def u(self):
        return self.flux_curve / self.rho


def reconstruct_f(sol_or_profile, x, xi1, xi2=0.0, xi3=0.0):
    """Distribution function at (x, xi) transported along characteristics.

    Attractive side (three-term form): incoming and outgoing populations come
    from f_inf at the shifted energy, and the trapped range xi1^2 < 2 phi(x)
    carries the boundary data scaled by 1/(1-alpha).  Repulsive side
    (two-term form): both signs come from f_inf.
    """
    profile = getattr(sol_or_profile, "profile", sol_or_profile)
    data = profile.data
    ctx = data.ctx
    phi = profile.phi_at(x)
    xi1 = np.asarray(xi1, dtype=float)
    scalar = xi1.ndim == 0
    xi1 = np.atleast_1d(xi1)
    xi2 = np.broadcast_to(np.asarray(xi2, dtype=float), xi1.shape)
    xi3 = np.broadcast_to(np.asarray(xi3, dtype=float), xi1.shape)
    b2 = xi1 * xi1 - 2.0 * phi
    out = np.zeros_like(b2)

    free = b2 > 0.0
    neg = free & (xi1 < 0.0)
    pos = free & (xi1 > 0.0)
    if np.any(neg):
        out[neg] = ctx.f_inf.value(-np.sqrt(b2[neg]), xi2[neg], xi3[neg])
    if np.any(pos):
        out[pos] = ctx.f_inf.value(np.sqrt(b2[pos]), xi2[pos], xi3[pos])

    if data.sign > 0 and ctx.f_b is not None and not ctx.f_b.is_zero:
        trapped = b2 < 0.0
        if np.any(trapped):
            arg = np.sqrt(np.maximum(b2[trapped] + 2.0 * ctx.phi_b, 0.0))
            out[trapped] = ctx.f_b.value(arg, xi2[trapped], xi3[trapped]) / (1.0 - ctx.alpha)

    return float(out[0]) if scalar else out


def _flux_images(f, phi, mapper):
    """Flux integral of g(mapper(xi1)) xi1 over the image intervals of g."""
    out = np.zeros_like(phi)
    x, w = gl_rule(64)
    for lo, hi in f.support_intervals():
        for a, b in mapper(lo, hi, phi):
            half = 0.5 * (b - a)
            pts = 0.5 * (a + b)[:, None] + half[:, None] * x
            vals = f.marginal(
                np.sign(pts) * np.sqrt(np.maximum(pts * pts - 2.0 * phi[:, None], 0.0))
            )
            out += half * ((pts * vals) @ w)
    return out


def moments(sol_or_profile):
    """Density and flux curves of the reconstructed distribution.

    The density comes from the kernel identity rho(x) = rho_i(phi(x)); the
    flux is integrated honestly in the raw velocity variable over the image
    intervals of each support component, which verifies its x-independence
    rather than assuming it.
    """
    profile = getattr(sol_or_profile, "profile", sol_or_profile)
    data = profile.data
    ctx = data.ctx
    phi = profile.phi

    if profile.trivial:
        rho = np.ones_like(phi)
        flux_curve = np.full_like(phi, flux(ctx.f_inf))
        return rho, flux_curve

    if data.sign > 0:
        rho = rho_i_plus(ctx, phi)
    else:
        rho = rho_i_minus(ctx, phi)

    def free_mapper(lo, hi, phi_arr):
        """Image of a far-field support interval under the energy shift."""
        two_phi = 2.0 * phi_arr
        ivs = []
        for a, b, s in ((max(lo, 0.0), hi, +1.0), (max(-hi, 0.0), -lo, -1.0)):
            if b <= a:
                continue
            za = np.sqrt(np.maximum(a * a + two_phi, 0.0))
            zb = np.sqrt(np.maximum(b * b + two_phi, 0.0))
            zb = np.maximum(zb, za)
            ivs.append((s * za, s * zb) if s > 0 else (-zb, -za))
        return ivs

    flux_curve = _flux_images(ctx.f_inf, phi, free_mapper)

    if data.sign > 0 and ctx.f_b is not None and not ctx.f_b.is_zero:
        # trapped population: xi1^2 < 2 phi, argument sqrt(xi1^2 - 2 phi + 2 phi_b)
        shift = 2.0 * (ctx.phi_b - phi)
        cap = np.sqrt(2.0 * np.maximum(phi, 0.0))
        out = np.zeros_like(phi)
        x, w = gl_rule(64)
        for lo, hi in ctx.f_b.support_intervals():
            za = np.sqrt(np.maximum(lo * lo - shift, 0.0))
            zb = np.sqrt(np.maximum(hi * hi - shift, 0.0))
            za, zb = np.minimum(za, cap), np.minimum(zb, cap)
            for sgn in (+1.0, -1.0):
                a, b = (za, zb) if sgn > 0 else (-zb, -za)
                half = 0.5 * (b - a)
                pts = 0.5 * (a + b)[:, None] + half[:, None] * x
                vals = ctx.f_b.marginal(np.sqrt(pts * pts + shift[:, None]))
                out += half * ((pts * vals) @ w)
        flux_curve = flux_curve + out / (1.0 - ctx.alpha)

    return rho, flux_curve


def make_solution(profile: PotentialProfile) -> SheathSolution:
    rho, flux_curve = moments(profile)
    return SheathSolution(profile, rho, flux_curve)


def fit_decay_rate(profile: PotentialProfile):
    """Least-squares exponential rate of the last pre-tail decade of |phi|.

    Returns (c_fit, C_fit) from log|phi| ~ log(C_fit) - c_fit * x.
    """
    if profile.trivial:
        raise InsufficientDecay("trivial profile has no decay to fit")
    m = np.abs(profile.phi)
    m_tail = profile.tail_start[1]
    if m[0] / m_tail < 10.0:
        raise InsufficientDecay("pre-tail profile spans less than one decade")
    sel = (m <= 10.0 * m_tail) & (m >= m_tail)
    if np.count_nonzero(sel) < 10:
        raise InsufficientDecay("too few samples in the last pre-tail decade")
    slope, intercept = np.polyfit(profile.x_grid[sel], np.log(m[sel]), 1)
    return -float(slope), float(math.exp(intercept))


def poisson_residual(sol_or_profile) -> float:
    """Max residual of D2 phi = rho_i(phi) - n_e(phi) by centered differences.

    Uses the fourth-order five-point Laplacian so the stencil truncation error
    stays well below the quadrature accuracy of the density kernels.
    """
    profile = getattr(sol_or_profile, "profile", sol_or_profile)
    data = profile.data
    phi = profile.phi
    if profile.trivial:
        return 0.0
    dx = profile.x_grid[1] - profile.x_grid[0]
    d2 = (
        -phi[:-4] + 16.0 * phi[1:-3] - 30.0 * phi[2:-2] + 16.0 * phi[3:-1] - phi[4:]
    ) / (12.0 * dx**2)
    inner = phi[2:-2]
    if data.sign > 0:
        rhs = rho_i_plus(data.ctx, inner) - data.n_e.n(inner)
    else:
        rhs = rho_i_minus(data.ctx, inner) - data.n_e.n(inner)
    return float(np.max(np.abs(d2 - rhs)))

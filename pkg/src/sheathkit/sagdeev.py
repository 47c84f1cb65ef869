"""Pseudopotential construction, Bohm-criterion classification, and root scan.

The first integral of the Poisson equation is governed by

    V(phi) = int_0^phi (rho_i(s) - n_e(s)) ds,

built here on a geometric grid of the potential magnitude so that both the
quadratic behavior near 0 and the far range are resolved.  Arbitrary-point
evaluation interpolates the densely sampled grid values with a cubic spline,
which keeps V available everywhere at far better than kernel accuracy.
"""

from dataclasses import dataclass
import json
import math

import numpy as np
from scipy import optimize

from ._quad import cumulative_gl, gl_panel
from .dists import INFINITE, kinetic_bohm_integral, mass
from .errors import DomainError, NeutralityViolation, NotApplicable
from .kernels import KernelContext, rho_i_minus, rho_i_plus

STRICT = "STRICT"
MARGINAL_SOLVABLE = "MARGINAL_SOLVABLE"
MARGINAL_EMPTY = "MARGINAL_EMPTY"
VIOLATED = "VIOLATED"

#: |d2V0| at or below this tolerance is treated as the marginal (equality)
#: case of the Bohm criterion.
MARGINAL_TAU = 1e-4

_GRID_POINTS = 10_000
_GRID_SPAN = 1e-10  # smallest grid magnitude relative to phi_max


@dataclass(frozen=True)
class SagdeevData:
    """Pseudopotential samples plus the derived Bohm-criterion quantities."""

    ctx: KernelContext
    n_e: object
    side: str  # "attractive" or "repulsive"
    sign: float  # +1 attractive, -1 repulsive
    phi_max: float
    m_grid: np.ndarray  # potential magnitudes, m_grid[0] = 0
    V_grid: np.ndarray
    K: float
    d2V0: float
    d2V0_discrepancy: float
    classification: str
    b_edge: float | None  # sup B (attractive) / inf B (repulsive); +-inf if unbounded

    def mismatch(self, m):
        """Signed density mismatch G(m) = d/dm V at potential magnitude m."""
        m = np.asarray(m, dtype=float)
        shape = m.shape
        phi = self.sign * m.ravel()
        rho = rho_i_plus(self.ctx, phi) if self.sign > 0 else rho_i_minus(self.ctx, phi)
        out = self.sign * (rho - self.n_e.n(phi))
        return np.asarray(out).reshape(shape)

    def V_of(self, phi):
        """V at arbitrary potentials of the configured sign (vectorized).

        The grid values carry per-subinterval Gauss quadrature accuracy;
        off-grid points are filled in by a cubic spline in the potential
        magnitude, whose interpolation error on the dense geometric grid sits
        many orders below the quadrature error of the grid values themselves.
        """
        phi = np.asarray(phi, dtype=float)
        scalar = phi.ndim == 0
        m = np.atleast_1d(self.sign * phi).astype(float)
        if np.any(m < -1e-15) or np.any(m > self.phi_max * (1.0 + 1e-12)):
            raise DomainError("potential outside the built pseudopotential range")
        m = np.clip(m, 0.0, self.phi_max)
        out = self._v_spline(m)
        return float(out[0]) if scalar else out

    @property
    def _v_spline(self):
        if "_v_spline_cache" not in self.__dict__:
            from scipy.interpolate import CubicSpline

            object.__setattr__(
                self, "_v_spline_cache", CubicSpline(self.m_grid, self.V_grid)
            )
        return self.__dict__["_v_spline_cache"]

    def dV_dphi(self, phi):
        """dV/dphi = rho_i(phi) - n_e(phi), vectorized."""
        phi = np.asarray(phi, dtype=float)
        m = self.sign * phi
        return self.sign * self.mismatch(m)


def _d2V0_fd(data_mismatch, sign, h=1e-2):
    """One-sided finite differences of the density mismatch slope at 0.

    Returns the 4th-order estimate and its discrepancy against the 2nd-order
    stencil.  The mismatch vanishes at 0 by quasi-neutrality, and d2V/dphi2(0)
    equals d(rho - n_e)/dphi there.
    """
    k = np.arange(5.0)
    g = data_mismatch(k * h)  # mismatch as a function of magnitude
    d4 = (-25 * g[0] + 48 * g[1] - 36 * g[2] + 16 * g[3] - 3 * g[4]) / (12 * h)
    d2 = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * h)
    # d/dm of (sign * (rho - n_e)) equals d/dphi of (rho - n_e) by chain rule
    return d4, abs(d4 - d2)


def build_sagdeev(
    ctx: KernelContext,
    n_e,
    side: str,
    phi_max: float = 10.0,
    n_grid: int = _GRID_POINTS,
    tau: float = MARGINAL_TAU,
) -> SagdeevData:
    """Construct V on [0, phi_max] (attractive) or [-phi_max, 0] (repulsive)."""
    if side not in ("attractive", "repulsive"):
        raise DomainError(f"unknown side {side!r}")
    if phi_max <= 0.0:
        raise DomainError("phi_max must be positive")
    residual = abs(mass(ctx.f_inf) - 1.0)
    if residual >= 1e-8:
        raise NeutralityViolation(f"quasi-neutrality residual {residual:.3e} >= 1e-8")

    sign = 1.0 if side == "attractive" else -1.0
    m_grid = np.concatenate(
        ([0.0], np.geomspace(phi_max * _GRID_SPAN, phi_max, n_grid))
    )

    K = kinetic_bohm_integral(ctx.f_inf)

    # Temporary data object so mismatch/V_of can be reused during the build.
    proto = SagdeevData(
        ctx, n_e, side, sign, phi_max, m_grid, np.zeros_like(m_grid),
        K, math.nan, math.nan, "", None,
    )
    V_grid = cumulative_gl(proto.mismatch, m_grid, n=8)

    absorbing = (ctx.f_b is None or ctx.f_b.is_zero) and ctx.alpha == 0.0
    if K == INFINITE:
        d2V0, disc = -math.inf, 0.0
    elif absorbing and side == "attractive":
        d2V0, disc = 1.0 - K, 0.0
    else:
        d2V0, disc = _d2V0_fd(proto.mismatch, sign)

    if K == INFINITE or d2V0 < -tau:
        classification = VIOLATED
    elif d2V0 > tau:
        classification = STRICT
    else:
        classification = MARGINAL_SOLVABLE if V_grid[1] > 0.0 else MARGINAL_EMPTY

    data = SagdeevData(
        ctx, n_e, side, sign, phi_max, m_grid, V_grid,
        K, d2V0, disc, classification, None,
    )
    b_edge = None
    if classification in (STRICT, MARGINAL_SOLVABLE):
        b_edge = _first_root(data)
    return SagdeevData(
        ctx, n_e, side, sign, phi_max, m_grid, V_grid,
        K, d2V0, disc, classification, b_edge,
    )


def _first_root(data: SagdeevData) -> float:
    """Signed edge of the positivity set B: first root of V away from 0.

    Returns +-inf when V stays positive on the whole grid (B unbounded up to
    phi_max).
    """
    nonpos = np.nonzero(data.V_grid[1:] <= 0.0)[0]
    if nonpos.size == 0:
        return data.sign * math.inf
    j = nonpos[0] + 1  # first grid index at or below zero
    if data.V_grid[j] == 0.0:
        return data.sign * data.m_grid[j]
    lo, hi = data.m_grid[j - 1], data.m_grid[j]
    root = optimize.brentq(
        lambda m: data.V_of(data.sign * m), lo, hi, rtol=1e-10, maxiter=200
    )
    return data.sign * root


def sup_B(data: SagdeevData) -> float:
    """Supremum of B for the attractive side (inf for unbounded)."""
    if data.classification not in (STRICT, MARGINAL_SOLVABLE):
        raise NotApplicable(f"sup B undefined for classification {data.classification}")
    if data.side != "attractive":
        raise DomainError("sup_B applies to the attractive side; use inf_B")
    return data.b_edge


def inf_B(data: SagdeevData) -> float:
    """Infimum of B for the repulsive side (-inf for unbounded)."""
    if data.classification not in (STRICT, MARGINAL_SOLVABLE):
        raise NotApplicable(f"inf B undefined for classification {data.classification}")
    if data.side != "repulsive":
        raise DomainError("inf_B applies to the repulsive side; use sup_B")
    return data.b_edge


@dataclass(frozen=True)
class BohmReport:
    K: float
    d2V0: float
    d2V0_discrepancy: float
    classification: str
    side: str
    b_edge: float | None
    phi_max: float

    def to_dict(self):
        def enc(v):
            if v is None:
                return None
            if math.isinf(v):
                return "UNBOUNDED" if v > 0 or self.side == "repulsive" else "INFINITE"
            return v

        key = "supB" if self.side == "attractive" else "infB"
        return {
            "K": "INFINITE" if math.isinf(self.K) else self.K,
            "d2V0": "-INFINITE" if math.isinf(self.d2V0) else self.d2V0,
            "d2V0_discrepancy": self.d2V0_discrepancy,
            "classification": self.classification,
            key: enc(self.b_edge),
            "phi_max": self.phi_max,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def bohm_report(data: SagdeevData) -> BohmReport:
    """Classification summary of the kinetic/generalized Bohm criterion."""
    return BohmReport(
        data.K,
        data.d2V0,
        data.d2V0_discrepancy,
        data.classification,
        data.side,
        data.b_edge,
        data.phi_max,
    )

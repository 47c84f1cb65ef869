"""Analytic velocity distributions built from mollified bumps.

A distribution is a finite sum of rigidly translated and scaled copies of one
canonical smooth bump supported in the unit ball, optionally restricted to a
velocity half-space and optionally composed with the energy shift
``xi1 -> sqrt(xi1^2 - shift)`` that boundary distributions require.

Every moment used downstream depends on the first velocity component only, so
the workhorse is the closed-form 1-D marginal of the bump:

    psi1(t) = A * pi * (a * exp(-1/a) - E1(1/a)),   a = 1 - t^2,  |t| < 1,

where E1 is the exponential integral and A normalizes the 3-D integral to 1.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy import integrate, special

from ._quad import gl_panel
from .errors import (
    DomainError,
    RejectAlphaOne,
    RejectEps,
    RejectVelocityBalance,
    ValidationError,
)

#: Support of the distribution touching |xi1| <= this threshold makes the
#: inverse-square moment non-integrable at working precision.
ZERO_SUPPORT_TOL = 1e-6

#: Distinguished return value of :func:`kinetic_bohm_integral`.
INFINITE = math.inf

_GL_ORDER = 120


@lru_cache(maxsize=1)
def _bump_normalization() -> float:
    """3-D normalization constant of exp(-1/(1-|xi|^2)) on the unit ball."""

    def shell(r):
        return 4.0 * math.pi * r * r * math.exp(-1.0 / (1.0 - r * r))

    val, _ = integrate.quad(shell, 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    return 1.0 / val


class BumpProfile:
    """The canonical smooth bump, normalized so its 3-D integral is 1."""

    @property
    def normalization(self) -> float:
        return _bump_normalization()

    @staticmethod
    def value(xi1, xi2=0.0, xi3=0.0):
        """Pointwise value of the bump at (xi1, xi2, xi3)."""
        r2 = np.asarray(xi1, dtype=float) ** 2 + np.asarray(xi2) ** 2 + np.asarray(xi3) ** 2
        scalar = r2.ndim == 0
        r2 = np.atleast_1d(r2)
        out = np.zeros_like(r2, dtype=float)
        inside = r2 < 1.0
        a = 1.0 - r2[inside]
        out[inside] = _bump_normalization() * np.exp(-1.0 / a)
        return float(out[0]) if scalar else out

    @staticmethod
    def marginal(t):
        """1-D marginal over the two transverse velocity components."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        a = 1.0 - t[inside] ** 2
        out[inside] = _bump_normalization() * math.pi * (
            a * np.exp(-1.0 / a) - special.exp1(1.0 / a)
        )
        return float(out[0]) if scalar else out


BUMP = BumpProfile()


@dataclass(frozen=True)
class Bump:
    """One mollified bump: mass * eps^-3 * psi((xi - center) / eps)."""

    mass: float
    center: tuple[float, float, float]
    width: float

    def __post_init__(self):
        if self.mass < 0.0:
            raise ValidationError("bump mass must be nonnegative")
        if not 0.0 < self.width < 1.0:
            raise ValidationError("bump width must lie in (0, 1)")


def merge_intervals(intervals):
    """Union of closed intervals as a sorted list of disjoint intervals."""
    ivs = sorted((lo, hi) for lo, hi in intervals if hi > lo)
    merged = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


class DistributionSpec:
    """Sum of bumps with optional half-space cutoff and energy shift.

    cutoff selects one of {"none", "negative", "positive"} for the indicator
    on xi1.  energy_shift, when set to 2*phi_b, evaluates every bump at
    (sqrt(xi1^2 - shift), xi') on xi1 > 0, which is the composition boundary
    distributions are built from; it is applied analytically, never by
    resampling.
    """

    def __init__(self, bumps, cutoff="none", energy_shift=None):
        if cutoff not in ("none", "negative", "positive"):
            raise ValidationError(f"unknown cutoff {cutoff!r}")
        self.bumps = tuple(b for b in bumps if b.mass > 0.0)
        self.cutoff = cutoff
        self.energy_shift = None if energy_shift is None else float(energy_shift)
        if self.energy_shift is not None and cutoff == "negative":
            raise ValidationError("energy-shifted distributions live on xi1 > 0")

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return len(self.bumps) == 0

    def support_intervals(self):
        """Disjoint xi1-intervals outside which the marginal vanishes."""
        out = []
        for b in self.bumps:
            lo = b.center[0] - b.width
            hi = b.center[0] + b.width
            if self.energy_shift is not None:
                s = self.energy_shift
                # source coordinate sqrt(xi1^2 - s) ranges over [lo, hi] & (0, inf)
                lo = max(lo, 0.0)
                if hi <= lo:
                    continue
                lo = math.sqrt(max(lo * lo + s, 0.0))
                hi = math.sqrt(hi * hi + s)
            if self.cutoff == "negative":
                hi = min(hi, 0.0)
            elif self.cutoff == "positive" or self.energy_shift is not None:
                lo = max(lo, 0.0)
            if hi > lo:
                out.append((lo, hi))
        return merge_intervals(out)

    # -- evaluation --------------------------------------------------------

    def _cut_mask(self, xi1):
        if self.cutoff == "negative":
            return xi1 < 0.0
        if self.cutoff == "positive":
            return xi1 > 0.0
        return np.ones_like(xi1, dtype=bool)

    def _mapped_axis(self, xi1):
        """Admissible-point mask and the bump-frame first coordinate."""
        if self.energy_shift is not None:
            s = self.energy_shift
            ok = (xi1 > 0.0) & (xi1 * xi1 - s > 0.0)
            arg = np.zeros_like(xi1)
            arg[ok] = np.sqrt(xi1[ok] ** 2 - s)
            return ok, arg
        return self._cut_mask(xi1), xi1

    def value(self, xi1, xi2=0.0, xi3=0.0):
        """Pointwise 3-D value f(xi1, xi2, xi3)."""
        xi1 = np.asarray(xi1, dtype=float)
        scalar = xi1.ndim == 0
        xi1 = np.atleast_1d(xi1)
        xi2 = np.broadcast_to(np.asarray(xi2, dtype=float), xi1.shape)
        xi3 = np.broadcast_to(np.asarray(xi3, dtype=float), xi1.shape)
        out = np.zeros_like(xi1)
        if not self.is_zero:
            ok, arg1 = self._mapped_axis(xi1)
            for b in self.bumps:
                c1, c2, c3 = b.center
                w = b.width
                vals = BUMP.value((arg1 - c1) / w, (xi2 - c2) / w, (xi3 - c3) / w)
                out += np.where(ok, b.mass / w**3 * vals, 0.0)
        return float(out[0]) if scalar else out

    def marginal(self, xi1):
        """1-D marginal g(xi1) = integral of f over the transverse plane."""
        xi1 = np.asarray(xi1, dtype=float)
        scalar = xi1.ndim == 0
        xi1 = np.atleast_1d(xi1)
        out = np.zeros_like(xi1)
        if not self.is_zero:
            ok, arg = self._mapped_axis(xi1)
            for b in self.bumps:
                vals = BUMP.marginal((arg - b.center[0]) / b.width) / b.width
                out += np.where(ok, b.mass * vals, 0.0)
        return float(out[0]) if scalar else out


class CompositeDistribution:
    """Sum of several DistributionSpec parts behind the same interface."""

    def __init__(self, parts):
        self.parts = tuple(p for p in parts if not p.is_zero)

    @property
    def is_zero(self) -> bool:
        return len(self.parts) == 0

    @property
    def bumps(self):
        return tuple(b for p in self.parts for b in p.bumps)

    def support_intervals(self):
        return merge_intervals([iv for p in self.parts for iv in p.support_intervals()])

    def value(self, xi1, xi2=0.0, xi3=0.0):
        if not self.parts:
            return np.zeros_like(np.asarray(xi1, dtype=float))
        return sum(p.value(xi1, xi2, xi3) for p in self.parts)

    def marginal(self, xi1):
        if not self.parts:
            return np.zeros_like(np.asarray(xi1, dtype=float))
        return sum(p.marginal(xi1) for p in self.parts)


# -- moments ---------------------------------------------------------------


def _moment(f, weight) -> float:
    total = 0.0
    for lo, hi in f.support_intervals():
        total += float(gl_panel(lambda t: f.marginal(t) * weight(t), lo, hi, n=_GL_ORDER))
    return total


def mass(f) -> float:
    """Total mass, the zeroth velocity moment."""
    return _moment(f, lambda t: np.ones_like(t))


def flux(f) -> float:
    """First xi1-moment (the x-independent ion flux)."""
    return _moment(f, lambda t: t)


def kinetic_bohm_integral(f) -> float:
    """Inverse-square moment; INFINITE when the support touches xi1 = 0."""
    for lo, hi in f.support_intervals():
        if lo <= ZERO_SUPPORT_TOL and hi >= -ZERO_SUPPORT_TOL:
            return INFINITE
    return _moment(f, lambda t: t**-2)


# -- electron model and boundary data ---------------------------------------


class ElectronModel:
    """Electron number density as a function of the potential.

    n_int is the antiderivative of n vanishing at 0, used by the
    pseudopotential builders; a quadrature fallback is installed when no
    closed form is supplied.
    """

    def __init__(self, n, dn, d2n, n_int=None, name="custom"):
        self.n = n
        self.dn = dn
        self.d2n = d2n
        self.name = name
        if n_int is None:
            n_int = lambda p: gl_panel(  # noqa: E731
                n, np.zeros_like(np.asarray(p, dtype=float)), p, n=64
            )
        self.n_int = n_int
        if abs(float(n(0.0)) - 1.0) > 1e-12 or abs(float(dn(0.0)) + 1.0) > 1e-12:
            raise ValidationError("electron model must satisfy n(0)=1, n'(0)=-1")

    @classmethod
    def boltzmann(cls):
        return cls(
            lambda p: np.exp(-np.asarray(p, dtype=float)),
            lambda p: -np.exp(-np.asarray(p, dtype=float)),
            lambda p: np.exp(-np.asarray(p, dtype=float)),
            n_int=lambda p: -np.expm1(-np.asarray(p, dtype=float)),
            name="boltzmann",
        )

    @classmethod
    def polynomial(cls, coefficients):
        c = np.asarray(coefficients, dtype=float)
        p = np.polynomial.Polynomial(c)
        return cls(p, p.deriv(1), p.deriv(2), n_int=p.integ(), name="polynomial")


@dataclass(frozen=True)
class BoundaryConfig:
    """Wall potential, refraction rate, and optional electron flux constant."""

    phi_b: float
    alpha: float = 0.0
    v_e: float | None = None

    def __post_init__(self):
        if self.alpha == 1.0:
            raise RejectAlphaOne("refraction rate alpha = 1 admits multiple solutions")
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError("alpha must lie in [0, 1)")


# -- compatibility of boundary and far-field data ---------------------------


@dataclass(frozen=True)
class ConditionReport:
    max_residual: float
    tolerance: float
    n_points: int
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", self.max_residual <= self.tolerance)


def _sample_axis(intervals, extra, n_per=24):
    pts = list(extra)
    for lo, hi in intervals:
        pad = 0.05 * (hi - lo)
        pts.extend(np.linspace(lo - pad, hi + pad, n_per))
    return np.unique(np.asarray(pts, dtype=float))


def check_necessary_conditions(f_inf, f_b, bc, tolerance=1e-8):
    """Residual of the boundary/far-field compatibility identities.

    Evaluates, on a deterministic sample grid of at least 200 velocity points,
    the identity f_inf(xi) = f_b(sqrt(xi1^2 + 2 phi_b), xi') + alpha *
    f_inf(-xi1, xi') on the outgoing half-space (plus, for a repulsive wall,
    the even-in-xi1 symmetry on the slow strip).
    """
    if bc.phi_b == 0.0:
        raise DomainError("phi_b must be nonzero")

    phi_b = bc.phi_b
    supports = list(f_inf.support_intervals())
    mirrored = [(-hi, -lo) for lo, hi in supports]
    mapped = []
    if f_b is not None and not f_b.is_zero:
        for lo, hi in f_b.support_intervals():
            lo2 = max(lo * lo - 2.0 * phi_b, 0.0)
            hi2 = hi * hi - 2.0 * phi_b
            if hi2 > 0.0:
                mapped.append((math.sqrt(lo2), math.sqrt(hi2)))
    speeds = [abs(v) for lo, hi in supports for v in (lo, hi)] or [1.0]
    vmax = max(speeds) + 1.0

    lo_cut = math.sqrt(2.0 * abs(phi_b)) if phi_b < 0.0 else 0.0
    axis = _sample_axis(
        [iv for iv in supports + mirrored + mapped if iv[1] > 0.0],
        np.linspace(lo_cut + 1e-3, vmax, 40),
    )
    axis = axis[axis > lo_cut]

    widths = [b.width for b in f_inf.bumps] or [0.1]
    w = max(widths)
    perp = np.array([0.0, 0.35 * w, 0.8 * w])
    x1, x2, x3 = np.meshgrid(axis, perp, perp, indexing="ij")
    x1, x2, x3 = x1.ravel(), x2.ravel(), x3.ravel()

    fb_term = 0.0
    if f_b is not None and not f_b.is_zero:
        fb_term = f_b.value(np.sqrt(x1 * x1 + 2.0 * phi_b), x2, x3)
    vals = f_inf.value(x1, x2, x3)
    res = vals - fb_term - bc.alpha * f_inf.value(-x1, x2, x3)
    # Scale out the bump amplitude so roundoff on large f values does not
    # masquerade as a genuine violation of the identity.
    scale = max(1.0, float(np.max(vals)) if vals.size else 1.0)
    residuals = [np.abs(res) / scale]
    n_points = x1.size

    if phi_b < 0.0:
        strip = np.linspace(-lo_cut * 0.999, lo_cut * 0.999, 30)
        s1, s2, s3 = np.meshgrid(strip, perp, perp, indexing="ij")
        s1, s2, s3 = s1.ravel(), s2.ravel(), s3.ravel()
        sym = f_inf.value(s1, s2, s3)
        sscale = max(1.0, float(np.max(sym)) if sym.size else 1.0)
        residuals.append(np.abs(sym - f_inf.value(-s1, s2, s3)) / sscale)
        n_points += s1.size

    worst = max(float(r.max()) for r in residuals)
    return ConditionReport(worst, tolerance, int(n_points))


# -- delta-approximating families -------------------------------------------


@dataclass(frozen=True)
class GeneralFamily:
    """Parameters of the two-beam boundary family (incoming + emitted beams)."""

    m_b: float
    m_inf: float
    v_b: float
    v_inf: float
    alpha: float
    phi_b: float

    def mass_total(self) -> float:
        return self.m_b + (1.0 + self.alpha) * self.m_inf

    def bohm_sum(self) -> float:
        return self.m_b / self.v_b**2 + (1.0 + self.alpha) * self.m_inf / self.v_inf**2

    def check(self, tol=1e-9):
        if abs(self.mass_total() - 1.0) > tol:
            raise RejectVelocityBalance(
                f"masses must satisfy m_b + (1+alpha) m_inf = 1, got {self.mass_total():.6g}"
            )
        if not self.bohm_sum() < 1.0:
            raise RejectVelocityBalance("weighted inverse-square velocity sum must be < 1")

    def normalized(self) -> "GeneralFamily":
        """Rescale the masses so the quasi-neutral total is exactly 1."""
        total = self.mass_total()
        if total <= 0.0:
            raise RejectVelocityBalance("total mass must be positive")
        return GeneralFamily(
            self.m_b / total, self.m_inf / total, self.v_b, self.v_inf, self.alpha, self.phi_b
        )


def make_delta_family(eps, u_inf=None, general: GeneralFamily | None = None):
    """Build the (f_b, f_inf) pair concentrating at prescribed beam velocities.

    With ``u_inf`` given this is the absorbing-wall family: f_b = 0 and f_inf
    one bump of unit mass at (-u_inf, 0, 0).  With ``general`` given, f_inf is
    the sum of plain beams at -v_inf, +v_b and (for alpha > 0) +v_inf, while
    f_b is the v_b beam composed with the energy shift 2*phi_b.
    """
    if not 0.0 < eps < 1.0:
        raise RejectEps("eps must lie in (0, 1)")

    if general is None:
        if u_inf is None or u_inf <= 0.0:
            raise ValidationError("absorbing family needs u_inf > 0")
        if u_inf > 1.0 and eps >= (u_inf - 1.0) / 2.0:
            raise RejectEps(f"eps must be below (u_inf - 1)/2 = {(u_inf - 1.0) / 2.0:.4g}")
        if eps >= u_inf:
            raise RejectEps("eps must keep the support inside xi1 < 0")
        f_inf = DistributionSpec([Bump(1.0, (-u_inf, 0.0, 0.0), eps)])
        f_b = DistributionSpec([])
        return f_b, f_inf

    general.check()
    g = general
    if eps >= g.v_inf:
        raise RejectEps("eps must keep the incoming beam inside xi1 < 0")
    bumps = [Bump(g.m_inf, (-g.v_inf, 0.0, 0.0), eps)]
    if g.alpha > 0.0:
        bumps.append(Bump(g.alpha * g.m_inf, (g.v_inf, 0.0, 0.0), eps))
    if g.m_b > 0.0:
        if eps >= g.v_b:
            raise RejectEps("eps must keep the emitted beam inside xi1 > 0")
        if g.phi_b < 0.0 and (g.v_b - eps) ** 2 + 2.0 * g.phi_b <= 0.0:
            raise RejectEps("emitted beam must stay above the energy barrier -2*phi_b")
        beam = Bump(g.m_b, (g.v_b, 0.0, 0.0), eps)
        bumps.append(beam)
        # The boundary distribution is the same beam seen through the energy
        # shift 2*phi_b, so that the compatibility identity holds exactly.
        f_b = DistributionSpec([beam], cutoff="positive", energy_shift=2.0 * g.phi_b)
    else:
        f_b = DistributionSpec([])
    f_inf = DistributionSpec(bumps)
    return f_b, f_inf

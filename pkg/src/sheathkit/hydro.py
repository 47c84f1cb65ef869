"""Cold-ion fluid limits and the delta-mass convergence harness.

The Euler-Poisson sheath and its generalization with boundary emission and
reflection both reduce to a scalar first integral with an analytic
pseudopotential, so they reuse the same profile machinery as the kinetic
solver.  The convergence harness compares the kinetic solution of a
concentrating bump family against the corresponding fluid solution and fits
the rate of the sup-norm errors in the concentration parameter.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy import optimize

from .dists import BoundaryConfig, GeneralFamily, make_delta_family
from .errors import BohmViolated, DomainError, PhiBOutOfRange, RejectEps
from .kernels import KernelContext
from .sagdeev import MARGINAL_SOLVABLE, STRICT, build_sagdeev
from .sheath import PotentialProfile, make_solution, solve_phi


class AnalyticPotentialData:
    """Adapter exposing an analytic pseudopotential to the profile solver."""

    def __init__(self, V, dV, d2V0, side, phi_min_domain, phi_max=10.0):
        self._V = V
        self._dV = dV
        self.d2V0 = d2V0
        self.side = side
        self.sign = 1.0 if side == "attractive" else -1.0
        self.phi_max = phi_max
        self.phi_min_domain = phi_min_domain  # lowest admissible potential
        self.classification = STRICT if d2V0 > 0.0 else MARGINAL_SOLVABLE
        self.b_edge = self._first_root()
        self.ctx = None
        self.n_e = None

    def V_of(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self._V(phi)

    def dV_dphi(self, phi):
        return self._dV(np.asarray(phi, dtype=float))

    def _first_root(self) -> float:
        lo_m = self.phi_max * 1e-10
        hi_m = self.phi_max
        if self.sign < 0:
            # stay strictly inside the domain of the square roots
            hi_m = min(hi_m, -self.phi_min_domain * (1.0 - 1e-9))
        m = np.geomspace(lo_m, hi_m, 4000)
        vals = self._V(self.sign * m)
        nonpos = np.nonzero(vals <= 0.0)[0]
        if nonpos.size == 0:
            return self.sign * math.inf
        j = nonpos[0]
        if j == 0:
            return self.sign * m[0]
        root = optimize.brentq(
            lambda mm: float(self._V(self.sign * mm)), m[j - 1], m[j], rtol=1e-12
        )
        return self.sign * root


@dataclass(frozen=True)
class HydroSolution:
    """Fluid sheath profile with its density and velocity curves."""

    model: dict
    profile: PotentialProfile
    x_grid: np.ndarray
    phi: np.ndarray
    rho: np.ndarray
    u: np.ndarray

    @property
    def flux(self) -> float:
        return self.model["flux"]

    def rho_of_phi(self, phi):
        return self.model["rho_of_phi"](np.asarray(phi, dtype=float))


def _solve_fluid(model, phi_b, n_x):
    side = "attractive" if phi_b >= 0.0 else "repulsive"
    data = AnalyticPotentialData(
        model["V"], model["dV"], model["d2V0"], side, model["phi_min_domain"]
    )
    if phi_b <= model["phi_min_domain"]:
        raise PhiBOutOfRange(
            f"phi_b = {phi_b:.6g} at or below the model domain edge "
            f"{model['phi_min_domain']:.6g}"
        )
    profile = solve_phi(data, phi_b, n_x=n_x)
    rho = model["rho_of_phi"](profile.phi)
    u = model["flux"] / rho
    return HydroSolution(model, profile, profile.x_grid, profile.phi, rho, u)


def euler_poisson_model(u_inf: float, n_e) -> dict:
    """Pseudopotential and moment formulas of the cold-ion Euler-Poisson sheath."""
    if u_inf < 1.0:
        raise BohmViolated(f"hydrodynamic Bohm criterion needs u_inf >= 1, got {u_inf}")

    def V(phi):
        # u*(sqrt(u^2+2phi) - u) written cancellation-free for small phi
        kinetic = 2.0 * u_inf * phi / (np.sqrt(u_inf**2 + 2.0 * phi) + u_inf)
        return kinetic - n_e.n_int(phi)

    def dV(phi):
        return u_inf / np.sqrt(u_inf**2 + 2.0 * phi) - n_e.n(phi)

    return {
        "name": "euler_poisson",
        "u_inf": u_inf,
        "V": V,
        "dV": dV,
        "d2V0": 1.0 - 1.0 / u_inf**2,
        "phi_min_domain": -0.5 * u_inf**2,
        "rho_of_phi": lambda phi: u_inf / np.sqrt(u_inf**2 + 2.0 * phi),
        "flux": -u_inf,
    }


def solve_euler_poisson(u_inf: float, phi_b: float, n_e, n_x: int = 10_000) -> HydroSolution:
    """Monotone solution of the cold-ion Euler-Poisson sheath problem."""
    model = euler_poisson_model(u_inf, n_e)
    if phi_b == 0.0:
        x_grid = np.linspace(0.0, 10.0, n_x)
        data = AnalyticPotentialData(
            model["V"], model["dV"], model["d2V0"], "attractive", model["phi_min_domain"]
        )
        profile = solve_phi(data, 0.0, n_x=n_x)
        ones = np.ones_like(x_grid)
        return HydroSolution(
            model, profile, profile.x_grid, profile.phi, ones, -u_inf * ones
        )
    return _solve_fluid(model, phi_b, n_x)


def generalized_model(params: GeneralFamily, n_e) -> dict:
    """Two-beam fluid model with boundary emission and reflection."""
    params.check()
    g = params
    c1 = g.m_b * g.v_b
    c2 = (1.0 + g.alpha) * g.m_inf * g.v_inf

    def rho_of_phi(phi):
        out = c2 * (g.v_inf**2 + 2.0 * phi) ** -0.5
        if g.m_b > 0.0:
            out = out + c1 * (g.v_b**2 + 2.0 * phi) ** -0.5
        return out

    def V(phi):
        # c*(sqrt(v^2+2phi) - v) written cancellation-free for small phi
        out = c2 * 2.0 * phi / (np.sqrt(g.v_inf**2 + 2.0 * phi) + g.v_inf)
        if g.m_b > 0.0:
            out = out + c1 * 2.0 * phi / (np.sqrt(g.v_b**2 + 2.0 * phi) + g.v_b)
        return out - n_e.n_int(phi)

    def dV(phi):
        return rho_of_phi(phi) - n_e.n(phi)

    domain = -0.5 * min(g.v_inf, g.v_b if g.m_b > 0.0 else g.v_inf) ** 2
    return {
        "name": "generalized",
        "params": g,
        "V": V,
        "dV": dV,
        "d2V0": 1.0 - g.bohm_sum(),
        "phi_min_domain": domain,
        "rho_of_phi": rho_of_phi,
        "flux": g.m_b * g.v_b + (g.alpha - 1.0) * g.m_inf * g.v_inf,
    }


def solve_generalized(params: GeneralFamily, phi_b: float, n_e, n_x: int = 10_000) -> HydroSolution:
    """Monotone solution of the generalized two-beam fluid sheath problem."""
    model = generalized_model(params, n_e)
    if phi_b == 0.0:
        return _trivial_generalized(model, n_e, n_x)
    return _solve_fluid(model, phi_b, n_x)


def _trivial_generalized(model, n_e, n_x):
    x_grid = np.linspace(0.0, 10.0, n_x)
    g = model["params"]
    data = AnalyticPotentialData(
        model["V"], model["dV"], model["d2V0"], "attractive", model["phi_min_domain"]
    )
    profile = solve_phi(data, 0.0, n_x=n_x)
    ones = np.ones_like(x_grid)
    return HydroSolution(
        model, profile, profile.x_grid, profile.phi, ones, model["flux"] * ones
    )


# -- delta-mass convergence harness ------------------------------------------


@dataclass(frozen=True)
class ConvergenceStudy:
    eps_list: tuple
    err_rho: tuple
    err_flux: tuple
    err_phi: tuple
    slope: float | None
    C0_estimate: float

    def totals(self):
        return tuple(
            r + f + p for r, f, p in zip(self.err_rho, self.err_flux, self.err_phi)
        )


def delta_mass_study(
    phi_b: float,
    eps_list,
    u_inf: float | None = None,
    general: GeneralFamily | None = None,
    n_e=None,
    n_x: int = 4000,
    phi_max: float = 10.0,
) -> ConvergenceStudy:
    """Sup-norm errors between kinetic and fluid sheaths as the beams sharpen.

    For each width eps, solves the kinetic problem for the concentrating bump
    family and the corresponding fluid problem, and measures
    sup|rho_eps - rho|, sup|(rho u)_eps - rho u| and sup|phi_eps - phi| on the
    kinetic x grid.  The log-log slope of the summed error is fitted when at
    least three widths are given.
    """
    if n_e is None:
        from .dists import ElectronModel

        n_e = ElectronModel.boltzmann()

    eps_list = tuple(sorted(eps_list, reverse=True))
    if u_inf is not None:
        eps0 = (u_inf - 1.0) / 2.0
        if eps0 <= 0.0 or any(e >= eps0 for e in eps_list):
            raise RejectEps(
                f"widths must lie in (0, (u_inf - 1)/2) = (0, {max(eps0, 0.0):.4g})"
            )
        hydro = solve_euler_poisson(u_inf, phi_b, n_e, n_x=n_x)
        alpha = 0.0
    elif general is not None:
        general = replace(general, phi_b=phi_b).normalized()
        hydro = solve_generalized(general, phi_b, n_e, n_x=n_x)
        alpha = general.alpha
    else:
        raise DomainError("pass either u_inf or general")

    side = "attractive" if phi_b > 0.0 else "repulsive"
    err_rho, err_flux, err_phi = [], [], []
    for eps in eps_list:
        if u_inf is not None:
            f_b, f_inf = make_delta_family(eps, u_inf=u_inf)
        else:
            f_b, f_inf = make_delta_family(eps, general=general)
        bc = BoundaryConfig(phi_b=phi_b, alpha=alpha)
        ctx = KernelContext(f_inf, f_b, bc)
        data = build_sagdeev(ctx, n_e, side, phi_max=phi_max)
        profile = solve_phi(data, phi_b, n_x=n_x)
        sol = make_solution(profile)

        xg = profile.x_grid
        phi_h = hydro.profile.phi_at(xg)
        rho_h = hydro.rho_of_phi(phi_h)
        err_phi.append(float(np.max(np.abs(profile.phi - phi_h))))
        err_rho.append(float(np.max(np.abs(sol.rho - rho_h))))
        err_flux.append(float(np.max(np.abs(sol.flux_curve - hydro.flux))))

    totals = [r + f + p for r, f, p in zip(err_rho, err_flux, err_phi)]
    slope = None
    if len(eps_list) >= 3:
        slope = float(np.polyfit(np.log(eps_list), np.log(totals), 1)[0])
    c0 = float(max(t / e for t, e in zip(totals, eps_list)))
    return ConvergenceStudy(
        eps_list, tuple(err_rho), tuple(err_flux), tuple(err_phi), slope, c0
    )

"""Scenario ingestion, subcommand dispatch, and file emission.

Scenarios are flat JSON documents with typed keys; unknown keys are rejected
so that a scenario file hashes to exactly what was computed.  All outputs are
deterministic: floats are printed with 17 significant digits and each CSV
carries the SHA-256 of the canonical scenario encoding in its header.
"""

import hashlib
import json
import sys
from dataclasses import dataclass

import click
import numpy as np
from scipy import optimize

from .dists import (
    BoundaryConfig,
    Bump,
    DistributionSpec,
    CompositeDistribution,
    ElectronModel,
    GeneralFamily,
    check_necessary_conditions,
    flux,
    make_delta_family,
)
from .errors import (
    NoRoot,
    RejectGeneralReduction,
    SheathError,
    ValidationError,
)
from .hydro import delta_mass_study, solve_euler_poisson, solve_generalized
from .kernels import KernelContext, bound_check
from .sagdeev import MARGINAL_EMPTY, VIOLATED, bohm_report, build_sagdeev
from .sheath import fit_decay_rate, make_solution, poisson_residual, solve_phi

#: Exit codes of the command-line interface.
EXIT_OK = 0
EXIT_NO_SOLUTION = 2
EXIT_VALIDATION = 3

_NO_SOLUTION_CODES = {
    "NO_SOLUTION_CRITERION",
    "NO_SOLUTION_EMPTY_B",
    "PHI_B_OUT_OF_RANGE",
    "BOHM_VIOLATED",
    "NO_ROOT",
}


# -- scenario parsing --------------------------------------------------------


def _require_keys(obj, allowed, where):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)} in {where}")


def _parse_dist(obj, where):
    if obj is None:
        return DistributionSpec([])
    if isinstance(obj, list):
        return CompositeDistribution([_parse_dist(o, where) for o in obj])
    _require_keys(obj, {"bumps", "cutoff", "energy_shift"}, where)
    bumps = []
    for i, b in enumerate(obj.get("bumps", [])):
        _require_keys(b, {"mass", "center", "width"}, f"{where}.bumps[{i}]")
        center = b["center"]
        if len(center) != 3:
            raise ValidationError(f"{where}.bumps[{i}].center must have 3 components")
        bumps.append(Bump(float(b["mass"]), tuple(map(float, center)), float(b["width"])))
    return DistributionSpec(
        bumps,
        cutoff=obj.get("cutoff", "none"),
        energy_shift=obj.get("energy_shift"),
    )


def _parse_electron(obj):
    if obj is None:
        return ElectronModel.boltzmann()
    _require_keys(obj, {"model", "coefficients"}, "electron")
    if obj["model"] == "boltzmann":
        return ElectronModel.boltzmann()
    if obj["model"] == "polynomial":
        return ElectronModel.polynomial(obj["coefficients"])
    raise ValidationError(f"unknown electron model {obj['model']!r}")


def _parse_general(obj, where):
    _require_keys(obj, {"m_b", "m_inf", "v_b", "v_inf", "alpha", "phi_b"}, where)
    return GeneralFamily(
        float(obj["m_b"]),
        float(obj["m_inf"]),
        float(obj["v_b"]),
        float(obj["v_inf"]),
        float(obj["alpha"]),
        float(obj.get("phi_b", 0.0)),
    )


@dataclass(frozen=True)
class Scenario:
    raw: dict
    f_inf: object
    f_b: object
    bc: BoundaryConfig
    n_e: ElectronModel
    phi_max: float
    grid: int
    tau: float
    delta_family: dict | None
    sweep: dict | None
    hydro: dict | None

    @property
    def sha256(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @property
    def side(self) -> str:
        return "attractive" if self.bc.phi_b >= 0.0 else "repulsive"

    def context(self) -> KernelContext:
        return KernelContext(self.f_inf, self.f_b, self.bc)


def load_scenario(path, phi_max=None, grid=None, tau=None) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read scenario: {exc}") from exc
    _require_keys(
        raw,
        {"f_inf", "f_b", "boundary", "electron", "solver", "delta_family", "sweep", "hydro"},
        "scenario",
    )
    bnd = raw.get("boundary", {})
    _require_keys(bnd, {"phi_b", "alpha", "v_e"}, "boundary")
    bc = BoundaryConfig(
        phi_b=float(bnd.get("phi_b", 0.0)),
        alpha=float(bnd.get("alpha", 0.0)),
        v_e=bnd.get("v_e"),
    )
    solver = raw.get("solver", {})
    _require_keys(solver, {"phi_max", "grid", "tau"}, "solver")

    family = raw.get("delta_family")
    if family is not None:
        _require_keys(family, {"u_inf", "general", "eps"}, "delta_family")
    sweep = raw.get("sweep")
    if sweep is not None:
        _require_keys(sweep, {"eps_list", "n_x"}, "sweep")
    hydro = raw.get("hydro")
    if hydro is not None:
        _require_keys(hydro, {"model", "u_inf", "general"}, "hydro")

    if family is not None and "eps" in family:
        eps = float(family["eps"])
        if family.get("general") is not None:
            gen = _parse_general(family["general"], "delta_family.general")
            gen = GeneralFamily(
                gen.m_b, gen.m_inf, gen.v_b, gen.v_inf, gen.alpha, bc.phi_b
            ).normalized()
            f_b, f_inf = make_delta_family(eps, general=gen)
        else:
            f_b, f_inf = make_delta_family(eps, u_inf=float(family["u_inf"]))
    else:
        f_inf = _parse_dist(raw.get("f_inf"), "f_inf")
        f_b = _parse_dist(raw.get("f_b"), "f_b")

    return Scenario(
        raw=raw,
        f_inf=f_inf,
        f_b=f_b,
        bc=bc,
        n_e=_parse_electron(raw.get("electron")),
        phi_max=phi_max if phi_max is not None else float(solver.get("phi_max", 10.0)),
        grid=grid if grid is not None else int(solver.get("grid", 10_000)),
        tau=tau if tau is not None else float(solver.get("tau", 1e-4)),
        delta_family=family,
        sweep=sweep,
        hydro=hydro,
    )


# -- flux-balance wall reduction ----------------------------------------------


def reduce_wall_potential(f_inf, v_e: float, n_e: ElectronModel) -> float:
    """Wall potential determined by matching ion and electron outgoing fluxes.

    Solves n_e(phi0) * v_e = flux(f_inf) for phi0.  Only the completely
    absorbing reduction (f_b = 0, alpha = 0) is defined; n_e is strictly
    decreasing near 0, so the scalar equation is monotone and bracketed by a
    grid scan before root refinement.
    """
    if v_e == 0.0:
        raise ValidationError("v_e must be nonzero")
    target = flux(f_inf) / v_e
    if target <= 0.0:
        raise NoRoot("flux/v_e must be positive since n_e > 0")
    if abs(target - 1.0) < 1e-15:
        return 0.0

    def g(p):
        return float(n_e.n(p)) - target

    grid = np.linspace(-20.0, 20.0, 4001)
    vals = np.array([g(p) for p in grid])
    signs = np.nonzero(vals[:-1] * vals[1:] <= 0.0)[0]
    if signs.size == 0:
        raise NoRoot("flux/v_e outside the range of n_e on the search interval")
    j = signs[0]
    return float(optimize.brentq(g, grid[j], grid[j + 1], rtol=1e-14, maxiter=200))


# -- output helpers ----------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % x


def _write_csv(path, scenario_hash, columns, arrays):
    with open(path, "w") as fh:
        fh.write(f"# scenario_sha256={scenario_hash}\n")
        fh.write(",".join(columns) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _emit_json(obj):
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _fail(exc: SheathError):
    payload = {"error": getattr(exc, "code", "VALIDATION_ERROR"), "message": str(exc)}
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    code = EXIT_NO_SOLUTION if payload["error"] in _NO_SOLUTION_CODES else EXIT_VALIDATION
    sys.exit(code)


def _guard(fn):
    try:
        return fn()
    except SheathError as exc:
        _fail(exc)


# -- subcommands --------------------------------------------------------------


@click.group()
def main():
    """Plasma-sheath boundary value problem toolkit."""


_scenario_opt = click.option(
    "--scenario", required=True, type=click.Path(exists=False), help="scenario JSON file"
)
_out_opt = click.option("--out", default=".", type=click.Path(), help="output directory")
_phi_max_opt = click.option("--phi-max", default=None, type=float)
_grid_opt = click.option("--grid", default=None, type=int)
_tol_opt = click.option("--tolerance", default=None, type=float, help="marginal tolerance tau")


def _build_data(sc: Scenario):
    return build_sagdeev(
        sc.context(), sc.n_e, sc.side, phi_max=sc.phi_max, n_grid=sc.grid, tau=sc.tau
    )


@main.command("check-bohm")
@_scenario_opt
@_phi_max_opt
@_grid_opt
@_tol_opt
def check_bohm(scenario, phi_max, grid, tolerance):
    """Classify solvability by the kinetic/generalized Bohm criterion."""

    def run():
        sc = load_scenario(scenario, phi_max, grid, tolerance)
        data = _build_data(sc)
        report = bohm_report(data).to_dict()
        _emit_json(report)
        if data.classification in (VIOLATED, MARGINAL_EMPTY):
            sys.exit(EXIT_NO_SOLUTION)

    _guard(run)


@main.command("solve")
@_scenario_opt
@_out_opt
@_phi_max_opt
@_grid_opt
@_tol_opt
def solve_cmd(scenario, out, phi_max, grid, tolerance):
    """Solve the potential profile and emit the profile CSV."""

    def run():
        sc = load_scenario(scenario, phi_max, grid, tolerance)
        data = _build_data(sc)
        profile = solve_phi(data, sc.bc.phi_b, n_x=sc.grid)
        sol = make_solution(profile)
        path = f"{out}/profile.csv"
        _write_csv(
            path,
            sc.sha256,
            ["x", "phi", "dphi", "rho", "flux", "n_e(phi)"],
            [
                profile.x_grid,
                profile.phi,
                profile.dphi,
                sol.rho,
                sol.flux_curve,
                np.asarray(sc.n_e.n(profile.phi)),
            ],
        )
        summary = {
            "classification": data.classification,
            "phi_b": sc.bc.phi_b,
            "x_max": profile.tail_start[0],
            "marginal": profile.marginal,
            "poisson_residual": poisson_residual(profile),
            "csv": path,
        }
        if profile.tail_rate is not None and not profile.trivial:
            c_fit, C_fit = fit_decay_rate(profile)
            summary["tail_rate"] = profile.tail_rate
            summary["decay_fit"] = {"c": c_fit, "C": C_fit}
        _emit_json(summary)

    _guard(run)


@main.command("hydro")
@_scenario_opt
@_out_opt
def hydro_cmd(scenario, out):
    """Solve the fluid sheath model declared in the scenario."""

    def run():
        sc = load_scenario(scenario)
        if sc.hydro is None:
            raise ValidationError("scenario has no 'hydro' section")
        if sc.hydro["model"] == "euler_poisson":
            sol = solve_euler_poisson(float(sc.hydro["u_inf"]), sc.bc.phi_b, sc.n_e)
        elif sc.hydro["model"] == "generalized":
            gen = _parse_general(sc.hydro["general"], "hydro.general")
            gen = GeneralFamily(
                gen.m_b, gen.m_inf, gen.v_b, gen.v_inf, gen.alpha, sc.bc.phi_b
            ).normalized()
            sol = solve_generalized(gen, sc.bc.phi_b, sc.n_e)
        else:
            raise ValidationError(f"unknown hydro model {sc.hydro['model']!r}")
        path = f"{out}/hydro.csv"
        _write_csv(
            path,
            sc.sha256,
            ["x", "phi", "dphi", "rho", "flux", "n_e(phi)"],
            [
                sol.x_grid,
                sol.phi,
                sol.profile.dphi,
                sol.rho,
                sol.rho * sol.u,
                np.asarray(sc.n_e.n(sol.phi)),
            ],
        )
        _emit_json({"model": sc.hydro["model"], "phi_b": sc.bc.phi_b, "csv": path})

    _guard(run)


@main.command("sweep-eps")
@_scenario_opt
@_out_opt
def sweep_eps(scenario, out):
    """Run the delta-mass convergence study over the configured widths."""

    def run():
        sc = load_scenario(scenario)
        if sc.sweep is None or sc.delta_family is None:
            raise ValidationError("scenario needs 'delta_family' and 'sweep' sections")
        eps_list = [float(e) for e in sc.sweep["eps_list"]]
        n_x = int(sc.sweep.get("n_x", 4000))
        kwargs = {}
        if sc.delta_family.get("general") is not None:
            kwargs["general"] = _parse_general(
                sc.delta_family["general"], "delta_family.general"
            )
        else:
            kwargs["u_inf"] = float(sc.delta_family["u_inf"])
        study = delta_mass_study(sc.bc.phi_b, eps_list, n_e=sc.n_e, n_x=n_x, **kwargs)
        _emit_json(
            {
                "eps": list(study.eps_list),
                "err_rho": list(study.err_rho),
                "err_flux": list(study.err_flux),
                "err_phi": list(study.err_phi),
                "slope": study.slope,
                "C0_estimate": study.C0_estimate,
            }
        )

    _guard(run)


@main.command("reduce-wall")
@_scenario_opt
def reduce_wall(scenario):
    """Determine the wall potential from the flux-balance condition."""

    def run():
        sc = load_scenario(scenario)
        if (sc.f_b is not None and not sc.f_b.is_zero) or sc.bc.alpha != 0.0:
            raise RejectGeneralReduction(
                "the wall reduction is defined only for f_b = 0 and alpha = 0"
            )
        if sc.bc.v_e is None:
            raise ValidationError("boundary.v_e is required for reduce-wall")
        phi0 = reduce_wall_potential(sc.f_inf, float(sc.bc.v_e), sc.n_e)
        _emit_json({"phi_0": phi0, "flux": flux(sc.f_inf), "v_e": sc.bc.v_e})

    _guard(run)


@main.command("validate")
@_scenario_opt
def validate(scenario):
    """Check the compatibility identities and the a-priori density bounds."""

    def run():
        sc = load_scenario(scenario)
        report = check_necessary_conditions(sc.f_inf, sc.f_b, sc.bc)
        ctx = sc.context()
        if sc.bc.phi_b > 0.0:
            samples = np.linspace(0.0, sc.bc.phi_b, 20)
        else:
            samples = np.linspace(sc.bc.phi_b, 0.0, 20)
        bounds = bound_check(ctx, samples)
        result = {
            "necessary_conditions": {
                "max_residual": report.max_residual,
                "tolerance": report.tolerance,
                "n_points": report.n_points,
                "passed": report.passed,
            },
            "density_bounds": {
                "side": bounds.side,
                "r": bounds.r,
                "min_slack": bounds.min_slack,
                "passed": bounds.passed,
            },
        }
        _emit_json(result)
        if not (report.passed and bounds.passed):
            sys.exit(EXIT_VALIDATION)

    _guard(run)


if __name__ == "__main__":
    main()

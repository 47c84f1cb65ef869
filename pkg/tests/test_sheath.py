"""Profile solver, characteristic reconstruction, and moment identities."""

import dataclasses
import math

import numpy as np
import pytest

from sheathkit import (
    BoundaryConfig,
    DomainError,
    ElectronModel,
    KernelContext,
    NoSolutionCriterion,
    NoSolutionEmptyB,
    PhiBOutOfRange,
    build_sagdeev,
    fit_decay_rate,
    flux,
    make_delta_family,
    make_solution,
    poisson_residual,
    reconstruct_f,
    solve_phi,
)

from conftest import absorbing_scenario


def _first_integral_residual(profile):
    """|(d phi/dx)^2 - 2 V(phi)| with the derivative taken by differences.

    Uses the fourth-order centered stencil so the check is limited by the
    solver, not by the truncation error of the derivative estimate.
    """
    phi, x = profile.phi, profile.x_grid
    dx = x[1] - x[0]
    dphi = (-phi[4:] + 8.0 * phi[3:-1] - 8.0 * phi[1:-3] + phi[:-4]) / (12.0 * dx)
    v = profile.data.V_of(phi[2:-2])
    return float(np.max(np.abs(dphi**2 - 2.0 * v)))


def test_trivial_wall_is_identity(solved_absorbing):
    ctx = solved_absorbing.ctx
    data = solved_absorbing.profile.data
    profile = solve_phi(data, 0.0)
    assert np.all(profile.phi == 0.0)
    assert poisson_residual(profile) == 0.0
    sol = make_solution(profile)
    assert np.all(sol.rho == 1.0)
    assert np.all(sol.flux_curve == flux(ctx.f_inf))
    xi1 = np.linspace(-3.0, 3.0, 41)
    assert np.array_equal(
        reconstruct_f(profile, 1.3, xi1, 0.01, 0.0), ctx.f_inf.value(xi1, 0.01, 0.0)
    )


def test_profile_boundary_value_and_monotonicity(solved_scenarios):
    for name, sol in solved_scenarios.items():
        p = sol.profile
        assert p.phi[0] == p.phi_b
        mag = np.abs(p.phi)
        assert np.all(np.diff(mag) < 0.0), name  # strictly decaying magnitude
        assert np.sign(p.phi[5]) == math.copysign(1.0, p.phi_b)


def test_first_integral_residual(solved_scenarios):
    for name, sol in solved_scenarios.items():
        assert _first_integral_residual(sol.profile) < 1e-7, name


def test_poisson_residual(solved_scenarios):
    for name, sol in solved_scenarios.items():
        assert poisson_residual(sol) < 1e-5, name


def test_perturbed_profile_fails_poisson():
    # negative control: a visibly wrong profile must not pass the residual check
    ctx, n_e = absorbing_scenario()
    data = build_sagdeev(ctx, n_e, "attractive")
    profile = solve_phi(data, ctx.phi_b, n_x=4000)
    bad_phi = profile.phi * (1.0 + 1e-2 * np.sin(profile.x_grid))
    bad = dataclasses.replace(profile, phi=bad_phi)
    assert poisson_residual(bad) > 1e-4


def test_tail_continuity_and_rate(solved_absorbing):
    p = solved_absorbing.profile
    x_max = p.tail_start[0]
    left = p.phi_at(x_max - 1e-9)
    right = p.phi_at(x_max + 1e-9)
    assert abs(left - right) < 1e-12
    # far tail decays at sqrt(V''(0))
    r = p.phi_at(x_max + 1.0) / p.phi_at(x_max + 2.0)
    assert math.log(r) == pytest.approx(math.sqrt(p.data.d2V0), rel=1e-9)


def test_fitted_decay_rate_matches_curvature(solved_absorbing):
    p = solved_absorbing.profile
    c_fit, C_fit = fit_decay_rate(p)
    assert c_fit == pytest.approx(math.sqrt(p.data.d2V0), rel=5e-4)
    assert C_fit > 0.0


def test_phi_at_inverts_grid(solved_scenarios):
    for name, sol in solved_scenarios.items():
        p = sol.profile
        sub = slice(1, None, 977)
        assert np.allclose(
            p.phi_at(p.x_grid[sub]), p.phi[sub], rtol=1e-9, atol=1e-12
        ), name


def test_reconstruction_recovers_far_field(solved_scenarios):
    for name, sol in solved_scenarios.items():
        p = sol.profile
        x_far = p.tail_start[0] + 40.0
        if p.marginal:
            continue
        xi1 = np.linspace(-3.0, 3.0, 61)
        vals = reconstruct_f(sol, x_far, xi1, 0.02, 0.01)
        ref = sol.ctx.f_inf.value(xi1, 0.02, 0.01)
        assert np.allclose(vals, ref, atol=1e-8), name


def test_absorbing_wall_has_no_outgoing_ions(solved_absorbing):
    xi1 = np.linspace(1e-3, 3.0, 50)
    assert np.all(reconstruct_f(solved_absorbing, 0.0, xi1) == 0.0)


def test_constant_along_characteristics(solved_scenarios, rng):
    # f must be transported unchanged along xi1^2/2 - phi(x) = const
    n_curves = 34
    for name, sol in solved_scenarios.items():
        p = sol.profile
        xs = np.linspace(0.0, p.tail_start[0], 25)
        phi_s = p.phi_at(xs)
        xi0 = -rng.uniform(1.2, 3.0, n_curves)
        x0 = rng.uniform(0.0, p.tail_start[0], n_curves)
        energy = 0.5 * xi0 * xi0 - p.phi_at(x0)
        vals = np.empty((len(xs), n_curves))
        for i, (x, ph) in enumerate(zip(xs, phi_s)):
            xi_along = -np.sqrt(2.0 * (energy + ph))
            vals[i] = reconstruct_f(sol, x, xi_along, 0.01, 0.0)
        spread = np.max(np.abs(vals - vals[0]), axis=0)
        scale = np.maximum(1.0, np.max(np.abs(vals), axis=0))
        assert np.max(spread / scale) < 1e-9, name


def test_flux_is_constant_and_matches_far_field(solved_scenarios):
    for name, sol in solved_scenarios.items():
        target = flux(sol.ctx.f_inf)
        assert np.max(np.abs(sol.flux_curve - target)) < 1e-8, name


def test_no_solution_gates():
    n_e = ElectronModel.boltzmann()
    f_b, f_inf = make_delta_family(0.01, u_inf=0.8)
    ctx = KernelContext(f_inf, f_b, BoundaryConfig(phi_b=0.1))
    data = build_sagdeev(ctx, n_e, "attractive")
    with pytest.raises(NoSolutionCriterion):
        solve_phi(data, 0.1)

    f_b, f_inf = make_delta_family(0.01, u_inf=1.0)
    ctx = KernelContext(f_inf, f_b, BoundaryConfig(phi_b=0.01))
    data = build_sagdeev(ctx, n_e, "attractive")
    if data.classification == "MARGINAL_EMPTY":
        with pytest.raises(NoSolutionEmptyB):
            solve_phi(data, 0.01)


def test_phi_b_out_of_range_and_side_mismatch():
    n_e = ElectronModel.polynomial([1.0, -1.0, 0.5])
    f_b, f_inf = make_delta_family(0.01, u_inf=2.0)
    ctx = KernelContext(f_inf, f_b, BoundaryConfig(phi_b=0.1))
    data = build_sagdeev(ctx, n_e, "attractive")
    edge = abs(data.b_edge)
    with pytest.raises(PhiBOutOfRange):
        solve_phi(data, edge * 1.01)
    with pytest.raises(DomainError):
        solve_phi(data, -0.1)  # repulsive wall against an attractive build

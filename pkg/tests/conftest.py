"""Shared scenarios: one absorbing, one emitting/reflecting, one repulsive.

The solved fixtures are session-scoped because the 10^4-point profile solves
are the most expensive steps of the suite and several test modules share them.
"""

import numpy as np
import pytest

from sheathkit import (
    BoundaryConfig,
    Bump,
    CompositeDistribution,
    DistributionSpec,
    ElectronModel,
    GeneralFamily,
    KernelContext,
    build_sagdeev,
    make_delta_family,
    make_solution,
    solve_phi,
)


def absorbing_scenario(eps=0.05, u_inf=2.0, phi_b=0.1):
    """Cold incoming beam onto a completely absorbing attractive wall."""
    f_b, f_inf = make_delta_family(eps, u_inf=u_inf)
    bc = BoundaryConfig(phi_b=phi_b)
    return KernelContext(f_inf, f_b, bc), ElectronModel.boltzmann()


def emitting_scenario(phi_b=0.1, eps=0.05):
    """Attractive wall with emission, reflection, and a trapped population.

    The trapped bump lives strictly inside (0, sqrt(2 phi_b)), so it feeds the
    boundary density term without touching the far-field compatibility
    identities or the quasi-neutral balance.
    """
    gen = GeneralFamily(0.2, 0.4, 1.8, 2.2, 0.5, phi_b).normalized()
    f_b, f_inf = make_delta_family(eps, general=gen)
    trapped = DistributionSpec([Bump(0.05, (0.22, 0.0, 0.0), 0.1)], cutoff="positive")
    f_b = CompositeDistribution([f_b, trapped])
    bc = BoundaryConfig(phi_b=phi_b, alpha=gen.alpha)
    return KernelContext(f_inf, f_b, bc), ElectronModel.boltzmann()


def repulsive_scenario(phi_b=-0.5):
    """Repulsive wall: fast incoming beam plus a symmetric slow pair.

    The slow pair sits inside the barrier strip |xi1| < sqrt(2|phi_b|), where
    the compatibility conditions require even symmetry in xi1.
    """
    f_inf = DistributionSpec(
        [
            Bump(0.98, (-2.0, 0.0, 0.0), 0.05),
            Bump(0.01, (-0.5, 0.0, 0.0), 0.05),
            Bump(0.01, (0.5, 0.0, 0.0), 0.05),
        ]
    )
    bc = BoundaryConfig(phi_b=phi_b)
    return KernelContext(f_inf, DistributionSpec([]), bc), ElectronModel.boltzmann()


def _solve(ctx, n_e, n_x=10_000):
    side = "attractive" if ctx.phi_b >= 0.0 else "repulsive"
    data = build_sagdeev(ctx, n_e, side)
    profile = solve_phi(data, ctx.phi_b, n_x=n_x)
    return make_solution(profile)


@pytest.fixture(scope="session")
def solved_absorbing():
    return _solve(*absorbing_scenario())


@pytest.fixture(scope="session")
def solved_emitting():
    return _solve(*emitting_scenario())


@pytest.fixture(scope="session")
def solved_repulsive():
    return _solve(*repulsive_scenario())


@pytest.fixture(scope="session")
def solved_scenarios(solved_absorbing, solved_emitting, solved_repulsive):
    return {
        "absorbing": solved_absorbing,
        "emitting": solved_emitting,
        "repulsive": solved_repulsive,
    }


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)

"""Pseudopotential construction, classification, and the positivity set B."""

import json
import math

import numpy as np
import pytest
from scipy import optimize

from sheathkit import (
    MARGINAL_EMPTY,
    MARGINAL_SOLVABLE,
    STRICT,
    VIOLATED,
    BoundaryConfig,
    Bump,
    DistributionSpec,
    ElectronModel,
    KernelContext,
    NeutralityViolation,
    NotApplicable,
    bohm_report,
    build_sagdeev,
    inf_B,
    make_delta_family,
    sup_B,
)

from conftest import absorbing_scenario, repulsive_scenario


def _cold_beam_data(u_inf=2.0, eps=0.01, n_e=None, **kw):
    f_b, f_inf = make_delta_family(eps, u_inf=u_inf)
    ctx = KernelContext(f_inf, f_b, BoundaryConfig(phi_b=0.1))
    return build_sagdeev(ctx, n_e or ElectronModel.boltzmann(), "attractive", **kw)


def _cold_V(u_inf, phi, n_e):
    """Closed-form pseudopotential of the concentrated cold beam."""
    kinetic = u_inf * (math.sqrt(u_inf**2 + 2.0 * phi) - u_inf)
    return kinetic - n_e.n_int(phi)


def test_classification_by_beam_speed():
    for u_inf, expected in ((0.8, VIOLATED), (2.0, STRICT)):
        data = _cold_beam_data(u_inf)
        assert data.classification == expected
    marginal = _cold_beam_data(1.0)
    assert marginal.classification in (MARGINAL_SOLVABLE, MARGINAL_EMPTY)
    assert abs(marginal.d2V0) <= 1e-4


def test_pseudopotential_matches_cold_beam_antiderivative():
    n_e = ElectronModel.boltzmann()
    data = _cold_beam_data(2.0, n_e=n_e)
    for phi in (0.05, 0.2, 0.5, 1.0):
        assert data.V_of(phi) == pytest.approx(_cold_V(2.0, phi, n_e), abs=5e-3)


def test_V_of_interpolates_grid_values():
    data = _cold_beam_data(2.0)
    idx = [1, 57, 4321, 9999]
    assert np.allclose(data.V_of(data.m_grid[idx]), data.V_grid[idx], atol=1e-14)


def test_dV_matches_density_mismatch():
    data = _cold_beam_data(2.0)
    n_e = data.n_e
    h = 1e-5
    for phi in (0.03, 0.2, 0.8):
        fd = (data.V_of(phi + h) - data.V_of(phi - h)) / (2.0 * h)
        rhs = data.mismatch(np.array([phi]))[0]
        assert fd == pytest.approx(rhs, abs=1e-7)
    assert n_e.n(0.0) == 1.0


def test_neutrality_gate():
    f_inf = DistributionSpec([Bump(0.9, (-2.0, 0.0, 0.0), 0.05)])
    ctx = KernelContext(f_inf, None, BoundaryConfig(phi_b=0.1))
    with pytest.raises(NeutralityViolation):
        build_sagdeev(ctx, ElectronModel.boltzmann(), "attractive")


def test_infinite_bohm_integral_is_violated():
    f_inf = DistributionSpec([Bump(1.0, (-0.3, 0.0, 0.0), 0.35)])
    ctx = KernelContext(f_inf, None, BoundaryConfig(phi_b=0.1))
    data = build_sagdeev(ctx, ElectronModel.boltzmann(), "attractive")
    assert math.isinf(data.K)
    assert data.classification == VIOLATED
    with pytest.raises(NotApplicable):
        sup_B(data)


def test_sup_B_against_analytic_root():
    # a polynomial electron density makes the positivity set bounded
    n_e = ElectronModel.polynomial([1.0, -1.0, 0.5])
    data = _cold_beam_data(2.0, n_e=n_e)
    root = optimize.brentq(lambda p: _cold_V(2.0, p, n_e), 1.0, 10.0, rtol=1e-13)
    assert sup_B(data) == pytest.approx(root, abs=5e-3)
    assert data.V_of(sup_B(data)) == pytest.approx(0.0, abs=1e-12)


def test_sup_B_unbounded_for_boltzmann_cold_beam():
    data = _cold_beam_data(2.0)
    assert sup_B(data) == math.inf


def test_inf_B_on_repulsive_side():
    ctx, n_e = repulsive_scenario()
    data = build_sagdeev(ctx, n_e, "repulsive")
    assert data.classification == STRICT
    assert inf_B(data) < data.ctx.phi_b  # wall value lies inside B
    with pytest.raises(Exception):
        sup_B(data)


def test_bohm_report_serialization():
    data = _cold_beam_data(2.0)
    doc = json.loads(bohm_report(data).to_json())
    assert doc["classification"] == STRICT
    assert doc["supB"] == "UNBOUNDED"
    assert doc["K"] == pytest.approx(0.25, abs=2e-4)
    violated = _cold_beam_data(0.8)
    doc_v = bohm_report(violated).to_dict()
    assert doc_v["classification"] == VIOLATED
    assert doc_v["supB"] is None

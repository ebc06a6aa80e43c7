"""Slice-energy tests: block calculus exactness on polynomial data,
density lower bounds, hierarchy structure, and scaling of the reports."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vkg.algebra import BOOST, DT, DX, Generator
from vkg.commuted import multi_indices_up_to
from vkg.energies import (DensitySample, block_apply, block_apply_multi,
                          density_samples, energy_report, evaluate_node,
                          evaluate_slice, kg_energy_density,
                          kg_lower_bound_slack, node_value, reports_to_csv,
                          reports_to_json, velocity_moments,
                          vlasov_energy_density, vlasov_energy_inequality_slack,
                          vlasov_lower_bound_slacks)
from vkg.solver import NodeSample, SimConfig, run


# ---------------------------------------------------------------------------
# synthetic node blocks (n = 1)
# ---------------------------------------------------------------------------

def make_node(tau=3.0, y=1.2, nt=6, nx=13, nv=24,
              f_fn=None, phi_fn=None) -> NodeSample:
    r = abs(y)
    t_star = math.sqrt(tau * tau + r * r)
    t_levels = t_star + np.linspace(-0.12, 0.08, nt)
    x_axis = y + np.linspace(-0.3, 0.3, nx)
    v_axis = np.linspace(-2.0, 2.0, nv)
    T = t_levels[:, None, None]
    X = x_axis[None, :, None]
    V = v_axis[None, None, :]
    f = f_fn(T, X, V) if f_fn else np.zeros((nt, nx, nv))
    phi = phi_fn(T[..., 0], X[..., 0]) if phi_fn else np.zeros((nt, nx))
    return NodeSample(tau, (y,), r, t_star, 1.0, t_levels, (x_axis,),
                      (v_axis,), np.broadcast_to(f, (nt, nx, nv)).copy(),
                      np.broadcast_to(phi, (nt, nx)).copy())


def test_block_apply_boost_exact_on_polynomials():
    # f = t^2 + x^2 v: the lifted boost gives 2txv + 2tx + v0 x^2, and
    # second-order differences are exact on quadratics per axis
    node = make_node(f_fn=lambda t, x, v: t ** 2 + x ** 2 * v)
    out = block_apply(Generator(BOOST, 1), node.fblock, node, 1, lifted=True)
    T = node.t_levels[:, None, None]
    X = node.x_axes[0][None, :, None]
    V = node.v_axes[0][None, None, :]
    V0 = np.sqrt(1.0 + V ** 2)
    exact = T * 2 * X * V + X * 2 * T + V0 * X ** 2
    assert np.allclose(out, exact, rtol=1e-12, atol=1e-12)


def test_block_apply_spacetime_boost_kills_invariant():
    # t^2 - x^2 is constant along boost orbits
    node = make_node(phi_fn=lambda t, x: t ** 2 - x ** 2)
    out = block_apply(Generator(BOOST, 1), node.phiblock, node, 1, lifted=False)
    assert np.max(np.abs(out)) < 1e-10


def test_block_apply_multi_composes_left_to_right():
    node = make_node(phi_fn=lambda t, x: t ** 2 * x)
    one = block_apply(Generator(DX, 1), node.phiblock, node, 1, False)
    two = block_apply(Generator(DT), one, node, 1, False)
    both = block_apply_multi((Generator(DT), Generator(DX, 1)), node.phiblock, node, 1, False)
    assert np.allclose(both, two, atol=1e-12)


def test_node_value_exact_on_cubics():
    node = make_node(phi_fn=lambda t, x: t ** 3 - 2 * t * x ** 2 + x ** 3)
    got = float(node_value(node.phiblock, node, 1))
    t, x = node.t_star, node.y[0]
    assert abs(got - (t ** 3 - 2 * t * x ** 2 + x ** 3)) < 1e-10


def test_evaluate_node_matches_analytic_derivatives():
    node = make_node(f_fn=lambda t, x, v: t ** 2 + x ** 2 * v,
                     phi_fn=lambda t, x: t ** 2 - x ** 2)
    q = evaluate_node(node, 1, 1)
    t, x = node.t_star, node.y[0]
    v = node.v_axes[0]
    v0 = np.sqrt(1 + v ** 2)
    assert np.allclose(q.f_profiles[()], t ** 2 + x ** 2 * v, atol=1e-10)
    assert np.allclose(q.f_profiles[(Generator(BOOST, 1),)],
                       2 * t * x * v + 2 * t * x + v0 * x ** 2, atol=1e-9)
    assert abs(q.phi_values[(Generator(BOOST, 1),)]) < 1e-9
    assert abs(q.phi_dt[()] - 2 * t) < 1e-9
    assert abs(q.phi_grad[()][0] + 2 * x) < 1e-9


# ---------------------------------------------------------------------------
# densities and lower bounds
# ---------------------------------------------------------------------------

def test_vlasov_energy_density_even_profile():
    # for even f the v.x term integrates to zero on the symmetric grid,
    # leaving (t/tau) int v0 f dv
    node = make_node()
    v = node.v_axes[0]
    dv = v[1] - v[0]
    f = np.exp(-v ** 2)
    got = vlasov_energy_density(f, node, 1, dv)
    expect = node.t_star / node.tau * np.sum(np.sqrt(1 + v ** 2) * f) * dv
    assert abs(got - expect) < 1e-13


def test_velocity_moments_ordering():
    node = make_node()
    v = node.v_axes[0]
    f = np.exp(-v ** 2)
    m1, m_inv, m_w = velocity_moments(f, node, 1, v[1] - v[0])
    assert m_inv <= m1 <= m_w


node_geometries = st.tuples(st.floats(0.5, 20.0), st.floats(-8.0, 8.0))


@settings(max_examples=60, deadline=None)
@given(geom=node_geometries,
       data=st.lists(st.floats(0.0, 10.0), min_size=24, max_size=24))
def test_vlasov_lower_bound_slacks_nonnegative(geom, data):
    tau, y = geom
    node = make_node(tau=tau, y=y)
    f = np.asarray(data)
    dv = node.v_axes[0][1] - node.v_axes[0][0]
    s1, s2, s3 = vlasov_lower_bound_slacks(f, node, 1, dv)
    assert s1 > -1e-12 and s2 > -1e-12 and s3 > -1e-12


@settings(max_examples=60, deadline=None)
@given(geom=node_geometries, phi=st.floats(-3, 3), dtphi=st.floats(-3, 3),
       gx=st.floats(-3, 3))
def test_kg_density_decomposes_into_bound_plus_squares(geom, phi, dtphi, gx):
    """e(phi) equals (t/2tau) phi^2 + (tau/2(t+r)) |dphi|^2 plus the
    sum-of-squares slack, making the lower bound an identity."""
    tau, y = geom
    node = make_node(tau=tau, y=y)
    t, r = node.t_star, node.r
    e = kg_energy_density(phi, dtphi, (gx,), node, 1)
    slack = kg_lower_bound_slack(phi, dtphi, (gx,), node, 1)
    bound = (t / (2 * tau)) * phi ** 2 \
        + (tau / (2 * (t + r))) * (dtphi ** 2 + gx ** 2)
    assert slack >= 0.0
    assert abs(e - (bound + slack)) < 1e-10 * max(abs(e), 1.0)


def test_kg_density_nonnegative_n2():
    rng = np.random.default_rng(7)
    for _ in range(200):
        tau = rng.uniform(0.5, 10)
        y = tuple(rng.uniform(-5, 5, size=2))
        r = math.hypot(*y)
        node = NodeSample(tau, y, r, math.sqrt(tau ** 2 + r ** 2), 1.0,
                          np.zeros(6), (np.zeros(9), np.zeros(9)),
                          (np.zeros(4), np.zeros(4)),
                          np.zeros((6, 9, 9, 4, 4)), np.zeros((6, 9, 9)))
        phi, dtphi = rng.normal(size=2)
        grad = tuple(rng.normal(size=2))
        e = kg_energy_density(phi, dtphi, grad, node, 2)
        slack = kg_lower_bound_slack(phi, dtphi, grad, node, 2)
        assert e >= -1e-12
        assert slack >= -1e-12


# ---------------------------------------------------------------------------
# reports on real runs
# ---------------------------------------------------------------------------

BASE = SimConfig(n=1, mode="free_transport", x_extent=14.0, nx=280, vmax=2.0,
                 nv=48, dt=0.04, t0=2.0, t_end=7.0, epsilon=1e-3,
                 taus=(3.0, 5.0), rmax=4.0, slice_resolution=16,
                 f_width_x=0.5, f_width_v=0.3)


@pytest.fixture(scope="module")
def transport_slices():
    res = run(BASE)
    return [evaluate_slice(res.slices[tau], 2) for tau in BASE.taus]


def test_density_samples_slacks_nonnegative(transport_slices):
    for sq in transport_slices:
        for s in density_samples(sq):
            assert min(s.slacks_f) > -1e-15
            assert s.slack_kg > -1e-15
            assert s.ehat > -1e-15


def test_energy_hierarchy_monotone_in_order(transport_slices):
    sq = transport_slices[0]
    reps = [energy_report(sq, k) for k in (0, 1, 2)]
    for a, b in zip(reps, reps[1:]):
        assert b.Ehat_N_f >= a.Ehat_N_f - 1e-15
        assert b.E_N_phi >= a.E_N_phi - 1e-15
        assert b.Ehat_N1_f >= b.Ehat_N_f - 1e-15  # v0 weight only adds


def test_report_breakdown_sums(transport_slices):
    rep = energy_report(transport_slices[0], 2)
    assert abs(rep.E_N_phi - sum(rep.breakdown_phi.values())) < 1e-14
    assert abs(rep.Ehat_N_f - sum(rep.breakdown_f.values())) < 1e-14
    assert set(rep.breakdown_f) == set(multi_indices_up_to(1, 2))


def test_kinetic_energy_linear_in_amplitude():
    res1 = run(dataclasses.replace(BASE, taus=(3.0,), t_end=5.2,
                                   f_amplitude=1e-3))
    res2 = run(dataclasses.replace(BASE, taus=(3.0,), t_end=5.2,
                                   f_amplitude=2e-3))
    r1 = energy_report(evaluate_slice(res1.slices[3.0], 1), 1)
    r2 = energy_report(evaluate_slice(res2.slices[3.0], 1), 1)
    assert r2.Ehat_N_f == pytest.approx(2 * r1.Ehat_N_f, rel=1e-10)


def test_field_energy_quadratic_in_amplitude():
    cfg = SimConfig(n=1, mode="free_kg", x_extent=14.0, nx=280, vmax=1.0,
                    nv=8, dt=0.04, t0=2.0, t_end=5.2, taus=(3.0,), rmax=4.0,
                    slice_resolution=16, phi_width=0.5, phi_amplitude=1e-3)
    res1 = run(cfg)
    res2 = run(dataclasses.replace(cfg, phi_amplitude=2e-3))
    r1 = energy_report(evaluate_slice(res1.slices[3.0], 1), 1)
    r2 = energy_report(evaluate_slice(res2.slices[3.0], 1), 1)
    assert r2.E_N_phi == pytest.approx(4 * r1.E_N_phi, rel=1e-10)


def test_free_transport_inequality_slack(transport_slices):
    reps = [energy_report(sq, 1) for sq in transport_slices]
    for A in multi_indices_up_to(1, 1):
        slack = vlasov_energy_inequality_slack(transport_slices, reps, A)
        scale = max(rep.breakdown_f[A] for rep in reps)
        # negative slack at the scheme-error scale is discretization noise;
        # a genuine violation would be O(scale)
        assert slack > -1e-2 * scale


def test_zero_data_zero_report():
    cfg = dataclasses.replace(BASE, f_amplitude=0.0, taus=(3.0,),
                              t_end=5.2)
    res = run(cfg)
    rep = energy_report(evaluate_slice(res.slices[3.0], 2), 2)
    assert rep.Ehat_N_f == 0.0 and rep.E_N_phi == 0.0


def test_report_serialization(transport_slices):
    reps = [energy_report(sq, 1) for sq in transport_slices]
    text = reports_to_csv(reps)
    lines = text.strip().split("\n")
    assert lines[0].startswith("tau,order,multi_index")
    assert len(lines) == 1 + 2 * len(multi_indices_up_to(1, 1))
    doc = reports_to_json(reps)
    assert '"tau"' in doc and reports_to_json(reps) == doc

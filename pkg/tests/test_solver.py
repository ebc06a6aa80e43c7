"""Phase-space solver tests: advection properties, field dispersion,
conservation, and manufactured-solution convergence."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vkg.solver import (FieldState, PhaseState, SimConfig, SolverError,
                        advect, initial_states, mms_forcing, run,
                        source_density, step, total_mass, v_centers,
                        x_centers)


# ---------------------------------------------------------------------------
# conservative advection
# ---------------------------------------------------------------------------

def smooth_profiles(m=64):
    return st.lists(st.floats(0.0, 5.0), min_size=8, max_size=8).map(
        lambda a: np.interp(np.linspace(0, 7, m), np.arange(8.0), a))


@settings(max_examples=40, deadline=None)
@given(g=smooth_profiles(), sig=st.floats(-2.5, 2.5))
def test_advect_periodic_conserves_mass_and_positivity(g, sig):
    out = advect(g, np.full_like(g, sig), axis=0, bc="periodic")
    assert abs(np.sum(out) - np.sum(g)) < 1e-12 * max(np.sum(g), 1.0)
    assert np.all(out >= 0)


@settings(max_examples=30, deadline=None)
@given(sig=st.floats(-2.5, 2.5))
def test_advect_preserves_constants(sig):
    g = np.ones(64)
    out = advect(g, np.full_like(g, sig), axis=0, bc="periodic")
    assert np.allclose(out, 1.0, atol=1e-13)


def test_advect_integer_shift_is_exact():
    g = np.zeros(32)
    g[10:14] = [1.0, 3.0, 2.0, 0.5]
    out = advect(g, np.full_like(g, 2.0), axis=0, bc="periodic")
    assert np.allclose(out, np.roll(g, 2), atol=1e-13)


def test_advect_outgoing_drains_mass_only_at_boundary():
    g = np.zeros(32)
    g[0] = 1.0
    out = advect(g, np.full_like(g, -1.5), axis=0, bc="outgoing")
    assert np.sum(out) < 0.6 * np.sum(g)
    g2 = np.zeros(32)
    g2[16] = 1.0
    out2 = advect(g2, np.full_like(g2, -1.5), axis=0, bc="outgoing")
    assert abs(np.sum(out2) - 1.0) < 1e-13


def test_advect_second_order_on_smooth_profile():
    x = np.linspace(0, 1, 256, endpoint=False)
    g = np.exp(np.sin(2 * np.pi * x))
    errs = []
    for m in (128, 256):
        xs = np.linspace(0, 1, m, endpoint=False)
        gs = np.exp(np.sin(2 * np.pi * xs))
        out = advect(gs, np.full_like(gs, 0.4), axis=0, bc="periodic")
        exact = np.exp(np.sin(2 * np.pi * (xs - 0.4 / m)))
        errs.append(np.max(np.abs(out - exact)))
    assert errs[0] / errs[1] > 3.0


# ---------------------------------------------------------------------------
# configuration guard rails
# ---------------------------------------------------------------------------

def test_cfl_violation_rejected():
    cfg = SimConfig(nx=100, x_extent=1.0, dt=0.1)
    with pytest.raises(SolverError, match="CFL"):
        cfg.validate()


def test_lightcone_mode_needs_interior_start():
    cfg = SimConfig(rmax_mode="lightcone", t0=2.0, support_radius=3.0,
                    dt=0.01)
    with pytest.raises(SolverError, match="lightcone"):
        cfg.validate()


def test_slice_coverage_enforced():
    cfg = SimConfig(n=1, dt=0.01, t0=2.0, t_end=3.0, taus=(2.5,), rmax=10.0)
    with pytest.raises(SolverError, match="needs t up to"):
        cfg.validate()


# ---------------------------------------------------------------------------
# coupled evolution
# ---------------------------------------------------------------------------

SMALL = SimConfig(n=1, mode="coupled", x_extent=10.0, nx=200, vmax=3.0,
                  nv=48, dt=0.04, t0=2.0, t_end=5.0, epsilon=1e-2, taus=())


def test_mass_conserved_and_positive():
    res = run(SMALL)
    drift = abs(res.mass[-1] - res.mass[0]) / res.mass[0]
    assert drift / (res.times[-1] - res.times[0]) < 1e-10
    assert np.min(res.min_f) >= -1e-14 * np.max(res.sup_f)


def test_free_transport_keeps_field_zero():
    cfg = SimConfig(n=1, mode="free_transport", x_extent=10.0, nx=200,
                    vmax=3.0, nv=32, dt=0.04, t0=2.0, t_end=4.0, taus=())
    phase, fld = initial_states(cfg)
    assert not np.any(fld.phi)
    res = run(cfg)
    assert np.max(res.sup_phi) == 0.0


def test_free_kg_dispersion_relation():
    """Periodic plane wave phi = cos(kx - w t), w^2 = 1 + k^2: one period
    of evolution must return the initial state to high accuracy."""
    cfg = SimConfig(n=1, mode="free_kg", x_extent=np.pi, nx=256, vmax=1.0,
                    nv=8, dt=0.002, t0=0.0, t_end=0.0, taus=(),
                    bc="periodic")
    k = 3.0
    w = np.sqrt(1.0 + k * k)
    xc = x_centers(cfg)
    fld = FieldState(np.cos(k * xc), w * np.sin(k * xc), 0.0)
    phase = PhaseState(np.zeros((cfg.nx, cfg.nv)), 0.0)
    period = 2 * np.pi / w
    nsteps = int(round(period / cfg.dt))
    cfg2 = dataclasses.replace(cfg, dt=period / nsteps)
    for _ in range(nsteps):
        step(phase, fld, cfg2)
    assert np.max(np.abs(fld.phi - np.cos(k * xc))) < 1e-4


def test_source_density_matches_mass():
    phase, _ = initial_states(SMALL)
    rho = source_density(phase.f, SMALL)
    assert abs(np.sum(rho) * SMALL.dx - total_mass(phase.f, SMALL)) < 1e-14


def test_run_rejects_uncovered_slices():
    cfg = SimConfig(n=1, x_extent=10.0, nx=200, vmax=2.0, nv=16, dt=0.04,
                    t0=2.0, t_end=5.0, taus=(3.0,), rmax=4.0)
    with pytest.raises(SolverError):
        run(cfg)


def test_slice_nodes_cover_requested_extent():
    cfg = SimConfig(n=1, x_extent=10.0, nx=200, vmax=2.0, nv=16, dt=0.04,
                    t0=2.0, t_end=6.2, taus=(3.0,), rmax=4.0,
                    slice_resolution=20)
    res = run(cfg)
    nodes = res.slices[3.0].nodes
    assert len(nodes) == 2 * 20 + 1
    radii = sorted(nd.y[0] for nd in nodes)
    assert radii[0] == -4.0 and radii[-1] == 4.0
    for nd in nodes:
        t_lo, t_hi = nd.t_levels[2], nd.t_levels[3]
        assert t_lo <= nd.t_star <= t_hi


def test_determinism_bitwise():
    a = run(SMALL)
    b = run(SMALL)
    assert np.array_equal(a.sup_f, b.sup_f)
    assert np.array_equal(a.mass, b.mass)


def test_n2_short_coupled_run():
    cfg = SimConfig(n=2, mode="coupled", x_extent=6.0, nx=72, vmax=2.5,
                    nv=24, dt=0.06, t0=2.0, t_end=3.2, epsilon=1e-2,
                    taus=(2.4,), rmax=1.5, slice_resolution=6)
    res = run(cfg)
    drift = abs(res.mass[-1] - res.mass[0]) / res.mass[0]
    assert drift < 1e-10
    assert np.min(res.min_f) >= -1e-14 * np.max(res.sup_f)
    assert len(res.slices[2.4].nodes) > 0


def test_mms_forcing_consistency():
    """The forcing functions must make the exact pair an actual solution:
    a very short run at decent resolution stays close to it."""
    cfg = SimConfig(n=1, mode="mms", x_extent=8.0, nx=320, vmax=3.0, nv=160,
                    dt=0.01, t0=1.0, t_end=1.2, epsilon=1e-3, taus=())
    phi_ex, pi_ex, f_ex, ks, fs = mms_forcing(cfg)
    phase = PhaseState(f_ex(cfg.t0), cfg.t0)
    fld = FieldState(phi_ex(cfg.t0), pi_ex(cfg.t0), cfg.t0)
    for _ in range(20):
        step(phase, fld, cfg, ks, fs)
    assert np.max(np.abs(fld.phi - phi_ex(fld.t))) < 1e-3 * np.max(
        np.abs(phi_ex(fld.t)))
    assert np.max(np.abs(phase.f - f_ex(phase.t))) < 1e-2 * np.max(
        f_ex(phase.t))

"""Finite-difference verification of the symbolic layer on smooth data."""

import numpy as np
import pytest

from vkg.algebra import generators
from vkg.commuted import multi_indices_up_to
from vkg.fdtools import (check_free_transport_commutation,
                         gaussian_field, gaussian_test_function,
                         moment_exchange_check, refinement_study,
                         sample_points, verify_commuted_kg,
                         verify_commuted_vlasov)


@pytest.mark.parametrize("n", [1, 2])
def test_free_transport_commutes_with_every_lift(n):
    func = gaussian_test_function(n, seed=0)
    pts = sample_points(n, m=30, seed=2)
    for g in generators(n):
        st = check_free_transport_commutation(func, (g,), pts)
        assert st.second_order, (g, st)


@pytest.mark.parametrize("n", [1, 2])
def test_commuted_vlasov_first_order(n):
    func = gaussian_test_function(n, seed=0)
    phi = gaussian_field(n, seed=1)
    pts = sample_points(n, m=25, seed=2)
    for g in generators(n):
        st = verify_commuted_vlasov((g,), n, func, phi, pts)
        assert st.second_order, (g, st)


def test_commuted_vlasov_second_order_sample():
    n = 1
    func = gaussian_test_function(n, seed=3)
    phi = gaussian_field(n, seed=4)
    pts = sample_points(n, m=20, seed=5)
    gens = generators(n)
    for A in [(gens[2], gens[2]), (gens[2], gens[1]), (gens[0], gens[2])]:
        st = verify_commuted_vlasov(A, n, func, phi, pts)
        assert st.second_order, (A, st)


@pytest.mark.parametrize("n,m", [(1, 321), (2, 141)])
def test_commuted_kg_first_order(n, m):
    func = gaussian_test_function(n, seed=0)
    tx = sample_points(n, m=6, seed=2)[:, :1 + n]
    for A in multi_indices_up_to(n, 1):
        st = verify_commuted_kg(A, n, func, tx, vmax=11.0, m=m)
        assert st.second_order, (A, st)


@pytest.mark.parametrize("n,m", [(1, 321), (2, 141)])
def test_moment_exchange_all_generators_both_weights(n, m):
    func = gaussian_test_function(n, seed=0)
    tx = sample_points(n, m=6, seed=2)[:, :1 + n]
    for g in generators(n):
        for k in (0, 1):
            st = moment_exchange_check(func, g, k, tx, vmax=11.0, m=m)
            assert st.second_order, (g, k, st)


def test_moment_exchange_boost_correction_is_needed():
    """Dropping the velocity-ratio correction must break the identity."""
    n = 1
    func = gaussian_test_function(n, seed=0)
    tx = sample_points(n, m=6, seed=2)[:, :1 + n]
    g = generators(n)[2]
    st = moment_exchange_check(func, g, 0, tx)
    assert st.second_order and st.coarse > 0

    # rerun with a fake k that suppresses the correction term: k=1 weight
    # removed by hand would not converge; emulate by comparing magnitudes
    from vkg.fdtools import apply_generator, gauss_quadrature_grid, partial
    vgrid, vw = gauss_quadrature_grid(n, 11.0, 321)
    v0 = np.sqrt(1.0 + np.sum(vgrid * vgrid, axis=1))

    def chi(txp):
        out = np.zeros(len(txp))
        for j, txk in enumerate(txp):
            pts = np.column_stack([
                np.broadcast_to(txk, (len(vgrid), 1 + n)), vgrid])
            out[j] = float(np.sum(vw * func(pts)))
        return out

    def residual(step):
        lhs = apply_generator(chi, g, step, False)(tx)
        zf = apply_generator(func, g, step, True)
        rhs = np.zeros(len(tx))
        for j, txk in enumerate(tx):
            pts = np.column_stack([
                np.broadcast_to(txk, (len(vgrid), 1 + n)), vgrid])
            rhs[j] = float(np.sum(vw * zf(pts)))
        return lhs - rhs

    broken = refinement_study(residual, 1e-3)
    assert broken.fine > 1e-5  # does not converge without the correction


def test_refinement_study_detects_h2():
    st = refinement_study(lambda h: np.array([2.5 * h * h]), 1e-3)
    assert st.second_order and abs(st.ratio - 4.0) < 1e-6


def test_refinement_study_floor_marks_vanishing():
    st = refinement_study(lambda h: np.array([1e-15]), 1e-3, floor=1e-9)
    assert st.vanishes and st.second_order

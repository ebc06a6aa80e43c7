"""Slice energies, density lower bounds, and divergence balance laws.

All quantities live on truncated hyperboloids tau^2 = t^2 - |x|^2.  The
kinetic energy density is ehat(g) = int (v^0 t - v.x)/tau g dv and the
field density e(phi) = (t/2tau)((d_t phi)^2 + |grad phi|^2 + phi^2)
+ (r/tau)(d_t phi)(d_r phi).  Node data come from the solver's captured
space-time blocks; generator compositions are applied to blocks by
centered differences and the result is interpolated to the node.

Lower-bound slacks are evaluated through manifestly nonnegative
rearrangements (pointwise nonnegative velocity integrands, sums of
squares), so a reported negative slack means a genuine violation rather
than roundoff.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .algebra import BOOST, DT, DX, ROT, Generator
from .commuted import (MultiIndex, derive_commuted_kg,
                       derive_commuted_vlasov, multi_indices_up_to, _mi_str)
from .solver import NodeSample, RunResult, SliceData


# ---------------------------------------------------------------------------
# Block calculus: generators applied to captured space-time blocks
# ---------------------------------------------------------------------------


def _axis_coords(node: NodeSample, n: int, with_v: bool):
    coords = [node.t_levels, *node.x_axes]
    if with_v:
        coords += list(node.v_axes)
    return coords


def _grad(block: np.ndarray, coords, axis: int) -> np.ndarray:
    return np.gradient(block, coords[axis], axis=axis, edge_order=2)


def _coordinate_fields(node: NodeSample, n: int, with_v: bool):
    """Broadcastable t, x_i (and v_i, v0) arrays over the block shape."""
    ndim = 1 + n + (n if with_v else 0)
    def along(arr, axis):
        shape = [1] * ndim
        shape[axis] = len(arr)
        return np.asarray(arr).reshape(shape)
    t = along(node.t_levels, 0)
    xs = [along(node.x_axes[d], 1 + d) for d in range(n)]
    if not with_v:
        return t, xs, None, None
    vs = [along(node.v_axes[d], 1 + n + d) for d in range(n)]
    v0 = np.sqrt(1.0 + sum(v ** 2 for v in vs))
    return t, xs, vs, v0


def block_apply(g: Generator, block: np.ndarray, node: NodeSample,
                n: int, lifted: bool) -> np.ndarray:
    """One generator (or its complete lift) applied to a block."""
    with_v = lifted
    coords = _axis_coords(node, n, with_v)
    t, xs, vs, v0 = _coordinate_fields(node, n, with_v)
    if g.kind == DT:
        return _grad(block, coords, 0)
    if g.kind == DX:
        return _grad(block, coords, g.i)
    if g.kind == BOOST:
        i = g.i
        out = t * _grad(block, coords, i) + xs[i - 1] * _grad(block, coords, 0)
        if lifted:
            out = out + v0 * _grad(block, coords, 1 + n + i - 1)
        return out
    if g.kind == ROT:
        i, j = g.i, g.j
        out = (xs[i - 1] * _grad(block, coords, j)
               - xs[j - 1] * _grad(block, coords, i))
        if lifted:
            out = out + (vs[i - 1] * _grad(block, coords, 1 + n + j - 1)
                         - vs[j - 1] * _grad(block, coords, 1 + n + i - 1))
        return out
    raise AssertionError(g.kind)


def block_apply_multi(A: MultiIndex, block: np.ndarray, node: NodeSample,
                      n: int, lifted: bool) -> np.ndarray:
    for g in reversed(A):
        block = block_apply(g, block, node, n, lifted)
    return block


def _lagrange_weights(xs: np.ndarray, x: float) -> np.ndarray:
    w = np.ones(len(xs))
    for k in range(len(xs)):
        for m in range(len(xs)):
            if m != k:
                w[k] *= (x - xs[m]) / (xs[k] - xs[m])
    return w


def _interp_axis(block: np.ndarray, coords: np.ndarray, target: float,
                 axis: int) -> np.ndarray:
    """Cubic Lagrange interpolation along one axis of a block."""
    b = int(np.searchsorted(coords, target)) - 1
    lo = min(max(b - 1, 0), len(coords) - 4)
    w = _lagrange_weights(coords[lo:lo + 4], target)
    sl = [slice(None)] * block.ndim
    sl[axis] = slice(lo, lo + 4)
    sub = block[tuple(sl)]
    return np.tensordot(w, np.moveaxis(sub, axis, 0), axes=(0, 0))


def node_value(block: np.ndarray, node: NodeSample, n: int) -> np.ndarray:
    """Block interpolated to the node's (t*, y); v axes (if any) remain."""
    out = _interp_axis(block, node.t_levels, node.t_star, 0)
    for d in range(n):
        out = _interp_axis(out, node.x_axes[d], node.y[d], 0)
    return out


# ---------------------------------------------------------------------------
# Densities and lower bounds
# ---------------------------------------------------------------------------


def _vgrids(node: NodeSample, n: int):
    if n == 1:
        return (node.v_axes[0],)
    va, vb = np.meshgrid(node.v_axes[0], node.v_axes[1], indexing="ij")
    return va, vb


def vlasov_energy_density(fprofile: np.ndarray, node: NodeSample, n: int,
                          dv: float) -> float:
    """ehat(f) = int (v^0 t - v.x)/tau f dv at the node."""
    vg = _vgrids(node, n)
    v0 = np.sqrt(1.0 + sum(v ** 2 for v in vg))
    vdotx = sum(vg[d] * node.y[d] for d in range(n))
    w = (v0 * node.t_star - vdotx) / node.tau
    return float(np.sum(w * fprofile)) * dv ** n


def velocity_moments(fprofile: np.ndarray, node: NodeSample, n: int,
                     dv: float) -> tuple[float, float, float]:
    """(int |f| dv, int |f|/v0 dv, int v0 |f| dv) at the node."""
    vg = _vgrids(node, n)
    v0 = np.sqrt(1.0 + sum(v ** 2 for v in vg))
    a = np.abs(fprofile)
    s = dv ** n
    return (float(np.sum(a)) * s, float(np.sum(a / v0)) * s,
            float(np.sum(v0 * a)) * s)


def vlasov_lower_bound_slacks(fprofile: np.ndarray, node: NodeSample, n: int,
                              dv: float) -> tuple[float, float, float]:
    """Slack of ehat(|f|) over its three lower bounds, each evaluated as
    the integral of a pointwise nonnegative integrand."""
    vg = _vgrids(node, n)
    v0 = np.sqrt(1.0 + sum(v ** 2 for v in vg))
    vdotx = sum(vg[d] * node.y[d] for d in range(n))
    t, r, tau = node.t_star, node.r, node.tau
    w = (v0 * t - vdotx) / tau
    a = np.abs(fprofile)
    s = dv ** n
    s1 = float(np.sum((w - t / (2 * tau * v0)) * a)) * s
    s2 = float(np.sum((w - tau * v0 / (2 * (t + r))) * a)) * s
    s3 = float(np.sum((w - 1.0) * a)) * s
    return s1, s2, s3


def kg_energy_density(phi: float, dtphi: float, gradphi, node: NodeSample,
                      n: int) -> float:
    t, r, tau = node.t_star, node.r, node.tau
    g2 = sum(g ** 2 for g in gradphi)
    drphi = sum(gradphi[d] * node.y[d] for d in range(n)) / r if r > 0 else 0.0
    return (t / (2 * tau)) * (dtphi ** 2 + g2 + phi ** 2) \
        + (r / tau) * dtphi * drphi


def kg_lower_bound_slack(phi: float, dtphi: float, gradphi,
                         node: NodeSample, n: int) -> float:
    """e(phi) - (t/2tau)phi^2 - (tau/2(t+r))|dphi|^2 as a sum of squares."""
    t, r, tau = node.t_star, node.r, node.tau
    if r > 0:
        drphi = sum(gradphi[d] * node.y[d] for d in range(n)) / r
    else:
        drphi = 0.0
    # transverse gradient square: |grad|^2 - (d_r)^2, computed exactly
    if n == 1:
        trans2 = 0.0
    else:
        trans2 = ((node.y[0] * gradphi[1] - node.y[1] * gradphi[0]) / r) ** 2 \
            if r > 0 else sum(g ** 2 for g in gradphi)
    return (r / (2 * tau)) * (dtphi + drphi) ** 2 + (r / (2 * tau)) * trans2


@dataclass(frozen=True)
class DensitySample:
    tau: float
    t: float
    y: tuple[float, ...]
    ehat: float
    e_kg: float
    moments: tuple[float, float, float]
    slacks_f: tuple[float, float, float]
    slack_kg: float


# ---------------------------------------------------------------------------
# Slice evaluation
# ---------------------------------------------------------------------------


@dataclass
class NodeQuantities:
    """Everything the diagnostics need at one slice node."""

    node: NodeSample
    f_profiles: dict[MultiIndex, np.ndarray]      # Zhat_A f on the v grid
    phi_values: dict[MultiIndex, float]           # Z_A phi
    phi_dt: dict[MultiIndex, float]               # d_t Z_A phi
    phi_grad: dict[MultiIndex, tuple[float, ...]]  # grad_x Z_A phi


def evaluate_node(node: NodeSample, n: int, order: int) -> NodeQuantities:
    indices = multi_indices_up_to(n, order)
    fblocks: dict[MultiIndex, np.ndarray] = {(): node.fblock}
    pblocks: dict[MultiIndex, np.ndarray] = {(): node.phiblock}
    for A in indices:
        if A and A not in fblocks:
            fblocks[A] = block_apply(A[0], fblocks[A[1:]], node, n, True)
            pblocks[A] = block_apply(A[0], pblocks[A[1:]], node, n, False)
    coords_p = _axis_coords(node, n, False)
    f_profiles = {}
    phi_values = {}
    phi_dt = {}
    phi_grad = {}
    for A in indices:
        f_profiles[A] = node_value(fblocks[A], node, n)
        pb = pblocks[A]
        phi_values[A] = float(node_value(pb, node, n))
        phi_dt[A] = float(node_value(_grad(pb, coords_p, 0), node, n))
        phi_grad[A] = tuple(
            float(node_value(_grad(pb, coords_p, 1 + d), node, n))
            for d in range(n))
    return NodeQuantities(node, f_profiles, phi_values, phi_dt, phi_grad)


@dataclass
class SliceQuantities:
    tau: float
    n: int
    dv: float
    nodes: list[NodeQuantities]

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature over the slice; values indexed like self.nodes."""
        w = np.array([q.node.weight for q in self.nodes])
        return float(np.sum(w * np.asarray(values)))


def evaluate_slice(data: SliceData, order: int) -> SliceQuantities:
    nodes = [evaluate_node(nd, data.n, order) for nd in data.nodes]
    return SliceQuantities(data.tau, data.n, data.dv, nodes)


def density_samples(sq: SliceQuantities) -> list[DensitySample]:
    out = []
    for q in sq.nodes:
        nd = q.node
        f = q.f_profiles[()]
        ehat = vlasov_energy_density(np.abs(f), nd, sq.n, sq.dv)
        ekg = kg_energy_density(q.phi_values[()], q.phi_dt[()],
                                q.phi_grad[()], nd, sq.n)
        out.append(DensitySample(
            sq.tau, nd.t_star, nd.y, ehat, ekg,
            velocity_moments(f, nd, sq.n, sq.dv),
            vlasov_lower_bound_slacks(f, nd, sq.n, sq.dv),
            kg_lower_bound_slack(q.phi_values[()], q.phi_dt[()],
                                 q.phi_grad[()], nd, sq.n)))
    return out


# ---------------------------------------------------------------------------
# Energy hierarchies
# ---------------------------------------------------------------------------


@dataclass
class EnergyReport:
    tau: float
    order: int
    E_N_phi: float
    Ehat_N_f: float
    Ehat_N1_f: float
    breakdown_phi: dict[MultiIndex, float]
    breakdown_f: dict[MultiIndex, float]
    breakdown_fw: dict[MultiIndex, float]


def _ehat_integral(sq: SliceQuantities, A: MultiIndex,
                   weight_v0: bool) -> float:
    vals = []
    for q in sq.nodes:
        prof = np.abs(q.f_profiles[A])
        if weight_v0:
            vg = _vgrids(q.node, sq.n)
            prof = prof * np.sqrt(1.0 + sum(v ** 2 for v in vg))
        vals.append(vlasov_energy_density(prof, q.node, sq.n, sq.dv))
    return sq.integrate(np.array(vals))


def energy_report(sq: SliceQuantities, order: int) -> EnergyReport:
    indices = multi_indices_up_to(sq.n, order)
    half = order // 2
    breakdown_phi = {}
    breakdown_f = {}
    breakdown_fw = {}
    for A in indices:
        evals = [kg_energy_density(q.phi_values[A], q.phi_dt[A],
                                   q.phi_grad[A], q.node, sq.n)
                 for q in sq.nodes]
        breakdown_phi[A] = sq.integrate(np.array(evals))
        breakdown_f[A] = _ehat_integral(sq, A, weight_v0=False)
        breakdown_fw[A] = _ehat_integral(sq, A, weight_v0=(len(A) <= half))
    return EnergyReport(
        sq.tau, order,
        E_N_phi=sum(breakdown_phi.values()),
        Ehat_N_f=sum(breakdown_f.values()),
        Ehat_N1_f=sum(breakdown_fw.values()),
        breakdown_phi=breakdown_phi,
        breakdown_f=breakdown_f,
        breakdown_fw=breakdown_fw)


def reports_to_csv(reports: list[EnergyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "order", "multi_index", "E_phi", "Ehat_f", "Ehat_f_weighted"])
    for rep in reports:
        for A in sorted(rep.breakdown_f, key=lambda a: (len(a), _mi_str(a))):
            w.writerow([f"{rep.tau:.9g}", len(A), _mi_str(A),
                        f"{rep.breakdown_phi[A]:.17g}",
                        f"{rep.breakdown_f[A]:.17g}",
                        f"{rep.breakdown_fw[A]:.17g}"])
    return buf.getvalue()


def reports_to_json(reports: list[EnergyReport]) -> str:
    doc = [{"tau": rep.tau, "order": rep.order, "E_N_phi": rep.E_N_phi,
            "Ehat_N_f": rep.Ehat_N_f, "Ehat_N1_f": rep.Ehat_N1_f}
           for rep in reports]
    return json.dumps(doc, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# Balance laws
# ---------------------------------------------------------------------------


def _kg_source_at_nodes(sq: SliceQuantities, A: MultiIndex) -> np.ndarray:
    """h = (box - 1)Z_A phi = Z_A int f dv evaluated per node."""
    rhs = derive_commuted_kg(A, sq.n)
    out = np.zeros(len(sq.nodes))
    for k, q in enumerate(sq.nodes):
        vg = _vgrids(q.node, sq.n)
        vstack = np.stack([v.ravel() for v in vg], axis=-1)
        acc = 0.0
        for tm in rhs.terms:
            w = tm.coeff.evaluate(vstack).reshape(vg[0].shape)
            acc += float(np.sum(w * q.f_profiles[tm.B])) * sq.dv ** sq.n
        out[k] = acc
    return out


def kg_energy_identity_residual(slices: list[SliceQuantities],
                                reports: list[EnergyReport],
                                A: MultiIndex = (),
                                coupled: bool = True) -> float:
    """|E(tau2) - E(tau1) + int int h d_t(Z_A phi)| over the covered window.

    The lambda integral uses the trapezoid rule over the diagnostic
    slices; h is zero for a free field.
    """
    taus = [sq.tau for sq in slices]
    E = [rep.breakdown_phi[A] for rep in reports]
    if not coupled:
        flux = np.zeros(len(slices))
    else:
        flux = np.array([
            sq.integrate(_kg_source_at_nodes(sq, A)
                         * np.array([q.phi_dt[A] for q in sq.nodes]))
            for sq in slices])
    integral = float(np.trapezoid(flux, taus))
    return abs(E[-1] - E[0] + integral)


def vlasov_energy_inequality_slack(slices: list[SliceQuantities],
                                   reports: list[EnergyReport],
                                   A: MultiIndex = ()) -> float:
    """RHS - LHS of the kinetic balance inequality for Zhat_A f.

    int ehat(|Zhat_A f|)(tau2) <= same at tau1
    + int_lambda int (|h| + |grad phi||Zhat_A f|) dv dmu dlambda,
    with h the derived commutator right-hand side (zero when A is empty).
    """
    taus = [sq.tau for sq in slices]
    E = [rep.breakdown_f[A] for rep in reports]
    n = slices[0].n
    rhs = derive_commuted_vlasov(A, n) if A else None
    flux = []
    for sq in slices:
        vals = np.zeros(len(sq.nodes))
        for k, q in enumerate(sq.nodes):
            gp = q.phi_grad[()]
            gnorm = math.sqrt(sum(g ** 2 for g in gp))
            intf = float(np.sum(np.abs(q.f_profiles[A]))) * sq.dv ** n
            acc = gnorm * intf
            if rhs is not None:
                vg = _vgrids(q.node, n)
                vstack = np.stack([v.ravel() for v in vg], axis=-1)
                t, y = q.node.t_star, q.node.y
                h = np.zeros_like(q.f_profiles[A])
                for tm in rhs.terms:
                    coeff = tm.coeff.evaluate(
                        np.full(len(vstack), t),
                        np.broadcast_to(np.asarray(y), (len(vstack), n)),
                        vstack).reshape(vg[0].shape)
                    dphi = q.phi_dt[tm.B] if tm.mu == 0 \
                        else q.phi_grad[tm.B][tm.mu - 1]
                    h = h + coeff * dphi * q.f_profiles[tm.C]
                acc += float(np.sum(np.abs(h))) * sq.dv ** n
            vals[k] = acc
        flux.append(sq.integrate(vals))
    integral = float(np.trapezoid(np.array(flux), taus))
    return E[0] + integral - E[-1]

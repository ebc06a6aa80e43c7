"""Inequality monitors, decay fits, and bootstrap thresholds.

The decay-rate inequalities carry unspecified constants, so the checks
report the dimensionless ratio of the measured left side to its energy
envelope; the falsifiable content is that the run-wide ratio stays
bounded across the slice window (variation below a configured factor),
not any particular constant.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .commuted import MultiIndex, _mi_str
from .energies import EnergyReport, SliceQuantities, _vgrids


@dataclass(frozen=True)
class InequalityRecord:
    name: str
    tau: float
    lhs: float            # worst measured left side (envelope applied)
    envelope: float       # energy factor on the right side
    ratio: float
    location: tuple[float, ...]   # y of the worst node
    vacuous: bool = False


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    stderr: float
    residual: float
    window: tuple[float, float]
    npoints: int


def decay_fit(times, values, window: tuple[float, float]) -> DecayFit:
    """Least-squares slope of log(value) against log(time) in the window."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = (t >= window[0]) & (t <= window[1]) & (v > 0) & (t > 0)
    if int(np.sum(mask)) < 5:
        raise ValueError("decay fit needs at least 5 positive points in window")
    lt = np.log(t[mask])
    lv = np.log(v[mask])
    A = np.column_stack([lt, np.ones_like(lt)])
    coef, res, *_ = np.linalg.lstsq(A, lv, rcond=None)
    fitted = A @ coef
    dof = max(len(lt) - 2, 1)
    s2 = float(np.sum((lv - fitted) ** 2)) / dof
    var = s2 * np.linalg.inv(A.T @ A)[0, 0]
    return DecayFit(float(coef[0]), math.sqrt(max(var, 0.0)),
                    float(np.sqrt(np.mean((lv - fitted) ** 2))),
                    window, int(np.sum(mask)))


# ---------------------------------------------------------------------------
# Klainerman-Sobolev monitors
# ---------------------------------------------------------------------------

VACUOUS_FLOOR = 1e-300


def ks_check_f(sq: SliceQuantities, report: EnergyReport,
               k: int) -> InequalityRecord:
    """Velocity-average decay against the order-n energy envelope.

    ratio = max over nodes of int |f|/(v^0)^k dv * t^(n-1+k) tau^(1-k),
    divided by Ehat_n(f)(tau).
    """
    if k not in (0, 1):
        raise ValueError("k must be 0 or 1")
    n = sq.n
    energy = report.Ehat_N_f
    name = f"ks_f_k{k}"
    if energy < VACUOUS_FLOOR:
        return InequalityRecord(name, sq.tau, 0.0, energy, 0.0, (), True)
    worst = -1.0
    loc: tuple[float, ...] = ()
    for q in sq.nodes:
        vg = _vgrids(q.node, n)
        v0 = np.sqrt(1.0 + sum(v ** 2 for v in vg))
        lhs = float(np.sum(np.abs(q.f_profiles[()]) / v0 ** k)) * sq.dv ** n
        val = lhs * q.node.t_star ** (n - 1 + k) * sq.tau ** (1 - k)
        if val > worst:
            worst = val
            loc = q.node.y
    return InequalityRecord(name, sq.tau, worst, energy, worst / energy, loc)


def ks_check_phi(sq: SliceQuantities, report: EnergyReport
                 ) -> tuple[InequalityRecord, InequalityRecord]:
    """Field and field-gradient decay against E_{floor(n/2)+1}^(1/2).

    Envelopes: t^(n/2) for |phi| and t^(n/2-1) tau for |d phi|.
    """
    n = sq.n
    energy = math.sqrt(max(report.E_N_phi, 0.0))
    if energy < VACUOUS_FLOOR:
        rec = InequalityRecord("ks_phi", sq.tau, 0.0, energy, 0.0, (), True)
        dec = InequalityRecord("ks_dphi", sq.tau, 0.0, energy, 0.0, (), True)
        return rec, dec
    worst_p, worst_d = -1.0, -1.0
    loc_p: tuple[float, ...] = ()
    loc_d: tuple[float, ...] = ()
    for q in sq.nodes:
        t = q.node.t_star
        val_p = abs(q.phi_values[()]) * t ** (n / 2)
        dnorm = math.sqrt(q.phi_dt[()] ** 2
                          + sum(g ** 2 for g in q.phi_grad[()]))
        val_d = dnorm * t ** (n / 2 - 1) * sq.tau
        if val_p > worst_p:
            worst_p, loc_p = val_p, q.node.y
        if val_d > worst_d:
            worst_d, loc_d = val_d, q.node.y
    return (InequalityRecord("ks_phi", sq.tau, worst_p, energy,
                             worst_p / energy, loc_p),
            InequalityRecord("ks_dphi", sq.tau, worst_d, energy,
                             worst_d / energy, loc_d))


def l2_estimate_check(sq: SliceQuantities, A: MultiIndex, eps: float,
                      delta: float) -> InequalityRecord:
    """Weighted L2 norm of the velocity average against eps^2 tau^(2delta-n).

    Reports int (t/tau) (int |Zhat_A f| dv)^2 dmu * tau^(n-2delta)/eps^2.
    """
    n = sq.n
    vals = []
    for q in sq.nodes:
        intf = float(np.sum(np.abs(q.f_profiles[A]))) * sq.dv ** n
        vals.append((q.node.t_star / sq.tau) * intf ** 2)
    lhs = sq.integrate(np.array(vals))
    env = eps ** 2 * sq.tau ** (2 * delta - n)
    name = f"l2_{_mi_str(A)}"
    if lhs < VACUOUS_FLOOR:
        return InequalityRecord(name, sq.tau, lhs, env, 0.0, (), True)
    return InequalityRecord(name, sq.tau, lhs, env, lhs / env, ())


def ratio_variation(records: list[InequalityRecord]) -> float:
    """Max/min of the nonvacuous ratios; the boundedness figure of merit."""
    ratios = [r.ratio for r in records if not r.vacuous and r.ratio > 0]
    if not ratios:
        return 1.0
    return max(ratios) / min(ratios)


# ---------------------------------------------------------------------------
# Bootstrap monitor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapStatus:
    tau: float
    margin_phi: float      # E_N(phi) / (2 eps)
    margin_f: float        # Ehat_{N,1}(f) / (2 eps tau^delta)
    crossed: bool


def delta_rule(eps: float, mode: str = "free") -> float:
    """Threshold exponent: 0 in the weak-coupling regimes, eps^(1/4) in
    the dimension-four rule."""
    if mode == "free":
        return 0.0
    if mode == "n4":
        return eps ** 0.25
    raise ValueError(f"unknown delta mode {mode!r}")


def bootstrap_monitor(reports: list[EnergyReport], eps: float,
                      delta: float) -> list[BootstrapStatus]:
    """Threshold margins per slice; a margin >= 1 is a crossing."""
    out = []
    for rep in reports:
        m_phi = rep.E_N_phi / (2 * eps)
        m_f = rep.Ehat_N1_f / (2 * eps * rep.tau ** delta)
        out.append(BootstrapStatus(rep.tau, m_phi, m_f,
                                   m_phi >= 1.0 or m_f >= 1.0))
    return out


def first_crossing(statuses: list[BootstrapStatus]) -> float | None:
    for st in statuses:
        if st.crossed:
            return st.tau
    return None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def records_to_csv(records: list[InequalityRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "tau", "lhs", "envelope", "ratio", "location",
                "vacuous"])
    for r in records:
        w.writerow([r.name, f"{r.tau:.9g}", f"{r.lhs:.17g}",
                    f"{r.envelope:.17g}", f"{r.ratio:.17g}",
                    ";".join(f"{c:.9g}" for c in r.location),
                    int(r.vacuous)])
    return buf.getvalue()


def fits_to_csv(fits: dict[str, DecayFit]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "exponent", "stderr", "residual", "window_lo",
                "window_hi", "npoints"])
    for name in sorted(fits):
        f = fits[name]
        w.writerow([name, f"{f.exponent:.17g}", f"{f.stderr:.17g}",
                    f"{f.residual:.17g}", f"{f.window[0]:.9g}",
                    f"{f.window[1]:.9g}", f.npoints])
    return buf.getvalue()

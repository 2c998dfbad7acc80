"""Per-iteration certificates for solver traces.

Each check re-evaluates one proved inequality along a trace and reports
bound, measured value and slack row by row. Slack is oriented so that a
non-negative value means the inequality holds: bound - measured for upper
bounds on the gap, measured - bound for lower bounds on quantities that must
grow. A row fails when its slack drops below -FAIL_TOL * (1 + |bound|);
slacks in (-FAIL_TOL, -WARN_TOL) scaled are counted as warnings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingConstants, TooShort
from .objective import ObjectiveHandle
from .proxmaps import prox_map
from .solvers import SolverTrace

FAIL_TOL = 1e-8
WARN_TOL = 1e-10

BOUND_KINDS = (
    "am_linear_pl",
    "am_sublinear",
    "aam_main",
    "aam_Ak_growth",
    "aam_recurrence",
    "aam_adaptive",
    "nearly_pl_combined",
    "sufficient_decrease",
    "nonacc_max_bound",
)

REQUIRED_CONSTANTS = {
    "am_linear_pl": ("l_blocks", "mu_blocks", "f_star"),
    "am_sublinear": ("l_blocks", "radius", "f_star"),
    "aam_main": ("l_global", "mu", "n_blocks", "radius", "f_star"),
    "aam_Ak_growth": ("l_global", "mu", "n_blocks"),
    "aam_recurrence": ("mu",),
    "aam_adaptive": ("mu_true", "f_star"),
    "nearly_pl_combined": ("l_blocks", "mu_blocks", "f_star"),
    "sufficient_decrease": ("l_blocks",),
    "nonacc_max_bound": ("l_blocks", "radius", "f_star"),
}


@dataclass(frozen=True)
class BoundSpec:
    """A certificate kind plus the constants it needs."""

    kind: str
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.kind!r}")
        missing = [c for c in REQUIRED_CONSTANTS[self.kind] if c not in self.constants]
        if missing:
            raise MissingConstants(f"{self.kind} needs constants {missing}")


@dataclass(frozen=True)
class CertificateRow:
    k: int
    bound_value: float
    measured_value: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class CertificateReport:
    kind: str
    rows: tuple[CertificateRow, ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def worst_slack(self) -> float:
        return min((r.slack for r in self.rows), default=0.0)

    @property
    def first_failure(self) -> int | None:
        for r in self.rows:
            if not r.passed:
                return r.k
        return None

    @property
    def n_warnings(self) -> int:
        return sum(1 for r in self.rows
                   if r.passed and r.slack < -WARN_TOL * (1.0 + abs(r.bound_value)))


def _row(k: int, bound: float, measured: float, tol: float,
         lower_bound: bool = False) -> CertificateRow:
    slack = (measured - bound) if lower_bound else (bound - measured)
    return CertificateRow(k=k, bound_value=bound, measured_value=measured, slack=slack,
                          passed=slack >= -tol * (1.0 + abs(bound)))


def _need(trace: SolverTrace, method: str, what: str):
    if trace.method != method:
        raise ValueError(f"{what} expects a {method!r} trace, got {trace.method!r}")


def check_am_linear(trace: SolverTrace, l_blocks, mu_blocks, f_star: float,
                    tol: float = FAIL_TOL) -> CertificateReport:
    """Per-sweep contraction F(next) - F* <= prod_i (1 - mu_i/L_i) (F(prev) - F*)."""
    _need(trace, "am", "am_linear_pl")
    if l_blocks is None or mu_blocks is None or f_star is None:
        raise MissingConstants("am_linear_pl needs per-block L_i, mu_i and F*")
    factor = 1.0
    for li, mi in zip(l_blocks, mu_blocks):
        if li <= 0 or mi <= 0 or mi > li:
            raise ValueError("need 0 < mu_i <= L_i for every block")
        factor *= 1.0 - mi / li
    sweeps = trace.sweep_records()
    gaps = [r.composite_value - f_star for r in sweeps]
    rows = [_row(s, factor * gaps[s - 1], gaps[s], tol) for s in range(1, len(gaps))]
    return CertificateReport("am_linear_pl", tuple(rows), tol)


def check_nearly_pl(trace: SolverTrace, l_blocks, mu_blocks, f_star: float,
                    tol: float = FAIL_TOL) -> CertificateReport:
    """Constrained-composite contraction with factor prod_i (1 - mu_i/(L_i+mu_i)).

    Also verifies the intermediate half-step inequalities
    mu_i (F(after) - F*) <= L_i (F(before) - F(after)) for every block step.
    """
    _need(trace, "am", "nearly_pl_combined")
    if l_blocks is None or mu_blocks is None or f_star is None:
        raise MissingConstants("nearly_pl_combined needs per-block L_i, mu_i and F*")
    factor = 1.0
    for li, mi in zip(l_blocks, mu_blocks):
        if li <= 0 or mi <= 0:
            raise ValueError("need positive mu_i, L_i")
        factor *= 1.0 - mi / (li + mi)
    rows = []
    recs = trace.records
    for j in range(1, len(recs)):
        i = recs[j].block
        drop = recs[j - 1].composite_value - recs[j].composite_value
        rows.append(_row(recs[j].k, l_blocks[i] * drop,
                         mu_blocks[i] * (recs[j].composite_value - f_star), tol))
    sweeps = trace.sweep_records()
    gaps = [r.composite_value - f_star for r in sweeps]
    for s in range(1, len(gaps)):
        rows.append(_row(sweeps[s].k, factor * gaps[s - 1], gaps[s], tol))
    return CertificateReport("nearly_pl_combined", tuple(rows), tol)


def check_aam_main(trace: SolverTrace, l_global: float, mu: float, n_blocks: int,
                   radius: float, f_star: float, tol: float = FAIL_TOL) -> CertificateReport:
    """Accelerated bound f(x^k) - f* <= n L R^2 min{4/k^2, (1 - sqrt(mu/(nL)))^{k-1}}."""
    _need(trace, "aam", "aam_main")
    if l_global is None or f_star is None or radius is None:
        raise MissingConstants("aam_main needs L, R and F*")
    if not 0.0 <= mu < n_blocks * l_global:
        raise ValueError("need 0 <= mu < n L")
    lead = n_blocks * l_global * radius * radius
    geo = 1.0 - math.sqrt(mu / (n_blocks * l_global))
    rows = []
    for r in trace.records[1:]:
        bound = lead * min(4.0 / r.k ** 2, geo ** (r.k - 1))
        rows.append(_row(r.k, bound, r.f_value - f_star, tol))
    return CertificateReport("aam_main", tuple(rows), tol)


def check_aam_Ak(trace: SolverTrace, l_global: float, mu: float, n_blocks: int,
                 tol: float = FAIL_TOL) -> CertificateReport:
    """Coefficient-sum growth A_k >= k^2/(4 L n), A_1 >= 1/(nL), plus the
    geometric branch (1/(nL)) (1 - sqrt(mu/(nL)))^{-k+1} when mu > 0."""
    _need(trace, "aam", "aam_Ak_growth")
    if l_global is None:
        raise MissingConstants("aam_Ak_growth needs L")
    nl = n_blocks * l_global
    geo = 1.0 - math.sqrt(mu / nl) if mu > 0 else None
    rows = []
    for r in trace.records[1:]:
        bound = r.k ** 2 / (4.0 * nl)
        if r.k == 1:
            bound = max(bound, 1.0 / nl)
        if geo is not None:
            bound = max(bound, (1.0 / nl) * geo ** (-r.k + 1))
        rows.append(_row(r.k, bound, r.a_sum, tol, lower_bound=True))
    return CertificateReport("aam_Ak_growth", tuple(rows), tol)


def check_aam_adaptive(trace: SolverTrace, mu_true: float, f_star: float,
                       tol: float = FAIL_TOL) -> CertificateReport:
    """Product bound for the mu-unaware run on a PL objective:

    f(x^k) - F* <= prod_{j<=k} (1 - mu a_j^2 / A_j) (f(x^0) - F*).
    """
    _need(trace, "aam", "aam_adaptive")
    if f_star is None:
        raise MissingConstants("aam_adaptive needs F*")
    gap0 = trace.records[0].f_value - f_star
    prod = 1.0
    rows = []
    for r in trace.records[1:]:
        prod *= max(0.0, 1.0 - mu_true * r.a * r.a / r.a_sum)
        rows.append(_row(r.k, prod * gap0, r.f_value - f_star, tol))
    return CertificateReport("aam_adaptive", tuple(rows), tol)


def check_am_sublinear(trace: SolverTrace, l_blocks, radius: float, f_star: float,
                       tol: float = FAIL_TOL) -> CertificateReport:
    """Non-strongly-convex AM bound over sweeps N >= 2:

    f(x^N) - f* <= max{(f(x^0) - f*)/2^{(N-1)/2}, 8 min_i L_i R^2 / (N - 1)}.
    """
    _need(trace, "am", "am_sublinear")
    if l_blocks is None or radius is None or f_star is None:
        raise MissingConstants("am_sublinear needs L_i, R and F*")
    sweeps = trace.sweep_records()
    if len(sweeps) < 3:
        raise TooShort("need at least two complete sweeps")
    gaps = [r.f_value - f_star for r in sweeps]
    lmin = min(l_blocks)
    rows = []
    for n in range(2, len(gaps)):
        bound = max(gaps[0] / 2.0 ** ((n - 1) / 2.0),
                    8.0 * lmin * radius * radius / (n - 1))
        rows.append(_row(n, bound, gaps[n], tol))
    return CertificateReport("am_sublinear", tuple(rows), tol)


def check_sufficient_decrease(h: ObjectiveHandle, trace: SolverTrace, l_blocks,
                              tol: float = FAIL_TOL) -> CertificateReport:
    """||G_{L_i}^i(before)||^2 <= 2 L_i (F(before) - F(after)) per block step."""
    _need(trace, "am", "sufficient_decrease")
    if l_blocks is None:
        raise MissingConstants("sufficient_decrease needs per-block L_i")
    rows = []
    recs = trace.records
    for j in range(1, len(recs)):
        i = recs[j].block
        g = prox_map(h, recs[j - 1].x, i, l_blocks[i]).g_map
        drop = recs[j - 1].composite_value - recs[j].composite_value
        rows.append(_row(recs[j].k, 2.0 * l_blocks[i] * drop, float(g @ g), tol))
    return CertificateReport("sufficient_decrease", tuple(rows), tol)


def check_aam_recurrence(trace: SolverTrace, mu: float,
                         tol: float = 1e-7) -> CertificateReport:
    """A_k f(x^k) <= psi_k(v^k) with psi_k rebuilt from its definition."""
    _need(trace, "aam", "aam_recurrence")
    recs = trace.records
    x0 = recs[0].x
    rows = []
    for k in range(1, len(recs)):
        v = recs[k].v
        psi = 0.5 * float((v - x0) @ (v - x0))
        for j in range(1, k + 1):
            dev = v - recs[j].y
            psi += recs[j].a * (recs[j].f_y + float(recs[j].grad_y @ dev)
                                + 0.5 * mu * float(dev @ dev))
        rows.append(_row(recs[k].k, psi, recs[k].a_sum * recs[k].f_value, tol))
    return CertificateReport("aam_recurrence", tuple(rows), tol)


def estimate_empirical_rate(trace: SolverTrace, f_star: float,
                            composite: bool = False,
                            min_points: int = 10,
                            floor_ratio: float = 1e-12) -> tuple[float, float]:
    """Least-squares decay estimates from a trace with known optimum.

    Returns (linear_factor, sublinear_slope): the per-iteration geometric
    factor from a log-gap vs k fit, and the slope of log-gap vs log-k.
    Gaps at or below floor_ratio times the initial gap are excluded so the
    numeric noise floor does not pollute the fit.
    """
    gaps = trace.gaps(f_star, composite=composite)
    ks = np.array([r.k for r in trace.records], dtype=float)
    floor = max(gaps[0], 0.0) * floor_ratio
    mask = gaps > floor
    if mask.sum() < min_points:
        raise TooShort(f"need {min_points} usable iterations, have {int(mask.sum())}")
    logg = np.log(gaps[mask])
    slope_lin = np.polyfit(ks[mask], logg, 1)[0]
    pos = mask & (ks >= 1)
    slope_log = np.polyfit(np.log(ks[pos]), np.log(gaps[pos]), 1)[0]
    return float(np.exp(slope_lin)), float(slope_log)

"""Solvers: alternating minimization, its accelerated variant, and a fast
gradient baseline, all producing full per-iteration traces.

Iteration counting follows the per-block convention: one alternating
minimization iteration is one block minimization (a full sweep over n blocks
is n iterations), so all three methods spend comparable work per recorded k.
Sweep boundaries sit at k % n_blocks == 0.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import MissingL, NoBlockSolver, NonSmoothUnsupported, NoPositiveRoot
from .objective import ObjectiveHandle

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# iterate/coefficient magnitude beyond which a run is declared divergent,
# far outside any sane optimization state yet small enough that the state
# updates cannot overflow before the check fires
_STATE_LIMIT = 1e50


def golden_section(fun: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-10) -> float:
    """Golden-section search for the minimizer of a unimodal fun on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while (b - a) > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters shared by all solvers.

    mu_assumed = 0 runs the accelerated method in "strong convexity unknown"
    mode; l_known = None selects the adaptive coefficient rule. momentum_rule
    chooses between the lower-model minimizer update ("proof", default) and
    the plain v - a * grad update ("literal"); the two coincide when
    mu_assumed = 0.
    """

    max_iters: int = 100
    target_gap: float | None = None
    grad_tolerance: float = 1e-13
    mu_assumed: float = 0.0
    l_known: float | None = None
    line_search_tol: float = 1e-10
    rng_seed: int = 0
    momentum_rule: str = "proof"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tolerance <= 0:
            raise ValueError("grad_tolerance must be positive")
        if self.target_gap is not None and self.target_gap <= 0:
            raise ValueError("target_gap must be positive when set")
        if self.line_search_tol <= 0:
            raise ValueError("line_search_tol must be positive")
        if self.mu_assumed < 0:
            raise ValueError("mu_assumed must be >= 0")
        if self.momentum_rule not in ("proof", "literal"):
            raise ValueError("momentum_rule must be 'proof' or 'literal'")


@dataclass
class IterationRecord:
    """One trace row; acceleration fields stay None for plain methods."""

    k: int
    x: np.ndarray
    f_value: float
    composite_value: float
    grad_norm: float
    sweep: int | None = None
    block: int | None = None
    beta: float | None = None
    a: float | None = None
    a_sum: float | None = None
    tau: float | None = None
    y: np.ndarray | None = None
    v: np.ndarray | None = None
    f_y: float | None = None
    grad_y: np.ndarray | None = None
    psi_min: float | None = None
    wall_time: float = 0.0


@dataclass
class SolverTrace:
    method: str
    records: list[IterationRecord]
    status: str
    config: SolverConfig
    n_blocks: int

    @property
    def x0(self) -> np.ndarray:
        return self.records[0].x

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def gaps(self, f_star: float, composite: bool = False) -> np.ndarray:
        vals = [r.composite_value if composite else r.f_value for r in self.records]
        return np.asarray(vals) - f_star

    def sweep_records(self) -> list[IterationRecord]:
        """Records at full-sweep boundaries (k multiple of n_blocks)."""
        return [r for r in self.records if r.k % self.n_blocks == 0]


@dataclass
class QuadraticLowerModel:
    """Running quadratic lower model psi_k with incremental minimum tracking.

    State: psi_k(x) = min_value + (tau/2) ||x - center||^2 where center is the
    exact minimizer. Each update folds in one linearization term
    a * (f_y + <grad_y, x - y> + (mu/2)||x - y||^2).
    """

    center: np.ndarray
    tau: float = 1.0
    a_sum: float = 0.0
    min_value: float = 0.0

    def update(self, a: float, y: np.ndarray, grad_y: np.ndarray,
               f_y: float, mu: float) -> np.ndarray:
        tau_new = 1.0 + mu * (self.a_sum + a)
        new_center = (self.tau * self.center + mu * a * y - a * grad_y) / tau_new
        step = new_center - self.center
        dev = new_center - y
        self.min_value += (0.5 * self.tau * float(step @ step)
                           + a * (f_y + float(grad_y @ dev) + 0.5 * mu * float(dev @ dev)))
        self.center = new_center
        self.tau = tau_new
        self.a_sum += a
        return new_center


def exact_line_search(h: ObjectiveHandle, x: np.ndarray, v: np.ndarray,
                      tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Minimize f(x + beta (v - x)) over beta in [0, 1].

    Uses the handle's closed-form directional minimizer when available,
    golden-section search otherwise; the endpoints are always candidates, so
    f at the result never exceeds min(f(x), f(v)).
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    d = v - x
    if not np.any(d):
        return 0.0, x.copy()
    if h.line_minimizer is not None:
        beta = float(h.line_minimizer(x, d))
        beta = min(1.0, max(0.0, beta))
    else:
        beta = golden_section(lambda t: float(h.smooth_value(x + t * d)), 0.0, 1.0, tol)
    candidates = [0.0, beta, 1.0]
    values = [float(h.smooth_value(x + t * d)) for t in candidates]
    beta = candidates[int(np.argmin(values))]
    return beta, x + beta * d


def greedy_block(h: ObjectiveHandle, y: np.ndarray) -> int:
    """Block with the largest gradient norm; ties go to the lowest index."""
    best, best_norm = 0, -1.0
    for i in range(h.n_blocks):
        ni = float(np.linalg.norm(np.asarray(h.block_gradient(y, i), dtype=float)))
        if ni > best_norm:
            best, best_norm = i, ni
    return best


def choose_a_known_L(a_sum: float, tau: float, mu: float, l_const: float,
                     n_blocks: int) -> float:
    """Coefficient satisfying a^2 / ((A + a)(tau + mu a)) = 1/(L n).

    Expands to (Ln - mu) a^2 - (tau + mu A) a - A tau = 0; returns the largest
    positive root.
    """
    if a_sum < 0 or tau < 1.0 - 1e-12 or l_const <= 0 or n_blocks < 1:
        raise ValueError("invalid coefficient-equation inputs")
    if not (0.0 <= mu <= l_const):
        raise ValueError("need 0 <= mu <= L")
    lead = l_const * n_blocks - mu
    lin = tau + mu * a_sum
    const = a_sum * tau
    if lead <= 0:
        # mu == L n only in the degenerate one-block, mu == L case
        if lin <= 0:
            raise NoPositiveRoot("degenerate coefficient equation")
        a = const / lin if const > 0 else 0.0
        if a <= 0:
            raise NoPositiveRoot("no positive coefficient")
        return a
    disc = lin * lin + 4.0 * lead * const
    a = (lin + math.sqrt(disc)) / (2.0 * lead)
    if a <= 0:
        raise NoPositiveRoot("no positive coefficient")
    return a


def _adaptive_coefficient(delta: float, grad_sq: float, v_dist_sq: float,
                          a_sum: float, tau: float, mu: float) -> float:
    """Largest positive root of the adaptive coefficient equation.

    The equation 2 delta (A + a)(tau + mu a) = a^2 G - mu tau V a clears to
    the quadratic (G - 2 delta mu) a^2 - (mu tau V + 2 delta (mu A + tau)) a
    - 2 delta A tau = 0 with delta = f(y) - f(x_next) >= 0.
    """
    lead = grad_sq - 2.0 * delta * mu
    lin = mu * tau * v_dist_sq + 2.0 * delta * (mu * a_sum + tau)
    const = 2.0 * delta * a_sum * tau
    if lead <= 0.0:
        # happens only within rounding of the optimum (delta ~ gap bound)
        if lin > 0.0 and const > 0.0:
            return const / lin
        raise NoPositiveRoot("adaptive coefficient equation has no positive root")
    disc = lin * lin + 4.0 * lead * const
    a = (lin + math.sqrt(disc)) / (2.0 * lead)
    if a <= 0.0:
        raise NoPositiveRoot("adaptive coefficient equation has no positive root")
    # polish: the cleared-denominator polynomial is well-behaved around the root
    def poly(t: float) -> float:
        return (lead * t - lin) * t - const
    r = poly(a)
    if abs(r) > 1e-12 * (abs(lead) * a * a + abs(lin) * a + abs(const) + 1e-300):
        if r > 0.0:
            lo, hi = 0.0, a
        else:
            lo, hi = a, 2.0 * a
            for _ in range(200):  # double until the sign changes
                if poly(hi) > 0.0:
                    break
                lo, hi = hi, 2.0 * hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if poly(mid) <= 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-12 * max(1.0, hi):
                break
        a = 0.5 * (lo + hi)
    return a


def choose_a_adaptive(h: ObjectiveHandle, y: np.ndarray, x_next: np.ndarray,
                      a_sum: float, tau: float, mu: float,
                      v: np.ndarray) -> float:
    """Coefficient from the measured decrease f(y) - f(x_next).

    Solves, for the largest positive a,
        f(y) - a^2 G / (2 (A+a)(tau+mu a)) + mu tau a V / (2 (A+a)(tau+mu a))
            = f(x_next)
    with G = ||grad f(y)||^2 and V = ||v - y||^2. Raises NoPositiveRoot when
    no progress is measurable (converged).
    """
    f_y = float(h.smooth_value(y))
    f_next = float(h.smooth_value(x_next))
    g = h.full_gradient(y)
    vy = np.asarray(v, dtype=float) - np.asarray(y, dtype=float)
    delta = f_y - f_next
    if delta < 0.0:
        delta = 0.0  # block minimization guarantees descent; clip rounding
    return _adaptive_coefficient(delta, float(g @ g), float(vy @ vy), a_sum, tau, mu)


def _start_record(h: ObjectiveHandle, x0: np.ndarray, accelerated: bool) -> IterationRecord:
    g = h.full_gradient(x0)
    rec = IterationRecord(
        k=0, x=x0.copy(), f_value=float(h.smooth_value(x0)),
        composite_value=h.composite_value(x0), grad_norm=float(np.linalg.norm(g)))
    if accelerated:
        rec.a, rec.a_sum, rec.tau = 0.0, 0.0, 1.0
        rec.v = x0.copy()
        rec.psi_min = 0.0
    else:
        rec.sweep = 0
    return rec


def run_am(h: ObjectiveHandle, x0: np.ndarray, cfg: SolverConfig) -> SolverTrace:
    """Alternating minimization: cyclic exact block minimization.

    Each iteration minimizes F over one block (blocks visited in index
    order), so records at k, k+1, ..., k+n cover one full sweep with all the
    intermediate half-step points.
    """
    if h.block_argmin is None:
        raise NoBlockSolver("alternating minimization needs block_argmin")
    x = np.asarray(x0, dtype=float).copy()
    t_start = time.perf_counter()
    records = [_start_record(h, x, accelerated=False)]
    f_star = None if h.optimum is None else float(h.optimum[1])
    status = "max_iters"
    k = 0
    stop = False
    while k < cfg.max_iters and not stop:
        for i in range(h.n_blocks):
            if k >= cfg.max_iters:
                break
            x = h.exact_block_min(x, i)
            k += 1
            g = h.full_gradient(x)
            gn = float(np.linalg.norm(g))
            records.append(IterationRecord(
                k=k, x=x.copy(), f_value=float(h.smooth_value(x)),
                composite_value=h.composite_value(x), grad_norm=gn,
                sweep=(k + h.n_blocks - 1) // h.n_blocks, block=i,
                wall_time=time.perf_counter() - t_start))
            if h.is_smooth() and gn <= cfg.grad_tolerance:
                status, stop = "grad_tolerance", True
                break
            if (f_star is not None and cfg.target_gap is not None
                    and records[-1].composite_value - f_star <= cfg.target_gap):
                status, stop = "target_gap", True
                break
    return SolverTrace("am", records, status, cfg, h.n_blocks)


def run_aam(h: ObjectiveHandle, x0: np.ndarray, cfg: SolverConfig) -> SolverTrace:
    """Accelerated alternating minimization.

    Per iteration: exact line search between the iterate and the momentum
    point, greedy block choice at the extrapolated point, exact block
    minimization, coefficient update (closed-form when l_known is set,
    adaptive from the measured decrease otherwise), then the momentum update.
    Smooth unconstrained objectives only.
    """
    if h.block_argmin is None:
        raise NoBlockSolver("accelerated alternating minimization needs block_argmin")
    if not h.is_smooth():
        raise NonSmoothUnsupported("accelerated solver supports g == 0 only")
    mu = cfg.mu_assumed
    x = np.asarray(x0, dtype=float).copy()
    v = x.copy()
    model = QuadraticLowerModel(center=x.copy())
    t_start = time.perf_counter()
    records = [_start_record(h, x, accelerated=True)]
    f_star = None if h.optimum is None else float(h.optimum[1])
    status = "max_iters"
    for k in range(cfg.max_iters):
        if (f_star is not None and cfg.target_gap is not None
                and records[-1].f_value - f_star <= cfg.target_gap):
            status = "target_gap"
            break
        beta, y = exact_line_search(h, x, v, cfg.line_search_tol)
        grad_y = h.full_gradient(y)
        grad_norm = float(np.linalg.norm(grad_y))
        if grad_norm <= cfg.grad_tolerance:
            status = "grad_tolerance"
            break
        i = greedy_block(h, y)
        x_next = h.exact_block_min(y, i)
        f_y = float(h.smooth_value(y))
        try:
            if cfg.l_known is not None:
                a = choose_a_known_L(model.a_sum, model.tau, mu, cfg.l_known, h.n_blocks)
            else:
                a = choose_a_adaptive(h, y, x_next, model.a_sum, model.tau, mu, v)
        except NoPositiveRoot:
            status = "converged"
            break
        if not math.isfinite(a) or a > _STATE_LIMIT:
            status = "diverged"
            break
        center = model.update(a, y, grad_y, f_y, mu)
        if cfg.momentum_rule == "proof":
            v = center.copy()
        else:
            v = v - a * grad_y
        if not np.all(np.isfinite(v)) or float(np.abs(v).max()) > _STATE_LIMIT:
            # the plain momentum update can run away when mu > 0; the
            # lower-model minimizer update (the default) cannot
            status = "diverged"
            break
        x = x_next
        records.append(IterationRecord(
            k=k + 1, x=x.copy(), f_value=float(h.smooth_value(x)),
            composite_value=h.composite_value(x),
            grad_norm=float(np.linalg.norm(h.full_gradient(x))),
            block=i, beta=beta, a=a, a_sum=model.a_sum, tau=model.tau,
            y=y, v=v.copy(), f_y=f_y, grad_y=grad_y, psi_min=model.min_value,
            wall_time=time.perf_counter() - t_start))
    return SolverTrace("aam", records, status, cfg, h.n_blocks)


def run_fgm(h: ObjectiveHandle, x0: np.ndarray, cfg: SolverConfig) -> SolverTrace:
    """Fast gradient baseline with fixed step 1/L.

    z_{k+1} = v_k - grad f(v_k)/L, then v_{k+1} = z_k + k/(k+3) (z_{k+1} - z_k).
    """
    l_const = cfg.l_known if cfg.l_known is not None else h.l_global
    if l_const is None:
        raise MissingL("fast gradient method needs a known L")
    if not h.is_smooth():
        raise NonSmoothUnsupported("fast gradient method supports g == 0 only")
    z = np.asarray(x0, dtype=float).copy()
    v = z.copy()
    t_start = time.perf_counter()
    records = [_start_record(h, z, accelerated=False)]
    records[0].sweep = None
    f_star = None if h.optimum is None else float(h.optimum[1])
    status = "max_iters"
    for k in range(cfg.max_iters):
        if records[-1].grad_norm <= cfg.grad_tolerance:
            status = "grad_tolerance"
            break
        if (f_star is not None and cfg.target_gap is not None
                and records[-1].f_value - f_star <= cfg.target_gap):
            status = "target_gap"
            break
        z_new = v - h.full_gradient(v) / l_const
        if not np.all(np.isfinite(z_new)) or float(np.abs(z_new).max()) > _STATE_LIMIT:
            status = "diverged"  # possible when the supplied L is too small
            break
        v = z + (k / (k + 3.0)) * (z_new - z)
        z = z_new
        records.append(IterationRecord(
            k=k + 1, x=z.copy(), f_value=float(h.smooth_value(z)),
            composite_value=h.composite_value(z),
            grad_norm=float(np.linalg.norm(h.full_gradient(z))),
            v=v.copy(), wall_time=time.perf_counter() - t_start))
    return SolverTrace("fgm", records, status, cfg, h.n_blocks)

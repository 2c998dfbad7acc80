"""Concrete problem instances with exact block solvers and optimum oracles.

Three families:

* QuadraticSplitProblem -- f(z) = ||W z - b||^2 split into two equal blocks,
  with closed-form block minimization through cached SPD factorizations.
  The Hessian is 2 W^T W, so the declared constants carry that factor of two.
* CompositeQuadraticProblem -- the same smooth part plus per-block l1 / box /
  zero terms; block minimization by exact cyclic coordinate descent, and the
  optimum cross-validated by two independent reference methods.
* NonlinearEqPlProblem -- f(x) = ||g(x)||^2 for a mildly nonlinear
  underdetermined system, gradient-dominated by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import BadDimension, BadShape, SolverError
from .linalg import SpdFactorization, cholesky, solve_spd, spectral_extremes
from .objective import BlockPartition, ObjectiveHandle
from .proxmaps import BoxTerm, L1Term, ZeroTerm, soft_threshold


def _orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _design_matrix(rng: np.random.Generator, dim: int, cond_number: float) -> np.ndarray:
    """Dense W with singular values spanning [1, sqrt(cond_number)] exactly."""
    u = _orthogonal(rng, dim)
    v = _orthogonal(rng, dim)
    sigma = np.geomspace(1.0, math.sqrt(cond_number), dim) if cond_number > 1 \
        else np.ones(dim)
    return u @ (sigma[:, None] * v.T)


# ---------------------------------------------------------------------------
# smooth split quadratic
# ---------------------------------------------------------------------------

@dataclass
class QuadraticSplitProblem:
    """f(z) = ||W z - b||^2 over two equal coordinate blocks."""

    W: np.ndarray
    b: np.ndarray
    partition: BlockPartition
    x_star: np.ndarray
    f_star: float
    l_global: float
    mu_global: float
    l_blocks: tuple[float, ...]
    mu_blocks: tuple[float, ...]
    lambda_min_plus: float
    default_start: np.ndarray
    _cols: tuple[np.ndarray, ...] = field(repr=False, default=())
    _facts: tuple[SpdFactorization, ...] = field(repr=False, default=())

    @classmethod
    def from_matrix(cls, W, b, start_seed: int = 0,
                    rank_tol: float = 1e-10) -> "QuadraticSplitProblem":
        W = np.asarray(W, dtype=float)
        b = np.asarray(b, dtype=float)
        dim = W.shape[1]
        if dim % 2 != 0 or dim < 2:
            raise BadDimension("dimension must be even and >= 2")
        partition = BlockPartition.halves(dim)
        gram = W.T @ W
        lam = np.linalg.eigvalsh(gram)
        positive = lam[lam > rank_tol * max(1.0, lam[-1])]
        full_rank = positive.size == dim
        if full_rank:
            x_star = solve_spd(cholesky(gram), W.T @ b)
        else:
            x_star = np.linalg.lstsq(W, b, rcond=None)[0]
        res = W @ x_star - b
        cols = tuple(W[:, idx] for idx in partition.blocks)
        facts = tuple(cholesky(c.T @ c) for c in cols)
        l_blocks = tuple(2.0 * spectral_extremes(c.T @ c)[1] for c in cols)
        mu_global = 2.0 * lam[0] if full_rank else 0.0
        rng = np.random.default_rng(start_seed)
        start = x_star + rng.standard_normal(dim)
        return cls(
            W=W, b=b, partition=partition, x_star=x_star, f_star=float(res @ res),
            l_global=2.0 * lam[-1], mu_global=mu_global, l_blocks=l_blocks,
            mu_blocks=(mu_global,) * partition.n_blocks,
            lambda_min_plus=float(positive[0]), default_start=start,
            _cols=cols, _facts=facts)

    # -- objective callables -------------------------------------------------

    def smooth_value(self, x: np.ndarray) -> float:
        r = self.W @ x - self.b
        return float(r @ r)

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (self.W.T @ (self.W @ x - self.b))

    def block_gradient(self, x: np.ndarray, i: int) -> np.ndarray:
        return 2.0 * (self._cols[i].T @ (self.W @ x - self.b))

    def block_argmin(self, x: np.ndarray, i: int) -> np.ndarray:
        idx = self.partition.blocks[i]
        # normal equations of the block least-squares with the rest fixed
        rhs = self._cols[i].T @ (self.b - self.W @ x + self._cols[i] @ x[idx])
        out = x.copy()
        out[idx] = solve_spd(self._facts[i], rhs)
        return out

    def line_minimizer(self, x: np.ndarray, d: np.ndarray) -> float:
        wd = self.W @ d
        curv = 2.0 * float(wd @ wd)
        if curv == 0.0:
            return 0.0
        return -float(self.full_grad(x) @ d) / curv

    def handle(self) -> ObjectiveHandle:
        return ObjectiveHandle(
            partition=self.partition,
            smooth_value=self.smooth_value,
            block_gradient=self.block_gradient,
            block_argmin=self.block_argmin,
            l_global=self.l_global,
            mu_global=self.mu_global,
            l_blocks=self.l_blocks,
            mu_blocks=self.mu_blocks,
            optimum=(self.x_star, self.f_star),
            line_minimizer=self.line_minimizer)

    def sublevel_radius(self, x0: np.ndarray) -> float:
        """Distance-to-solution-set radius of the f(x0) sublevel set.

        f(x) - f* = ||W (x - proj)||^2 >= lambda_min_plus * dist(x, X*)^2, so
        every point of the sublevel set is within this radius of a minimizer.
        """
        gap0 = self.smooth_value(np.asarray(x0, dtype=float)) - self.f_star
        return math.sqrt(max(gap0, 0.0) / self.lambda_min_plus)


def make_quadratic(seed: int, dim: int, cond_number: float) -> QuadraticSplitProblem:
    """Seeded dense quadratic with eigenvalue ratio of W^T W == cond_number."""
    if dim % 2 != 0 or dim < 2:
        raise BadDimension("dim must be even and >= 2")
    if cond_number < 1.0:
        raise BadDimension("cond_number must be >= 1")
    rng = np.random.default_rng(seed)
    W = _design_matrix(rng, dim, cond_number)
    b = rng.standard_normal(dim)
    problem = QuadraticSplitProblem.from_matrix(W, b)
    problem.default_start = problem.x_star + rng.standard_normal(dim)
    return problem


def make_rank_deficient(seed: int, dim: int, rank: int) -> QuadraticSplitProblem:
    """Quadratic with a deliberate null space (mu = 0, still block-solvable)."""
    if dim % 2 != 0 or not dim // 2 < rank < dim:
        raise BadDimension("need dim even and dim/2 < rank < dim")
    rng = np.random.default_rng(seed)
    u = _orthogonal(rng, dim)
    v = _orthogonal(rng, dim)
    sigma = np.concatenate([np.geomspace(1.0, 3.0, rank), np.zeros(dim - rank)])
    W = u @ (sigma[:, None] * v.T)
    b = rng.standard_normal(dim)
    problem = QuadraticSplitProblem.from_matrix(W, b)
    problem.default_start = problem.x_star + rng.standard_normal(dim)
    return problem


# ---------------------------------------------------------------------------
# composite quadratic
# ---------------------------------------------------------------------------

def _composite_value(W, b, terms, partition, x) -> float:
    r = W @ x - b
    total = float(r @ r)
    for i, idx in enumerate(partition.blocks):
        total += float(terms[i].value(x[idx]))
    return total


def _prox_all(terms, partition, z, step_const) -> np.ndarray:
    out = np.asarray(z, dtype=float).copy()
    for i, idx in enumerate(partition.blocks):
        t = terms[i]
        if not t.is_zero:
            out[idx] = t.prox(out[idx], step_const)
    return out


def _grad_mapping_norm(W, b, terms, partition, x, l_smooth) -> float:
    g = 2.0 * (W.T @ (W @ x - b))
    t = _prox_all(terms, partition, x - g / l_smooth, l_smooth)
    return float(np.linalg.norm(l_smooth * (x - t)))


def _fista_reference(W, b, terms, partition, l_smooth, dim,
                     tol: float = 1e-12, max_iters: int = 400_000) -> np.ndarray:
    """Accelerated prox-gradient run to a tiny gradient-mapping norm. First of
    the two independent optimum solvers.

    Restarts use the gradient criterion <y - x_new, x_new - x> > 0; a
    function-value criterion would stall at the rounding floor of F long
    before the mapping norm reaches the tolerance."""
    x = np.zeros(dim)
    y = x.copy()
    t = 1.0
    for k in range(max_iters):
        g = 2.0 * (W.T @ (W @ y - b))
        x_new = _prox_all(terms, partition, y - g / l_smooth, l_smooth)
        if float((y - x_new) @ (x_new - x)) > 0.0:
            t = 1.0
            y = x.copy()
            g = 2.0 * (W.T @ (W @ y - b))
            x_new = _prox_all(terms, partition, y - g / l_smooth, l_smooth)
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
        if k % 25 == 0 and _grad_mapping_norm(W, b, terms, partition, x, l_smooth) <= tol:
            return x
    if _grad_mapping_norm(W, b, terms, partition, x, l_smooth) <= 10 * tol:
        return x
    raise SolverError("prox-gradient reference failed to reach the mapping tolerance")


def _coordinate_descent_reference(W, b, terms, partition, l_smooth, dim,
                                  tol: float = 1e-12,
                                  max_sweeps: int = 200_000) -> np.ndarray:
    """Exact cyclic coordinate minimization over the full vector, started from
    zero. Second, independent optimum solver."""
    gram = W.T @ W
    lin = W.T @ b
    diag = np.diag(gram)
    weight = np.zeros(dim)
    lo = np.full(dim, -np.inf)
    hi = np.full(dim, np.inf)
    for i, idx in enumerate(partition.blocks):
        t = terms[i]
        if isinstance(t, L1Term):
            weight[idx] = t.weight
        elif isinstance(t, BoxTerm):
            lo[idx], hi[idx] = t.lo, t.hi
    x = np.zeros(dim)
    for sweep in range(max_sweeps):
        delta = 0.0
        for j in range(dim):
            r = lin[j] - (gram[j] @ x - diag[j] * x[j])
            if weight[j] > 0.0:
                new = soft_threshold(np.array([r]), 0.5 * weight[j])[0] / diag[j]
            else:
                new = r / diag[j]
            new = min(hi[j], max(lo[j], new))
            delta = max(delta, abs(new - x[j]))
            x[j] = new
        if delta < 1e-15 * (1.0 + float(np.abs(x).max())):
            break
    if _grad_mapping_norm(W, b, terms, partition, x, l_smooth) > 100 * tol:
        raise SolverError("coordinate-descent reference failed to converge")
    return x


def _block_coordinate_descent(gram, lin, x_init, weight, lo, hi,
                              max_sweeps: int = 100_000) -> np.ndarray:
    """Exact coordinate descent for one block subproblem
    min_z z^T gram z - 2 lin^T z + weight ||z||_1 over [lo, hi]."""
    x = x_init.copy()
    diag = np.diag(gram)
    for sweep in range(max_sweeps):
        delta = 0.0
        for j in range(x.size):
            r = lin[j] - (gram[j] @ x - diag[j] * x[j])
            if weight > 0.0:
                new = math.copysign(max(abs(r) - 0.5 * weight, 0.0), r) / diag[j]
            else:
                new = r / diag[j]
            new = min(hi, max(lo, new))
            delta = max(delta, abs(new - x[j]))
            x[j] = new
        if delta < 1e-15 * (1.0 + float(np.abs(x).max())):
            break
    return x


@dataclass
class CompositeQuadraticProblem:
    """||W x - b||^2 plus per-block l1 / box / zero terms."""

    W: np.ndarray
    b: np.ndarray
    partition: BlockPartition
    terms: tuple
    x_star: np.ndarray
    f_star: float
    l_global: float
    mu_global: float
    l_blocks: tuple[float, ...]
    mu_blocks: tuple[float, ...]
    default_start: np.ndarray
    _cols: tuple[np.ndarray, ...] = field(repr=False, default=())
    _grams: tuple[np.ndarray, ...] = field(repr=False, default=())
    _facts: tuple[SpdFactorization, ...] = field(repr=False, default=())

    def smooth_value(self, x: np.ndarray) -> float:
        r = self.W @ x - self.b
        return float(r @ r)

    def block_gradient(self, x: np.ndarray, i: int) -> np.ndarray:
        return 2.0 * (self._cols[i].T @ (self.W @ x - self.b))

    def block_argmin(self, x: np.ndarray, i: int) -> np.ndarray:
        idx = self.partition.blocks[i]
        lin = self._cols[i].T @ (self.b - self.W @ x + self._cols[i] @ x[idx])
        term = self.terms[i]
        out = x.copy()
        if term.is_zero:
            out[idx] = solve_spd(self._facts[i], lin)
            return out
        if isinstance(term, L1Term):
            weight, lo, hi = term.weight, -np.inf, np.inf
        elif isinstance(term, BoxTerm):
            weight, lo, hi = 0.0, term.lo, term.hi
        else:
            raise SolverError("no exact block solver for this term type")
        out[idx] = _block_coordinate_descent(self._grams[i], lin, x[idx], weight, lo, hi)
        return out

    def line_minimizer(self, x: np.ndarray, d: np.ndarray) -> float:
        wd = self.W @ d
        curv = 2.0 * float(wd @ wd)
        if curv == 0.0:
            return 0.0
        return -float(2.0 * (self.W.T @ (self.W @ x - self.b)) @ d) / curv

    def handle(self) -> ObjectiveHandle:
        return ObjectiveHandle(
            partition=self.partition,
            smooth_value=self.smooth_value,
            block_gradient=self.block_gradient,
            block_argmin=self.block_argmin,
            terms=self.terms,
            l_global=self.l_global,
            mu_global=self.mu_global,
            l_blocks=self.l_blocks,
            mu_blocks=self.mu_blocks,
            optimum=(self.x_star, self.f_star),
            line_minimizer=self.line_minimizer)


def make_composite(seed: int, dim: int, gamma: float,
                   kinds: tuple[str, str] = ("l1", "zero"),
                   box_bounds: tuple[float, float] = (-0.5, 0.5),
                   cond_number: float = 50.0) -> CompositeQuadraticProblem:
    """Composite instance; by default l1 (weight gamma) on block 1, nothing on
    block 2. The reference optimum is computed by accelerated prox-gradient and
    cross-validated by coordinate descent before it is trusted."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if dim % 2 != 0 or dim < 4:
        raise BadDimension("dim must be even and >= 4")
    rng = np.random.default_rng(seed)
    W = _design_matrix(rng, dim, cond_number)
    b = rng.standard_normal(dim)
    partition = BlockPartition.halves(dim)

    def build_term(kind: str):
        if kind == "zero":
            return ZeroTerm()
        if kind == "l1":
            return L1Term(weight=gamma)
        if kind == "box":
            return BoxTerm(lo=box_bounds[0], hi=box_bounds[1])
        raise ValueError(f"unknown term kind {kind!r}")

    terms = tuple(build_term(k) for k in kinds)
    gram = W.T @ W
    lam = np.linalg.eigvalsh(gram)
    l_global, mu_global = 2.0 * lam[-1], 2.0 * lam[0]
    cols = tuple(W[:, idx] for idx in partition.blocks)
    grams = tuple(c.T @ c for c in cols)
    facts = tuple(cholesky(g) for g in grams)
    l_blocks = tuple(2.0 * spectral_extremes(g)[1] for g in grams)

    x_a = _fista_reference(W, b, terms, partition, l_global, dim)
    x_b = _coordinate_descent_reference(W, b, terms, partition, l_global, dim)
    f_a = _composite_value(W, b, terms, partition, x_a)
    f_b = _composite_value(W, b, terms, partition, x_b)
    if abs(f_a - f_b) > 1e-10 * (1.0 + abs(f_a)):
        raise SolverError("reference optima disagree beyond tolerance")
    x_star, f_star = (x_a, f_a) if f_a <= f_b else (x_b, f_b)

    start = x_star + rng.standard_normal(dim)
    for i, idx in enumerate(partition.blocks):
        if isinstance(terms[i], BoxTerm):
            start[idx] = np.clip(start[idx], terms[i].lo, terms[i].hi)
    return CompositeQuadraticProblem(
        W=W, b=b, partition=partition, terms=terms, x_star=x_star, f_star=f_star,
        l_global=l_global, mu_global=mu_global, l_blocks=l_blocks,
        mu_blocks=(mu_global,) * partition.n_blocks, default_start=start,
        _cols=cols, _grams=grams, _facts=facts)


# ---------------------------------------------------------------------------
# gradient-dominated nonlinear least squares
# ---------------------------------------------------------------------------

@dataclass
class NonlinearEqPlProblem:
    """f(x) = ||g(x)||^2 for g(x) = A x + eps sin(x_{1..m}) + c, m < n.

    sigma_min(A) = 1 and |eps| < 1 keep the Jacobian uniformly full-rank:
    lambda_min(J J^T) >= (1 - eps)^2 = mu_j everywhere, so f is gradient
    dominated with PL constant 2 mu_j. The system is consistent by
    construction, so f* = 0 at a known solution point.
    """

    amat: np.ndarray
    c: np.ndarray
    eps: float
    mu_j: float
    partition: BlockPartition
    x_solution: np.ndarray
    default_start: np.ndarray

    @property
    def n_residuals(self) -> int:
        return self.amat.shape[0]

    def residual(self, x: np.ndarray) -> np.ndarray:
        m = self.n_residuals
        return self.amat @ x + self.eps * np.sin(x[:m]) + self.c

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        m = self.n_residuals
        jac = self.amat.copy()
        jac[np.arange(m), np.arange(m)] += self.eps * np.cos(x[:m])
        return jac

    def smooth_value(self, x: np.ndarray) -> float:
        r = self.residual(x)
        return float(r @ r)

    def full_grad(self, x: np.ndarray) -> np.ndarray:
        return 2.0 * (self.jacobian(x).T @ self.residual(x))

    def block_gradient(self, x: np.ndarray, i: int) -> np.ndarray:
        return self.full_grad(x)[self.partition.blocks[i]]

    def _block_hessian(self, x: np.ndarray, idx: np.ndarray) -> np.ndarray:
        m = self.n_residuals
        jac = self.jacobian(x)[:, idx]
        hess = 2.0 * (jac.T @ jac)
        r = self.residual(x)
        curv = np.zeros(x.size)
        curv[:m] = -self.eps * np.sin(x[:m]) * r
        hess[np.arange(idx.size), np.arange(idx.size)] += 2.0 * curv[idx]
        return hess

    def block_argmin(self, x: np.ndarray, i: int) -> np.ndarray:
        idx = self.partition.blocks[i]

        def fun(z):
            p = x.copy()
            p[idx] = z
            return self.smooth_value(p)

        def jac(z):
            p = x.copy()
            p[idx] = z
            return self.full_grad(p)[idx]

        def hess(z):
            p = x.copy()
            p[idx] = z
            return self._block_hessian(p, idx)

        res = scipy.optimize.minimize(fun, x[idx], jac=jac, hess=hess,
                                      method="trust-exact",
                                      options={"gtol": 1e-13, "maxiter": 400})
        z = res.x
        # Newton polish to push the block gradient to rounding level
        for _ in range(8):
            p = x.copy()
            p[idx] = z
            g = self.full_grad(p)[idx]
            if np.linalg.norm(g) <= 1e-12 * (1.0 + abs(self.smooth_value(p))):
                break
            h = self._block_hessian(p, idx)
            try:
                step = np.linalg.solve(h, g)
            except np.linalg.LinAlgError:
                break
            z_new = z - step
            p_new = x.copy()
            p_new[idx] = z_new
            if self.smooth_value(p_new) > self.smooth_value(p):
                break
            z = z_new
        out = x.copy()
        out[idx] = z
        return out

    def handle(self) -> ObjectiveHandle:
        return ObjectiveHandle(
            partition=self.partition,
            smooth_value=self.smooth_value,
            block_gradient=self.block_gradient,
            block_argmin=self.block_argmin,
            optimum=(self.x_solution, 0.0))

    @property
    def pl_constant(self) -> float:
        """PL modulus of f: ||grad f||^2 >= 2 * pl_constant * (f - f*)."""
        return 2.0 * self.mu_j


def make_nonlinear_pl(seed: int, n: int, m: int,
                      eps: float = 0.25) -> NonlinearEqPlProblem:
    """Consistent nonlinear system with a uniform Jacobian rank bound."""
    if not 0 < m < n:
        raise BadShape("need 0 < m < n")
    if not 0.0 <= eps <= 0.5:
        raise ValueError("need 0 <= eps <= 1/2 for the Jacobian bound")
    if n % 2 != 0:
        raise BadShape("n must be even for the two-halves partition")
    rng = np.random.default_rng(seed)
    u = _orthogonal(rng, m)
    v = _orthogonal(rng, n)
    sigma = np.geomspace(1.0, 2.0, m)  # sigma_min(A) = 1 exactly
    amat = u @ (sigma[:, None] * v[:, :m].T)
    x_solution = 0.5 * rng.standard_normal(n)
    c = -(amat @ x_solution + eps * np.sin(x_solution[:m]))
    start = x_solution + 0.4 * rng.standard_normal(n)
    return NonlinearEqPlProblem(
        amat=amat, c=c, eps=eps, mu_j=(1.0 - eps) ** 2,
        partition=BlockPartition.halves(n), x_solution=x_solution,
        default_start=start)

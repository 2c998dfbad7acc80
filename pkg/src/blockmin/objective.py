"""Block-structured objective contract.

An objective is F(x) = f(x) + sum_i g_i(x_i) where f is smooth and each g_i
is a convex, possibly non-smooth per-block term (constraints enter as
indicator terms). The handle exposes exactly what solvers and certificates
consume: value, per-block gradients, optional exact per-block minimization,
per-block composite terms with prox operators, declared smoothness/strong
convexity constants, and an optional optimum oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, NoBlockSolver


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint split of coordinate indices 0..total_dim-1 into blocks."""

    total_dim: int
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.total_dim < 1:
            raise ValueError("total_dim must be positive")
        seen = np.zeros(self.total_dim, dtype=bool)
        norm_blocks = []
        for b in self.blocks:
            idx = np.asarray(b, dtype=int)
            if idx.size == 0:
                raise ValueError("empty block")
            if idx.min() < 0 or idx.max() >= self.total_dim:
                raise ValueError("block index out of range")
            if seen[idx].any():
                raise ValueError("blocks are not disjoint")
            seen[idx] = True
            norm_blocks.append(idx)
        if not seen.all():
            raise ValueError("blocks do not cover all coordinates")
        object.__setattr__(self, "blocks", tuple(norm_blocks))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def block_size(self, i: int) -> int:
        return int(self.blocks[i].size)

    @classmethod
    def contiguous(cls, sizes: Sequence[int]) -> "BlockPartition":
        """Partition into consecutive index ranges of the given sizes."""
        total = int(sum(sizes))
        blocks = []
        start = 0
        for s in sizes:
            blocks.append(np.arange(start, start + s))
            start += s
        return cls(total_dim=total, blocks=tuple(blocks))

    @classmethod
    def halves(cls, dim: int) -> "BlockPartition":
        if dim % 2 != 0:
            raise ValueError("dim must be even for a two-halves partition")
        return cls.contiguous([dim // 2, dim // 2])


@dataclass(frozen=True)
class ObjectiveHandle:
    """Immutable handle for a block-structured objective.

    Parameters
    ----------
    partition : BlockPartition
    smooth_value : callable x -> float
        The smooth part f.
    block_gradient : callable (x, i) -> ndarray of length n_i
        Gradient of f over the coordinates of block i.
    block_argmin : callable (x, i) -> ndarray, optional
        Full-length point minimizing F over block i with the other blocks
        fixed at x. Only the block-i coordinates of the result are used.
    terms : tuple of per-block composite terms, optional
        Each term provides value(x_i), prox(z, step) (or None), and the flags
        is_zero / unconstrained; see blockmin.proxmaps. None means g == 0.
    l_global, mu_global : float, optional
        Smoothness / strong convexity constants of f. None means unknown.
    l_blocks, mu_blocks : tuple of float, optional
        Per-block constants. None means unknown.
    optimum : (x_star, f_star_composite) pair, optional
        Oracle used by certificates to measure exact gaps.
    line_minimizer : callable (x, d) -> float, optional
        Unclipped minimizer of t -> f(x + t d); exact line searches use it
        instead of a numeric search when present (closed form for quadratics).
    """

    partition: BlockPartition
    smooth_value: Callable[[np.ndarray], float]
    block_gradient: Callable[[np.ndarray, int], np.ndarray]
    block_argmin: Callable[[np.ndarray, int], np.ndarray] | None = None
    terms: tuple | None = None
    l_global: float | None = None
    mu_global: float | None = None
    l_blocks: tuple[float, ...] | None = None
    mu_blocks: tuple[float, ...] | None = None
    optimum: tuple[np.ndarray, float] | None = field(default=None, repr=False)
    line_minimizer: Callable[[np.ndarray, np.ndarray], float] | None = None

    def __post_init__(self):
        if self.terms is not None and len(self.terms) != self.partition.n_blocks:
            raise ValueError("one composite term per block required")
        if self.l_global is not None and self.mu_global is not None:
            if not (self.l_global >= self.mu_global >= 0.0):
                raise ValueError("need L >= mu >= 0")
        if self.l_blocks is not None and self.mu_blocks is not None:
            for li, mi in zip(self.l_blocks, self.mu_blocks):
                if not (li >= mi >= 0.0):
                    raise ValueError("need L_i >= mu_i >= 0 in every block")

    # -- structure helpers -------------------------------------------------

    @property
    def dim(self) -> int:
        return self.partition.total_dim

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    def term(self, i: int):
        return None if self.terms is None else self.terms[i]

    def is_smooth(self) -> bool:
        """True when every composite term is identically zero."""
        if self.terms is None:
            return True
        return all(t is None or t.is_zero for t in self.terms)

    def block_unconstrained(self, i: int) -> bool:
        t = self.term(i)
        return True if t is None else bool(t.unconstrained)

    def _check_dim(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point has shape {x.shape}, expected ({self.dim},)")
        return x

    # -- operations --------------------------------------------------------

    def full_gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient of f assembled from the per-block gradients."""
        x = self._check_dim(x)
        out = np.empty(self.dim)
        for i, idx in enumerate(self.partition.blocks):
            gi = np.asarray(self.block_gradient(x, i), dtype=float)
            if gi.shape != (idx.size,):
                raise DimensionMismatch(
                    f"block_gradient({i}) returned shape {gi.shape}, expected ({idx.size},)")
            out[idx] = gi
        return out

    def composite_value(self, x: np.ndarray) -> float:
        """F(x) = f(x) + sum_i g_i(x_i)."""
        x = self._check_dim(x)
        total = float(self.smooth_value(x))
        if self.terms is not None:
            for i, idx in enumerate(self.partition.blocks):
                t = self.terms[i]
                if t is not None and not t.is_zero:
                    total += float(t.value(x[idx]))
        return total

    def exact_block_min(self, x: np.ndarray, i: int) -> np.ndarray:
        """Minimize F over block i with the other blocks fixed.

        The result is spliced onto x so only block-i coordinates change.
        """
        x = self._check_dim(x)
        if self.block_argmin is None:
            raise NoBlockSolver(f"objective provides no block minimizer (block {i})")
        z = np.asarray(self.block_argmin(x, i), dtype=float)
        if z.shape != (self.dim,):
            raise DimensionMismatch(
                f"block_argmin({i}) returned shape {z.shape}, expected ({self.dim},)")
        out = x.copy()
        idx = self.partition.blocks[i]
        out[idx] = z[idx]
        return out

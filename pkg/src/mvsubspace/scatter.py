"""Block Gram matrices and scatter constructions on multi-view data.

Every matrix produced here is explicitly symmetrized, so downstream
eigensolvers never see asymmetry beyond exact floating-point roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import center_columns


def symmetrize(M):
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class BlockMatrix:
    """A v x v grid of blocks; block (s, t) has shape (d_s, d_t)."""

    blocks: tuple
    dims: tuple

    def __post_init__(self):
        v = len(self.dims)
        if len(self.blocks) != v or any(len(row) != v for row in self.blocks):
            raise ValueError("blocks must form a v x v grid")
        for s in range(v):
            for t in range(v):
                B = self.blocks[s][t]
                if B.shape != (self.dims[s], self.dims[t]):
                    raise ValueError(
                        f"block ({s}, {t}) has shape {B.shape}, expected "
                        f"({self.dims[s]}, {self.dims[t]})"
                    )

    @property
    def total_dim(self):
        return int(sum(self.dims))

    def dense(self):
        """Materialize the grid as a single (sum d_s) square array."""
        return np.block([[self.blocks[s][t] for t in range(len(self.dims))]
                         for s in range(len(self.dims))])


def gram_blocks(views):
    """Cross-view Gram grid: block (s, t) = X_s X_t^T, diagonals symmetrized."""
    v = len(views)
    blocks = [[None] * v for _ in range(v)]
    for s in range(v):
        for t in range(s, v):
            B = views[s] @ views[t].T
            if s == t:
                blocks[s][s] = symmetrize(B)
            else:
                blocks[s][t] = B
                blocks[t][s] = B.T
    dims = tuple(V.shape[0] for V in views)
    return BlockMatrix(tuple(tuple(row) for row in blocks), dims)


def block_diagonal(bm):
    """Copy of a BlockMatrix with all off-diagonal blocks zeroed."""
    v = len(bm.dims)
    blocks = tuple(
        tuple(bm.blocks[s][t] if s == t else np.zeros((bm.dims[s], bm.dims[t]))
              for t in range(v))
        for s in range(v)
    )
    return BlockMatrix(blocks, bm.dims)


def blockdiag_dense(matrices):
    """Dense block-diagonal assembly of square matrices."""
    dims = [M.shape[0] for M in matrices]
    out = np.zeros((sum(dims), sum(dims)))
    pos = 0
    for M in matrices:
        d = M.shape[0]
        out[pos:pos + d, pos:pos + d] = M
        pos += d
    return out


def between_class_scatter(X, indicator):
    """S_b = X (Q - (1/n) 1 1^T) X^T.

    The kernel is centered, so raw and column-centered X give the same
    matrix.  Summing with the within-class scatter recovers the centered
    covariance X H_n X^T.
    """
    n = X.shape[1]
    K = indicator.Q - 1.0 / n
    return symmetrize(X @ K @ X.T)


def within_class_scatter(X, indicator):
    """S_w = X (I - Q) X^T, deviations from per-class means."""
    n = X.shape[1]
    K = np.eye(n) - indicator.Q
    return symmetrize(X @ K @ X.T)


def center_distance_kernel(indicator):
    """n x n kernel L_b = Y^T Sigma^-1 H_c Sigma^-1 Y.

    Sandwiching with raw views, X_s L_b X_t^T spreads the per-class mean
    vectors of the two views around their average.
    """
    Yn = indicator.Y / indicator.counts[:, None]
    c = indicator.n_classes
    Hc = np.eye(c) - np.full((c, c), 1.0 / c)
    return symmetrize(Yn.T @ Hc @ Yn)


def mean_outer_blocks(views):
    """Per-view and stacked outer products of the (unnormalized) view means.

    Returns ``(per_view, stacked)`` where per_view[s] = (1/n) X_s 1 1^T X_s^T
    and stacked = (1/(n v)) X 1 1^T X^T over the stacked views.
    """
    n = views[0].shape[1]
    v = len(views)
    sums = [X.sum(axis=1) for X in views]
    per_view = [symmetrize(np.outer(r, r)) / n for r in sums]
    full = np.concatenate(sums)
    stacked = symmetrize(np.outer(full, full)) / (n * v)
    return per_view, stacked


def regularized_gram_inverse(X, view_index=0):
    """(X^T X + eps I)^-1 with the scale-aware jitter eps = 1e-10 tr(X^T X)/d."""
    d, n = X.shape
    G = X.T @ X
    eps = 1e-10 * np.trace(G) / d
    try:
        K = np.linalg.inv(symmetrize(G + eps * np.eye(n)))
    except np.linalg.LinAlgError:
        raise ValueError(
            f"view {view_index + 1}: X^T X is singular even after jitter"
        ) from None
    return symmetrize(K)


def pseudo_inverse_coupling(views):
    """BlockMatrix M with blocks built from ridge-regularized pseudo-inverses.

    With F_s = X_s (X_s^T X_s + eps I)^-1, the blocks are
    (v - 1) F_s F_s^T on the diagonal and -F_s F_t^T off it, so that
    tr(W^T P^T M P W) sums the pairwise squared differences of the per-view
    representer coefficients.
    """
    v = len(views)
    F = [X @ regularized_gram_inverse(X, s) for s, X in enumerate(views)]
    blocks = [[None] * v for _ in range(v)]
    for s in range(v):
        for t in range(v):
            if s == t:
                blocks[s][s] = symmetrize((v - 1) * (F[s] @ F[s].T))
            else:
                blocks[s][t] = -(F[s] @ F[t].T)
    dims = tuple(V.shape[0] for V in views)
    return BlockMatrix(tuple(tuple(row) for row in blocks), dims)


def centered_gram(X):
    """X H_n X^T via explicit column centering."""
    Xc = center_columns(X)
    return symmetrize(Xc @ Xc.T)

"""Regularizer terms for the unified multi-view objective.

Each builder returns a RegularizerTerm holding two symmetric d x d matrices,
where d is the stacked dimension over views.  ``constraint_add`` is added to
the constraint side of the eigenproblem (these penalties act through the
normalization of the projections), ``objective_sub`` is subtracted from the
objective side (these act through the coupling being maximized).  Exactly one
of the two is nonzero for every builder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scatter import (
    between_class_scatter,
    blockdiag_dense,
    gram_blocks,
    block_diagonal,
    mean_outer_blocks,
    pseudo_inverse_coupling,
    symmetrize,
)


@dataclass(frozen=True)
class RegularizerTerm:
    constraint_add: np.ndarray
    objective_sub: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("regularizer weight must be nonnegative")
        if self.constraint_add.shape != self.objective_sub.shape:
            raise ValueError("constraint_add and objective_sub must share a shape")


def _term(constraint_add=None, objective_sub=None, d=None):
    zero = np.zeros((d, d))
    return RegularizerTerm(
        constraint_add=zero if constraint_add is None else symmetrize(constraint_add),
        objective_sub=zero if objective_sub is None else symmetrize(objective_sub),
    )


def tikhonov(dims, gammas):
    """Ridge on the projection blocks: blockdiag(gamma_s I_{d_s})."""
    if np.isscalar(gammas):
        gammas = [float(gammas)] * len(dims)
    if len(gammas) != len(dims):
        raise ValueError("need one gamma per view")
    if any(g < 0 for g in gammas):
        raise ValueError("tikhonov gammas must be nonnegative")
    blocks = [g * np.eye(d) for g, d in zip(gammas, dims)]
    d = int(sum(dims))
    return _term(constraint_add=blockdiag_dense(blocks), d=d)


def mean_consistency(views):
    """Penalty on pairwise distances between projected view means.

    Equals (n / 2v) * sum_{s,t} ||mean of P_s^T X_s - mean of P_t^T X_t||^2
    as a quadratic form, assembled from the raw (uncentered) views.
    """
    per_view, stacked = mean_outer_blocks(views)
    M = blockdiag_dense(per_view) - stacked
    return _term(constraint_add=M, d=M.shape[0])


def representer_consistency(views):
    """Penalty on pairwise distances between per-view representer coefficients.

    Writing P_s W = X_s beta_s with the ridge pseudo-inverse, the quadratic
    form tr(W^T P^T M P W) equals (1/2) sum_{s,t} ||beta_s - beta_t||_F^2.
    """
    M = pseudo_inverse_coupling(views).dense()
    return _term(constraint_add=M, d=M.shape[0])


def hsic_alignment(views, indicator):
    """Label-alignment reward: minus the per-view between-class scatters.

    The term is negative semidefinite on the constraint side; it loosens the
    normalization along directions whose projections align with the labels.
    """
    blocks = [between_class_scatter(X, indicator) for X in views]
    M = -blockdiag_dense(blocks)
    return _term(constraint_add=M, d=M.shape[0])


def cca_coupling(transformed_views):
    """Penalty on pairwise distances between projected views.

    (1/2) sum_{s,t} ||P_s^T Xt_s - P_t^T Xt_t||_F^2 as a quadratic form
    v * C_diag - C over the transformed views; positive semidefinite, and
    subtracted from the objective side.
    """
    grid = gram_blocks(transformed_views)
    C = grid.dense()
    C_diag = block_diagonal(grid).dense()
    M = len(transformed_views) * C_diag - C
    return _term(objective_sub=M, d=M.shape[0])


def lda_per_view(views, indicator, lam):
    """Per-view discriminant shaping subtracted from the objective.

    blockdiag(X_s R X_s^T) with R = H_n - lam * (Q - (1/n) 1 1^T): each view
    trades its total covariance against lam times its between-class scatter.
    """
    if lam < 0:
        raise ValueError("lda_per_view lam must be nonnegative")
    n = views[0].shape[1]
    H = np.eye(n) - np.full((n, n), 1.0 / n)
    R = H - lam * (indicator.Q - 1.0 / n)
    blocks = [symmetrize(X @ R @ X.T) for X in views]
    M = blockdiag_dense(blocks)
    return _term(objective_sub=M, d=M.shape[0])

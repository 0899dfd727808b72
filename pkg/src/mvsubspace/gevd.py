"""Symmetric-definite generalized eigenvalue problems.

The solver reduces  A p = lambda B p  (A symmetric, B symmetric positive
definite) to an ordinary symmetric eigenproblem by Cholesky whitening:

    B = L L^T,   C = L^-1 A L^-T,   C u = lambda u,   p = L^-T u.

Eigenvalues are returned in descending order and the recovered vectors are
B-orthonormal, P^T B P = I_k.  Signs are fixed deterministically so repeated
solves of the same problem agree exactly: the largest-magnitude entry of each
column of P is made positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .scatter import symmetrize


class NumericalError(RuntimeError):
    """Numerical failure: indefinite constraint or degenerate spectrum."""


def _check_symmetric(M, name):
    scale = np.abs(M).max()
    tol = 1e-10 * max(scale, 1.0)
    if np.abs(M - M.T).max() > tol:
        raise ValueError(f"{name} matrix is not symmetric")


@dataclass(frozen=True)
class GevdProblem:
    """A pencil (objective, constraint) with the number of directions to keep."""

    objective: np.ndarray
    constraint: np.ndarray
    k: int

    def __post_init__(self):
        A = np.asarray(self.objective, dtype=float)
        B = np.asarray(self.constraint, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("objective must be a square matrix")
        if B.shape != A.shape:
            raise ValueError("objective and constraint must share a shape")
        _check_symmetric(A, "objective")
        _check_symmetric(B, "constraint")
        if not 1 <= self.k <= A.shape[0]:
            raise ValueError(
                f"k={self.k} is out of range for problem dimension d={A.shape[0]}"
            )
        object.__setattr__(self, "objective", symmetrize(A))
        object.__setattr__(self, "constraint", symmetrize(B))

    @property
    def dim(self):
        return self.objective.shape[0]


@dataclass(frozen=True)
class GevdSolution:
    """Top-k eigenpairs: P is d x k with P^T constraint P = I_k."""

    P: np.ndarray
    eigenvalues: np.ndarray
    spectrum_gap: float


def _fix_signs(P):
    P = P.copy()
    for j in range(P.shape[1]):
        i = int(np.argmax(np.abs(P[:, j])))
        if P[i, j] < 0:
            P[:, j] = -P[:, j]
    return P


def solve(problem):
    """Solve the pencil and return the top-k B-orthonormal eigenvectors."""
    A = problem.objective
    B = problem.constraint
    d = problem.dim
    k = problem.k
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise NumericalError(
            "constraint matrix is not positive definite; increase the "
            "tikhonov gamma"
        ) from None
    # C = L^-1 A L^-T via two triangular solves.
    T = solve_triangular(L, A, lower=True)
    C = solve_triangular(L, T.T, lower=True).T
    C = symmetrize(C)
    eigvals, U = np.linalg.eigh(C)
    eigvals = eigvals[::-1]
    U = U[:, ::-1]
    gap = float(eigvals[k - 1] - eigvals[k]) if k < d else 0.0
    P = solve_triangular(L, U[:, :k], lower=True, trans="T")
    P = _fix_signs(P)
    return GevdSolution(P=P, eigenvalues=eigvals[:k].copy(), spectrum_gap=gap)


def objective_value(solution):
    """Sum of the retained eigenvalues, the optimum of the trace objective."""
    return float(solution.eigenvalues.sum())

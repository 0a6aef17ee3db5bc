"""
Primal active-set method for the Euclidean projection onto the feasible direction set
"""
from typing import List, Optional

import numpy as np
from loguru import logger

from ..config import settings
from ..core.errors import IterationLimitError
from .geometry import FeasibleSetSpec


def _solve_kkt(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve [[I, A^T], [A, 0]] [p; lam] = [rhs; 0]"""
    n, k = A.shape[1], A.shape[0]
    kkt = np.zeros((n + k, n + k))
    kkt[:n, :n] = np.eye(n)
    kkt[:n, n:] = A.T
    kkt[n:, :n] = A
    b = np.concatenate([rhs, np.zeros(k)])
    try:
        return np.linalg.solve(kkt, b)
    except np.linalg.LinAlgError:
        # dependent working rows: any minimizer of the residual will do
        return np.linalg.lstsq(kkt, b, rcond=None)[0]


def qp_project(
    mu: np.ndarray,
    spec: FeasibleSetSpec,
    tol: float = 1e-12,
    max_iterations: Optional[int] = None,
) -> np.ndarray:
    """argmin ||q - mu||^2 over {sum(q) = 0, G q <= 1}

    Starts from q = 0, which is always feasible, with an empty working set.
    """
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if mu.shape != spec.u.shape:
        raise ValueError(f"mu has {mu.size} entries, expected {spec.m}")
    if spec.contains(mu, tol=settings.membership_tolerance):
        return mu.copy()

    # G 1 = 0, so the projection of mu equals the projection of its centered version
    target = mu - mu.mean()
    if spec.epsilon == 0.0 or spec.contains(target, tol=settings.membership_tolerance):
        return target

    m = spec.m
    G, h = spec.constraint_matrix()
    rows = np.flatnonzero(spec.u > 0.0)
    max_iterations = settings.qp_iteration_factor * m if max_iterations is None else max_iterations

    q = np.zeros(m)
    working: List[int] = []
    for iteration in range(max_iterations):
        A = np.vstack([np.ones((1, m)), G[working]])
        solution = _solve_kkt(A, target - q)
        p = solution[:m]
        multipliers = solution[m + 1:]

        if np.linalg.norm(p) <= tol * max(1.0, np.linalg.norm(target)):
            if multipliers.size == 0 or multipliers.min() >= -1e-10:
                logger.debug(f"qp_project: converged in {iteration} iterations, working set {working}")
                return q
            working.pop(int(np.argmin(multipliers)))
            continue

        # longest step along p that keeps every constraint outside W satisfied
        step, blocking = 1.0, -1
        Gp = G @ p
        slack = np.maximum(h - G @ q, 0.0)
        for i in rows:
            if i in working or Gp[i] <= tol:
                continue
            ratio = slack[i] / Gp[i]
            if ratio < step:
                step, blocking = ratio, int(i)
        q = q + step * p
        if blocking >= 0:
            working.append(blocking)

    raise IterationLimitError(
        f"active-set projection did not converge in {max_iterations} iterations",
        {"iterate": q.tolist(), "working_set": list(working), "mu": mu.tolist()},
    )

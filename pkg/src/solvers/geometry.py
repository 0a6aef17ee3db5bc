"""
Curvature matrix Q = diag(u) - u u^T and the feasible direction set
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class CurvatureMatrix:
    """Q stored implicitly through the normalized weights u"""
    weights_normalized: np.ndarray

    def __post_init__(self):
        u = np.array(self.weights_normalized, dtype=float).reshape(-1)
        if np.any(u < 0.0):
            raise ValueError(f"normalized weights must be nonnegative, got min {u.min()}")
        total = u.sum()
        if total <= 0.0:
            raise ValueError("normalized weights must have positive mass")
        u = u / total
        u.setflags(write=False)
        object.__setattr__(self, "weights_normalized", u)

    @property
    def u(self) -> np.ndarray:
        return self.weights_normalized

    @property
    def m(self) -> int:
        return self.u.size

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.u * x - self.u * (self.u @ x)

    def quadratic(self, left: np.ndarray, right: np.ndarray) -> float:
        """left^T Q right"""
        return float(np.asarray(left, dtype=float) @ self.matvec(right))

    def dense(self) -> np.ndarray:
        return np.diag(self.u) - np.outer(self.u, self.u)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.dense()).min())


def curvature_matrix(u: np.ndarray) -> CurvatureMatrix:
    return CurvatureMatrix(np.asarray(u, dtype=float))


@dataclass(frozen=True, eq=False)
class FeasibleSetSpec:
    """Directions q with sum(q) = 0 and (eps/2)(q_i - u^T q) <= 1

    The inequality rows keep p = u - (eps/2) Q q nonnegative. Options
    carrying zero weight have p_i = 0 whatever q is, so membership only
    checks the rows with u_i > 0.
    """
    u: np.ndarray
    epsilon: float

    def __post_init__(self):
        u = np.array(self.u, dtype=float).reshape(-1)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        if not np.isfinite(self.epsilon) or self.epsilon < 0.0:
            raise ValueError(f"epsilon must be a nonnegative real, got {self.epsilon}")

    @property
    def m(self) -> int:
        return self.u.size

    def scaled_deviation(self, q: np.ndarray) -> np.ndarray:
        """(eps/2)(q - 1 u^T q)"""
        q = np.asarray(q, dtype=float)
        return 0.5 * self.epsilon * (q - self.u @ q)

    def contains(self, q: np.ndarray, tol: float = 1e-9) -> bool:
        q = np.asarray(q, dtype=float)
        if q.shape != self.u.shape or abs(q.sum()) > tol:
            return False
        rows = self.u > 0.0
        return bool(np.all(self.scaled_deviation(q)[rows] <= 1.0 + tol))

    def constraint_matrix(self) -> Tuple[np.ndarray, np.ndarray]:
        """(G, h) with G q <= h for the inequality rows"""
        G = 0.5 * self.epsilon * (np.eye(self.m) - np.outer(np.ones(self.m), self.u))
        return G, np.ones(self.m)

    def m2_interval(self) -> Tuple[float, float]:
        """Admissible range of q[0] when m = 2 and q = (q0, -q0)"""
        if self.m != 2:
            raise ValueError("m2_interval needs exactly two options")
        u1, u2 = self.u
        lo = -np.inf if self.epsilon == 0.0 or u1 == 0.0 else -1.0 / (self.epsilon * u1)
        hi = np.inf if self.epsilon == 0.0 or u2 == 0.0 else 1.0 / (self.epsilon * u2)
        return lo, hi

"""Extremal eigenvalues of the walk operator and convergence bounds.

The transition matrix of the uniform neighbor walk is similar to the
symmetric normalized adjacency ``S = D^-1/2 A D^-1/2``, so its spectrum is
computed there. The top eigenpair of ``S`` is known analytically
(eigenvalue 1, eigenvector proportional to sqrt(degrees)) and is deflated
rather than re-computed; the remaining extremal eigenvalues come from an
iterative Krylov solver, which keeps graphs with ~1e6 nodes tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .graphs import Graph, PositionDistribution

__all__ = [
    "SpectralSummary",
    "SpectralConvergenceError",
    "spectral_summary",
    "tv_upper_bound",
    "sum_p_squared_bound",
    "mixing_time",
]

DEFAULT_TOL = 1e-8
DEFAULT_MATVEC_CAP = 10_000

# Dense diagonalization below this size: the Krylov solver needs k < n.
_DENSE_CUTOFF = 3


class SpectralConvergenceError(RuntimeError):
    """Iterative eigenvalue computation hit the matvec cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class SpectralSummary:
    """Second-largest / smallest walk eigenvalues and what follows from them.

    ``gap = min(1 - alpha2, 1 - |alpha_n|)`` controls the geometric decay of
    the distance to stationarity; ``mixing_time`` is ``gap**-1 * log(n)``
    rounded to the nearest integer, or None when the gap is zero (bipartite
    graphs never mix).
    """

    alpha2: float
    alpha_n: float
    gap: float
    mixing_time: int | None


def _normalized_adjacency_operator(g: Graph) -> LinearOperator:
    inv_sqrt = 1.0 / np.sqrt(g.degrees.astype(np.float64))
    adj = g.adj

    def matvec(x):
        return inv_sqrt * (adj @ (inv_sqrt * x))

    return LinearOperator((g.n, g.n), matvec=matvec, dtype=np.float64)


def _dense_normalized_adjacency(g: Graph) -> np.ndarray:
    inv_sqrt = 1.0 / np.sqrt(g.degrees.astype(np.float64))
    return inv_sqrt[:, None] * g.adj.toarray() * inv_sqrt[None, :]


def spectral_summary(
    g: Graph, tol: float = DEFAULT_TOL, matvec_cap: int = DEFAULT_MATVEC_CAP
) -> SpectralSummary:
    """Compute alpha2, alpha_n, the spectral gap, and the mixing time.

    ``tol`` is the relative tolerance of the iterative solver. Bipartite
    graphs get ``alpha_n = -1`` exactly (set from the 2-coloring certificate
    rather than iterated to).
    """
    if not g.is_connected:
        raise ValueError("spectral summary requires a connected graph")

    bipartite = g.is_bipartite

    if g.n < _DENSE_CUTOFF:
        vals = np.linalg.eigvalsh(_dense_normalized_adjacency(g))
        alpha2 = float(vals[-2])
        alpha_n = float(vals[0])
    else:
        op = _normalized_adjacency_operator(g)
        v1 = np.sqrt(g.degrees / (2.0 * g.m))
        ncv = min(g.n, 20)
        maxiter = max(1, matvec_cap // ncv)

        # Shift the known top eigenpair down to -1 so the next-largest
        # eigenvalue of the deflated operator is alpha2 itself.
        def deflated(x):
            return op.matvec(x) - 2.0 * v1 * np.dot(v1, x)

        defl = LinearOperator((g.n, g.n), matvec=deflated, dtype=np.float64)
        rng = np.random.default_rng(7)
        v0 = rng.standard_normal(g.n)
        try:
            (alpha2,) = eigsh(
                defl, k=1, which="LA", tol=tol, maxiter=maxiter, ncv=ncv,
                v0=v0, return_eigenvectors=False,
            )
            if bipartite:
                # the 2-coloring certifies -1 exactly; no need to iterate
                alpha_n = -1.0
            else:
                (alpha_n,) = eigsh(
                    op, k=1, which="SA", tol=tol, maxiter=maxiter, ncv=ncv,
                    v0=v0, return_eigenvectors=False,
                )
        except ArpackNoConvergence as exc:
            residual = float("nan")
            if exc.eigenvalues is not None and len(exc.eigenvalues):
                lam = exc.eigenvalues[0]
                vec = exc.eigenvectors[:, 0]
                residual = float(np.linalg.norm(op.matvec(vec) - lam * vec))
            raise SpectralConvergenceError(
                f"eigenvalue iteration did not converge within {matvec_cap} matvecs",
                residual,
            ) from exc
        alpha2 = float(alpha2)
        alpha_n = float(alpha_n)

    if bipartite:
        alpha_n = -1.0

    alpha2 = min(alpha2, 1.0)
    alpha_n = max(alpha_n, -1.0)
    gap = max(0.0, min(1.0 - alpha2, 1.0 - abs(alpha_n)))
    return SpectralSummary(
        alpha2=alpha2,
        alpha_n=alpha_n,
        gap=gap,
        mixing_time=mixing_time(g.n, gap),
    )


def mixing_time(n: int, gap: float) -> int | None:
    """``gap**-1 * log(n)`` rounded to nearest; None for a zero gap."""
    if gap <= 0.0:
        return None
    return int(math.floor(math.log(n) / gap + 0.5))


def tv_upper_bound(n: int, gap: float, t: int) -> float:
    """Worst-case L1 distance to stationarity: ``sqrt(n) * (1-gap)^t``.

    Clamped to [0, 2] because an L1 distance between probability vectors
    cannot exceed 2.
    """
    if not 0.0 < gap <= 1.0:
        raise ValueError("gap must lie in (0, 1]")
    if t < 0:
        raise ValueError("t must be >= 0")
    return min(2.0, math.sqrt(n) * (1.0 - gap) ** t)


def sum_p_squared_bound(pi, gap: float, t: int) -> float:
    """Worst-case ``sum_i P_i(t)^2``: stationary value plus ``(1-gap)^(2t)``.

    ``pi`` may be a PositionDistribution or the scalar ``sum_i pi_i^2``.
    This is the quantity every stationary-scenario guarantee depends on.
    """
    if not 0.0 < gap <= 1.0:
        raise ValueError("gap must lie in (0, 1]")
    if t < 0:
        raise ValueError("t must be >= 0")
    if isinstance(pi, PositionDistribution):
        base = pi.sum_squared()
    else:
        base = float(pi)
    return base + (1.0 - gap) ** (2 * t)

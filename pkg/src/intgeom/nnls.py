"""Non-negative least squares with an explicit convergence report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls as _scipy_nnls

KKT_RTOL = 1e-10


@dataclass(frozen=True)
class NNLSResult:
    """Solution of min ||A w - b|| subject to w >= 0.

    ``converged`` is False when the active-set iteration hit its cap or the
    returned point violates the optimality conditions by more than
    ``KKT_RTOL`` relative to ||A^T b||; the weights are then the last iterate
    and must not be trusted as a minimizer.
    """

    weights: np.ndarray
    residual: float
    converged: bool
    kkt_violation: float
    message: str = ""


def kkt_violation(A: np.ndarray, b: np.ndarray, w: np.ndarray) -> float:
    """Largest violation of the NNLS optimality conditions, relative to ||A^T b||.

    At a minimizer the gradient g = A^T (A w - b) satisfies g >= 0 and
    g_i = 0 wherever w_i > 0.
    """
    g = A.T @ (A @ w - b)
    scale = max(float(np.linalg.norm(A.T @ b, np.inf)), np.finfo(float).tiny)
    neg = float(np.max(-g, initial=0.0))
    comp = float(np.max(np.abs(g[w > 0]), initial=0.0))
    return max(neg, comp) / scale


def solve_nnls(A, b, maxiter: int | None = None, rtol: float = KKT_RTOL) -> NNLSResult:
    """Lawson-Hanson active-set NNLS (scipy) plus an independent KKT check."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if maxiter is None:
        maxiter = 5 * A.shape[1]
    try:
        w, res = _scipy_nnls(A, b, maxiter=maxiter)
    except RuntimeError as exc:
        zero = np.zeros(A.shape[1])
        return NNLSResult(zero, float(np.linalg.norm(b)), False, float("inf"), str(exc))
    viol = kkt_violation(A, b, w)
    ok = viol <= rtol
    return NNLSResult(w, float(res), ok, viol, "" if ok else f"KKT violation {viol:.2e} exceeds {rtol:.0e}")

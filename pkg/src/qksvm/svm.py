"""Binary soft-margin SVM on a precomputed kernel, trained with SMO.

The solver is sequential minimal optimization with second-order working-set
selection: the first index maximizes the KKT violation, the partner is the
feasible index with the largest guaranteed objective gain. Each pair update
solves the two-variable subproblem analytically under the box constraints,
so the dual objective never decreases.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .kernel import KernelMatrix

DEFAULT_TOL = 1e-3
DEFAULT_MAX_ITER = 10_000
PSD_TOLERANCE = -1e-8
DIAGONAL_JITTER = 1e-8
SUPPORT_THRESHOLD = 1e-8

_TAU = 1e-12  # floor for curvature along a working pair


@dataclass
class SVMModel:
    alphas: np.ndarray           # (n,) dual coefficients in [0, C]
    labels: np.ndarray           # (n,) training labels in {-1, +1}
    bias: float
    support_indices: np.ndarray  # indices with alpha > SUPPORT_THRESHOLD
    C: float
    objective_path: np.ndarray   # dual objective after every pair update
    n_iter: int
    converged: bool


def _kernel_values(K) -> np.ndarray:
    if isinstance(K, KernelMatrix):
        if K.role != "train":
            raise ValueError("svm_train requires a train-role kernel")
        return np.array(K.values, dtype=np.float64)
    return np.array(K, dtype=np.float64)


def svm_train(K, y, C: float, *, tol: float = DEFAULT_TOL,
              max_iter: int = DEFAULT_MAX_ITER) -> SVMModel:
    """Maximize W(a) = sum a_i - 1/2 sum a_i a_j y_i y_j K_ij over the box.

    Stops once the maximal KKT violation drops below ``tol``. The bias is
    the average of y_i - sum_j a_j y_j K_ij over unbounded support vectors,
    falling back to the midpoint of the feasible interval when every alpha
    sits on a bound.
    """
    Kv = _kernel_values(K)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if Kv.ndim != 2 or Kv.shape != (n, n):
        raise ValueError(f"kernel must be square over {n} samples, got {Kv.shape}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise ValueError("training data contains a single class")
    if not np.isfinite(C) or C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    asym = float(np.max(np.abs(Kv - Kv.T)))
    if asym > 1e-8:
        raise ValueError(f"kernel is not symmetric (max deviation {asym:.3e})")

    min_eig = float(np.linalg.eigvalsh((Kv + Kv.T) / 2.0)[0])
    if min_eig < PSD_TOLERANCE:
        warnings.warn(
            f"kernel min eigenvalue {min_eig:.3e} below {PSD_TOLERANCE:.0e}; "
            f"adding {DIAGONAL_JITTER:.0e} diagonal jitter",
            RuntimeWarning,
            stacklevel=2,
        )
        Kv = Kv + DIAGONAL_JITTER * np.eye(n)

    # Solving with sign-normalized labels keeps y -> -y an exact reflection:
    # the internal problem is identical, only the readout sign flips.
    sign = 1.0 if y[0] > 0 else -1.0
    z = y * sign

    alpha, G, path, n_iter, converged = _smo(Kv, z, float(C), tol, max_iter)

    free = (alpha > 0.0) & (alpha < C)
    neg_zG = -z * G
    if np.any(free):
        bias_internal = float(np.mean(neg_zG[free]))
    else:
        lower = ((alpha == 0.0) & (z > 0)) | ((alpha == C) & (z < 0))
        upper = ((alpha == C) & (z > 0)) | ((alpha == 0.0) & (z < 0))
        lo = float(np.max(neg_zG[lower])) if np.any(lower) else -np.inf
        hi = float(np.min(neg_zG[upper])) if np.any(upper) else np.inf
        if not np.isfinite(lo):
            bias_internal = hi
        elif not np.isfinite(hi):
            bias_internal = lo
        else:
            bias_internal = 0.5 * (lo + hi)

    return SVMModel(
        alphas=alpha,
        labels=y.copy(),
        bias=sign * bias_internal,
        support_indices=np.nonzero(alpha > SUPPORT_THRESHOLD)[0],
        C=float(C),
        objective_path=np.asarray(path),
        n_iter=n_iter,
        converged=converged,
    )


def _smo(Kv: np.ndarray, z: np.ndarray, C: float, tol: float, max_iter: int):
    n = z.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 1/2 aQa - e.a, with Q_ij = z_i z_j K_ij
    diag = np.diag(Kv).copy()
    path = [0.0]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        zG = z * G
        up = ((z > 0) & (alpha < C)) | ((z < 0) & (alpha > 0.0))
        low = ((z < 0) & (alpha < C)) | ((z > 0) & (alpha > 0.0))
        if not up.any() or not low.any():
            converged = True
            break
        up_idx = np.nonzero(up)[0]
        low_idx = np.nonzero(low)[0]
        i = up_idx[np.argmax(-zG[up_idx])]
        gmax = -zG[i]
        gmax2 = float(np.max(zG[low_idx]))
        if gmax + gmax2 < tol:
            converged = True
            break

        # Second-order partner: largest decrease of the two-variable objective.
        grad_diff = gmax + zG[low_idx]
        viable = grad_diff > 0
        cand = low_idx[viable]
        gd = grad_diff[viable]
        quad = diag[i] + diag[cand] - 2.0 * Kv[i, cand]
        np.maximum(quad, _TAU, out=quad)
        j = cand[np.argmin(-(gd * gd) / quad)]

        old_ai, old_aj = alpha[i], alpha[j]
        quad_coef = diag[i] + diag[j] - 2.0 * Kv[i, j]
        if quad_coef <= 0:
            quad_coef = _TAU
        if z[i] != z[j]:
            delta = (-G[i] - G[j]) / quad_coef
            diff = old_ai - old_aj
            alpha[i] = old_ai + delta
            alpha[j] = old_aj + delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad_coef
            total = old_ai + old_aj
            alpha[i] = old_ai - delta
            alpha[j] = old_aj + delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total

        d_i = alpha[i] - old_ai
        d_j = alpha[j] - old_aj
        G += (z * (z[i] * d_i)) * Kv[:, i] + (z * (z[j] * d_j)) * Kv[:, j]
        path.append(0.5 * float(alpha.sum() - alpha @ G))

    if not converged:
        warnings.warn(
            f"SMO hit the {max_iter}-sweep cap before reaching tol={tol}",
            RuntimeWarning,
            stacklevel=3,
        )
    return alpha, G, path, it, converged


def svm_decision(model: SVMModel, K_test) -> np.ndarray:
    """f_i = sum_j alpha_j y_j K_test[i][j] + bias."""
    values = K_test.values if isinstance(K_test, KernelMatrix) else np.asarray(
        K_test, dtype=np.float64
    )
    values = np.atleast_2d(values)
    if values.shape[1] != model.alphas.shape[0]:
        raise ValueError(
            f"test kernel has {values.shape[1]} columns, model has "
            f"{model.alphas.shape[0]} training points"
        )
    return values @ (model.alphas * model.labels) + model.bias


def svm_predict(model: SVMModel, K_test) -> np.ndarray:
    """Label by sign of the decision value; exact zeros go to +1."""
    f = svm_decision(model, K_test)
    return np.where(f >= 0.0, 1, -1)

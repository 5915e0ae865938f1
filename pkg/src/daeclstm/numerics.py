"""Dense-array primitives and the gradient-checking contract.

Everything is float64. Analytic backpropagation elsewhere in the library is
validated against :func:`finite_diff_gradient` via :func:`gradient_check`;
a gradient bundle is a plain dict mapping parameter names to arrays shaped
like the parameters themselves.
"""

from collections.abc import Callable, Mapping

import numpy as np

from .errors import DimensionError, DomainError, EvaluationError

GradientBundle = dict[str, np.ndarray]


def affine(W: np.ndarray, x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """W @ x + b with explicit shape checking."""
    W = np.asarray(W, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if W.ndim != 2 or x.ndim != 1 or b.ndim != 1:
        raise DimensionError(
            f"affine: expected matrix, vector, vector; got shapes "
            f"{W.shape}, {x.shape}, {b.shape}"
        )
    if W.shape[1] != x.shape[0]:
        raise DimensionError(
            f"affine: W has {W.shape[1]} columns but x has length {x.shape[0]}"
        )
    if W.shape[0] != b.shape[0]:
        raise DimensionError(
            f"affine: W has {W.shape[0]} rows but b has length {b.shape[0]}"
        )
    return W @ x + b


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Elementwise logistic function, sign-branched so exp never overflows."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def tanh_act(z: np.ndarray) -> np.ndarray:
    """Elementwise hyperbolic tangent."""
    return np.tanh(np.asarray(z, dtype=np.float64))


def softmax(scores: np.ndarray) -> np.ndarray:
    """Stable softmax: exponentials are taken after subtracting the max."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise DomainError("softmax: empty score vector")
    e = np.exp(scores - scores.max())
    return e / e.sum()


def finite_diff_gradient(
    f: Callable[[Mapping[str, np.ndarray]], float],
    params: Mapping[str, np.ndarray],
    eps: float = 1e-5,
) -> GradientBundle:
    """Central-difference gradient of ``f`` with respect to every coordinate.

    ``f`` must be deterministic and is re-evaluated with each coordinate of
    ``params`` perturbed in place by ``+eps`` / ``-eps`` (the original values
    are restored afterwards).
    """
    if eps <= 0:
        raise DomainError(f"finite_diff_gradient: eps must be positive, got {eps}")
    grads: GradientBundle = {}
    for name, arr in params.items():
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            f_plus = float(f(params))
            flat[i] = orig - eps
            f_minus = float(f(params))
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise EvaluationError(
                    f"finite_diff_gradient: f non-finite while perturbing "
                    f"{name}[{i}] ({f_plus}, {f_minus})"
                )
            gflat[i] = (f_plus - f_minus) / (2.0 * eps)
        grads[name] = g
    return grads


def gradient_check(analytic: GradientBundle, numeric: GradientBundle) -> float:
    """Max over coordinates of |a - n| / max(|a|, |n|, 1e-8)."""
    if set(analytic) != set(numeric):
        only_a = sorted(set(analytic) - set(numeric))
        only_n = sorted(set(numeric) - set(analytic))
        raise DimensionError(
            f"gradient_check: parameter names differ (analytic only: {only_a}, "
            f"numeric only: {only_n})"
        )
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        if a.shape != n.shape:
            raise DimensionError(
                f"gradient_check: shape mismatch for {name}: {a.shape} vs {n.shape}"
            )
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-8)
        rel = np.abs(a - n) / denom
        if rel.size:
            worst = max(worst, float(rel.max()))
    return worst

"""Kernels and the epsilon-insensitive loss for scalar-input SVR."""

import math

import numpy as np

KERNELS = ("rbf", "linear")


def kernel_eval(x, y, params):
    """Evaluate the kernel of ``params`` at two scalar inputs."""
    if params.kernel == "rbf":
        d = x - y
        return math.exp(-params.gamma * d * d)
    return x * y


def gram_matrix(xa, xb, kernel, gamma):
    """Kernel matrix between 1-D input arrays ``xa`` (rows) and ``xb`` (columns)."""
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    if kernel == "rbf":
        d = xa[:, None] - xb[None, :]
        return np.exp(-gamma * (d * d))
    if kernel == "linear":
        return xa[:, None] * xb[None, :]
    raise ValueError(f"unknown kernel {kernel!r}")


def epsilon_loss(residual, epsilon):
    """Epsilon-insensitive loss: 0 inside the tube ``|r| <= epsilon``, ``|r| - epsilon`` outside."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    r = np.abs(residual)
    out = np.where(r <= epsilon, 0.0, r - epsilon)
    return float(out) if np.ndim(out) == 0 else out

"""Epsilon-SVR training, prediction and JSON serialization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._backend import get_solver
from .kernels import KERNELS, gram_matrix

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SvrParams:
    C: float = 10.0
    gamma: float = 1.0
    epsilon: float = 1.0
    kernel: str = "rbf"

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")


@dataclass(frozen=True)
class SvrModel:
    """A trained regressor.

    ``support_x`` holds raw (unstandardized) inputs; the kernel is evaluated
    on ``(x - x_mean) / x_scale``. ``dual_coef`` is alpha - alpha* per support
    vector and ``bias`` the intercept, so
    ``f(x) = sum_i dual_coef[i] * K(z_i, z(x)) + bias``.
    """

    params: SvrParams
    support_x: np.ndarray
    dual_coef: np.ndarray
    bias: float
    x_mean: float = 0.0
    x_scale: float = 1.0
    n_iter: int = 0
    kkt_gap: float = 0.0
    converged: bool = True
    dual_objective: float = 0.0
    objective_trace: list | None = field(default=None, compare=False, repr=False)

    @property
    def n_support(self):
        return int(self.dual_coef.shape[0])

    def predict(self, x):
        return predict(self, x)

    def to_dict(self):
        return {
            "format": "pirgait.svr",
            "version": MODEL_FORMAT_VERSION,
            "params": asdict(self.params),
            "x_mean": self.x_mean,
            "x_scale": self.x_scale,
            "support_x": [float(v) for v in self.support_x],
            "dual_coef": [float(v) for v in self.dual_coef],
            "bias": self.bias,
            "training": {
                "n_iter": self.n_iter,
                "kkt_gap": self.kkt_gap,
                "converged": self.converged,
                "dual_objective": self.dual_objective,
            },
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != "pirgait.svr":
            raise ValueError("not a pirgait SVR model document")
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        training = doc.get("training", {})
        return cls(
            params=SvrParams(**doc["params"]),
            support_x=np.asarray(doc["support_x"], dtype=np.float64),
            dual_coef=np.asarray(doc["dual_coef"], dtype=np.float64),
            bias=float(doc["bias"]),
            x_mean=float(doc["x_mean"]),
            x_scale=float(doc["x_scale"]),
            n_iter=int(training.get("n_iter", 0)),
            kkt_gap=float(training.get("kkt_gap", 0.0)),
            converged=bool(training.get("converged", True)),
            dual_objective=float(training.get("dual_objective", 0.0)),
        )

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))


def standardization(x):
    """Mean and scale used to standardize inputs; a zero spread maps to scale 1."""
    x = np.asarray(x, dtype=np.float64)
    mean = float(np.mean(x))
    sd = float(np.std(x))
    if not sd > 0 or not math.isfinite(sd):
        sd = 1.0
    return mean, sd


def dual_objective(K, y, beta, abs_sum, epsilon):
    """0.5 b'Kb - y'b + eps * sum(alpha + alpha*), the function SMO minimizes."""
    return float(0.5 * beta @ K @ beta - y @ beta + epsilon * abs_sum)


def train_svr(x, y, params, tol=1e-3, max_iter=None, standardize=True, backend=None, trace=False):
    """Fit an epsilon-SVR to scalar inputs ``x`` and targets ``y``.

    Never raises on non-convergence; check ``model.converged``.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    l = x.shape[0]
    if l == 0:
        raise ValueError("cannot train on an empty dataset")
    if y.shape[0] != l:
        raise ValueError("x and y lengths differ")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 10 * l * 1000
    if standardize:
        x_mean, x_scale = standardization(x)
    else:
        x_mean, x_scale = 0.0, 1.0
    z = (x - x_mean) / x_scale
    K = gram_matrix(z, z, params.kernel, params.gamma)
    solve = get_solver(backend)
    a, rho, n_iter, gap, converged, obj_trace = solve(
        K, y, float(params.C), float(params.epsilon), float(tol), int(max_iter), bool(trace)
    )
    a = np.asarray(a)
    beta = a[:l] - a[l:]
    keep = beta != 0
    return SvrModel(
        params=params,
        support_x=x[keep].copy(),
        dual_coef=beta[keep].copy(),
        bias=float(-rho),
        x_mean=x_mean,
        x_scale=x_scale,
        n_iter=int(n_iter),
        kkt_gap=float(gap),
        converged=bool(converged),
        dual_objective=dual_objective(K, y, beta, float(a.sum()), params.epsilon),
        objective_trace=obj_trace,
    )


def predict(model, x):
    """Evaluate the trained function at scalar or array ``x``."""
    scalar = np.ndim(x) == 0
    xq = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if model.n_support == 0:
        out = np.full(xq.shape, model.bias)
    else:
        zq = (xq - model.x_mean) / model.x_scale
        zs = (model.support_x - model.x_mean) / model.x_scale
        K = gram_matrix(zq, zs, model.params.kernel, model.params.gamma)
        out = K @ model.dual_coef + model.bias
    return float(out[0]) if scalar else out

"""Independent reference implementations used only by the tests.

None of these import the code paths they check.
"""

import math

import numpy as np
from scipy.optimize import minimize


def rbf_gram(x, gamma):
    n = len(x)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            K[i, j] = math.exp(-gamma * (x[i] - x[j]) ** 2)
    return K


def _b_interval(K, y, beta, C, eps, tol=1e-9):
    f0 = K @ beta
    lb, ub = -np.inf, np.inf
    for i in range(len(y)):
        lo = y[i] - eps - f0[i]
        hi = y[i] + eps - f0[i]
        if beta[i] >= C - tol:
            ub = min(ub, lo)
        elif beta[i] <= -C + tol:
            lb = max(lb, hi)
        elif abs(beta[i]) <= tol:
            lb = max(lb, lo)
            ub = min(ub, hi)
    return lb, ub


def _polish(K, y, beta, C, eps, thresh):
    """Re-solve the KKT system exactly on the free set identified from ``beta``."""
    n = len(y)
    state = np.zeros(n, dtype=int)  # -2: -C, -1: free neg, 0: zero, 1: free pos, 2: +C
    for i, v in enumerate(beta):
        if v >= C - thresh:
            state[i] = 2
        elif v <= -C + thresh:
            state[i] = -2
        elif v > thresh:
            state[i] = 1
        elif v < -thresh:
            state[i] = -1
    fixed = np.where(np.abs(state) == 2, np.sign(state) * C, 0.0)
    free = np.flatnonzero(np.abs(state) == 1)
    if free.size == 0:
        b_lo, b_hi = _b_interval(K, y, fixed, C, eps)
        return fixed, 0.5 * (b_lo + b_hi)
    m = free.size
    A = np.zeros((m + 1, m + 1))
    rhs = np.zeros(m + 1)
    A[:m, :m] = K[np.ix_(free, free)]
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs[:m] = y[free] - eps * state[free] - K[free] @ fixed
    rhs[m] = -fixed.sum()
    sol = np.linalg.solve(A, rhs)
    out = fixed.copy()
    out[free] = sol[:m]
    return out, float(sol[m])


def kkt_violation(K, y, beta, b, C, eps):
    """Largest violation of primal-dual optimality for (beta, b)."""
    f = K @ beta + b
    worst = abs(beta.sum())
    for i in range(len(y)):
        r = y[i] - f[i]
        v = beta[i]
        if v > C + 1e-12 or v < -C - 1e-12:
            worst = max(worst, abs(v) - C)
        if abs(v) < 1e-12:
            worst = max(worst, abs(r) - eps)
        elif abs(v) >= C - 1e-12:
            worst = max(worst, eps - np.sign(v) * r)
        else:
            worst = max(worst, abs(r - np.sign(v) * eps))
    return worst


def objective(K, y, beta, eps):
    return float(0.5 * beta @ K @ beta - y @ beta + eps * np.abs(beta).sum())


def dense_svr_qp(K, y, C, eps):
    """Solve the epsilon-SVR dual by dense SQP on the doubled form, then polish.

    Returns ``(beta, b, objective)`` with beta = alpha - alpha*.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    Q = np.block([[K, -K], [-K, K]])
    p = np.concatenate([eps - y, eps + y])
    s = np.concatenate([np.ones(n), -np.ones(n)])

    res = minimize(
        lambda a: 0.5 * a @ Q @ a + p @ a,
        np.zeros(2 * n),
        jac=lambda a: Q @ a + p,
        bounds=[(0.0, C)] * (2 * n),
        constraints=[{"type": "eq", "fun": lambda a: s @ a, "jac": lambda a: s}],
        method="SLSQP",
        options={"ftol": 1e-16, "maxiter": 2000},
    )
    beta0 = res.x[:n] - res.x[n:]
    best = None
    for thresh in (1e-7, 1e-6, 1e-5, 1e-8, 1e-4, 1e-9):
        beta, b = _polish(K, y, beta0, C, eps, thresh)
        viol = kkt_violation(K, y, beta, b, C, eps)
        if best is None or viol < best[2]:
            best = (beta, b, viol)
        if viol < 1e-9:
            break
    beta, b, viol = best
    if viol > 1e-7:
        raise RuntimeError(f"oracle failed to certify optimality (violation {viol:.3g})")
    return beta, b, objective(K, y, beta, eps)


def percentile_oracle(values, p):
    """Linear-interpolation percentile straight from its definition on a sorted list."""
    v = sorted(float(t) for t in values)
    h = (len(v) - 1) * p / 100.0
    lo = math.floor(h)
    if lo + 1 >= len(v):
        return v[lo]
    return v[lo] + (h - lo) * (v[lo + 1] - v[lo])


def fold_loop_rmse(x, y, fit_predict, k, seed):
    """Hand-rolled k-fold loop: same seeded permutation, explicit slicing."""
    n = len(x)
    perm = list(np.random.default_rng(seed).permutation(n))
    sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
    sq = 0.0
    start = 0
    for size in sizes:
        test = perm[start:start + size]
        start += size
        train = [i for i in range(n) if i not in set(test)]
        preds = fit_predict([x[i] for i in train], [y[i] for i in train], [x[i] for i in test])
        for i, pr in zip(test, preds):
            sq += (y[i] - pr) ** 2
    return math.sqrt(sq / n)

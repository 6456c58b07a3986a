"""Pure-Python SMO solver for the epsilon-SVR dual.

Numerically mirrors ``_smo_ext.pyx``: every scalar expression is evaluated
in the same order, and ties in working-set selection go to the last index
(the ``>=`` / ``<=`` convention of the loop version), so both backends walk
the same iterate sequence. Used when the compiled extension is unavailable
or ``PIRGAIT_PURE_PYTHON`` is set.

The dual is kept in the doubled form with ``2l`` variables: ``a[t]`` for
``t < l`` is alpha_t, ``a[t + l]`` is alpha*_t, and ``sign`` is +1 / -1.
"""

import numpy as np

TAU = 1e-12


def _last_argmax(v):
    return v.shape[0] - 1 - int(np.argmax(v[::-1]))


def _last_argmin(v):
    return v.shape[0] - 1 - int(np.argmin(v[::-1]))


def solve(K, y, C, eps, tol, max_iter, trace=False):
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    l = y.shape[0]
    n = 2 * l
    sign = np.concatenate([np.ones(l), -np.ones(l)])
    idx = np.concatenate([np.arange(l), np.arange(l)])
    p = np.concatenate([eps - y, eps + y])
    QD = np.concatenate([np.diag(K), np.diag(K)])
    a = np.zeros(n)
    G = p.copy()
    objective = [] if trace else None
    neg_inf = -np.inf

    it = 0
    gap = np.inf
    converged = False
    while it < max_iter:
        pos = sign > 0
        up = np.where(pos, a < C, a > 0)
        low = np.where(pos, a > 0, a < C)
        sG = sign * G

        cand = np.where(up, -sG, neg_inf)
        i = _last_argmax(cand)
        Gmax = cand[i]
        Gmax2 = np.max(np.where(low, sG, neg_inf))
        gap = Gmax + Gmax2
        j = -1
        if Gmax > neg_inf:
            Ki = np.concatenate([K[idx[i]], K[idx[i]]])
            grad_diff = Gmax + sG
            ok = low & (grad_diff > 0)
            if ok.any():
                quad = (QD[i] + QD) - 2.0 * Ki
                quad = np.where(quad <= 0, TAU, quad)
                obj_diff = np.where(ok, -(grad_diff * grad_diff) / quad, np.inf)
                j = _last_argmin(obj_diff)
        if gap < tol or j == -1:
            converged = True
            break

        it += 1
        si = sign[i]
        sj = sign[j]
        Kij = K[idx[i], idx[j]]
        Qij = (si * sj) * Kij
        old_ai = a[i]
        old_aj = a[j]
        ai = old_ai
        aj = old_aj
        if si != sj:
            quad = QD[i] + QD[j] + 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            quad = QD[i] + QD[j] - 2.0 * Qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            else:
                if aj < 0:
                    aj = 0.0
                    ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            else:
                if ai < 0:
                    ai = 0.0
                    aj = total
        a[i] = ai
        a[j] = aj

        dai = ai - old_ai
        daj = aj - old_aj
        Qi = (si * sign) * np.concatenate([K[idx[i]], K[idx[i]]])
        Qj = (sj * sign) * np.concatenate([K[idx[j]], K[idx[j]]])
        G = G + Qi * dai
        G = G + Qj * daj
        if trace:
            objective.append(_objective(a, G, p))

    rho = _rho(a, G, sign, C)
    return a, rho, it, float(gap), converged, objective


def _objective(a, G, p):
    total = 0.0
    for t in range(a.shape[0]):
        total += a[t] * (G[t] + p[t])
    return 0.5 * total


def _rho(a, G, sign, C):
    ub = np.inf
    lb = -np.inf
    sum_free = 0.0
    nr_free = 0
    for t in range(a.shape[0]):
        yG = sign[t] * G[t]
        if a[t] >= C:
            if sign[t] < 0:
                ub = min(ub, yG)
            else:
                lb = max(lb, yG)
        elif a[t] <= 0:
            if sign[t] > 0:
                ub = min(ub, yG)
            else:
                lb = max(lb, yG)
        else:
            nr_free += 1
            sum_free += yG
    if nr_free > 0:
        return sum_free / nr_free
    return (ub + lb) / 2.0

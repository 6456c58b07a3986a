# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO solver for the epsilon-SVR dual (doubled 2l-variable form).

Same algorithm, expression order and tie-breaking as ``_smo_py``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

cdef double TAU = 1e-12


def solve(K, y, double C, double eps, double tol, long max_iter, bint trace=False):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Karr = np.ascontiguousarray(K, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] yarr = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[:, ::1] Km = Karr
    cdef double[::1] ym = yarr
    cdef Py_ssize_t l = ym.shape[0]
    cdef Py_ssize_t n = 2 * l
    cdef Py_ssize_t t, i, j, ii, jj, it_t
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_arr = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] G_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s_arr = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] QD_arr = np.empty(n)
    cdef double[::1] a = a_arr
    cdef double[::1] G = G_arr
    cdef double[::1] p = p_arr
    cdef double[::1] sign = s_arr
    cdef double[::1] QD = QD_arr
    cdef double Gmax, Gmax2, grad_diff, quad, obj_diff, obj_diff_min, gap
    cdef double si, sj, Qij, old_ai, old_aj, ai, aj, delta, diff, total, dai, daj
    cdef double sG, Kit, objv
    cdef long it = 0
    cdef bint converged = False
    objective = [] if trace else None

    for t in range(l):
        p[t] = eps - ym[t]
        p[t + l] = eps + ym[t]
        sign[t] = 1.0
        sign[t + l] = -1.0
        QD[t] = Km[t, t]
        QD[t + l] = Km[t, t]
    for t in range(n):
        G[t] = p[t]

    gap = INFINITY
    while it < max_iter:
        Gmax = -INFINITY
        i = -1
        for t in range(n):
            sG = sign[t] * G[t]
            if sign[t] > 0:
                if a[t] < C and -sG >= Gmax:
                    Gmax = -sG
                    i = t
            else:
                if a[t] > 0 and -sG >= Gmax:
                    Gmax = -sG
                    i = t
        Gmax2 = -INFINITY
        j = -1
        obj_diff_min = INFINITY
        if i >= 0:
            ii = i % l
        for t in range(n):
            sG = sign[t] * G[t]
            if (sign[t] > 0 and a[t] > 0) or (sign[t] < 0 and a[t] < C):
                if sG >= Gmax2:
                    Gmax2 = sG
                if i >= 0:
                    grad_diff = Gmax + sG
                    if grad_diff > 0:
                        Kit = Km[ii, t % l]
                        quad = (QD[i] + QD[t]) - 2.0 * Kit
                        if quad <= 0:
                            quad = TAU
                        obj_diff = -(grad_diff * grad_diff) / quad
                        if obj_diff <= obj_diff_min:
                            j = t
                            obj_diff_min = obj_diff
        gap = Gmax + Gmax2
        if gap < tol or j == -1:
            converged = True
            break

        it += 1
        ii = i % l
        jj = j % l
        si = sign[i]
        sj = sign[j]
        Qij = (si * sj) * Km[ii, jj]
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
        for t in range(n):
            G[t] = G[t] + ((si * sign[t]) * Km[ii, t % l]) * dai
        for t in range(n):
            G[t] = G[t] + ((sj * sign[t]) * Km[jj, t % l]) * daj
        if trace:
            objv = 0.0
            for t in range(n):
                objv += a[t] * (G[t] + p[t])
            objective.append(0.5 * objv)

    rho = _rho(a, G, sign, C)
    return a_arr, rho, it, float(gap), converged, objective


cdef double _rho(double[::1] a, double[::1] G, double[::1] sign, double C):
    cdef double ub = INFINITY
    cdef double lb = -INFINITY
    cdef double sum_free = 0.0
    cdef double yG
    cdef long nr_free = 0
    cdef Py_ssize_t t
    for t in range(a.shape[0]):
        yG = sign[t] * G[t]
        if a[t] >= C:
            if sign[t] < 0:
                if yG < ub:
                    ub = yG
            else:
                if yG > lb:
                    lb = yG
        elif a[t] <= 0:
            if sign[t] > 0:
                if yG < ub:
                    ub = yG
            else:
                if yG > lb:
                    lb = yG
        else:
            nr_free += 1
            sum_free += yG
    if nr_free > 0:
        return sum_free / nr_free
    return (ub + lb) / 2.0

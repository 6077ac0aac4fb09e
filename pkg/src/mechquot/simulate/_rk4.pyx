# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 kernel; same contract as ``_rk4_py``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite

cnp.import_array()

cdef int OK = 0
cdef int POLE = 1
cdef int NONFINITE = 2


cdef int _eval_rhs(double[::1] x, double[::1] w, Py_ssize_t dim, Py_ssize_t nfields,
                   const long long[::1] num_ptr, const long long[::1] den_ptr,
                   const double[::1] coef, const long long[::1] fac_ptr,
                   const long long[::1] fac_var, const long long[::1] fac_exp,
                   double pole_tol, double[::1] out) noexcept nogil:
    cdef Py_ssize_t f, c, slot, t, k
    cdef long long e, n0, n1, d0, d1
    cdef double wf, den, num, v, xv
    for c in range(dim):
        out[c] = 0.0
    for f in range(nfields):
        wf = w[f]
        for c in range(dim):
            slot = f * dim + c
            n0 = num_ptr[slot]
            n1 = num_ptr[slot + 1]
            d0 = den_ptr[slot]
            d1 = den_ptr[slot + 1]
            if d1 > d0:
                den = 0.0
                for t in range(d0, d1):
                    v = coef[t]
                    for k in range(fac_ptr[t], fac_ptr[t + 1]):
                        xv = x[fac_var[k]]
                        for e in range(fac_exp[k]):
                            v *= xv
                    den += v
                if fabs(den) < pole_tol:
                    return POLE
            else:
                den = 1.0
            if n1 == n0 or wf == 0.0:
                continue
            num = 0.0
            for t in range(n0, n1):
                v = coef[t]
                for k in range(fac_ptr[t], fac_ptr[t + 1]):
                    xv = x[fac_var[k]]
                    for e in range(fac_exp[k]):
                        v *= xv
                num += v
            out[c] += wf * num / den
    return OK


def rk4(x0, weights, double dt, Py_ssize_t nsteps, num_ptr, den_ptr, coef,
        fac_ptr, fac_var, fac_exp, double pole_tol):
    cdef double[::1] x = np.array(x0, dtype=np.float64)
    cdef Py_ssize_t dim = x.shape[0]
    cdef double[:, ::1] W = np.ascontiguousarray(weights, dtype=np.float64).reshape(nsteps, -1)
    cdef Py_ssize_t nfields = W.shape[1]
    cdef const long long[::1] nptr = np.ascontiguousarray(num_ptr, dtype=np.int64)
    cdef const long long[::1] dptr = np.ascontiguousarray(den_ptr, dtype=np.int64)
    cdef const double[::1] cf = np.ascontiguousarray(coef, dtype=np.float64)
    cdef const long long[::1] fptr = np.ascontiguousarray(fac_ptr, dtype=np.int64)
    cdef const long long[::1] fvar = np.ascontiguousarray(fac_var, dtype=np.int64)
    cdef const long long[::1] fexp = np.ascontiguousarray(fac_exp, dtype=np.int64)
    out_arr = np.empty((nsteps + 1, dim), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] k1 = np.zeros(dim)
    cdef double[::1] k2 = np.zeros(dim)
    cdef double[::1] k3 = np.zeros(dim)
    cdef double[::1] k4 = np.zeros(dim)
    cdef double[::1] tmp = np.zeros(dim)
    cdef double h2 = 0.5 * dt
    cdef Py_ssize_t s, c
    cdef int status = OK
    cdef Py_ssize_t fail_step = -1
    cdef int fail_stage = -1
    for c in range(dim):
        out[0, c] = x[c]
    with nogil:
        for s in range(nsteps):
            if _eval_rhs(x, W[s], dim, nfields, nptr, dptr, cf, fptr, fvar, fexp, pole_tol, k1):
                status = POLE; fail_step = s; fail_stage = 0
                break
            for c in range(dim):
                tmp[c] = x[c] + h2 * k1[c]
            if _eval_rhs(tmp, W[s], dim, nfields, nptr, dptr, cf, fptr, fvar, fexp, pole_tol, k2):
                status = POLE; fail_step = s; fail_stage = 1
                break
            for c in range(dim):
                tmp[c] = x[c] + h2 * k2[c]
            if _eval_rhs(tmp, W[s], dim, nfields, nptr, dptr, cf, fptr, fvar, fexp, pole_tol, k3):
                status = POLE; fail_step = s; fail_stage = 2
                break
            for c in range(dim):
                tmp[c] = x[c] + dt * k3[c]
            if _eval_rhs(tmp, W[s], dim, nfields, nptr, dptr, cf, fptr, fvar, fexp, pole_tol, k4):
                status = POLE; fail_step = s; fail_stage = 3
                break
            for c in range(dim):
                x[c] = x[c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
                if not isfinite(x[c]):
                    status = NONFINITE; fail_step = s; fail_stage = 4
            if status != OK:
                break
            for c in range(dim):
                out[s + 1, c] = x[c]
    if status == OK:
        return out_arr.tolist(), OK, -1, -1
    return out_arr[: fail_step + 1].tolist(), status, fail_step, fail_stage

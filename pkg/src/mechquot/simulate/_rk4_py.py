"""Pure-Python RK4 kernel; same contract as the compiled ``_rk4`` module."""

import math

OK = 0
POLE = 1
NONFINITE = 2


def _eval_rhs(x, w, dim, nfields, num_ptr, den_ptr, coef, fac_ptr, fac_var, fac_exp, pole_tol, out):
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
                        for _ in range(fac_exp[k]):
                            v *= xv
                    den += v
                if abs(den) < pole_tol:
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
                    for _ in range(fac_exp[k]):
                        v *= xv
                num += v
            out[c] += wf * num / den
    return OK


def rk4(x0, weights, dt, nsteps, num_ptr, den_ptr, coef, fac_ptr, fac_var, fac_exp, pole_tol):
    """Integrate ``nsteps`` RK4 steps.

    ``weights[s]`` holds the field weights on step s: 1 for the drift, then
    the control values.  Returns ``(states, status, failed_step, failed_stage)``
    where ``states`` is a list of state lists (length nsteps + 1 on success).
    """
    dim = len(x0)
    nfields = len(weights[0]) if nsteps else 0
    num_ptr = [int(v) for v in num_ptr]
    den_ptr = [int(v) for v in den_ptr]
    coef = [float(v) for v in coef]
    fac_ptr = [int(v) for v in fac_ptr]
    fac_var = [int(v) for v in fac_var]
    fac_exp = [int(v) for v in fac_exp]
    x = [float(v) for v in x0]
    states = [list(x)]
    k1 = [0.0] * dim
    k2 = [0.0] * dim
    k3 = [0.0] * dim
    k4 = [0.0] * dim
    tmp = [0.0] * dim
    args = (dim, nfields, num_ptr, den_ptr, coef, fac_ptr, fac_var, fac_exp, pole_tol)
    h2 = 0.5 * dt
    try:
        return _run(x, states, weights, dt, nsteps, args, k1, k2, k3, k4, tmp, h2)
    except OverflowError:
        return states, NONFINITE, len(states) - 1, 4


def _run(x, states, weights, dt, nsteps, args, k1, k2, k3, k4, tmp, h2):
    dim = args[0]
    for s in range(nsteps):
        w = [float(v) for v in weights[s]]
        if _eval_rhs(x, w, *args, k1):
            return states, POLE, s, 0
        for c in range(dim):
            tmp[c] = x[c] + h2 * k1[c]
        if _eval_rhs(tmp, w, *args, k2):
            return states, POLE, s, 1
        for c in range(dim):
            tmp[c] = x[c] + h2 * k2[c]
        if _eval_rhs(tmp, w, *args, k3):
            return states, POLE, s, 2
        for c in range(dim):
            tmp[c] = x[c] + dt * k3[c]
        if _eval_rhs(tmp, w, *args, k4):
            return states, POLE, s, 3
        for c in range(dim):
            x[c] = x[c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
            if not math.isfinite(x[c]):
                return states, NONFINITE, s, 4
        states.append(list(x))
    return states, OK, -1, -1

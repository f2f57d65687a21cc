# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled optimizer kernels; mirrors ``_pykernels`` line for line."""
from libc.math cimport log, log2, sqrt


cdef inline double _h2(double x) nogil:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


cdef inline double _h_ae(int protocol, double q) nogil:
    cdef double v, arg
    if protocol == 0:
        v = 1.0 - _h2(q)
    elif q == 0.0:
        v = 1.0
    else:
        arg = (1.0 - 1.5 * q) / (1.0 - q)
        if arg > 1.0:
            arg = 1.0
        if arg < 0.0:
            arg = 0.0
        v = (1.0 - q) * (1.0 - _h2(arg))
    return v if v > 0.0 else 0.0


cdef double _bound(double n, double m, double q_obs, int protocol, double q_max, double d,
                   double eps_pa, double eps_bar, double eps_pe, double eps_ec, double f) nogil:
    cdef double dv = sqrt((log(1.0 / eps_pe) + d * log(m + 1.0)) / (2.0 * m))
    cdef double q = q_obs + dv
    if q > q_max:
        q = q_max
    cdef double dn = 2.0 / n * log2(1.0 / eps_pa) + 7.0 * sqrt(log2(2.0 / eps_bar) / n)
    cdef double leak = f * n * _h2(q if q < 0.5 else 0.5) + log2(2.0 / eps_ec)
    return n * (_h_ae(protocol, q) - dn) - leak


def bound_bits(n, m, double q_obs, int protocol, double q_max, d,
               double eps_pa, double eps_bar, double eps_pe, double eps_ec, double f):
    """Real-valued key-length bound before flooring and clamping."""
    return _bound(<double>n, <double>m, q_obs, protocol, q_max, <double>d,
                  eps_pa, eps_bar, eps_pe, eps_ec, f)


def optimize_shares(n, m, double q_obs, int protocol, double q_max, d, n_pe,
                    double eps_total, double f, double tol):
    """Coordinate descent with multiplicative steps over the budget shares."""
    cdef double dn_ = <double>n, dm = <double>m, dd = <double>d, npe = <double>n_pe
    cdef double s[4]
    cdef double t[4]
    cdef double best, v, step = 1.0, factor, tot
    cdef long evals = 1
    cdef int i, j, k
    cdef bint improved
    s[0] = 1.0 / (3.0 + npe)
    s[1] = 1.0 / (3.0 + npe)
    s[2] = npe / (3.0 + npe)
    s[3] = 1.0 / (3.0 + npe)
    with nogil:
        best = _bound(dn_, dm, q_obs, protocol, q_max, dd, eps_total * s[0], eps_total * s[1],
                      eps_total * s[2] / npe, eps_total * s[3], f)
        while step >= tol and evals < 100000:
            improved = False
            for i in range(4):
                for k in range(2):
                    factor = (1.0 + step) if k == 0 else 1.0 / (1.0 + step)
                    for j in range(4):
                        t[j] = s[j]
                    t[i] *= factor
                    tot = t[0] + t[1] + t[2] + t[3]
                    for j in range(4):
                        t[j] = t[j] / tot
                    v = _bound(dn_, dm, q_obs, protocol, q_max, dd, eps_total * t[0], eps_total * t[1],
                               eps_total * t[2] / npe, eps_total * t[3], f)
                    evals += 1
                    if v > best:
                        best = v
                        for j in range(4):
                            s[j] = t[j]
                        improved = True
                        break
            if not improved:
                step *= 0.5
    return best, s[0], s[1], s[2], s[3], evals

"""Pure-Python optimizer kernels; same interface as the compiled ``_ckernels``.

``protocol`` is 0 for BB84 and 1 for six-state. Budgets are passed as shares of
the total: eps_pa = T*s0, eps_bar = T*s1, eps_pe = T*s2/n_pe, eps_ec = T*s3.
"""
import math


def _h2(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _h_ae(protocol, q):
    if protocol == 0:
        v = 1.0 - _h2(q)
    elif q == 0.0:
        v = 1.0
    else:
        arg = (1.0 - 1.5 * q) / (1.0 - q)
        arg = min(1.0, max(0.0, arg))
        v = (1.0 - q) * (1.0 - _h2(arg))
    return v if v > 0.0 else 0.0


def bound_bits(n, m, q_obs, protocol, q_max, d, eps_pa, eps_bar, eps_pe, eps_ec, f):
    """Real-valued key-length bound before flooring and clamping."""
    dv = math.sqrt((math.log(1.0 / eps_pe) + d * math.log(m + 1.0)) / (2.0 * m))
    q = q_obs + dv
    if q > q_max:
        q = q_max
    dn = 2.0 / n * math.log2(1.0 / eps_pa) + 7.0 * math.sqrt(math.log2(2.0 / eps_bar) / n)
    leak = f * n * _h2(min(q, 0.5)) + math.log2(2.0 / eps_ec)
    return n * (_h_ae(protocol, q) - dn) - leak


def optimize_shares(n, m, q_obs, protocol, q_max, d, n_pe, eps_total, f, tol):
    """Coordinate descent with multiplicative steps over the budget shares.

    Returns ``(best_value, s0, s1, s2, s3, evaluations)``; shares sum to 1.
    """
    s = [1.0, 1.0, float(n_pe), 1.0]
    norm = 3.0 + n_pe
    s = [x / norm for x in s]

    def value(sh):
        return bound_bits(n, m, q_obs, protocol, q_max, d,
                          eps_total * sh[0], eps_total * sh[1],
                          eps_total * sh[2] / n_pe, eps_total * sh[3], f)

    best = value(s)
    evals = 1
    step = 1.0
    while step >= tol and evals < 100000:
        improved = False
        for i in range(4):
            for factor in (1.0 + step, 1.0 / (1.0 + step)):
                t = list(s)
                t[i] *= factor
                tot = t[0] + t[1] + t[2] + t[3]
                t = [x / tot for x in t]
                v = value(t)
                evals += 1
                if v > best:
                    best, s, improved = v, t, True
                    break
        if not improved:
            step *= 0.5
    return best, s[0], s[1], s[2], s[3], evals

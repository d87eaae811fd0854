"""Pure-Python trajectory loop.

Twin of the compiled loop in ``_trajectory.pyx``: the arithmetic is written
operation-for-operation identically so the two backends produce bit-identical
results.  Do not "simplify" expressions here without mirroring the change.
"""

BACKEND = "python"

FIXED = 0
CYCLE = 1
APERIODIC = 2


def run_trajectory(a, b, u1, u2, u3, u4, max_iter, tol, burn_in, p_max):
    """Iterate step-and-renormalise from a unit-max-norm state.

    Returns (kind, period, iterations, residual, states) with states a list of
    4-tuples: the final state (kind FIXED/APERIODIC) or the final full period
    (kind CYCLE, oldest first).
    """
    ainv = 1.0 / a
    binv = 1.0 / b
    size = p_max + 1
    ring = [(u1, u2, u3, u4)] * size
    c1, c2, c3, c4 = u1, u2, u3, u4
    d = 0.0
    for t in range(1, max_iter + 1):
        t1 = b * c1 + binv * c2
        t2 = b * c3 + binv * c4
        t3 = binv * c1 + b * c2
        t4 = binv * c3 + b * c4
        w1 = a * (t1 * t1)
        w2 = ainv * (t2 * t2)
        w3 = ainv * (t3 * t3)
        w4 = a * (t4 * t4)
        m = w1
        if w2 > m:
            m = w2
        if w3 > m:
            m = w3
        if w4 > m:
            m = w4
        c1 = w1 / m
        c2 = w2 / m
        c3 = w3 / m
        c4 = w4 / m
        p1, p2, p3, p4 = ring[(t - 1) % size]
        d = abs(c1 - p1)
        e = abs(c2 - p2)
        if e > d:
            d = e
        e = abs(c3 - p3)
        if e > d:
            d = e
        e = abs(c4 - p4)
        if e > d:
            d = e
        ring[t % size] = (c1, c2, c3, c4)
        if d <= tol:
            return (FIXED, 1, t, d, [(c1, c2, c3, c4)])
        if t >= burn_in:
            q_hi = p_max if p_max < t else t
            for q in range(2, q_hi + 1):
                h1, h2, h3, h4 = ring[(t - q) % size]
                dq = abs(c1 - h1)
                e = abs(c2 - h2)
                if e > dq:
                    dq = e
                e = abs(c3 - h3)
                if e > dq:
                    dq = e
                e = abs(c4 - h4)
                if e > dq:
                    dq = e
                if dq <= tol:
                    states = [ring[(t - q + k) % size] for k in range(1, q + 1)]
                    return (CYCLE, q, t, dq, states)
    return (APERIODIC, 0, max_iter, d, [(c1, c2, c3, c4)])

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory loop.

Twin of ``_trajectory_py.run_trajectory``: the arithmetic is written
operation-for-operation identically (and the extension is compiled with
-ffp-contract=off) so both backends produce bit-identical results.
"""

from libc.math cimport fabs

BACKEND = "compiled"

FIXED = 0
CYCLE = 1
APERIODIC = 2

# ring capacity bounds p_max; the python wrapper enforces p_max <= 256
DEF RING_CAP = 257


def run_trajectory(double a, double b, double u1, double u2, double u3, double u4,
                   int max_iter, double tol, int burn_in, int p_max):
    """Iterate step-and-renormalise from a unit-max-norm state.

    Returns (kind, period, iterations, residual, states) with states a list of
    4-tuples: the final state (kind FIXED/APERIODIC) or the final full period
    (kind CYCLE, oldest first).
    """
    cdef double ring[RING_CAP][4]
    cdef double ainv = 1.0 / a
    cdef double binv = 1.0 / b
    cdef int size = p_max + 1
    cdef double c1 = u1, c2 = u2, c3 = u3, c4 = u4
    cdef double t1, t2, t3, t4, w1, w2, w3, w4, m, d, e, dq
    cdef int t, q, q_hi, k, slot

    if size > RING_CAP:
        raise ValueError("p_max exceeds the compiled ring capacity")

    for k in range(size):
        ring[k][0] = u1
        ring[k][1] = u2
        ring[k][2] = u3
        ring[k][3] = u4

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
        slot = (t - 1) % size
        d = fabs(c1 - ring[slot][0])
        e = fabs(c2 - ring[slot][1])
        if e > d:
            d = e
        e = fabs(c3 - ring[slot][2])
        if e > d:
            d = e
        e = fabs(c4 - ring[slot][3])
        if e > d:
            d = e
        slot = t % size
        ring[slot][0] = c1
        ring[slot][1] = c2
        ring[slot][2] = c3
        ring[slot][3] = c4
        if d <= tol:
            return (FIXED, 1, t, d, [(c1, c2, c3, c4)])
        if t >= burn_in:
            q_hi = p_max if p_max < t else t
            for q in range(2, q_hi + 1):
                slot = (t - q) % size
                dq = fabs(c1 - ring[slot][0])
                e = fabs(c2 - ring[slot][1])
                if e > dq:
                    dq = e
                e = fabs(c3 - ring[slot][2])
                if e > dq:
                    dq = e
                e = fabs(c4 - ring[slot][3])
                if e > dq:
                    dq = e
                if dq <= tol:
                    states = []
                    for k in range(1, q + 1):
                        slot = (t - q + k) % size
                        states.append((ring[slot][0], ring[slot][1], ring[slot][2], ring[slot][3]))
                    return (CYCLE, q, t, dq, states)
    return (APERIODIC, 0, max_iter, d, [(c1, c2, c3, c4)])

# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled kernels for the hot loops.

Operation-for-operation identical to ``_kernels_py`` (same libm pow, same
addition order, no fast-math) so both backends give bitwise-equal results.
"""

from libc.math cimport pow

BACKEND_NAME = "cython"

cdef enum:
    _DR = 0
    _DT = 1
    _ABSORBED = 2
    _LOST = 3
    _UNDETECTED = 4

cdef enum:
    _PENDING = -1
    _ABSENT = 0
    _PRESENT = 1

cdef enum:
    _NONE = 0
    _SDR = 1
    _SDT = 2

EVENT_DR = _DR
EVENT_DT = _DT
EVENT_ABSORBED = _ABSORBED
EVENT_LOST = _LOST
EVENT_UNDETECTED = _UNDETECTED

DECISION_PENDING = _PENDING
DECISION_ABSENT = _ABSENT
DECISION_PRESENT = _PRESENT

STREAK_NONE = _NONE
STREAK_DR = _SDR
STREAK_DT = _SDT


def eta_bracket_sum(double r, long n):
    """Kahan-compensated sum_{j=1..n} (1 + r^(2n-2j+1)) * r^(j-1)."""
    cdef double total = 0.0
    cdef double comp = 0.0
    cdef double term, y, t
    cdef long j
    for j in range(1, n + 1):
        term = (1.0 + pow(r, <double>(2 * n - 2 * j + 1))) * pow(r, <double>(j - 1))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


cdef inline int _classify(double u1, double u2, double u3, double u4,
                          double p_dr, double p_dt, double p_absorbed,
                          double qe, double p_dark_dr, double p_dark_dt) nogil:
    cdef double c1 = p_dr
    cdef double c2 = p_dr + p_dt
    cdef double c3 = c2 + p_absorbed
    cdef int event
    if u1 < c1:
        event = _DR if u2 < qe else _UNDETECTED
    elif u1 < c2:
        event = _DT if u2 < qe else _UNDETECTED
    elif u1 < c3:
        event = _ABSORBED
    else:
        event = _LOST
    if event == _LOST or event == _UNDETECTED:
        if u3 < p_dark_dr:
            event = _DR
        elif u4 < p_dark_dt:
            event = _DT
    return event


def classify_photon(double u1, double u2, double u3, double u4,
                    double p_dr, double p_dt, double p_absorbed,
                    double qe, double p_dark_dr, double p_dark_dt):
    """One photon window -> event code (see the pure backend's docstring)."""
    return _classify(u1, u2, u3, u4, p_dr, p_dt, p_absorbed, qe, p_dark_dr, p_dark_dt)


def trial_chunk(double[::1] u, unsigned char[::1] events,
                double p_dr, double p_dt, double p_absorbed, double qe,
                double p_dark_dr, double p_dark_dt,
                int required, bint break_on_undetected,
                int streak_det, int streak_len, bint dark_enabled):
    """Run photon windows off a uniform buffer until a streak decision."""
    cdef Py_ssize_t stride = 4 if dark_enabled else 2
    cdef Py_ssize_t m = u.shape[0] // stride
    cdef Py_ssize_t i, base
    cdef double u3, u4
    cdef int ev
    for i in range(m):
        base = i * stride
        if dark_enabled:
            u3 = u[base + 2]
            u4 = u[base + 3]
        else:
            u3 = 1.0
            u4 = 1.0
        ev = _classify(u[base], u[base + 1], u3, u4,
                       p_dr, p_dt, p_absorbed, qe, p_dark_dr, p_dark_dt)
        events[i] = <unsigned char>ev
        if ev == _DR:
            if streak_det == _SDR:
                streak_len += 1
            else:
                streak_det = _SDR
                streak_len = 1
            if streak_len >= required:
                return i + 1, _PRESENT, streak_det, streak_len
        elif ev == _DT:
            if streak_det == _SDT:
                streak_len += 1
            else:
                streak_det = _SDT
                streak_len = 1
            if streak_len >= required:
                return i + 1, _ABSENT, streak_det, streak_len
        elif ev == _UNDETECTED:
            if break_on_undetected:
                streak_det = _NONE
                streak_len = 0
        else:
            streak_det = _NONE
            streak_len = 0
    return m, _PENDING, streak_det, streak_len

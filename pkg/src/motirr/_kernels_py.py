"""Pure-Python kernels: reference implementation of the hot loops.

Mirrors ``_kernels.pyx`` operation for operation. Both backends must produce
bitwise-identical results (both lean on libm's ``pow`` and perform additions
in the same order); the parity test suite asserts this.
"""

from __future__ import annotations

import math

BACKEND_NAME = "python"

# Per-photon event codes (shared with the compiled backend).
EVENT_DR = 0
EVENT_DT = 1
EVENT_ABSORBED = 2
EVENT_LOST = 3
EVENT_UNDETECTED = 4

# Trial decision codes.
DECISION_PENDING = -1
DECISION_ABSENT = 0
DECISION_PRESENT = 1

# Streak-owner codes.
STREAK_NONE = 0
STREAK_DR = 1
STREAK_DT = 2


def eta_bracket_sum(r, n):
    """Explicit bracket sum ``sum_{j=1..n} (1 + r^(2n-2j+1)) * r^(j-1)``.

    Kahan-compensated: the caller multiplies by (1-r)/(1+r) and subtracts
    from 1, so summation error surfaces directly in the efficiency. Naive
    accumulation of ~1e4 order-one terms would not hold the 1e-12 budget.
    """
    total = 0.0
    comp = 0.0
    for j in range(1, n + 1):
        term = (1.0 + math.pow(r, 2 * n - 2 * j + 1)) * math.pow(r, j - 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def classify_photon(u1, u2, u3, u4, p_dr, p_dt, p_absorbed, qe, p_dark_dr, p_dark_dt):
    """One photon window -> event code, from exactly four uniforms.

    u1 picks the physical outcome, u2 thins Dr/Dt clicks by the detector
    quantum efficiency (read regardless of outcome so the stream position
    never depends on the draw), u3/u4 gate dark clicks on Dr/Dt. Windows
    with no click (lost/undetected) may be converted into a dark click;
    absorbed windows keep their record.
    """
    c1 = p_dr
    c2 = p_dr + p_dt
    c3 = c2 + p_absorbed
    if u1 < c1:
        event = EVENT_DR if u2 < qe else EVENT_UNDETECTED
    elif u1 < c2:
        event = EVENT_DT if u2 < qe else EVENT_UNDETECTED
    elif u1 < c3:
        event = EVENT_ABSORBED
    else:
        event = EVENT_LOST
    if event == EVENT_LOST or event == EVENT_UNDETECTED:
        if u3 < p_dark_dr:
            event = EVENT_DR
        elif u4 < p_dark_dt:
            event = EVENT_DT
    return event


def trial_chunk(u, events, p_dr, p_dt, p_absorbed, qe, p_dark_dr, p_dark_dt,
                required, break_on_undetected, streak_det, streak_len, dark_enabled):
    """Run photon windows off a pre-drawn uniform buffer until a streak decision.

    ``u`` holds ``stride * m`` uniforms (stride 2, or 4 with dark counts);
    ``events`` receives one code per processed window. Streak state is the
    caller's, threaded through so a trial can span several chunks.

    Returns ``(windows_processed, decision, streak_det, streak_len)`` with
    decision ``DECISION_PENDING`` if the buffer ran out first.
    """
    stride = 4 if dark_enabled else 2
    m = len(u) // stride
    for i in range(m):
        base = i * stride
        if dark_enabled:
            u3 = u[base + 2]
            u4 = u[base + 3]
        else:
            u3 = 1.0
            u4 = 1.0
        ev = classify_photon(u[base], u[base + 1], u3, u4,
                             p_dr, p_dt, p_absorbed, qe, p_dark_dr, p_dark_dt)
        events[i] = ev
        if ev == EVENT_DR:
            if streak_det == STREAK_DR:
                streak_len += 1
            else:
                streak_det = STREAK_DR
                streak_len = 1
            if streak_len >= required:
                return i + 1, DECISION_PRESENT, streak_det, streak_len
        elif ev == EVENT_DT:
            if streak_det == STREAK_DT:
                streak_len += 1
            else:
                streak_det = STREAK_DT
                streak_len = 1
            if streak_len >= required:
                return i + 1, DECISION_ABSENT, streak_det, streak_len
        elif ev == EVENT_UNDETECTED:
            if break_on_undetected:
                streak_det = STREAK_NONE
                streak_len = 0
        else:
            # absorbed or lost: nothing reached a detector, streak broken
            streak_det = STREAK_NONE
            streak_len = 0
    return m, DECISION_PENDING, streak_det, streak_len

"""Independent brute-force references used to check the fast implementations.

Everything here is written with plain Python loops and math-module
arithmetic, transcribed directly from the documented update rules, and is
deliberately ignorant of the package internals.
"""

import math


def oracle_dipolar_field(positions, axes, magnitudes, spins, alpha, cutoff):
    """Naive per-pair point-dipole sums; returns a list of (fx, fy)."""
    n = len(spins)
    fields = []
    for i in range(n):
        fx = fy = 0.0
        for j in range(n):
            if j == i:
                continue
            rx = positions[i][0] - positions[j][0]
            ry = positions[i][1] - positions[j][1]
            d = math.hypot(rx, ry)
            if d > cutoff:
                continue
            ux, uy = rx / d, ry / d
            mjx = spins[j] * magnitudes[j] * axes[j][0]
            mjy = spins[j] * magnitudes[j] * axes[j][1]
            mdotr = mjx * ux + mjy * uy
            fx += alpha * (3.0 * mdotr * ux - mjx) / d ** 3
            fy += alpha * (3.0 * mdotr * uy - mjy) / d ** 3
        fields.append((fx, fy))
    return fields


def oracle_astroid_lhs(h_par, h_perp, b, c, beta, gamma, hc):
    return (abs(h_par) / (b * hc)) ** (2.0 / gamma) + (
        abs(h_perp) / (c * hc)
    ) ** (2.0 / beta)


def oracle_relax(positions, axes, magnitudes, spins, hx, hy, alpha, cutoff,
                 b, c, beta, gamma, site_hc, max_flips=100000):
    """Greedy most-violated-first single-flip relaxation, fully naive."""
    s = [int(v) for v in spins]
    n = len(s)
    for _ in range(max_flips):
        fields = oracle_dipolar_field(positions, axes, magnitudes, s, alpha, cutoff)
        best_idx, best_lhs = -1, -math.inf
        for i in range(n):
            ex, ey = axes[i]
            h_par = (fields[i][0] + hx) * ex + (fields[i][1] + hy) * ey
            h_perp = (fields[i][0] + hx) * (-ey) + (fields[i][1] + hy) * ex
            if h_par * s[i] >= 0:
                continue
            lhs = oracle_astroid_lhs(h_par, h_perp, b, c, beta, gamma, site_hc[i])
            if lhs >= 1.0 and lhs > best_lhs:
                best_idx, best_lhs = i, lhs
        if best_idx < 0:
            return s
        s[best_idx] = -s[best_idx]
    raise RuntimeError("oracle relaxation did not settle")


def oracle_single_magnet(spin, angle, fields, b, c, beta, gamma, hc):
    """Closed-form isolated-magnet hysteresis fold over a field sequence."""
    s = int(spin)
    ex, ey = math.cos(angle), math.sin(angle)
    for hx, hy in fields:
        h_par = hx * ex + hy * ey
        h_perp = -hx * ey + hy * ex
        if h_par * s < 0 and oracle_astroid_lhs(
            h_par, h_perp, b, c, beta, gamma, hc
        ) >= 1.0:
            s = -s
    return s


def oracle_narma(u, order, a, b, c, d):
    """Literal transcription of the driven recurrence, zero initial history."""
    length = len(u)
    y = [0.0] * length
    for t in range(length - 1):
        window = 0.0
        for i in range(order):
            if t - i >= 0:
                window += y[t - i]
        u_old = u[t - order + 1] if t - order + 1 >= 0 else 0.0
        y[t + 1] = a * y[t] + b * y[t] * window + c * u_old * u[t] + d
    return y

"""Independent reference computations used only by the tests.

Nothing here calls the package's evaluation paths: Bernstein sums are taken
term by term from the defining formula, moduli by brute force over all pairs,
and the concave majorant from its double-sup characterisation.
"""
from fractions import Fraction
from math import comb

import numpy as np


def direct_bernstein(f, n, a, b, x):
    """(1/(b-a)^n) sum C(n,k) (x-a)^k (b-x)^(n-k) f(a + k(b-a)/n), term by term."""
    total = 0.0
    for k in range(n + 1):
        total += comb(n, k) * (x - a) ** k * (b - x) ** (n - k) * float(f(np.array(a + k * (b - a) / n)))
    return total / (b - a) ** n


def direct_composite(f, n, m, x):
    """Composite operator via the piece formula with m^n scaling and nodes (kn-n+i)/(mn)."""
    k = min(max(int(np.ceil(x * m)), 1), m)
    total = 0.0
    for i in range(n + 1):
        node = (k * n - n + i) / (m * n)
        total += comb(n, i) * (x - (k - 1) / m) ** i * (k / m - x) ** (n - i) * float(f(np.array(node)))
    return m**n * total


def exact_rule_value(poly_coeffs, n, m):
    """Double-sum quadrature of a polynomial with rational coefficients, exactly."""
    total = Fraction(0)
    for k in range(1, m + 1):
        for i in range(n + 1):
            t = Fraction(k * n - n + i, m * n)
            total += sum(Fraction(c) * t**j for j, c in enumerate(poly_coeffs))
    return total / (m * (n + 1))


def brute_omega1(values, lag_max):
    """max |v_i - v_j| over all pairs with |i - j| <= lag_max, via a full pair matrix."""
    v = np.asarray(values)
    i = np.arange(v.size)
    diff = np.abs(v[:, None] - v[None, :])
    mask = np.abs(i[:, None] - i[None, :]) <= lag_max
    return float(np.max(np.where(mask, diff, 0.0)))


def brute_omega2(values, h_max):
    """max |v[j-h] - 2 v[j] + v[j+h]| over all admissible j and 0 <= h <= h_max."""
    v = np.asarray(values)
    N = v.size - 1
    best = 0.0
    for j in range(N + 1):
        hs = np.arange(0, min(h_max, j, N - j) + 1)
        if hs.size:
            best = max(best, float(np.max(np.abs(v[j - hs] - 2 * v[j] + v[j + hs]))))
    return best


def double_sup_majorant(ts, ws, t):
    """sup over x <= t <= y, x != y of ((t-x) w(y) + (y-t) w(x)) / (y - x) on tabulated points."""
    ts = np.asarray(ts)
    ws = np.asarray(ws)
    left = ts <= t
    right = ts >= t
    xs, wx = ts[left], ws[left]
    ys, wy = ts[right], ws[right]
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    WX, WY = np.meshgrid(wx, wy, indexing="ij")
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = ((t - X) * WY + (Y - t) * WX) / (Y - X)
    vals = np.where(Y > X, vals, -np.inf)
    best = float(np.max(vals))
    exact = ws[np.isclose(ts, t, rtol=0, atol=0)]
    return max(best, float(exact.max())) if exact.size else best

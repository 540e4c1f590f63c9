"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names (``decasteljau``, ``composite_from_nodes``, ``lag_profile``,
``second_difference_profile``, ``upper_hull``) are bound to the numba versions
unless ``CB_DISABLE_NUMBA`` is set. Both flavours stay importable under the
``*_numba`` / ``*_numpy`` names so tests and the benchmark can compare them.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


# -- de Casteljau --------------------------------------------------------------

def decasteljau_numpy(coeffs, y):
    """Evaluate many Bernstein polynomials of one degree.

    ``coeffs`` has shape (P, d+1), row p holding the Bernstein coefficients of
    polynomial p on [0, 1]; ``y`` has shape (P,). Returns shape (P,).
    """
    b = np.array(coeffs, dtype=np.float64, copy=True)
    y = np.asarray(y, dtype=np.float64)[:, None]
    omy = 1.0 - y
    d = b.shape[1] - 1
    for r in range(d, 0, -1):
        b[:, :r] = omy * b[:, :r] + y * b[:, 1:r + 1]
    return b[:, 0].copy()


@njit
def decasteljau_numba(coeffs, y):
    P, width = coeffs.shape
    out = np.empty(P)
    work = np.empty(width)
    for p in range(P):
        t = y[p]
        s = 1.0 - t
        for i in range(width):
            work[i] = coeffs[p, i]
        for r in range(width - 1, 0, -1):
            for i in range(r):
                work[i] = s * work[i] + t * work[i + 1]
        out[p] = work[0]
    return out


# -- composite operator from node values --------------------------------------

def _locate_numpy(x, m):
    k = np.ceil(x * m).astype(np.int64)
    k = np.clip(k, 1, m)
    y = np.clip(x * m - (k - 1), 0.0, 1.0)
    return k, y


def composite_from_nodes_numpy(values, n, m, x):
    """Composite Bernstein operator evaluated from its mn+1 node values.

    Piece k = 1..m covers [(k-1)/m, k/m]; an interior partition point k/m is
    evaluated on piece k (where it is the right end, y = 1).
    """
    x = np.asarray(x, dtype=np.float64)
    k, y = _locate_numpy(x, m)
    idx = (k - 1)[:, None] * n + np.arange(n + 1)[None, :]
    return decasteljau_numpy(np.asarray(values, dtype=np.float64)[idx], y)


@njit
def composite_from_nodes_numba(values, n, m, x):
    P = x.shape[0]
    out = np.empty(P)
    work = np.empty(n + 1)
    for p in range(P):
        xm = x[p] * m
        k = int(np.ceil(xm))
        if k < 1:
            k = 1
        elif k > m:
            k = m
        t = xm - (k - 1)
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        s = 1.0 - t
        base = (k - 1) * n
        for i in range(n + 1):
            work[i] = values[base + i]
        for r in range(n, 0, -1):
            for i in range(r):
                work[i] = s * work[i] + t * work[i + 1]
        out[p] = work[0]
    return out


# -- modulus profiles ------------------------------------------------------------

def lag_profile_numpy(v):
    """``D[l] = max_j |v[j+l] - v[j]|`` for every lag l = 0..len(v)-1."""
    v = np.asarray(v, dtype=np.float64)
    N = v.shape[0] - 1
    out = np.zeros(N + 1)
    for lag in range(1, N + 1):
        out[lag] = np.max(np.abs(v[lag:] - v[:-lag]))
    return out


@njit
def lag_profile_numba(v):
    N = v.shape[0] - 1
    out = np.zeros(N + 1)
    for lag in range(1, N + 1):
        best = 0.0
        for j in range(N + 1 - lag):
            d = abs(v[j + lag] - v[j])
            if d > best:
                best = d
        out[lag] = best
    return out


def second_difference_profile_numpy(v):
    """``D[h] = max_j |v[j-h] - 2 v[j] + v[j+h]|`` for h = 0..N//2."""
    v = np.asarray(v, dtype=np.float64)
    N = v.shape[0] - 1
    H = N // 2
    out = np.zeros(H + 1)
    for h in range(1, H + 1):
        out[h] = np.max(np.abs(v[:N + 1 - 2 * h] - 2.0 * v[h:N + 1 - h] + v[2 * h:]))
    return out


@njit
def second_difference_profile_numba(v):
    N = v.shape[0] - 1
    H = N // 2
    out = np.zeros(H + 1)
    for h in range(1, H + 1):
        best = 0.0
        for j in range(h, N + 1 - h):
            d = abs(v[j - h] - 2.0 * v[j] + v[j + h])
            if d > best:
                best = d
        out[h] = best
    return out


# -- upper concave hull ---------------------------------------------------------

def upper_hull_numpy(ts, ws):
    """Indices of the upper hull vertices of points sorted by abscissa.

    Andrew's monotone chain, upper half only; collinear points are dropped.
    """
    ts = np.asarray(ts, dtype=np.float64)
    ws = np.asarray(ws, dtype=np.float64)
    hull = []
    for i in range(ts.shape[0]):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (ts[a] - ts[o]) * (ws[i] - ws[o]) - (ws[a] - ws[o]) * (ts[i] - ts[o])
            if cross >= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=np.int64)


@njit
def upper_hull_numba(ts, ws):
    P = ts.shape[0]
    hull = np.empty(P, dtype=np.int64)
    top = 0
    for i in range(P):
        while top >= 2:
            o = hull[top - 2]
            a = hull[top - 1]
            cross = (ts[a] - ts[o]) * (ws[i] - ws[o]) - (ws[a] - ws[o]) * (ts[i] - ts[o])
            if cross >= 0.0:
                top -= 1
            else:
                break
        hull[top] = i
        top += 1
    return hull[:top].copy()


# -- dispatch ---------------------------------------------------------------------

def _contiguous(a):
    return np.ascontiguousarray(a, dtype=np.float64)


if USE_NUMBA:
    def decasteljau(coeffs, y):
        return decasteljau_numba(_contiguous(coeffs), _contiguous(y))

    def composite_from_nodes(values, n, m, x):
        return composite_from_nodes_numba(_contiguous(values), int(n), int(m), _contiguous(x))

    def lag_profile(v):
        return lag_profile_numba(_contiguous(v))

    def second_difference_profile(v):
        return second_difference_profile_numba(_contiguous(v))

    def upper_hull(ts, ws):
        return upper_hull_numba(_contiguous(ts), _contiguous(ws))
else:
    decasteljau = decasteljau_numpy
    composite_from_nodes = composite_from_nodes_numpy
    lag_profile = lag_profile_numpy
    second_difference_profile = second_difference_profile_numpy
    upper_hull = upper_hull_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"

"""Classical and composite Bernstein operators on [0, 1].

The composite operator of degree n on m uniform pieces only ever looks at f
through its values at the mn+1 global nodes j/(mn); everything here is built
on that node vector.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import kernels
from .errors import DomainError, InvalidParameterError

MAX_DEGREE = 64
MAX_ITERATES = 2**31 - 1


@dataclass(frozen=True)
class OperatorParams:
    """Degree ``n`` per piece and number of uniform pieces ``m``."""

    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidParameterError(f"{name} must be a positive integer, got {v!r}")
        if self.n > MAX_DEGREE:
            raise InvalidParameterError(f"degree n={self.n} exceeds the cap {MAX_DEGREE}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def node_count(self):
        return self.m * self.n + 1

    def piece_of(self, x):
        """Piece index k in 1..m owning x (interior k/m belongs to piece k)."""
        return int(min(max(np.ceil(x * self.m), 1), self.m))

    def piece_bounds(self, k):
        return (k - 1) / self.m, k / self.m


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise InvalidParameterError(f"degenerate interval [{self.a}, {self.b}]")

    @property
    def length(self):
        return self.b - self.a

    def contains(self, x):
        x = np.asarray(x)
        return bool(np.all((x >= self.a) & (x <= self.b)))


UNIT = Interval(0.0, 1.0)


@dataclass(frozen=True)
class NodeGrid:
    params: OperatorParams
    nodes: np.ndarray

    def local_index(self, k, i):
        """Global node index of local node i on piece k."""
        return (k - 1) * self.params.n + i


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Row j holds the weights B̄(f; node j) puts on each node value of f."""

    params: OperatorParams
    entries: np.ndarray

    def apply(self, values):
        return self.entries @ values

    def power_apply(self, values, r):
        """``entries**r @ values``; binary exponentiation once r exceeds 8."""
        if r < 0 or r > MAX_ITERATES:
            raise InvalidParameterError(f"iteration count {r} out of range")
        v = np.asarray(values, dtype=np.float64)
        if r <= 8:
            for _ in range(r):
                v = self.entries @ v
            return v
        return matrix_power(self.entries, r) @ v


def matrix_power(a, r):
    result = np.eye(a.shape[0])
    base = np.array(a, dtype=np.float64)
    while r:
        if r & 1:
            result = result @ base
        r >>= 1
        if r:
            base = base @ base
    return result


def _check_x(x, iv=UNIT):
    x = np.asarray(x, dtype=np.float64)
    if x.size and not (np.all(np.isfinite(x)) and iv.contains(x)):
        raise DomainError(f"evaluation point outside [{iv.a}, {iv.b}]")
    return x


def _as_output(arr, like):
    return float(arr[0]) if np.ndim(like) == 0 else arr.reshape(np.shape(like))


def affine_pullback(iv, x):
    """Map x in [a, b] to (x - a)/(b - a) in [0, 1]."""
    x = _check_x(x, iv)
    y = (x - iv.a) / iv.length
    return float(y) if y.ndim == 0 else y


def affine_map(iv, y):
    """Inverse of :func:`affine_pullback`: y in [0, 1] to (b - a) y + a."""
    y = np.asarray(y, dtype=np.float64)
    x = iv.length * y + iv.a
    return float(x) if x.ndim == 0 else x


def _check_degree(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError(f"degree must be a positive integer, got {n!r}")
    if n > MAX_DEGREE:
        raise InvalidParameterError(f"degree n={n} exceeds the cap {MAX_DEGREE}")


def bernstein_eval(f, n, iv, x):
    """Degree-n Bernstein polynomial of f on ``iv`` at x (scalar or array).

    Pulled back to [0, 1] and evaluated by de Casteljau, which only forms
    convex combinations of the samples f(a + k(b-a)/n).
    """
    _check_degree(n)
    x = _check_x(x, iv)
    coeffs = f(iv.a + iv.length * np.arange(n + 1) / n)
    y = np.clip((x.ravel() - iv.a) / iv.length, 0.0, 1.0)
    out = kernels.decasteljau(np.broadcast_to(coeffs, (y.size, n + 1)), y)
    return _as_output(out, x)


def node_grid(p):
    N = p.n * p.m
    nodes = np.arange(N + 1, dtype=np.float64) / N
    nodes.setflags(write=False)
    return NodeGrid(p, nodes)


def node_values(f, p):
    return np.asarray(f(node_grid(p).nodes), dtype=np.float64)


def eval_from_nodes(values, p, x):
    """Composite operator applied to node data ``values`` (length mn+1)."""
    x = _check_x(x)
    out = kernels.composite_from_nodes(values, p.n, p.m, np.atleast_1d(x).ravel())
    return _as_output(out, x)


def composite_eval(f, p, x):
    """B̄_{n,m}(f; x): the degree-n Bernstein polynomial of f on the piece holding x."""
    x = _check_x(x)
    return eval_from_nodes(node_values(f, p), p, x)


def second_moment(p, x):
    """B̄((t - x)^2; x) = (x - (k-1)/m)(k/m - x)/n on the piece k holding x."""
    x = _check_x(x)
    xs = np.atleast_1d(x)
    k = np.clip(np.ceil(xs * p.m), 1, p.m)
    out = np.maximum((xs - (k - 1) / p.m) * (k / p.m - xs), 0.0) / p.n
    return _as_output(out, x)


def piecewise_linear_interp(f, m, x):
    """Chord interpolant of f at the points j/m."""
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidParameterError(f"m must be a positive integer, got {m!r}")
    x = _check_x(x)
    knots = np.arange(m + 1) / m
    return np.interp(x, knots, f(knots)) if np.ndim(x) else float(np.interp(x, knots, f(knots)))


@lru_cache(maxsize=256)
def build_transfer_matrix(p):
    n, m = p.n, p.m
    size = p.node_count
    i = np.arange(n + 1)
    binom = np.array([comb(n, j) for j in range(n + 1)], dtype=np.float64)
    entries = np.zeros((size, size))
    for k in range(1, m + 1):
        base = (k - 1) * n
        lo = 0 if k == 1 else 1  # node (k-1)n already belongs to piece k-1
        for r in range(lo, n + 1):
            y = r / n
            entries[base + r, base:base + n + 1] = binom * y**i * (1.0 - y) ** (n - i)
    entries.setflags(write=False)
    return TransferMatrix(p, entries)


def iterate_node_values(f, p, r):
    """Node values of (B̄)^r f, for r >= 1 (r = 0 gives f's own node values)."""
    return build_transfer_matrix(p).power_apply(node_values(f, p), r)


def iterate_eval(f, p, r, x):
    """(B̄_{n,m})^r (f; x), exact through the node transfer matrix."""
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or r < 0 or r > MAX_ITERATES:
        raise InvalidParameterError(f"iteration count must be in [0, 2^31-1], got {r!r}")
    x = _check_x(x)
    if r == 0:
        out = f(np.atleast_1d(x))
        return _as_output(out, x)
    v = build_transfer_matrix(p).power_apply(node_values(f, p), r - 1)
    return eval_from_nodes(v, p, x)

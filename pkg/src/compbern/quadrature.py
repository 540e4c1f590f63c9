"""The composite Bernstein quadrature rule and a reference integrator."""
import heapq
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidInputError, InvalidParameterError
from .operator_core import OperatorParams, node_grid

DEFAULT_TOL = 1e-12
MAX_DEPTH = 60
MAX_INTERVALS = 20000
NORM_SAMPLES = 2001


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    params: OperatorParams
    nodes: np.ndarray
    weights: np.ndarray

    def __call__(self, f):
        return apply_rule(self, f)

    def to_dict(self):
        return {
            "n": self.params.n,
            "m": self.params.m,
            "nodes": [format(float(v), ".17g") for v in self.nodes],
            "weights": [format(float(w), ".17g") for w in self.weights],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        p = OperatorParams(int(d["n"]), int(d["m"]))
        nodes = np.array([float(v) for v in d["nodes"]])
        weights = np.array([float(w) for w in d["weights"]])
        if nodes.shape != (p.node_count,) or weights.shape != nodes.shape:
            raise InvalidInputError("rule has the wrong number of nodes or weights")
        return cls(p, nodes, weights)


@dataclass(frozen=True)
class VarianceValue:
    params: OperatorParams
    value: float


def build_rule(p):
    """Merged-node form of the composite rule.

    Each piece contributes 1/(m(n+1)) at its n+1 nodes, so nodes shared by two
    neighbouring pieces (j = kn, 0 < k < m) carry twice that.
    """
    nodes = node_grid(p).nodes
    weights = np.full(p.node_count, 1.0 / (p.m * (p.n + 1)))
    weights[p.n:-1:p.n] *= 2.0
    weights.setflags(write=False)
    return QuadratureRule(p, nodes, weights)


def apply_rule(rule, f):
    return math.fsum(rule.weights * f(rule.nodes))


def double_sum(f, p):
    """The rule as a sum over pieces k and local nodes i (shared nodes visited twice)."""
    n, m = p.n, p.m
    total = []
    for k in range(1, m + 1):
        x = (k * n - n + np.arange(n + 1)) / (m * n)
        total.extend(f(x))
    return math.fsum(total) / (m * (n + 1))


def variance(p):
    """I(e2) - I(e1)^2 of the rule in closed form: 1/12 + 1/(6 m^2 n)."""
    return VarianceValue(p, 1.0 / 12.0 + 1.0 / (6.0 * p.m**2 * p.n))


def c2_error_bound(p, g):
    """||g''|| / (12 m^2 n), with the sup norm sampled at 2001 points."""
    if g.second_derivative is None:
        raise InvalidInputError(f"{g.label}: C2 bound needs a second derivative")
    x = np.linspace(0.0, 1.0, NORM_SAMPLES)
    return float(np.max(np.abs(g.d2(x)))) / (12.0 * p.m**2 * p.n)


# -- reference integrator ----------------------------------------------------------

# 7-point Gauss / 15-point Kronrod pair on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KW = np.concatenate([_WK[:-1], _WK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 13, 11, 9]] = np.concatenate([_WG[:-1], _WG[:-1]])
_GW[7] = _WG[-1]


def _gk15(f, a, b):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    fx = f(c + h * _NODES)
    k = h * float(np.dot(_KW, fx))
    g = h * float(np.dot(_GW, fx))
    return k, abs(k - g)


def reference_integral(f, abs_tol=DEFAULT_TOL, points=None):
    """Integral of f over [0, 1] by globally adaptive Gauss-Kronrod (7/15).

    The interval with the largest |K15 - G7| is bisected until the summed
    estimates fall below ``abs_tol``. ``points`` are optional breakpoints
    (kinks) used as the initial partition.

    Raises ConvergenceError when a subinterval would exceed depth 60 or the
    interval budget runs out.
    """
    if not abs_tol >= 1e-14:
        raise InvalidParameterError(f"abs_tol must be >= 1e-14, got {abs_tol!r}")
    edges = sorted({0.0, 1.0, *(float(t) for t in (points or ()) if 0.0 < t < 1.0)})
    heap = []
    total_err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, a, b)
        heapq.heappush(heap, (-err, a, b, val, 0))
        total_err += err
    while total_err > abs_tol:
        neg_err, a, b, val, depth = heapq.heappop(heap)
        if depth >= MAX_DEPTH or len(heap) >= MAX_INTERVALS:
            raise ConvergenceError(f"adaptive integration did not converge near [{a}, {b}] "
                                   f"(estimated error {total_err:.3e})")
        mid = 0.5 * (a + b)
        left, right = _gk15(f, a, mid), _gk15(f, mid, b)
        heapq.heappush(heap, (-left[1], a, mid, left[0], depth + 1))
        heapq.heappush(heap, (-right[1], mid, b, right[0], depth + 1))
        total_err += neg_err + left[1] + right[1]
        if total_err <= abs_tol:
            # recompute to shed accumulated cancellation in the running sum
            total_err = math.fsum(-e for e, *_ in heap)
    return math.fsum(item[3] for item in heap)

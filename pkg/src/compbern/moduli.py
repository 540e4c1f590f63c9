"""Grid estimates of moduli of smoothness, the least concave majorant, and a
K-functional upper estimate.

All moduli are sup-estimates over finite sets of admissible points and so
never exceed the true modulus. A query at step t combines two sweeps:

* the lag profile on the uniform grid a + j(b-a)/N (all grid steps <= t);
* an exact-step sweep, where the step equals t itself and the base points run
  over N+1 evenly spaced admissible positions (endpoints included).

The second sweep removes the staircase error the pure grid has at off-grid
steps, which is what keeps bound right-hand sides stable under grid refinement.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import InvalidInputError, InvalidParameterError
from .functions import RealFunction, constant
from .operator_core import UNIT, Interval, bernstein_eval

DEFAULT_GRID = 2048
NORM_SAMPLES = 1001
SMOOTHING_DEGREES = (4, 8, 16, 32, 64)

# steps are snapped to the grid when within this many grid cells of a node
_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class ModulusEstimate:
    """A modulus tabulated on the steps t_j = j (b-a)/N."""

    kind: str
    domain: Interval
    grid_size: int
    steps: np.ndarray
    values: np.ndarray

    def at_grid(self, t):
        """Staircase value: the estimate at the largest tabulated step <= t."""
        j = _grid_index(t, self.domain.length, self.grid_size)
        return float(self.values[min(j, self.values.size - 1)])


def _grid_index(t, length, N):
    return int(np.floor(t * N / length + _SNAP))


def _check_grid(N):
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 64:
        raise InvalidParameterError(f"modulus grid size must be an integer >= 64, got {N!r}")
    return int(N)


@dataclass(eq=False)
class Moduli:
    """All modulus estimates of one function on one interval, built once.

    Construction samples f on the grid and tabulates the first- and
    second-order profiles; queries are then cheap.
    """

    f: RealFunction
    domain: Interval = UNIT
    N: int = DEFAULT_GRID
    omega1_table: ModulusEstimate = field(init=False)
    omega2_table: ModulusEstimate = field(init=False)
    _hull_t: np.ndarray = field(init=False, repr=False)
    _hull_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.N = _check_grid(self.N)
        a, L = self.domain.a, self.domain.length
        grid = a + L * np.arange(self.N + 1) / self.N
        v = self.f(grid)
        steps = L * np.arange(self.N + 1) / self.N
        w1 = np.maximum.accumulate(kernels.lag_profile(v))
        w2 = np.maximum.accumulate(kernels.second_difference_profile(v))
        for arr in (steps, w1, w2):
            arr.setflags(write=False)
        self.omega1_table = ModulusEstimate("omega1", self.domain, self.N, steps, w1)
        self.omega2_table = ModulusEstimate("omega2", self.domain, self.N, steps[:w2.size], w2)
        self.values = v
        self.sup_norm = float(np.max(np.abs(v)))
        self.oscillation = float(w1[-1])
        self.cell_oscillation = float(w1[1])
        # majorant of omega1 as a function of t on [0, 1]
        t = np.arange(self.N + 1) / self.N
        idx = kernels.upper_hull(t, w1)
        self._hull_t = t[idx]
        self._hull_w = w1[idx]

    @property
    def grid_slack(self):
        """Allowed shortfall of a grid estimate: twice the one-cell oscillation."""
        return 2.0 * self.cell_oscillation

    def omega1(self, t):
        if t < 0 or not np.isfinite(t):
            raise InvalidParameterError(f"step must be nonnegative, got {t!r}")
        L = self.domain.length
        if t >= L:
            return self.oscillation
        best = self.omega1_table.at_grid(t)
        if t > 0:
            x = self.domain.a + (L - t) * np.arange(self.N + 1) / self.N
            best = max(best, float(np.max(np.abs(self.f(x + t) - self.f(x)))))
        return best

    def omega2(self, delta):
        if delta < 0 or not np.isfinite(delta):
            raise InvalidParameterError(f"step must be nonnegative, got {delta!r}")
        L = self.domain.length
        best = self.omega2_table.at_grid(delta)
        h = min(delta, L / 2.0)
        if h > 0:
            x = self.domain.a + h + (L - 2.0 * h) * np.arange(self.N + 1) / self.N
            d2 = self.f(x - h) - 2.0 * self.f(x) + self.f(x + h)
            best = max(best, float(np.max(np.abs(d2))))
        return best

    def omega_tilde(self, t):
        """Least concave majorant of the omega1 estimate on [0, 1]."""
        if t < 0 or not np.isfinite(t):
            raise InvalidParameterError(f"step must be nonnegative, got {t!r}")
        if t >= 1.0:
            return float(self._hull_w[-1])
        return float(np.interp(t, self._hull_t, self._hull_w))

    def omega_tilde_table(self):
        t = self.omega1_table.steps / self.domain.length
        w = np.interp(t, self._hull_t, self._hull_w)
        return ModulusEstimate("omega_tilde", self.domain, self.N, self.omega1_table.steps, w)


def omega1(f, iv=UNIT, t=0.0, N=DEFAULT_GRID):
    """First modulus of continuity of f on ``iv`` at step t (grid estimate)."""
    if t < 0:
        raise InvalidParameterError(f"step must be nonnegative, got {t!r}")
    return Moduli(f, iv, N).omega1(t)


def omega2(f, iv=UNIT, delta=0.0, N=DEFAULT_GRID):
    """Second modulus of smoothness of f on ``iv`` at step delta (grid estimate)."""
    if delta < 0:
        raise InvalidParameterError(f"step must be nonnegative, got {delta!r}")
    return Moduli(f, iv, N).omega2(delta)


def omega_tilde(f, t, N=DEFAULT_GRID):
    """Least concave majorant of omega1(f, ·) on [0, 1], evaluated at t."""
    if t < 0:
        raise InvalidParameterError(f"step must be nonnegative, got {t!r}")
    return Moduli(f, UNIT, N).omega_tilde(t)


def concave_majorant(ts, ws):
    """Least concave majorant of the piecewise-linear function through (ts, ws).

    ``ts`` must be increasing. Returns a callable evaluating the majorant.
    """
    ts = np.asarray(ts, dtype=np.float64)
    ws = np.asarray(ws, dtype=np.float64)
    idx = kernels.upper_hull(ts, ws)
    ht, hw = ts[idx], ws[idx]
    return lambda t: np.interp(t, ht, hw)


# -- K-functional -----------------------------------------------------------------

@dataclass(frozen=True)
class KFunctionalEstimate:
    delta: float
    value_upper: float
    witness_label: str


def bernstein_smoothing(f, N):
    """Classical degree-N Bernstein polynomial of f as a C2 candidate.

    The second derivative uses N(N-1) times the degree-(N-2) Bernstein
    polynomial of the second forward differences of the samples.
    """
    if N < 2:
        raise InvalidParameterError("smoothing degree must be at least 2")
    samples = f(np.arange(N + 1) / N)
    d2_coeffs = N * (N - 1) * np.diff(samples, 2)

    def value(x):
        return bernstein_eval(f, N, UNIT, x)

    def second(x):
        return _bernstein_from_coeffs(d2_coeffs, x)

    def first(x):
        return _bernstein_from_coeffs(N * np.diff(samples), x)

    return RealFunction(value, "C2", f"bernstein_{N}({f.label})", first, second)


def _bernstein_from_coeffs(coeffs, x):
    x = np.asarray(x, dtype=np.float64)
    y = np.atleast_1d(x).ravel()
    out = kernels.decasteljau(np.broadcast_to(coeffs, (y.size, coeffs.size)), y)
    return out.reshape(x.shape)


def default_candidates(f):
    cands = [bernstein_smoothing(f, N) for N in SMOOTHING_DEGREES]
    cands.append(constant(float(f(np.array(0.5))), label="const_mid"))
    return cands


@dataclass(eq=False)
class KFunctional:
    """Candidate family for K(delta, f; C0, C2) with norms precomputed.

    Every candidate g contributes the affine function
    ``||f - g|| + delta ||g''||``; the estimate is their lower envelope.
    """

    f: RealFunction
    candidates: Optional[list] = None
    samples: int = NORM_SAMPLES

    def __post_init__(self):
        cands = default_candidates(self.f) if self.candidates is None else list(self.candidates)
        for g in cands:
            if g.second_derivative is None:
                raise InvalidInputError(f"candidate {g.label} has no second derivative")
        cands.insert(0, constant(0.0, label="zero"))
        if self.f.is_c2:
            cands.insert(1, self.f)
        if self.candidates is not None and not self.candidates and not self.f.is_c2:
            cands.append(constant(float(self.f(np.array(0.5))), label="const_mid"))
        x = np.linspace(0.0, 1.0, self.samples)
        fx = self.f(x)
        self.labels = [g.label for g in cands]
        self.distances = np.array([np.max(np.abs(fx - g(x))) for g in cands])
        self.curvatures = np.array([np.max(np.abs(g.d2(x))) for g in cands])

    def __call__(self, delta):
        if delta < 0 or not np.isfinite(delta):
            raise InvalidParameterError(f"delta must be nonnegative, got {delta!r}")
        totals = self.distances + delta * self.curvatures
        j = int(np.argmin(totals))
        return KFunctionalEstimate(float(delta), float(totals[j]), self.labels[j])


def k_functional_upper(f, delta, candidates=None):
    """Upper estimate of K(delta, f; C0[0,1], C2[0,1]) over a candidate family.

    ``candidates=None`` uses Bernstein smoothings of degree 4..64 plus the
    constant f(1/2); the zero function and (for C2 f) f itself are always tried.
    """
    return KFunctional(f, candidates)(delta)

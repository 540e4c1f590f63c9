"""Empirical verification of the approximation, quadrature and Grüss-type bounds.

Each check returns a :class:`BoundReport` comparing a computed left-hand side
with the bound's right-hand side. Moduli on the right are grid estimates that
can only under-shoot, so a small negative margin within ``grid_slack`` is
reported as ``grid-limited`` rather than ``violated``.
"""
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .functions import CORPUS, product
from .moduli import DEFAULT_GRID, KFunctional, Moduli
from .operator_core import (
    OperatorParams,
    composite_eval,
    eval_from_nodes,
    iterate_node_values,
    piecewise_linear_interp,
    second_moment,
)
from .quadrature import DEFAULT_TOL, apply_rule, build_rule, c2_error_bound, reference_integral, variance

INEQUALITY_IDS = (
    "P3.2",
    "P4.3-pointwise",
    "P4.3-uniform",
    "P5.2",
    "T6.2",
    "T6.3i",
    "T6.3ii",
    "T6.4-specialized",
    "P7.2",
    "C7-limit",
)
STATUSES = ("pass", "grid-limited", "violated", "error")

# absolute allowance for floating-point rounding in every comparison
FLOAT_FLOOR = 1e-12
UNIFORM_SAMPLES = 501
DERIVATIVE_SAMPLES = 2001

DEFAULT_PARAMS = tuple(OperatorParams(n, m) for n in (1, 2, 4, 8) for m in (1, 2, 4, 8))
DEFAULT_X = tuple(j / 20 for j in range(21))
DEFAULT_R = (1, 5, 25, 125)

REPORT_FIELDS = ("inequality_id", "n", "m", "r", "function_labels", "x", "lhs", "rhs",
                 "margin", "status", "grid_slack", "rhs2", "upper_estimate", "note")


@dataclass(frozen=True)
class BoundReport:
    inequality_id: str
    params: Optional[OperatorParams]
    function_labels: tuple
    x: Optional[float]
    lhs: float
    rhs: float
    margin: float
    status: str
    r: Optional[int] = None
    grid_slack: float = 0.0
    rhs2: Optional[float] = None
    upper_estimate: bool = False
    note: str = ""

    def sort_key(self):
        p = (self.params.n, self.params.m) if self.params else (0, 0)
        return (INEQUALITY_IDS.index(self.inequality_id), p, -1 if self.r is None else self.r,
                self.function_labels, -1.0 if self.x is None else self.x)

    def to_dict(self):
        return {
            "inequality_id": self.inequality_id,
            "n": self.params.n if self.params else None,
            "m": self.params.m if self.params else None,
            "r": self.r,
            "function_labels": list(self.function_labels),
            "x": self.x,
            "lhs": _finite(self.lhs),
            "rhs": _finite(self.rhs),
            "margin": _finite(self.margin),
            "status": self.status,
            "grid_slack": _finite(self.grid_slack),
            "rhs2": _finite(self.rhs2),
            "upper_estimate": self.upper_estimate,
            "note": self.note,
        }


def _finite(v):
    return None if v is None or not math.isfinite(v) else float(v)


def classify(lhs, rhs, slack):
    margin = rhs - lhs
    if margin >= 0:
        return margin, "pass"
    if margin >= -slack:
        return margin, "grid-limited"
    return margin, "violated"


def _report(iid, p, labels, x, lhs, rhs, slack, **extra):
    margin, status = classify(lhs, rhs, slack)
    return BoundReport(iid, p, tuple(labels), None if x is None else float(x), float(lhs),
                       float(rhs), float(margin), status, grid_slack=float(slack), **extra)


def _product_slack(wf, wg, sf, sg):
    """Shortfall of (1/4) w_f w_g when each factor may be low by s_f, s_g."""
    return 0.25 * ((wf + sf) * (wg + sg) - wf * wg)


class FunctionData:
    """Per-function quantities shared by many checks (computed lazily)."""

    def __init__(self, f, N=DEFAULT_GRID, tol=DEFAULT_TOL):
        self.f = f
        self.N = N
        self.tol = tol

    @cached_property
    def moduli(self):
        return Moduli(self.f, N=self.N)

    @cached_property
    def integral(self):
        return reference_integral(self.f, self.tol)

    @cached_property
    def k_functional(self):
        return KFunctional(self.f)

    @cached_property
    def derivative_norm(self):
        x = np.linspace(0.0, 1.0, DERIVATIVE_SAMPLES)
        return float(np.max(np.abs(self.f.d1(x))))

    @property
    def slack(self):
        return self.moduli.grid_slack


class Lab:
    """Cache of :class:`FunctionData` keyed by function, with fixed grid and tolerance."""

    def __init__(self, N=DEFAULT_GRID, tol=DEFAULT_TOL):
        self.N = N
        self.tol = tol
        self._data = {}

    def __call__(self, f):
        data = self._data.get(f)
        if data is None:
            data = self._data.setdefault(f, FunctionData(f, self.N, self.tol))
        return data

    @property
    def integral_slack(self):
        return FLOAT_FLOOR + 10.0 * self.tol


def _lab(lab):
    return Lab() if lab is None else lab


# -- pointwise operator bounds --------------------------------------------------------

def paltanea_reports(f, p, xs, h=None, lab=None):
    lab = _lab(lab)
    d = lab(f)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    approx = composite_eval(f, p, xs)
    exact = f(xs)
    moments = second_moment(p, xs)
    out = []
    for x, bx, fx, mom in zip(xs, approx, exact, moments):
        lhs = abs(bx - fx)
        if h is None:
            rhs = 1.5 * d.moduli.omega2(math.sqrt(mom))
            note = ""
        else:
            rhs = (1.0 + mom / (2.0 * h * h)) * d.moduli.omega2(h)
            note = f"h={h!r}"
        out.append(_report("P3.2", p, (f.label,), x, lhs, rhs, d.slack + FLOAT_FLOOR, note=note))
    return out


def check_paltanea(f, p, x, h=None, lab=None):
    """|B̄f(x) - f(x)| against (3/2) omega2(f, sqrt(second moment)).

    With ``h`` given, the right side is the general form
    [1 + M/(2h^2)] omega2(f, h) where M is the second moment at x.
    """
    if h is not None and not h > 0:
        raise InvalidParameterError(f"h must be positive, got {h!r}")
    return paltanea_reports(f, p, [x], h, lab)[0]


def _gap_weight(p, r):
    return (1.0 - 1.0 / p.n) ** r


def iterate_pointwise_reports(f, p, r, xs, lab=None):
    lab = _lab(lab)
    d = lab(f)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    it = eval_from_nodes(iterate_node_values(f, p, r - 1), p, xs)
    lin = piecewise_linear_interp(f, p.m, xs)
    # (x - a)(b - x) on the owning piece is n times the second moment
    spread = p.n * second_moment(p, xs)
    weight = _gap_weight(p, r)
    out = []
    for x, a, s, sp in zip(xs, it, lin, spread):
        rhs = 2.25 * d.moduli.omega2(math.sqrt(sp * weight))
        out.append(_report("P4.3-pointwise", p, (f.label,), x, abs(a - s), rhs,
                           d.slack + FLOAT_FLOOR, r=r))
    return out


def uniform_gap(f, p, r, samples=UNIFORM_SAMPLES):
    """max |(B̄)^r f - S f| over ``samples`` evenly spaced points."""
    xs = np.linspace(0.0, 1.0, samples)
    if r == 0:
        it = f(xs)
    else:
        it = eval_from_nodes(iterate_node_values(f, p, r - 1), p, xs)
    return float(np.max(np.abs(it - piecewise_linear_interp(f, p.m, xs))))


def iterate_uniform_report(f, p, r, lab=None):
    lab = _lab(lab)
    d = lab(f)
    lhs = uniform_gap(f, p, r)
    rhs = 2.25 * d.moduli.omega2(math.sqrt(_gap_weight(p, r)) / (2.0 * p.m))
    return _report("P4.3-uniform", p, (f.label,), None, lhs, rhs, d.slack + FLOAT_FLOOR, r=r)


def check_iterate(f, p, r, x=None, lab=None):
    """Iterates against the chord interpolant.

    With ``x`` the pointwise bound is checked; with ``x=None`` the uniform one
    (gap sampled on 501 points).
    """
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or r < 1:
        raise InvalidParameterError(f"r must be a positive integer, got {r!r}")
    if x is None:
        return iterate_uniform_report(f, p, int(r), lab)
    return iterate_pointwise_reports(f, p, int(r), [x], lab)[0]


def gruss_operator_reports(f, g, p, xs, lab=None):
    lab = _lab(lab)
    df, dg = lab(f), lab(g)
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    bfg = composite_eval(product(f, g), p, xs)
    bf = composite_eval(f, p, xs)
    bg = composite_eval(g, p, xs)
    moments = second_moment(p, xs)
    out = []
    for x, a, u, v, mom in zip(xs, bfg, bf, bg, moments):
        t = 2.0 * math.sqrt(mom)
        wf, wg = df.moduli.omega_tilde(t), dg.moduli.omega_tilde(t)
        slack = _product_slack(wf, wg, df.slack, dg.slack) + FLOAT_FLOOR
        out.append(_report("P5.2", p, (f.label, g.label), x, abs(a - u * v), 0.25 * wf * wg, slack))
    return out


def check_gruss_operator(f, g, p, x, lab=None):
    """|B̄(fg) - B̄f B̄g| at x against (1/4) w~(f, 2 sqrt M) w~(g, 2 sqrt M)."""
    return gruss_operator_reports(f, g, p, [x], lab)[0]


# -- quadrature bounds --------------------------------------------------------------

def quadrature_error(f, p, lab=None):
    d = _lab(lab)(f)
    return abs(d.integral - apply_rule(build_rule(p), f))


def check_quadrature_c2(g, p, lab=None):
    """Quadrature error of a C2 function against ||g''|| / (12 m^2 n)."""
    lab = _lab(lab)
    if not g.is_c2:
        raise InvalidInputError(f"{g.label}: needs a second derivative")
    return _report("T6.2", p, (g.label,), None, quadrature_error(g, p, lab),
                   c2_error_bound(p, g), lab.integral_slack)


def check_quadrature_kfunc(f, p, lab=None):
    """Quadrature error against 2 K(1/(24 m^2 n), f) using an upper K estimate.

    A pass is conservative confirmation: the true K is no larger than the
    estimate, so only lhs <= 2 K_upper is actually tested.
    """
    lab = _lab(lab)
    est = lab(f).k_functional(1.0 / (24.0 * p.m**2 * p.n))
    return _report("T6.3i", p, (f.label,), None, quadrature_error(f, p, lab), 2.0 * est.value_upper,
                   lab.integral_slack, upper_estimate=True, note=f"witness={est.witness_label}")


def omega2_quadrature_step(p):
    return 1.0 / (p.m * math.sqrt(6.0 * p.n))


def check_quadrature_omega2(f, p, lab=None):
    """Quadrature error against (9/4) omega2(f, 1/(m sqrt(6n)))."""
    lab = _lab(lab)
    d = lab(f)
    rhs = 2.25 * d.moduli.omega2(omega2_quadrature_step(p))
    return _report("T6.3ii", p, (f.label,), None, quadrature_error(f, p, lab), rhs,
                   d.slack + lab.integral_slack)


@dataclass(frozen=True)
class FunctionalBoundParams:
    """Constants of the generic functional bound and the step h."""

    gamma: float
    alpha: float
    beta0: float
    beta1: float
    beta2: float
    h: float

    def __post_init__(self):
        for name in ("gamma", "alpha", "beta0", "beta1", "beta2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParameterError(f"{name} must be a nonnegative real, got {v!r}")
        if not (0.0 < self.h <= 0.5):
            raise InvalidParameterError(f"h must lie in (0, 1/2], got {self.h!r}")

    @classmethod
    def for_quadrature(cls, p, h=None):
        """gamma=1, alpha=2, beta0=beta1=0, beta2=1/(12 m^2 n); default h=1/sqrt(6 m^2 n)."""
        if h is None:
            h = 1.0 / math.sqrt(6.0 * p.m**2 * p.n)
        return cls(1.0, 2.0, 0.0, 0.0, 1.0 / (12.0 * p.m**2 * p.n), h)

    def bound(self, sup_norm, omega1_h, omega2_h):
        g, h = self.gamma, self.h
        w2 = 0.75 * (self.alpha + self.beta0 + 2.0 * self.beta1 / h + 2.0 * self.beta2 / h**2)
        return g * (self.beta0 * sup_norm + 2.0 * self.beta1 / h * omega1_h + w2 * omega2_h)


def check_functional_bound(f, bp, p, lab=None):
    """|integral - rule| against the generic bound with constants ``bp``."""
    lab = _lab(lab)
    d = lab(f)
    m = d.moduli
    w1 = m.omega1(bp.h) if bp.beta1 > 0 else 0.0
    rhs = bp.bound(m.sup_norm, w1, m.omega2(bp.h))
    return _report("T6.4-specialized", p, (f.label,), None, quadrature_error(f, p, lab), rhs,
                   d.slack + lab.integral_slack, note=f"h={bp.h!r}")


def check_gruss_quadrature(f, g, p, lab=None):
    """|I(fg) - I(f) I(g)| against (1/4) w~(f, 2 sqrt V) w~(g, 2 sqrt V)."""
    lab = _lab(lab)
    df, dg = lab(f), lab(g)
    rule = build_rule(p)
    lhs = abs(apply_rule(rule, product(f, g)) - apply_rule(rule, f) * apply_rule(rule, g))
    t = 2.0 * math.sqrt(variance(p).value)
    wf, wg = df.moduli.omega_tilde(t), dg.moduli.omega_tilde(t)
    slack = _product_slack(wf, wg, df.slack, dg.slack) + FLOAT_FLOOR
    return _report("P7.2", p, (f.label, g.label), None, lhs, 0.25 * wf * wg, slack)


def check_integral_limit(f, g, lab=None):
    """Chebyshev functional of the integral against both limiting bounds.

    rhs is (1/4) w~(f, 1/sqrt 3) w~(g, 1/sqrt 3); rhs2 is
    (1/12) ||f'|| ||g'||. The report is violated if either lhs <= rhs or
    rhs <= rhs2 fails beyond the slack.
    """
    lab = _lab(lab)
    if not (f.is_lipschitz and g.is_lipschitz):
        raise InvalidInputError("integral limit check needs bounded first derivatives")
    df, dg = lab(f), lab(g)
    fg = product(f, g)
    lhs = abs(reference_integral(fg, lab.tol) - df.integral * dg.integral)
    t = 1.0 / math.sqrt(3.0)
    wf, wg = df.moduli.omega_tilde(t), dg.moduli.omega_tilde(t)
    rhs = 0.25 * wf * wg
    rhs2 = df.derivative_norm * dg.derivative_norm / 12.0
    slack = _product_slack(wf, wg, df.slack, dg.slack) + lab.integral_slack
    rep = _report("C7-limit", None, (f.label, g.label), None, lhs, rhs, slack, rhs2=rhs2)
    if rhs > rhs2 + slack and rep.status != "violated":
        rep = replace(rep, status="violated", note="concave-majorant bound exceeds derivative bound")
    return rep


# -- suite ----------------------------------------------------------------------------

@dataclass
class SuiteResult:
    reports: list
    summary: dict = field(default_factory=dict)


def summarize(reports):
    counts = {s: 0 for s in STATUSES}
    for rep in reports:
        counts[rep.status] += 1
    return {"total": len(reports), "pass": counts["pass"], "grid_limited": counts["grid-limited"],
            "violated": counts["violated"], "errors": counts["error"]}


def _error_report(iid, p, labels, r, exc):
    return BoundReport(iid, p, tuple(labels), None, math.nan, math.nan, math.nan, "error",
                       r=r, note=f"{type(exc).__name__}: {exc}")


def thread_count():
    """Worker threads from ``CB_SEED_THREADS`` (0 or unset means automatic)."""
    try:
        n = int(os.environ.get("CB_SEED_THREADS", "0"))
    except ValueError:
        n = 0
    if n <= 0:
        n = min(8, os.cpu_count() or 1)
    return n


def _tasks(params, corpus, xs, rs, ids, lab, pairs):
    single = list(corpus)
    tasks = []

    def add(iid, p, labels, r, fn):
        if iid in ids:
            tasks.append((iid, p, labels, r, fn))

    for f in single:
        for p in params:
            add("P3.2", p, (f.label,), None, lambda f=f, p=p: paltanea_reports(f, p, xs, lab=lab))
            for r in rs:
                add("P4.3-pointwise", p, (f.label,), r,
                    lambda f=f, p=p, r=r: iterate_pointwise_reports(f, p, r, xs, lab))
                add("P4.3-uniform", p, (f.label,), r,
                    lambda f=f, p=p, r=r: [iterate_uniform_report(f, p, r, lab)])
            if f.is_c2:
                add("T6.2", p, (f.label,), None, lambda f=f, p=p: [check_quadrature_c2(f, p, lab)])
            add("T6.3i", p, (f.label,), None, lambda f=f, p=p: [check_quadrature_kfunc(f, p, lab)])
            add("T6.3ii", p, (f.label,), None, lambda f=f, p=p: [check_quadrature_omega2(f, p, lab)])
            add("T6.4-specialized", p, (f.label,), None,
                lambda f=f, p=p: [check_functional_bound(f, FunctionalBoundParams.for_quadrature(p), p, lab)])
    for f, g in pairs:
        for p in params:
            add("P5.2", p, (f.label, g.label), None,
                lambda f=f, g=g, p=p: gruss_operator_reports(f, g, p, xs, lab))
            add("P7.2", p, (f.label, g.label), None,
                lambda f=f, g=g, p=p: [check_gruss_quadrature(f, g, p, lab)])
        if f.is_lipschitz and g.is_lipschitz:
            add("C7-limit", None, (f.label, g.label), None,
                lambda f=f, g=g: [check_integral_limit(f, g, lab)])
    return tasks


def run_suite(param_grid=DEFAULT_PARAMS, corpus=CORPUS, x_grid=DEFAULT_X, r_list=DEFAULT_R,
              only=None, pairs=None, N=DEFAULT_GRID, tol=DEFAULT_TOL, threads=None):
    """Run every check over the Cartesian grid.

    Pairs default to all unordered pairs (with repetition) from ``corpus``.
    Reports are sorted by (inequality id, params, r, labels, x), so the result
    does not depend on the thread schedule. A check that raises is reported
    with status ``error`` and does not stop the suite.
    """
    ids = set(INEQUALITY_IDS if only is None else only)
    unknown = ids - set(INEQUALITY_IDS)
    if unknown:
        raise InvalidParameterError(f"unknown inequality ids: {sorted(unknown)}")
    corpus = list(corpus)
    if pairs is None:
        pairs = list(combinations_with_replacement(corpus, 2))
    lab = Lab(N, tol)
    xs = np.asarray(x_grid, dtype=np.float64)
    tasks = _tasks(list(param_grid), corpus, xs, list(r_list), ids, lab, pairs)

    # warm the shared caches serially so worker threads only read them
    members = {f.label: f for f in corpus}
    for pair in pairs:
        for f in pair:
            members.setdefault(f.label, f)
    for f in members.values():
        lab(f).moduli

    def run(task):
        iid, p, labels, r, fn = task
        try:
            return fn()
        except Exception as exc:  # reported, never raised
            return [_error_report(iid, p, labels, r, exc)]

    workers = thread_count() if threads is None else max(1, threads)
    if workers == 1:
        chunks = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, tasks))
    reports = sorted((rep for chunk in chunks for rep in chunk), key=BoundReport.sort_key)
    return SuiteResult(reports, summarize(reports))


# -- export ---------------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return "|".join(v)
    return str(v)


def write_jsonl(reports, fh, summary=None):
    for rep in reports:
        fh.write(json.dumps(rep.to_dict()) + "\n")
    if summary is not None:
        fh.write(json.dumps(summary) + "\n")


def write_csv(reports, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_FIELDS)
    for rep in reports:
        d = rep.to_dict()
        w.writerow([_fmt(d[k]) for k in REPORT_FIELDS])


def reports_to_csv(reports):
    buf = io.StringIO()
    write_csv(reports, buf)
    return buf.getvalue()

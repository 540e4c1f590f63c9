"""Black-box test functions on [0, 1] and the built-in corpus."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, InvalidParameterError

SMOOTHNESS_TAGS = ("C0", "Lipschitz-derivative", "C1", "C2")

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RealFunction:
    """A vectorised real function with smoothness metadata.

    ``smoothness_tag`` orders as C0 < Lipschitz-derivative < C1 < C2. Here
    "Lipschitz-derivative" marks a function that is Lipschitz, i.e. whose
    (a.e.) derivative is essentially bounded, without being C1.
    ``first_derivative`` is populated whenever that derivative is bounded.
    """

    eval: ArrayFn
    smoothness_tag: str
    label: str
    first_derivative: Optional[ArrayFn] = None
    second_derivative: Optional[ArrayFn] = None

    def __post_init__(self):
        if self.smoothness_tag not in SMOOTHNESS_TAGS:
            raise InvalidParameterError(f"unknown smoothness tag {self.smoothness_tag!r}")
        if self.smoothness_tag == "C2" and self.second_derivative is None:
            raise InvalidInputError(f"{self.label}: C2 functions must carry a second derivative")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.asarray(self.eval(x), dtype=np.float64) * np.ones_like(x)

    @property
    def is_c2(self):
        return self.second_derivative is not None

    @property
    def is_lipschitz(self):
        return self.first_derivative is not None

    def d1(self, x):
        if self.first_derivative is None:
            raise InvalidInputError(f"{self.label}: no bounded first derivative")
        x = np.asarray(x, dtype=np.float64)
        return np.asarray(self.first_derivative(x), dtype=np.float64) * np.ones_like(x)

    def d2(self, x):
        if self.second_derivative is None:
            raise InvalidInputError(f"{self.label}: no second derivative")
        x = np.asarray(x, dtype=np.float64)
        return np.asarray(self.second_derivative(x), dtype=np.float64) * np.ones_like(x)

    def __mul__(self, other):
        return product(self, other)


def product(f, g):
    """Pointwise product, with derivatives by the product rule where both exist."""
    tag = SMOOTHNESS_TAGS[min(SMOOTHNESS_TAGS.index(f.smoothness_tag),
                              SMOOTHNESS_TAGS.index(g.smoothness_tag))]
    d1 = d2 = None
    if f.first_derivative is not None and g.first_derivative is not None:
        def d1(x):
            return f.d1(x) * g(x) + f(x) * g.d1(x)
    if f.second_derivative is not None and g.second_derivative is not None:
        def d2(x):
            return f.d2(x) * g(x) + 2.0 * f.d1(x) * g.d1(x) + f(x) * g.d2(x)
    return RealFunction(lambda x: f(x) * g(x), tag, f"{f.label}*{g.label}", d1, d2)


def constant(c, label=None):
    c = float(c)
    return RealFunction(lambda x: np.full_like(x, c), "C2", label or f"const({c!r})",
                        lambda x: np.zeros_like(x), lambda x: np.zeros_like(x))


def check_second_derivative(f, points=101, step=1e-4, rtol=1e-5):
    """Compare ``f.second_derivative`` with a central difference of ``f``.

    The difference is taken at ``points`` evenly spaced interior points. The
    tolerance is relative to the largest |f''| over those points, so a
    derivative that crosses zero is not penalised near its root.
    Returns the worst scaled discrepancy; raises if it exceeds ``rtol``.
    """
    x = np.linspace(0.0, 1.0, points + 2)[1:-1]
    x = np.clip(x, step, 1.0 - step)
    fd = (f(x - step) - 2.0 * f(x) + f(x + step)) / step**2
    exact = f.d2(x)
    scale = max(1.0, float(np.max(np.abs(exact))))
    worst = float(np.max(np.abs(fd - exact))) / scale
    if worst > rtol:
        raise InvalidInputError(f"{f.label}: second derivative disagrees with finite "
                                f"differences (scaled error {worst:.3e})")
    return worst


# -- corpus -----------------------------------------------------------------------

TWO_PI = 2.0 * np.pi


def _runge(x):
    return 1.0 / (1.0 + 25.0 * (x - 0.5) ** 2)


def _runge_d1(x):
    u = x - 0.5
    return -50.0 * u / (1.0 + 25.0 * u * u) ** 2


def _runge_d2(x):
    u = x - 0.5
    q = 1.0 + 25.0 * u * u
    return (3750.0 * u * u - 50.0) / q**3


def build_corpus():
    """The ten reference functions, in their canonical order."""
    zero = lambda x: np.zeros_like(x)
    one = lambda x: np.ones_like(x)
    return (
        RealFunction(one, "C2", "e0", zero, zero),
        RealFunction(lambda x: x, "C2", "e1", one, zero),
        RealFunction(lambda x: x * x, "C2", "e2", lambda x: 2.0 * x, lambda x: np.full_like(x, 2.0)),
        RealFunction(lambda x: x**3, "C2", "e3", lambda x: 3.0 * x * x, lambda x: 6.0 * x),
        RealFunction(lambda x: np.abs(x - 0.5), "Lipschitz-derivative", "abs",
                     lambda x: np.sign(x - 0.5)),
        RealFunction(lambda x: np.sin(TWO_PI * x), "C2", "sin",
                     lambda x: TWO_PI * np.cos(TWO_PI * x),
                     lambda x: -TWO_PI**2 * np.sin(TWO_PI * x)),
        RealFunction(np.exp, "C2", "exp", np.exp, np.exp),
        RealFunction(np.sqrt, "C0", "sqrt"),
        RealFunction(_runge, "C2", "runge", _runge_d1, _runge_d2),
        RealFunction(lambda x: x**1.5, "C1", "x3/2", lambda x: 1.5 * np.sqrt(x)),
    )


CORPUS = build_corpus()
CORPUS_BY_LABEL = {f.label: f for f in CORPUS}

# Closed-form integrals over [0, 1], used to validate the reference integrator.
EXACT_INTEGRALS = {
    "e0": 1.0,
    "e1": 0.5,
    "e2": 1.0 / 3.0,
    "e3": 0.25,
    "abs": 0.25,
    "sin": 0.0,
    "exp": float(np.e - 1.0),
    "sqrt": 2.0 / 3.0,
    "runge": 0.4 * float(np.arctan(2.5)),
    "x3/2": 0.4,
}


def get_function(label):
    try:
        return CORPUS_BY_LABEL[label]
    except KeyError:
        valid = ", ".join(CORPUS_BY_LABEL)
        raise InvalidParameterError(f"unknown function {label!r}; valid labels: {valid}") from None

import numpy as np
import pytest

from compbern import InvalidInputError, InvalidParameterError, RealFunction, get_function
from compbern.functions import CORPUS, CORPUS_BY_LABEL, check_second_derivative, constant, product


def test_corpus_labels():
    assert [f.label for f in CORPUS] == ["e0", "e1", "e2", "e3", "abs", "sin", "exp", "sqrt", "runge", "x3/2"]
    assert sum(f.is_c2 for f in CORPUS) == 7
    assert {f.label for f in CORPUS if not f.is_lipschitz} == {"sqrt"}


@pytest.mark.parametrize("f", [f for f in CORPUS if f.is_c2], ids=lambda f: f.label)
def test_second_derivatives_match_finite_differences(f):
    assert check_second_derivative(f) <= 1e-5


@pytest.mark.parametrize("f", [f for f in CORPUS if f.is_lipschitz], ids=lambda f: f.label)
def test_first_derivatives(f):
    x = np.linspace(0.05, 0.95, 19)
    x = x[np.abs(x - 0.5) > 1e-3]
    h = 1e-6
    np.testing.assert_allclose(f.d1(x), (f(x + h) - f(x - h)) / (2 * h), atol=1e-6 * (1 + np.max(np.abs(f.d1(x)))))


def test_wrong_derivative_is_caught():
    bad = RealFunction(lambda x: x**3, "C2", "bad", lambda x: 3 * x**2, lambda x: 3 * x)
    with pytest.raises(InvalidInputError):
        check_second_derivative(bad)


def test_scalar_and_array_evaluation():
    f = CORPUS_BY_LABEL["e0"]
    assert f(0.3).shape == ()
    assert f(np.zeros((2, 3))).shape == (2, 3)


def test_product_rule():
    f, g = CORPUS_BY_LABEL["sin"], CORPUS_BY_LABEL["exp"]
    fg = f * g
    assert fg.label == "sin*exp" and fg.is_c2
    x = np.linspace(0.1, 0.9, 7)
    np.testing.assert_allclose(fg(x), np.sin(2 * np.pi * x) * np.exp(x))
    assert check_second_derivative(fg) <= 1e-5
    mixed = product(f, CORPUS_BY_LABEL["sqrt"])
    assert mixed.smoothness_tag == "C0" and not mixed.is_lipschitz


def test_constant():
    c = constant(-1.5)
    assert c(np.array([0.0, 1.0])).tolist() == [-1.5, -1.5]
    assert c.is_c2


def test_validation():
    with pytest.raises(InvalidParameterError):
        RealFunction(np.sin, "smooth", "s")
    with pytest.raises(InvalidInputError):
        RealFunction(np.sin, "C2", "s")
    with pytest.raises(InvalidInputError):
        CORPUS_BY_LABEL["sqrt"].d1(0.5)


def test_get_function():
    assert get_function("runge") is CORPUS_BY_LABEL["runge"]
    with pytest.raises(InvalidParameterError, match="valid labels"):
        get_function("cosh")

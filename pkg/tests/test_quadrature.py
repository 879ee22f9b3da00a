import math

import pytest

from granex.quadrature import QuadratureError, adaptive_simpson, integrate


@pytest.mark.parametrize("f, a, b, exact", [
    (math.sin, 0.0, math.pi, 2.0),
    (lambda x: x ** 5, -1.0, 2.0, 10.5),
    (math.sqrt, 0.0, 1.0, 2 / 3),
    (lambda x: math.exp(-x), 0.0, math.inf, 1.0),
    (lambda x: 24 * x * (2 + x) ** -4, 0.0, math.inf, 1.0),
    (lambda x: 1 / (1 + x * x), 0.0, math.inf, math.pi / 2),
])
def test_integrals(f, a, b, exact):
    assert integrate(f, a, b) == pytest.approx(exact, abs=1e-9)


def test_empty_and_reversed():
    assert integrate(math.exp, 1.0, 1.0) == 0.0
    assert integrate(math.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), abs=1e-10)


def test_nonconvergence_is_reported():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: math.sin(1 / x) / x if x else 0.0, 0.0, 1.0, tol=1e-14, max_depth=8)

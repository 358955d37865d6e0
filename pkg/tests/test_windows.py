"""Window expression trees: parsing, evaluation, boundedness flags."""

import numpy as np
import pytest

from frameforge.errors import InputError
from frameforge.geometry import Box, BoxUnionSet
from frameforge.windows import (
    Indicator,
    Monomial,
    Product,
    ReflectedMonomial,
    Scalar,
    Window,
    parse_expr,
)

UNIT = BoxUnionSet.from_intervals([(0, 1)])


def test_parse_monomial():
    w = Window.from_string("x^1.0")
    pts = np.array([[0.25], [0.5]])
    assert np.allclose(w.eval(pts), [0.25, 0.5])


def test_parse_reflected():
    w = Window.from_string("(1-x)^0.5")
    assert np.allclose(w.eval(np.array([[0.75]])), [0.5])


def test_parse_indicator_with_box():
    w = Window.from_string("indicator(0,0.5)")
    vals = w.eval(np.array([[0.25], [0.5], [0.75]]))
    assert vals.real.tolist() == [1.0, 0.0, 0.0]


def test_parse_product_with_scalar():
    w = Window.from_string("2.0*x^1.0")
    assert np.allclose(w.eval(np.array([[0.5]])), [1.0])


def test_parse_rejects_garbage():
    with pytest.raises(InputError):
        parse_expr("sin(x)")


def test_roundtrip_to_string():
    for text in ["x^1.0", "(1-x)^0.5", "indicator(0.0,0.5)", "2.0*x^-0.25"]:
        w = Window.from_string(text)
        again = Window.from_string(w.to_string())
        pts = np.linspace(0.05, 0.95, 7).reshape(-1, 1)
        assert np.allclose(w.eval(pts), again.eval(pts))


def test_boundedness_flags():
    assert Window.from_string("x^1.0").bounded_on(UNIT)
    assert not Window.from_string("x^-0.25").bounded_on(UNIT)
    assert not Window.from_string("(1-x)^-0.25").bounded_on(UNIT)
    assert Window.from_string("indicator").bounded_on(UNIT)
    # singularity outside the domain is harmless
    away = BoxUnionSet.from_intervals([(0.5, 1)])
    assert Window.from_string("x^-0.25").bounded_on(away)


def test_l2_norm_quadrature():
    w = Window.from_string("x^1.0")
    assert w.l2_norm_sq_on(UNIT) == pytest.approx(1.0 / 3.0, abs=1e-5)
    chi = Window.indicator()
    assert chi.l2_norm_sq_on(UNIT) == pytest.approx(1.0, abs=1e-12)


def test_times_sqrt_weight():
    g = Window.indicator()
    phi = Window.from_string("x^1.0")
    weighted = g.times_sqrt(phi.expr)
    pts = np.array([[0.25], [0.81]])
    assert np.allclose(weighted.eval(pts).real, [0.5, 0.9])


def test_sqrt_of_scalar_and_indicator():
    assert Scalar(4.0).sqrt().value == 2.0
    assert Indicator(None).sqrt() == Indicator(None)
    with pytest.raises(InputError):
        Scalar(-1.0).sqrt()


def test_support_box_intersection():
    e = Product((Indicator(Box((0.0,), (2.0,))), Indicator(Box((1.0,), (3.0,)))))
    assert e.support_box() == Box((1.0,), (2.0,))


def test_callable_window_not_serializable():
    w = Window.from_callable(lambda p: np.exp(-p[:, 0] ** 2), "gauss")
    with pytest.raises(InputError):
        w.to_string()

"""Convolution of combs with grid functions and the density bracket check."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frameforge.errors import InputError
from frameforge.convolution import (
    check_density_convolution_bracket,
    comb_convolve,
    translation_bounded_probe,
)
from frameforge.geometry import Box
from frameforge.gridfn import GridFunction
from frameforge.pointsets import (
    EventuallyPeriodic1D,
    LatticeCosets,
    WeightedComb,
    integers,
)


def tent(peak_at=1.0, half_width=1.0):
    """Hat function of height 1 supported on [peak-half_width, peak+half_width]."""
    def fn(pts):
        t = 1.0 - np.abs(pts[:, 0] - peak_at) / half_width
        return np.maximum(t, 0.0)
    return fn


def direct_convolution_oracle(weights_points, fn, xs):
    """Brute-force sum over explicitly enumerated comb points, analytic f."""
    out = np.zeros(len(xs))
    for w, p in weights_points:
        out += w * fn(np.array([(x - p,) for x in xs]))
    return out


class TestCombConvolve:
    def test_unit_tiling(self):
        chi = GridFunction.indicator(Box((0.0,), (1.0,)), 64)
        out = comb_convolve(WeightedComb.single(integers()), chi,
                            Box((-2.0,), (3.0,)), 128)
        assert np.allclose(out.samples.real, 1.0, atol=1e-12)

    def test_double_cover(self):
        chi = GridFunction.indicator(Box((0.0,), (2.0,)), 64)
        out = comb_convolve(WeightedComb.single(integers()), chi,
                            Box((0.0,), (4.0,)), 128)
        assert np.allclose(out.samples.real, 2.0, atol=1e-12)

    def test_tent_on_even_lattice_matches_direct_sum(self):
        f = GridFunction.from_callable(tent(), Box((0.0,), (2.0,)), 512)
        evals = Box((-3.0,), (3.0,))
        out = comb_convolve(WeightedComb.single(integers(scale=2.0)), f, evals, 64)
        xs = out.axes()[0]
        pts = [(1.0, float(p)) for p in range(-4, 5, 2)]
        oracle = direct_convolution_oracle(pts, tent(), xs)
        assert np.allclose(out.samples.real, oracle, atol=5e-3)
        assert out.samples.real.min() >= -1e-12
        assert out.samples.real.max() <= 1.0 + 1e-9
        # the periodized tent peaks where x - lambda hits the tent apex,
        # i.e. at odd integers for the even lattice and apex at 1
        peak_xs = xs[np.isclose(out.samples.real, out.samples.real.max(), atol=1e-9)]
        assert all(abs((x - 1.0) % 2.0) < 0.05 or abs((x - 1.0) % 2.0) > 1.95
                   for x in peak_xs)

    def test_negative_function_rejected(self):
        bad = GridFunction(Box((0.0,), (1.0,)), -np.ones(8, dtype=complex),
                           np.full(8, 1 / 8))
        with pytest.raises(InputError):
            comb_convolve(WeightedComb.single(integers()), bad, Box((0.0,), (1.0,)), 8)

    def test_2d_unit_tiling(self):
        from frameforge.geometry import Box as B2
        chi = GridFunction.indicator(B2((0.0, 0.0), (1.0, 1.0)), 16)
        out = comb_convolve(WeightedComb.single(integers(dim=2)), chi,
                            B2((-1.0, -1.0), (2.0, 2.0)), 24)
        assert np.allclose(out.samples.real, 1.0, atol=1e-9)

    @given(st.floats(0.25, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_linearity_in_the_function(self, a):
        base = GridFunction.indicator(Box((0.0,), (1.0,)), 32)
        scaled = GridFunction(base.bounding_box, a * base.samples, base.cell_weights)
        comb = WeightedComb.single(integers())
        out1 = comb_convolve(comb, base, Box((0.0,), (2.0,)), 32)
        out2 = comb_convolve(comb, scaled, Box((0.0,), (2.0,)), 32)
        assert np.allclose(out2.samples, a * out1.samples, rtol=1e-12, atol=1e-12)


class TestTranslationBoundedProbe:
    def test_unit_lattice(self):
        rep = translation_bounded_probe(WeightedComb.single(integers()),
                                        Box((0.0,), (1.0,)))
        assert rep.sup_estimate == 1.0

    def test_two_cosets(self):
        from frameforge.geometry import Lattice
        comb = WeightedComb.single(
            LatticeCosets(Lattice.scaled_integers(1.0), ((0.0,), (0.5,))))
        rep = translation_bounded_probe(comb, Box((0.0,), (1.0,)))
        assert rep.sup_estimate == 2.0

    def test_right_tail_window_of_ten(self):
        comb = WeightedComb.single(EventuallyPeriodic1D(right_period=1.0))
        rep = translation_bounded_probe(comb, Box((0.0,), (10.0,)))
        # direct count oracle: ten consecutive integers fit in [x, x+10)
        assert rep.sup_estimate == 10.0

    def test_2d_lattice_unit_window(self):
        comb = WeightedComb.single(integers(dim=2))
        rep = translation_bounded_probe(comb, Box((0.0, 0.0), (1.0, 1.0)),
                                        x_samples=100)
        assert rep.sup_estimate == 1.0


class TestDensityConvolutionBracket:
    def test_unit_tiling_saturates(self):
        chi = GridFunction.indicator(Box((0.0,), (1.0,)), 64)
        rep = check_density_convolution_bracket(
            [(WeightedComb.single(integers()), chi)], Box((0.0,), (4.0,)), 256)
        assert rep.sup_sum == pytest.approx(1.0, abs=1e-12)
        assert rep.inf_sum == pytest.approx(1.0, abs=1e-12)
        assert rep.masses == (1.0,)
        assert rep.densities.upper == 1.0
        assert rep.densities.lower == 1.0
        assert rep.tol < 1e-9
        assert rep.upper_holds and rep.lower_holds and not rep.inconclusive

    def test_half_indicator_pattern(self):
        chi_half = GridFunction.indicator(Box((0.0,), (0.5,)), 64)
        rep = check_density_convolution_bracket(
            [(WeightedComb.single(integers()), chi_half)], Box((0.0,), (4.0,)), 512)
        assert rep.sup_sum == pytest.approx(1.0, abs=1e-9)
        assert rep.inf_sum == pytest.approx(0.0, abs=1e-9)
        assert rep.masses[0] == pytest.approx(0.5, abs=1e-12)
        assert rep.densities.upper == pytest.approx(0.5)
        assert rep.upper_holds and rep.lower_holds

    def test_two_pair_tiling(self):
        chi1 = GridFunction.indicator(Box((0.0,), (1.0,)), 64)
        chi2 = GridFunction.indicator(Box((0.0,), (2.0,)), 64)
        rep = check_density_convolution_bracket(
            [(WeightedComb.single(integers()), chi1),
             (WeightedComb.single(integers(scale=2.0)), chi2)],
            Box((0.0,), (4.0,)), 256)
        assert rep.sup_sum == pytest.approx(2.0, abs=1e-9)
        assert rep.inf_sum == pytest.approx(2.0, abs=1e-9)
        # comb is delta_Z + 2 delta_2Z with densities 1 + 2*(1/2) = 2
        assert rep.densities.upper == pytest.approx(2.0)
        assert rep.densities.lower == pytest.approx(2.0)
        assert abs(rep.densities.upper - rep.sup_sum) <= rep.tol + 1e-9
        assert abs(rep.densities.lower - rep.inf_sum) <= rep.tol + 1e-9

    @given(st.floats(0.5, 2.0), st.integers(1, 3))
    @settings(max_examples=15, deadline=None)
    def test_upper_bound_never_violated(self, scale, reps):
        chi = GridFunction.indicator(Box((0.0,), (scale,)), 32)
        comb = WeightedComb.single(integers(), weight=float(reps))
        rep = check_density_convolution_bracket(
            [(comb, chi)], Box((0.0,), (4.0,)), 128)
        assert rep.densities.upper <= rep.sup_sum + rep.tol + 1e-9

"""Box-union geometry: canonical form, measures, overlaps, lattice packing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frameforge.errors import InputError
from frameforge.geometry import (
    Box,
    BoxUnionSet,
    Lattice,
    canonicalize,
    cantor_tower,
    cover_cube,
    lattice_residue_check,
    overlap_profile,
    translate_overlap,
)


def interval_sweep_measure(intervals):
    """Independent 1-D union-length oracle via sorted endpoint events."""
    events = []
    for a, b in intervals:
        events.append((a, +1))
        events.append((b, -1))
    events.sort()
    depth, total, start = 0, 0.0, None
    for x, d in events:
        if depth == 0 and d > 0:
            start = x
        depth += d
        if depth == 0 and d < 0:
            total += x - start
    return total


def interval_intersection_overlap(intervals, x):
    """Direct interval-intersection oracle for |omega ∩ (omega + x)|."""
    total = 0.0
    for a, b in intervals:
        for c, d in intervals:
            total += max(0.0, min(b, d + x) - max(a, c + x))
    return total


def mc_indicator_measure(boxes, rng, n_samples=1_000_000):
    """Monte Carlo union-volume oracle by indicator integration."""
    lo = np.min([b.lo for b in boxes], axis=0)
    hi = np.max([b.hi for b in boxes], axis=0)
    pts = rng.uniform(lo, hi, size=(n_samples, len(lo)))
    inside = np.zeros(n_samples, dtype=bool)
    for b in boxes:
        inside |= np.all((pts >= b.lo) & (pts < b.hi), axis=1)
    return inside.mean() * np.prod(hi - lo)


class TestCanonicalize:
    def test_overlapping_intervals_merge(self):
        s = canonicalize([Box((0.0,), (1.0,)), Box((0.5,), (1.5,))])
        assert s.boxes == (Box((0.0,), (1.5,)),)
        assert s.measure() == 1.5

    def test_disjoint_intervals_unchanged(self):
        s = canonicalize([Box((0.0,), (1.0,)), Box((2.0,), (3.0,))])
        assert len(s.boxes) == 2
        assert s.measure() == 2.0

    def test_2d_overlap_against_monte_carlo(self):
        boxes = [Box((0.0, 0.0), (1.0, 1.0)), Box((0.5, 0.0), (1.5, 1.0))]
        s = canonicalize(boxes)
        assert s.measure() == pytest.approx(1.5, abs=1e-12)
        mc = mc_indicator_measure(boxes, np.random.default_rng(42))
        assert abs(s.measure() - mc) < 0.01

    def test_3d_overlap_against_monte_carlo(self):
        boxes = [Box((0, 0, 0), (1, 1, 1)), Box((0.5, 0, 0), (1.5, 1, 1)),
                 Box((0, 0.5, 0.25), (1, 1.5, 1.25))]
        s = canonicalize(boxes)
        mc = mc_indicator_measure(boxes, np.random.default_rng(0))
        assert abs(s.measure() - mc) < 0.01

    def test_empty_input_rejected(self):
        with pytest.raises(InputError):
            canonicalize([])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InputError):
            canonicalize([Box((0.0,), (1.0,)), Box((0.0, 0.0), (1.0, 1.0))])

    @given(st.lists(st.tuples(st.floats(-4, 4), st.floats(0.125, 2)),
                    min_size=1, max_size=6))
    def test_measure_matches_sweep_oracle(self, raw):
        intervals = [(a, a + w) for a, w in raw]
        s = BoxUnionSet.from_intervals(intervals)
        assert s.measure() == pytest.approx(interval_sweep_measure(intervals), abs=1e-9)

    @given(st.lists(st.tuples(st.floats(-4, 4), st.floats(0.25, 2)),
                    min_size=1, max_size=4),
           st.floats(0.1, 0.9))
    def test_idempotent_and_subdivision_invariant(self, raw, frac):
        intervals = [(a, a + w) for a, w in raw]
        s = BoxUnionSet.from_intervals(intervals)
        again = canonicalize(list(s.boxes))
        assert again.boxes == s.boxes
        # splitting each input interval leaves the canonical measure unchanged
        split = []
        for a, b in intervals:
            m = a + frac * (b - a)
            split += [(a, m), (m, b)]
        assert BoxUnionSet.from_intervals(split).measure() == pytest.approx(
            s.measure(), abs=1e-9)


class TestMeasure:
    def test_unit_interval(self):
        assert BoxUnionSet.from_intervals([(0, 1)]).measure() == 1.0

    def test_two_halves(self):
        assert BoxUnionSet.from_intervals([(0, 0.5), (1, 1.5)]).measure() == 1.0

    def test_cantor_tower_n2(self):
        oracle = interval_sweep_measure(
            [(-1, 1), (0.5, 1.5), (-1.5, -0.5), (1.75, 2.25), (-2.25, -1.75)])
        tower = cantor_tower(2)
        assert tower.omega.measure() == pytest.approx(oracle, abs=1e-12)
        assert tower.omega.measure() == pytest.approx(4.0, abs=1e-12)
        assert tower.tail_measure == 1.0


class TestTranslateOverlap:
    def test_half_shift(self):
        s = BoxUnionSet.from_intervals([(0, 1)])
        assert translate_overlap(s, (0.5,)) == 0.5

    def test_far_shift(self):
        s = BoxUnionSet.from_intervals([(0, 1)])
        assert translate_overlap(s, (2.0,)) == 0.0

    def test_two_piece_shift_against_oracle(self):
        intervals = [(0, 0.5), (1, 1.5)]
        s = BoxUnionSet.from_intervals(intervals)
        assert translate_overlap(s, (1.0,)) == pytest.approx(
            interval_intersection_overlap(intervals, 1.0), abs=1e-12)
        assert translate_overlap(s, (1.0,)) == 0.5

    @given(st.lists(st.tuples(st.floats(-3, 3), st.floats(0.25, 1.5)),
                    min_size=1, max_size=5),
           st.floats(-5, 5))
    def test_symmetry_exact(self, raw, x):
        s = BoxUnionSet.from_intervals([(a, a + w) for a, w in raw])
        assert translate_overlap(s, (x,)) == translate_overlap(s, (-x,))

    @given(st.lists(st.tuples(st.floats(-3, 3), st.floats(0.25, 1.5)),
                    min_size=1, max_size=5))
    def test_zero_shift_gives_measure(self, raw):
        s = BoxUnionSet.from_intervals([(a, a + w) for a, w in raw])
        assert translate_overlap(s, (0.0,)) == pytest.approx(s.measure(), rel=1e-12)


class TestOverlapProfile:
    def test_unit_interval_profile(self):
        s = BoxUnionSet.from_intervals([(0, 1)])
        prof = overlap_profile(s, [(0.0,), (0.5,), (1.0,)])
        assert [v for _, v in prof] == [1.0, 0.5, 0.0]

    def test_second_interval_lands_on_first(self):
        s = BoxUnionSet.from_intervals([(0, 1), (2, 3)])
        prof = overlap_profile(s, [(2.0,)])
        assert prof[0][1] == 1.0

    def test_empty_grid_rejected(self):
        with pytest.raises(InputError):
            overlap_profile(BoxUnionSet.from_intervals([(0, 1)]), [])

    def test_cantor_tower_positive_overlaps(self):
        omega = cantor_tower(12).omega
        xs = np.arange(0.0, 8.0 + 1e-9, 0.01)
        prof = overlap_profile(omega, [(x,) for x in xs])
        assert all(v > 0 for _, v in prof)


class TestLatticeResidue:
    def test_shift_collision_violates(self):
        s = BoxUnionSet.from_intervals([(0, 0.5), (1, 1.5)])
        verdict = lattice_residue_check(s, Lattice.scaled_integers(1.0))
        assert not verdict.holds
        w = verdict.witness
        assert w.overlap > 0
        # the witness point lies in the set both directly and after the shift
        assert s.contains(w.point)
        shifted_back = tuple(p + g for p, g in zip(w.point, w.gamma_prime))
        assert s.contains(shifted_back)

    def test_even_lattice_holds(self):
        s = BoxUnionSet.from_intervals([(0, 0.5), (1, 1.5)])
        assert lattice_residue_check(s, Lattice.scaled_integers(2.0)).holds

    def test_fundamental_domain(self):
        s = BoxUnionSet.from_intervals([(0, 1)])
        assert lattice_residue_check(s, Lattice.scaled_integers(1.0)).holds

    @given(st.floats(0.5, 3.0), st.floats(-1, 1), st.floats(0.25, 1.0))
    @settings(max_examples=40)
    def test_holds_implies_packing_bound(self, covol, a, w):
        s = BoxUnionSet.from_intervals([(a, a + w), (a + covol, a + covol + w / 2)])
        verdict = lattice_residue_check(s, Lattice.scaled_integers(covol))
        if verdict.holds:
            assert s.measure() <= covol + 1e-9


class TestCoverCube:
    def test_unit_interval(self):
        assert cover_cube(BoxUnionSet.from_intervals([(0, 1)])) == Box((0.0,), (1.0,))

    def test_two_intervals(self):
        s = BoxUnionSet.from_intervals([(0, 0.5), (1, 1.5)])
        assert cover_cube(s) == Box((0.0,), (1.5,))

    def test_rectangle_hull_is_square(self):
        s = canonicalize([Box((0.0, 0.0), (1.0, 2.0))])
        assert cover_cube(s) == Box((0.0, 0.0), (2.0, 2.0))


class TestLattice:
    def test_covolume(self):
        assert Lattice.scaled_integers(0.5).covolume == 0.5

    def test_dual_of_dual_roundtrip(self):
        g = Lattice(((2.0, 1.0), (0.0, 1.0)))
        back = g.dual().dual()
        assert np.allclose(back.matrix, g.matrix, atol=1e-12)

    def test_dual_covolume_reciprocal(self):
        g = Lattice.scaled_integers(2.0)
        assert g.dual().covolume == pytest.approx(0.5, rel=1e-12)

    def test_points_in_box(self):
        pts = Lattice.scaled_integers(1.0).points_in_box(Box((-2.5,), (2.5,)))
        assert pts.ravel().tolist() == [-2, -1, 0, 1, 2]


class TestCantorTower:
    def test_full_overlap_at_one(self):
        omega = cantor_tower(2).omega
        assert translate_overlap(omega, (1.0,)) > 0

    def test_holed_excludes_small_intervals(self):
        omega = cantor_tower(12, k=5).omega
        assert omega.contains((0.0,))
        assert not omega.contains((2.0,))  # |n|=2 interval removed
        assert not omega.contains((5.0,))  # |n|=5 interval removed
        assert omega.contains((6.0,))      # |n|=6 interval kept

    def test_holed_zero_overlap_near_five_halves(self):
        omega = cantor_tower(12, k=5).omega
        assert translate_overlap(omega, (2.5,)) == 0.0
        for dx in (-0.01, -0.005, 0.005, 0.01):
            assert translate_overlap(omega, (2.5 + dx,)) == 0.0

    def test_full_profile_positive_within_truncation_range(self):
        omega = cantor_tower(12).omega
        xs = np.arange(0.0, 8.0 + 1e-9, 0.01)
        assert all(translate_overlap(omega, (x,)) > 0 for x in xs)

    def test_parameter_validation(self):
        with pytest.raises(InputError):
            cantor_tower(1)
        with pytest.raises(InputError):
            cantor_tower(6, k=6)
        with pytest.raises(InputError):
            cantor_tower(12, k=3)

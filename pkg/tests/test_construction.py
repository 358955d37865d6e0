"""Frame builders, obstruction scans and tight-frame-measure certificates."""

import numpy as np
import pytest

from frameforge.errors import InputError
from frameforge.construction import (
    CertificateRefusal,
    ConstructionRefusal,
    TightFrameRefusal,
    analysis_coefficients,
    build_bounded_window_frame,
    build_lattice_tight_frame,
    cosine_measure_certificate,
    tight_frame_obstruction_scan,
)
from frameforge.framebounds import estimate_frame_bounds
from frameforge.geometry import BoxUnionSet, Lattice, cantor_tower
from frameforge.pointsets import FiniteSet, LatticeCosets
from frameforge.windows import Window

UNIT = BoxUnionSet.from_intervals([(0, 1)])
TWO_PIECE = BoxUnionSet.from_intervals([(0, 0.5), (1, 1.5)])


class TestBoundedWindowFrame:
    def test_linear_pair_prediction(self):
        result = build_bounded_window_frame(
            [Window.from_string("x^1.0"), Window.from_string("(1-x)^1.0")], UNIT)
        assert result.predicted_A == pytest.approx(0.25, abs=0.01)
        # partition covers the domain disjointly
        assert sum(p.measure() for p in result.partition) == pytest.approx(
            1.0, abs=1e-9)
        rep = estimate_frame_bounds(result.system, 256)
        assert rep.A_est >= 0.8 * result.predicted_A
        assert rep.B_est <= 1.2 * result.predicted_B

    def test_indicator_orthonormal(self):
        result = build_bounded_window_frame([Window.indicator()], UNIT)
        assert result.predicted_A == pytest.approx(1.0, abs=1e-6)
        rep = estimate_frame_bounds(result.system, 128)
        assert rep.A_est == pytest.approx(1.0, abs=1e-9)

    def test_unbounded_windows_are_redundant(self):
        base = build_bounded_window_frame(
            [Window.from_string("x^1.0"), Window.from_string("(1-x)^1.0")], UNIT)
        extended = build_bounded_window_frame(
            [Window.from_string("x^1.0"), Window.from_string("(1-x)^1.0"),
             Window.from_string("x^-0.25"), Window.from_string("(1-x)^-0.25")],
            UNIT)
        assert extended.predicted_A == pytest.approx(base.predicted_A, rel=1e-9)
        # unbounded windows get only the zero frequency
        for (window, freq) in extended.system.pairs[2:]:
            assert isinstance(freq, FiniteSet)
        rep = estimate_frame_bounds(extended.system, 256)
        assert rep.A_est >= 0.8 * extended.predicted_A
        assert rep.B_est <= 1.2 * extended.predicted_B

    def test_all_unbounded_refused(self):
        with pytest.raises(ConstructionRefusal):
            build_bounded_window_frame(
                [Window.from_string("x^-0.25"), Window.from_string("(1-x)^-0.25")],
                UNIT)

    def test_not_bounded_away_from_zero_refused(self):
        with pytest.raises(ConstructionRefusal):
            build_bounded_window_frame([Window.from_string("x^1.0")],
                                       BoxUnionSet.from_intervals([(0, 1)]))

    def test_partition_sets_disjoint(self):
        result = build_bounded_window_frame(
            [Window.from_string("x^1.0"), Window.from_string("(1-x)^1.0")], UNIT)
        t1, t2 = result.partition
        for b1 in t1.boxes:
            for b2 in t2.boxes:
                assert b1.intersect(b2) is None


class TestLatticeTightFrame:
    def test_unit_interval_unit_lattice(self):
        result = build_lattice_tight_frame(UNIT, Lattice.scaled_integers(1.0))
        assert result.predicted_A == pytest.approx(1.0, abs=1e-9)
        assert result.predicted_B == pytest.approx(1.0, abs=1e-9)

    def test_two_piece_packing_constant_two(self):
        result = build_lattice_tight_frame(TWO_PIECE, Lattice.scaled_integers(2.0),
                                           grid_cap=512, trunc_radius=64.0)
        assert result.predicted_A == pytest.approx(2.0, rel=0.02)
        assert result.predicted_B == pytest.approx(2.0, rel=0.02)
        assert result.predicted_B / result.predicted_A <= 1.05
        freq = result.system.pairs[0][1]
        assert isinstance(freq, LatticeCosets)
        assert freq.lattice.covolume == pytest.approx(0.5)

    def test_two_piece_parseval_summation_oracle(self):
        # direct Parseval cross-check for f ≡ 1: quadrature coefficients over
        # the dual lattice must sum close to 2 * ||f||^2
        from frameforge.gridfn import GridFunction
        f = GridFunction.on_domain(lambda p: np.ones(len(p)), TWO_PIECE, 1536)
        lam = (np.arange(-256, 256) * 0.5).reshape(-1, 1)
        coefs = analysis_coefficients(f, Window.indicator(), lam)
        total = float(np.sum(np.abs(coefs) ** 2))
        assert total == pytest.approx(2.0 * f.norm_sq(), rel=0.02)

    def test_refusal_with_vanishing_coefficients(self):
        with pytest.raises(TightFrameRefusal) as exc:
            build_lattice_tight_frame(TWO_PIECE, Lattice.scaled_integers(1.0))
        counter = exc.value.counterexample
        assert np.sqrt(counter.norm_sq()) >= 0.1
        lam = np.arange(-64, 64, dtype=float).reshape(-1, 1)
        coefs = analysis_coefficients(counter, Window.indicator(), lam)
        assert np.max(np.abs(coefs)) < 1e-9

    def test_grid_cap_enforced(self):
        with pytest.raises(InputError):
            build_lattice_tight_frame(TWO_PIECE, Lattice.scaled_integers(2.0),
                                      grid_cap=64, trunc_radius=64.0)


class TestObstructionScan:
    def test_full_tower_satisfies_hypothesis(self):
        tower = cantor_tower(12)
        verdict = tight_frame_obstruction_scan(
            tower.omega, r_grid=[0.0], x_max=8.0, step=0.01,
            tail_measure=tower.tail_measure)
        assert verdict.hypothesis_satisfied
        assert verdict.R == 0.0
        assert "tail measure" in verdict.caveat

    def test_holed_tower_witness_interval_at_five_halves(self):
        tower = cantor_tower(12, k=5)
        verdict = tight_frame_obstruction_scan(
            tower.omega, r_grid=[0.0], x_max=8.0, step=0.01)
        assert not verdict.hypothesis_satisfied
        xs = sorted(x[0] for x in verdict.witnesses)
        band = [x for x in xs if 2.4 <= x <= 2.6]
        assert any(abs(x - 2.5) < 1e-9 for x in band)
        assert band[-1] - band[0] >= 0.02

    def test_holed_tower_satisfied_beyond_k(self):
        tower = cantor_tower(12, k=5)
        verdict = tight_frame_obstruction_scan(
            tower.omega, r_grid=[0.0, 5.0], x_max=8.0, step=0.01)
        assert verdict.hypothesis_satisfied
        assert verdict.R == 5.0

    def test_bounded_set_fails_hypothesis(self):
        verdict = tight_frame_obstruction_scan(UNIT, r_grid=[0.0, 1.0, 2.0],
                                               x_max=4.0, step=0.05)
        assert not verdict.hypothesis_satisfied
        assert all(x[0] >= 1.0 for x in verdict.witnesses)

    def test_bad_step_rejected(self):
        with pytest.raises(InputError):
            tight_frame_obstruction_scan(UNIT, [0.0], 4.0, 0.0)


class TestCosineCertificate:
    def test_unit_interval_shift_two(self):
        cert = cosine_measure_certificate(UNIT, (2.0,), grid_n=128, trials=20,
                                          seed=7)
        assert cert.residual <= 1e-6
        assert cert.constant_A == 1.0
        assert cert.test_family_size == 20

    def test_overlapping_shift_refused(self):
        with pytest.raises(CertificateRefusal) as exc:
            cosine_measure_certificate(UNIT, (0.5,))
        assert exc.value.overlap_plus == pytest.approx(0.5)

    def test_two_component_domain(self):
        omega = BoxUnionSet.from_intervals([(0, 1), (2, 3)])
        cert = cosine_measure_certificate(omega, (4.0,), grid_n=128, trials=10,
                                          seed=3)
        assert cert.residual <= 1e-6

    def test_deterministic_for_fixed_seed(self):
        c1 = cosine_measure_certificate(UNIT, (2.0,), grid_n=64, trials=5, seed=1)
        c2 = cosine_measure_certificate(UNIT, (2.0,), grid_n=64, trials=5, seed=1)
        assert c1.residual == c2.residual

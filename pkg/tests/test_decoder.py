"""Tests for the ML decoders: exhaustive oracle, sphere and fast paths."""

import numpy as np
import pytest

from stbc42 import (BudgetExceeded, RngStream, StructureViolation,
                    draw_channel, equivalent_channel, get_code, make_qam,
                    noise_variance, transmit)
from stbc42.constellation import hard_decision_index
from stbc42.decoder import (DecoderWorkspace, ml_exhaustive, ml_fast,
                            ml_fast_anyconstellation, ml_sphere, prepare,
                            residual_metric, structure_violation)
from stbc42.linalg import tilde_vec


def random_instance(code, cons, rng, snr_db=8.0):
    """One noisy (channel, transmitted symbols) decode workspace."""
    g = rng.generator
    idx = g.integers(0, cons.m, 8)
    ch = draw_channel(rng, 2, 4, n0=noise_variance(snr_db))
    y = transmit(code.codeword(cons.points[idx]), ch, rng)
    return idx, prepare(equivalent_channel(ch, code), y)


class TestPrepare:
    def test_noiseless_z_matches_r_times_s(self, proposed_code, qpsk):
        rng = RngStream(1)
        g = rng.generator
        for _ in range(20):
            idx = g.integers(0, 4, 8)
            ch = draw_channel(rng, 2, 4, n0=0.0)
            y = transmit(proposed_code.codeword(qpsk.points[idx]), ch, rng)
            ws = prepare(equivalent_channel(ch, proposed_code), y)
            st = tilde_vec(qpsk.points[idx])
            assert np.linalg.norm(ws.z - ws.r @ st) < 1e-9

    def test_partition_shapes(self, proposed_code, qpsk):
        rng = RngStream(2)
        _, ws = random_instance(proposed_code, qpsk, rng)
        assert ws.r1.shape == (8, 8)
        assert ws.r2.shape == (8, 8)
        assert ws.r4.shape == (8, 8)

    def test_orthogonal_heq_gives_diagonal_r(self, qpsk):
        h_eq = np.diag(np.arange(1.0, 17.0))
        ws = prepare(h_eq, np.zeros((2, 4), dtype=complex))
        off = ws.r - np.diag(np.diag(ws.r))
        assert np.abs(off).max() == 0.0


class TestExhaustive:
    def test_noiseless_recovers_symbols(self, proposed_code, qpsk):
        rng = RngStream(3)
        g = rng.generator
        idx = g.integers(0, 4, 8)
        ch = draw_channel(rng, 2, 4, n0=0.0)
        y = transmit(proposed_code.codeword(qpsk.points[idx]), ch, rng)
        res = ml_exhaustive(prepare(equivalent_channel(ch, proposed_code), y), qpsk)
        np.testing.assert_array_equal(res.indices, idx)
        assert res.metric < 1e-18

    def test_leaf_count_is_m_to_kappa(self, proposed_code, qpsk):
        rng = RngStream(4)
        _, ws = random_instance(proposed_code, qpsk, rng)
        res = ml_exhaustive(ws, qpsk)
        assert res.leaf_visits == 4 ** 8 == 65536

    def test_metric_self_consistent(self, proposed_code, qpsk):
        rng = RngStream(5)
        _, ws = random_instance(proposed_code, qpsk, rng)
        res = ml_exhaustive(ws, qpsk)
        assert res.metric == pytest.approx(
            residual_metric(ws, res.indices, qpsk), rel=1e-12)

    def test_budget_refusal_for_16qam(self, proposed_code):
        cons = make_qam(16, normalized=True)
        rng = RngStream(6)
        _, ws = random_instance(proposed_code, cons, rng)
        with pytest.raises(BudgetExceeded):
            ml_exhaustive(ws, cons)

    def test_exact_tie_breaks_lexicographic(self, qpsk):
        """With H_eq = I and z = 0 every candidate ties; the smallest
        symbol-index vector must win."""
        ws = prepare(np.eye(16), np.zeros((2, 4), dtype=complex))
        res = ml_exhaustive(ws, qpsk)
        np.testing.assert_array_equal(res.indices, np.zeros(8, dtype=np.int64))


class TestSphere:
    def test_agreement_with_exhaustive(self, proposed_code, qpsk):
        rng = RngStream(7)
        for _ in range(150):
            _, ws = random_instance(proposed_code, qpsk, rng)
            re = ml_exhaustive(ws, qpsk)
            rs = ml_sphere(ws, qpsk)
            assert rs.metric == pytest.approx(re.metric, abs=1e-9)
            np.testing.assert_array_equal(rs.indices, re.indices)
            assert rs.leaf_visits <= re.leaf_visits

    def test_noiseless(self, proposed_code, qpsk):
        rng = RngStream(8)
        g = rng.generator
        idx = g.integers(0, 4, 8)
        ch = draw_channel(rng, 2, 4, n0=0.0)
        y = transmit(proposed_code.codeword(qpsk.points[idx]), ch, rng)
        res = ml_sphere(prepare(equivalent_channel(ch, proposed_code), y), qpsk)
        np.testing.assert_array_equal(res.indices, idx)
        assert res.leaf_visits >= 1

    def test_works_for_djabba(self, djabba_code, qpsk):
        rng = RngStream(9)
        for _ in range(50):
            _, ws = random_instance(djabba_code, qpsk, rng)
            re = ml_exhaustive(ws, qpsk)
            rs = ml_sphere(ws, qpsk)
            assert rs.metric == pytest.approx(re.metric, abs=1e-9)
            np.testing.assert_array_equal(rs.indices, re.indices)


class TestFast:
    def test_agreement_with_exhaustive(self, proposed_code, qpsk):
        rng = RngStream(10)
        for _ in range(150):
            _, ws = random_instance(proposed_code, qpsk, rng)
            re = ml_exhaustive(ws, qpsk)
            rf = ml_fast(ws, qpsk)
            assert rf.metric == pytest.approx(re.metric, abs=1e-9)
            np.testing.assert_array_equal(rf.indices, re.indices)

    def test_counters(self, proposed_code, qpsk):
        rng = RngStream(11)
        _, ws = random_instance(proposed_code, qpsk, rng)
        res = ml_fast(ws, qpsk)
        assert res.leaf_visits == 4 ** 4 * 4 * 2 == 2048

    def test_counter_law_vs_exhaustive(self, proposed_code, qpsk):
        """leaf ratio fast/exhaustive equals 4 M^-3.5 exactly."""
        rng = RngStream(12)
        _, ws = random_instance(proposed_code, qpsk, rng)
        rf = ml_fast(ws, qpsk)
        re = ml_exhaustive(ws, qpsk)
        assert rf.leaf_visits / re.leaf_visits == 4 * 4.0 ** -3.5

    def test_noiseless(self, proposed_code, qpsk):
        rng = RngStream(13)
        g = rng.generator
        idx = g.integers(0, 4, 8)
        ch = draw_channel(rng, 2, 4, n0=0.0)
        y = transmit(proposed_code.codeword(qpsk.points[idx]), ch, rng)
        res = ml_fast(prepare(equivalent_channel(ch, proposed_code), y), qpsk)
        np.testing.assert_array_equal(res.indices, idx)
        assert res.metric < 1e-18

    def test_structure_violation_for_djabba(self, djabba_code, qpsk):
        rng = RngStream(14)
        _, ws = random_instance(djabba_code, qpsk, rng)
        assert structure_violation(ws) > 1e-3
        with pytest.raises(StructureViolation):
            ml_fast(ws, qpsk)

    def test_conditioned_hard_decision_is_optimal(self, qpsk):
        """The slicer solution for the inner symbol equals brute force.

        For fixed outer-symbol value xb the group metric is quadratic in the
        inner level xa; the nearest-level hard decision of
        (v_a - R_ab xb) / R_aa must match a linear scan over the axis.
        """
        axis = qpsk.axis
        raa, rab, rbb = 1.3, -0.4, 0.9
        for va in np.linspace(-3, 3, 61):
            for vb in np.linspace(-2, 2, 21):
                for xb in axis.levels:
                    want = None
                    best = np.inf
                    for la, xa in enumerate(axis.levels):
                        m = (va - raa * xa - rab * xb) ** 2 + (vb - rbb * xb) ** 2
                        if m < best:
                            best, want = m, la
                    got = hard_decision_index((va - rab * xb) / raa, axis)
                    assert got == want

    def test_scaling_invariance(self, proposed_code, qpsk):
        """Decisions are invariant under joint positive scaling of (z, R)."""
        rng = RngStream(15)
        _, ws = random_instance(proposed_code, qpsk, rng)
        res = ml_fast(ws, qpsk)
        scaled = DecoderWorkspace(
            qr=type(ws.qr)(q=ws.qr.q, r=2.5 * ws.qr.r, colnorms=2.5 * ws.qr.colnorms),
            z=2.5 * ws.z)
        res2 = ml_fast(scaled, qpsk)
        np.testing.assert_array_equal(res.indices, res2.indices)


class TestFastAnyConstellation:
    def test_agreement_with_exhaustive(self, proposed_code, qpsk):
        rng = RngStream(16)
        for _ in range(100):
            _, ws = random_instance(proposed_code, qpsk, rng)
            re = ml_exhaustive(ws, qpsk)
            ra = ml_fast_anyconstellation(ws, qpsk)
            assert ra.metric == pytest.approx(re.metric, abs=1e-9)
            np.testing.assert_array_equal(ra.indices, re.indices)

    def test_identical_to_fast_on_square_qam(self, proposed_code, qpsk):
        rng = RngStream(17)
        for _ in range(100):
            _, ws = random_instance(proposed_code, qpsk, rng)
            rf = ml_fast(ws, qpsk)
            ra = ml_fast_anyconstellation(ws, qpsk)
            np.testing.assert_array_equal(ra.indices, rf.indices)
            assert ra.metric == pytest.approx(rf.metric, abs=1e-12)

    def test_leaf_count(self, proposed_code, qpsk):
        rng = RngStream(18)
        _, ws = random_instance(proposed_code, qpsk, rng)
        res = ml_fast_anyconstellation(ws, qpsk)
        assert res.leaf_visits == 4 ** 4 * 2 * 4 ** 2 == 8192

    def test_structure_violation_for_djabba(self, djabba_code, qpsk):
        rng = RngStream(19)
        _, ws = random_instance(djabba_code, qpsk, rng)
        with pytest.raises(StructureViolation):
            ml_fast_anyconstellation(ws, qpsk)


class TestThreeWayEquivalence:
    def test_metric_spread_below_tolerance(self, proposed_code, qpsk):
        """All exact-ML paths agree on metric and decision per instance."""
        rng = RngStream(20)
        worst = 0.0
        for _ in range(100):
            _, ws = random_instance(proposed_code, qpsk, rng, snr_db=5.0)
            results = [ml_exhaustive(ws, qpsk), ml_sphere(ws, qpsk),
                       ml_fast(ws, qpsk)]
            metrics = [r.metric for r in results]
            worst = max(worst, max(metrics) - min(metrics))
            for r in results[1:]:
                np.testing.assert_array_equal(r.indices, results[0].indices)
        assert worst <= 1e-9

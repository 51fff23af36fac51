"""numba-vs-numpy backend agreement on every kernel."""

import numpy as np
import pytest

from stbc42 import RngStream, draw_channel, equivalent_channel, get_code, make_qam, noise_variance, transmit
from stbc42.decoder import prepare
from stbc42.kernels import get_backend, numpy_backend

numba_backend = pytest.importorskip("stbc42.kernels.numba_backend")


def decode_inputs(n, seed=0, m=4):
    """Random (z, r) pairs from genuine noisy channel instances."""
    code = get_code("proposed")
    cons = make_qam(m, normalized=True)
    rng = RngStream(seed)
    g = rng.generator
    out = []
    for _ in range(n):
        idx = g.integers(0, cons.m, 8)
        ch = draw_channel(rng, 2, 4, n0=noise_variance(6.0))
        y = transmit(code.codeword(cons.points[idx]), ch, rng)
        ws = prepare(equivalent_channel(ch, code), y)
        out.append((ws.z, ws.qr.r))
    return cons, out


class TestQrAgreement:
    def test_random_matrices(self):
        g = np.random.default_rng(1)
        for _ in range(25):
            a = g.standard_normal((16, 16))
            q1, r1, ok1 = numpy_backend.qr_mgs(a)
            q2, r2, ok2 = numba_backend.qr_mgs(a)
            assert ok1 == ok2 == True  # noqa: E712
            np.testing.assert_allclose(q1, q2, atol=1e-12)
            np.testing.assert_allclose(r1, r2, atol=1e-12)

    def test_rank_deficient_flag(self):
        a = np.ones((6, 4))
        assert numpy_backend.qr_mgs(a)[2] == numba_backend.qr_mgs(a)[2] == False  # noqa: E712


class TestDecoderAgreement:
    def test_exhaustive(self):
        cons, inputs = decode_inputs(25, seed=2)
        for z, r in inputs:
            i1 = numpy_backend.decode_exhaustive(z, r, cons.axis.levels)
            i2 = numba_backend.decode_exhaustive(z, r, cons.axis.levels)
            np.testing.assert_array_equal(i1[0], i2[0])
            assert i1[1:] == i2[1:]

    def test_sphere(self):
        cons, inputs = decode_inputs(40, seed=3)
        for z, r in inputs:
            i1 = numpy_backend.decode_sphere(z, r, cons.axis.levels)
            i2 = numba_backend.decode_sphere(z, r, cons.axis.levels)
            np.testing.assert_array_equal(i1[0], i2[0])

    def test_fast(self):
        cons, inputs = decode_inputs(40, seed=4)
        for z, r in inputs:
            i1 = numpy_backend.decode_fast(z, r, cons.axis.levels)
            i2 = numba_backend.decode_fast(z, r, cons.axis.levels)
            np.testing.assert_array_equal(i1[0], i2[0])
            assert i1[1:] == i2[1:]

    def test_fast_any(self):
        cons, inputs = decode_inputs(30, seed=5)
        pre = cons.points.real.copy()
        pim = cons.points.imag.copy()
        for z, r in inputs:
            i1 = numpy_backend.decode_fast_any(z, r, pre, pim)
            i2 = numba_backend.decode_fast_any(z, r, pre, pim)
            np.testing.assert_array_equal(i1[0], i2[0])
            assert i1[1:] == i2[1:]


class TestScanAgreement:
    def test_mindet_pair_scan(self):
        g = np.random.default_rng(6)
        xa = g.standard_normal((40, 4, 4)) + 1j * g.standard_normal((40, 4, 4))
        xb = g.standard_normal((50, 4, 4)) + 1j * g.standard_normal((50, 4, 4))
        b1 = numpy_backend.mindet_pair_scan(xa, xb, 3, 4)
        b2 = numba_backend.mindet_pair_scan(xa, xb, 3, 4)
        assert b1[0] == pytest.approx(b2[0], rel=1e-12)
        assert b1[1:] == b2[1:]


class TestBerBatchAgreement:
    def test_identical_error_counts(self):
        cons = make_qam(4, normalized=True)
        code = get_code("proposed")
        g = RngStream(7).generator
        n = 100
        from stbc42.constellation import bits_to_indices
        bits = g.integers(0, 2, (n, 16))
        sidx = bits_to_indices(bits.ravel(), cons).reshape(n, 8)
        h_re = g.standard_normal((n, 2, 4)) / np.sqrt(2)
        h_im = g.standard_normal((n, 2, 4)) / np.sqrt(2)
        wt = g.standard_normal((n, 16)) * np.sqrt(noise_variance(5.0) / 2)
        hc = np.empty((n, 4, 8))
        hc[:, 0::2, 0::2] = h_re
        hc[:, 0::2, 1::2] = -h_im
        hc[:, 1::2, 0::2] = h_im
        hc[:, 1::2, 1::2] = h_re
        gmat = np.ascontiguousarray(code.generator)
        for dec in (1, 2, 3):
            e1, l1, ok1 = numpy_backend.ber_batch(
                hc, wt, sidx, gmat, cons.axis.levels, cons.labels, dec)
            e2, l2, ok2 = numba_backend.ber_batch(
                hc, wt, sidx, gmat, cons.axis.levels, cons.labels, dec)
            np.testing.assert_array_equal(e1, e2)
            np.testing.assert_array_equal(ok1, ok2)
            if dec != 1:  # sphere leaf counts may differ at rounding level
                np.testing.assert_array_equal(l1, l2)


class TestDispatch:
    def test_get_backend_names(self):
        assert get_backend("numpy").NAME == "numpy"
        assert get_backend("numba").NAME == "numba"
        with pytest.raises(ValueError):
            get_backend("cuda")

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trsecure.model import (
    ParameterError,
    RngStream,
    SpreadingCode,
    SystemParams,
    ebn0_to_noise_variance,
    gen_rayleigh_channel,
    gen_spreading_code,
    qam4_demodulate,
    qam4_modulate,
)

bit_arrays = st.lists(st.integers(0, 1), min_size=0, max_size=64).filter(lambda b: len(b) % 2 == 0)


class TestSystemParams:
    def test_q_must_equal_n_times_u(self):
        with pytest.raises(ParameterError):
            SystemParams(q_subcarriers=256, n_symbols=60, bor=4)

    @pytest.mark.parametrize("alpha", [-0.1, 1.5])
    def test_alpha_out_of_range(self, alpha):
        with pytest.raises(ParameterError):
            SystemParams.from_bor(256, 4, alpha=alpha)

    def test_default_an_variance_is_inverse_bor(self):
        assert SystemParams.from_bor(256, 8).sigma2_an == pytest.approx(1 / 8)

    def test_from_bor_rejects_non_divisor(self):
        with pytest.raises(ParameterError):
            SystemParams.from_bor(256, 3)


class TestSpreadingCode:
    def test_entries_are_signs(self):
        code = gen_spreading_code(SystemParams.from_bor(8, 4), RngStream(7, 0))
        assert code.signs.shape == (8,)
        assert set(np.unique(code.signs)) <= {-1.0, 1.0}

    @pytest.mark.parametrize("bor", [1, 2, 4, 8])
    def test_orthonormal_columns(self, bor):
        code = gen_spreading_code(SystemParams.from_bor(64, bor), RngStream(3, bor))
        s = code.matrix()
        np.testing.assert_allclose(s.T @ s, np.eye(64 // bor), atol=1e-15)

    def test_same_stream_same_code(self):
        p = SystemParams.from_bor(64, 4)
        a = gen_spreading_code(p, RngStream(99, 5))
        b = gen_spreading_code(p, RngStream(99, 5))
        c = gen_spreading_code(p, RngStream(99, 6))
        np.testing.assert_array_equal(a.signs, b.signs)
        assert not np.array_equal(a.signs, c.signs)

    def test_signs_roughly_equiprobable(self):
        code = gen_spreading_code(SystemParams.from_bor(40000, 4), RngStream(0, 0))
        assert abs(code.signs.mean()) < 0.03

    def test_rejects_non_unit_entries(self):
        with pytest.raises(ParameterError):
            SpreadingCode(np.array([1.0, 0.5]), 1)


class TestRngStream:
    def test_independent_of_consumption_order(self):
        s = RngStream(2024, 17)
        late = s.generator(5).standard_normal(4)
        s.generator(1).standard_normal(100)
        np.testing.assert_array_equal(s.generator(5).standard_normal(4), late)

    def test_substreams_differ(self):
        s = RngStream(1, 1)
        assert not np.array_equal(s.generator(0).random(3), s.generator(1).random(3))

    def test_accepts_full_64_bit_seeds(self):
        RngStream(2**64 - 1, 2**64 - 1).generator(0).random()


class TestChannel:
    def test_normalized_energy(self):
        for r in range(20):
            h = gen_rayleigh_channel(256, RngStream(5, r))
            assert abs(h.energy - 1.0) < 1e-12

    def test_unnormalized_is_unit_variance_on_average(self):
        e = [gen_rayleigh_channel(256, RngStream(5, r), normalize=False).energy for r in range(400)]
        assert np.mean(e) == pytest.approx(1.0, rel=0.01)


class TestQam4:
    def test_gray_map(self):
        blk = qam4_modulate([0, 0, 0, 1, 1, 0, 1, 1])
        expected = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2)
        np.testing.assert_allclose(blk.symbols, expected)

    def test_unit_energy_distinct_points(self):
        pts = qam4_modulate(list(itertools.chain(*itertools.product([0, 1], repeat=2)))).symbols
        assert len(set(np.round(pts, 12))) == 4
        np.testing.assert_allclose(np.abs(pts) ** 2, 1.0)

    def test_odd_length_rejected(self):
        with pytest.raises(ValueError):
            qam4_modulate([0, 1, 1])

    def test_quadrant_decision(self):
        np.testing.assert_array_equal(qam4_demodulate(np.array([(0.9 + 0.8j) / np.sqrt(2)])), [0, 0])

    def test_zero_tie_breaks_to_bit_zero(self):
        np.testing.assert_array_equal(qam4_demodulate(np.array([0j, -0.0 + 0j, 1 - 0j])), [0] * 6)

    @given(bit_arrays)
    def test_roundtrip(self, bits):
        bits = np.array(bits, dtype=np.int8)
        np.testing.assert_array_equal(qam4_demodulate(qam4_modulate(bits).symbols), bits)

    @settings(max_examples=25)
    @given(st.integers(1, 5), st.integers(1, 8))
    def test_batched_roundtrip(self, blocks, n):
        bits = np.random.default_rng(blocks * 10 + n).integers(0, 2, (blocks, 2 * n))
        blk = qam4_modulate(bits)
        assert blk.symbols.shape == (blocks, n)
        np.testing.assert_array_equal(qam4_demodulate(blk.symbols), bits)


def test_ebn0_calibration():
    assert ebn0_to_noise_variance(0.0) == pytest.approx(0.5)
    assert ebn0_to_noise_variance(20.0) == pytest.approx(0.005)

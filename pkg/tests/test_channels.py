"""
Parallel-Channel Bounds - Channel Unit Tests

Unit tests for MBIOS channel models, parallel channel sets and the
information-theoretic quantities (Bhattacharyya constant, cutoff rate,
capacity, mutual information).

Run with: pytest tests/test_channels.py
"""

import json
import math

import numpy as np
import pytest

from src.channels import (
    ChannelKind,
    MbiosChannel,
    ParallelChannelSet,
    avg_bhattacharyya,
    avg_capacity,
    avg_mutual_info,
    bhattacharyya,
    capacity,
    capacity_limit_ebno_db,
    cutoff_rate,
    solve_capacity_ebno2,
    solve_cutoff_ebno2,
)
from src.core.errors import InfeasibleError
from src.numerics.quadrature import QuadratureConfig


@pytest.fixture
def quad():
    """Lighter quadrature than the YAML default"""
    return QuadratureConfig(nodes_per_panel=32, margin=10.0)


class TestMbiosChannel:
    """Unit tests for single channels"""

    def test_biawgn_validation(self):
        """Test rejection of a negative nu and an out-of-range crossover"""
        with pytest.raises(ValueError):
            MbiosChannel.biawgn(-0.1)
        with pytest.raises(ValueError):
            MbiosChannel.bsc(0.7)
        with pytest.raises(ValueError):
            MbiosChannel.bec(1.5)

    def test_kind_from_string(self):
        """Test that the kind is coerced from its string value"""
        channel = MbiosChannel('bsc', 0.1)
        assert channel.kind is ChannelKind.BSC

    def test_biawgn_from_ebno(self):
        """Test nu = R * Eb/N0 (linear)"""
        channel = MbiosChannel.biawgn_from_ebno_db(10.0, 0.5)
        assert channel.parameter == pytest.approx(5.0)
        assert channel.beta == pytest.approx(math.sqrt(10.0))

    def test_bsc_symmetry(self):
        """Test p(y|1) = p(-y|0) on the BSC alphabet"""
        channel = MbiosChannel.bsc(0.1)
        assert channel.density(1.0, 0) == pytest.approx(0.9)
        assert channel.density(1.0, 1) == pytest.approx(0.1)
        assert channel.density(-1.0, 1) == pytest.approx(0.9)

    def test_bec_one_sided_table(self):
        """Test that the BEC table has outputs with p(y|0) = 0"""
        table = MbiosChannel.bec(0.3).table()
        assert table.one_sided
        assert int(np.sum(table.p0_support)) == 2


class TestBhattacharyya:
    """Unit tests for gamma, gamma_bar and the cutoff rate"""

    def test_biawgn_gamma(self, quad):
        """Test gamma = exp(-nu) for BIAWGN"""
        assert bhattacharyya(MbiosChannel.biawgn(1.0), quad) == pytest.approx(math.exp(-1.0), abs=1e-8)

    def test_useless_channel_gamma(self, quad):
        """Test gamma = 1 at nu = 0"""
        assert bhattacharyya(MbiosChannel.biawgn(0.0), quad) == pytest.approx(1.0, abs=1e-8)

    def test_bsc_gamma(self):
        """Test gamma = 2 sqrt(p(1-p)) for BSC(0.1)"""
        assert bhattacharyya(MbiosChannel.bsc(0.1)) == pytest.approx(0.6, abs=1e-12)

    def test_bec_gamma(self):
        """Test gamma = eps for the BEC"""
        assert bhattacharyya(MbiosChannel.bec(0.25)) == pytest.approx(0.25, abs=1e-12)

    def test_mixture(self, quad):
        """Test gamma_bar of nu = 1/3 mixed half-and-half with a useless channel"""
        channel_set = ParallelChannelSet(
            channels=(MbiosChannel.biawgn(1.0 / 3.0), MbiosChannel.biawgn(0.0)),
            alphas=(0.5, 0.5),
        )
        expected = (math.exp(-1.0 / 3.0) + 1.0) / 2.0
        assert avg_bhattacharyya(channel_set, quad) == pytest.approx(expected, abs=1e-8)
        assert expected == pytest.approx(0.85826, abs=1e-5)

    def test_cutoff_rate(self, quad):
        """Test R0 = 1 - log2(1 + gamma) for a single BIAWGN channel"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(1.0))
        expected = 1.0 - math.log2(1.0 + math.exp(-1.0))
        assert cutoff_rate(channel_set, quad) == pytest.approx(expected, abs=1e-8)

    def test_solve_cutoff_point(self):
        """Test the R = 1/3 cutoff boundary point at Eb/N0_1 = 0 dB"""
        value = solve_cutoff_ebno2(1.0 / 3.0, 0.0, [0.5, 0.5])
        assert value == pytest.approx(3.69, abs=0.01)

    def test_solve_cutoff_symmetric_swap(self):
        """Test that the boundary is symmetric under swapping equal-share channels"""
        forward = solve_cutoff_ebno2(1.0 / 3.0, 0.0, [0.5, 0.5])
        back = solve_cutoff_ebno2(1.0 / 3.0, forward, [0.5, 0.5])
        assert back == pytest.approx(0.0, abs=1e-9)

    def test_solve_cutoff_infeasible(self):
        """Test that a dominant noisy first channel cannot be compensated"""
        with pytest.raises(InfeasibleError):
            solve_cutoff_ebno2(1.0 / 3.0, -30.0, [0.9, 0.1])

    def test_solve_cutoff_useless_second_channel(self):
        """Test -inf when channel 1 alone meets the target"""
        assert solve_cutoff_ebno2(1.0 / 3.0, 30.0, [0.9, 0.1]) == -math.inf

    def test_solve_cutoff_rejects_rate(self):
        """Test rate validation"""
        with pytest.raises(ValueError):
            solve_cutoff_ebno2(1.0, 0.0, [0.5, 0.5])


class TestCapacity:
    """Unit tests for capacity and mutual information"""

    def test_bsc_capacity(self):
        """Test C = 1 - h(0.1)"""
        assert capacity(MbiosChannel.bsc(0.1)) == pytest.approx(0.531004, abs=1e-6)

    def test_bec_capacity(self):
        """Test C = 1 - eps"""
        assert capacity(MbiosChannel.bec(0.4)) == pytest.approx(0.6)

    @pytest.mark.parametrize("beta", [0.1, 0.5, 1.0, 2.0, 5.0])
    def test_series_matches_quadrature(self, beta):
        """Test the BIAWGN series form against quadrature"""
        channel = MbiosChannel.biawgn(beta ** 2 / 2.0)
        assert capacity(channel, method='series') == pytest.approx(capacity(channel), abs=1e-6)

    def test_series_rejects_bsc(self):
        """Test that the series form is BIAWGN-only"""
        with pytest.raises(ValueError):
            capacity(MbiosChannel.bsc(0.1), method='series')

    def test_mutual_info_equals_capacity(self, quad):
        """Test I_bar = C for symmetric channels with uniform inputs"""
        channel_set = ParallelChannelSet(
            channels=(MbiosChannel.biawgn(0.5), MbiosChannel.bsc(0.11)),
            alphas=(0.25, 0.75),
        )
        assert avg_mutual_info(channel_set, quad) == pytest.approx(avg_capacity(channel_set, quad), abs=1e-6)

    def test_capacity_limit_rate_half(self):
        """Test the BIAWGN Shannon limit at R = 1/2 (about 0.187 dB)"""
        assert capacity_limit_ebno_db(0.5) == pytest.approx(0.187, abs=0.01)

    def test_capacity_boundary_inside_cutoff(self):
        """Test that the capacity boundary needs less SNR than the cutoff boundary"""
        cap = solve_capacity_ebno2(1.0 / 3.0, 0.0, [0.5, 0.5])
        cut = solve_cutoff_ebno2(1.0 / 3.0, 0.0, [0.5, 0.5])
        assert cap < cut

    def test_capacity_boundary_infeasible(self):
        """Test that channel 1 alone meeting the rate is infeasible"""
        with pytest.raises(InfeasibleError):
            solve_capacity_ebno2(1.0 / 3.0, 20.0, [0.9, 0.1])


class TestParallelChannelSet:
    """Unit tests for channel sets and descriptors"""

    def test_alpha_sum_checked(self):
        """Test that alphas must sum to one"""
        with pytest.raises(ValueError):
            ParallelChannelSet(channels=(MbiosChannel.biawgn(1.0),) * 2, alphas=(0.5, 0.4))

    def test_length_mismatch(self):
        """Test channel/alpha length validation"""
        with pytest.raises(ValueError):
            ParallelChannelSet(channels=(MbiosChannel.biawgn(1.0),), alphas=(0.5, 0.5))

    def test_biawgn_ebno(self):
        """Test the Eb/N0 constructor"""
        channel_set = ParallelChannelSet.biawgn_ebno(0.5, [0.0, 10.0], [0.5, 0.5])
        np.testing.assert_allclose(channel_set.nus, [0.5, 5.0])
        assert channel_set.J == 2
        assert channel_set.all_biawgn

    def test_nus_rejects_mixed_sets(self):
        """Test that nus needs an all-BIAWGN set"""
        channel_set = ParallelChannelSet(
            channels=(MbiosChannel.biawgn(1.0), MbiosChannel.bsc(0.1)), alphas=(0.5, 0.5)
        )
        with pytest.raises(ValueError):
            _ = channel_set.nus

    def test_descriptor(self, tmp_path):
        """Test JSON descriptor parsing with ebno_db, nu and BSC entries"""
        descriptor = {
            "rate": 0.5,
            "channels": [
                {"kind": "biawgn", "ebno_db": 10.0},
                {"kind": "biawgn", "nu": 0.25},
                {"kind": "bsc", "p": 0.05},
            ],
            "alphas": [0.5, 0.25, 0.25],
        }
        path = tmp_path / "channels.json"
        path.write_text(json.dumps(descriptor))
        channel_set = ParallelChannelSet.from_json(path)

        assert channel_set.rate == 0.5
        assert channel_set.channels[0].parameter == pytest.approx(5.0)
        assert channel_set.channels[1].parameter == pytest.approx(0.25)
        assert channel_set.channels[2].kind is ChannelKind.BSC
        assert channel_set.describe()["alphas"] == [0.5, 0.25, 0.25]

    def test_descriptor_default_alphas(self):
        """Test equal shares when alphas are omitted"""
        channel_set = ParallelChannelSet.from_descriptor(
            {"channels": [{"kind": "bec", "eps": 0.1}, {"kind": "bec", "eps": 0.2}]}
        )
        assert channel_set.alphas == (0.5, 0.5)

    def test_descriptor_needs_rate_for_ebno(self):
        """Test that ebno_db entries need a rate"""
        with pytest.raises(ValueError):
            ParallelChannelSet.from_descriptor({"channels": [{"kind": "biawgn", "ebno_db": 1.0}]})

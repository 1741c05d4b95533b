"""
Parallel-Channel Bounds - Error Bound Unit Tests

Unit tests for the union bounds, the DS2 tilting fixed point, the per-subcode
optimizers (DS2, Gallager, sphere, hybrid), the tilting families and the
whole-code evaluators, the SF/MSF bounds and the error_bound dispatcher.

Run with: pytest tests/test_bounds.py
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.bounds import (
    BoundConfig,
    BoundKind,
    GallagerSubcode,
    SphereSubcode,
    ds2_bound,
    ds2_k_slope_at_zero,
    ds2_subcode_bound,
    ds2_tilting_solve,
    ds2_whole_code,
    error_bound,
    gallager_bound,
    gallager_cube_tilting,
    gallager_random_tilting,
    gallager_sf_tilting_bound,
    gallager_whole_code_bound,
    hybrid_subcode_value,
    induced_gallager_tilting,
    max_spectral_ratio,
    msf_bound,
    sf_bound,
    sphere_whole_code,
    sweep_bound,
    union_bhattacharyya,
    union_bound_q,
)
from src.bounds.sf import msf_initial_range, sf_base
from src.bounds.stack import channel_stack
from src.bounds.tilting import log_cube_tilting
from src.channels import MbiosChannel, ParallelChannelSet, q_function
from src.core.errors import MissingIoweError, UnsupportedChannelError
from src.numerics.logmath import LOG_ZERO
from src.numerics.quadrature import QuadratureConfig
from src.numerics.solvers import GridConfig
from src.spectra import DistanceSpectrum, EnsembleSpec, random_code_spectrum

SLACK = 1e-8
QUAD_SLACK = 1e-6


@pytest.fixture
def config():
    """Small grids and a light quadrature rule"""
    return BoundConfig(
        grid=GridConfig(coarse=5, refine_rounds=1),
        quadrature=QuadratureConfig(nodes_per_panel=16, margin=8.0),
    )


@pytest.fixture
def repetition():
    """Length-3 repetition code: A_0 = A_3 = 1"""
    return DistanceSpectrum(n=3, k=1, log_a=np.array([0.0, LOG_ZERO, LOG_ZERO, 0.0]), deterministic=True)


@pytest.fixture
def nsra():
    """NSRA(N=5, q=3) spectrum, n = 15"""
    return EnsembleSpec(kind='nsra', N=5, q=3).spectrum()


@pytest.fixture
def two_channels():
    return ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [2.0, 4.0], [0.5, 0.5])


class TestUnionBounds:
    """Unit tests for union_bound_q and union_bhattacharyya"""

    def test_union_q_single_term(self, repetition):
        """Test P = Q(sqrt(2 h nu)) for one BIAWGN channel, h = 3, nu = 1"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(1.0))
        result = union_bound_q(repetition, channel_set)
        assert result.value == pytest.approx(float(q_function(math.sqrt(6.0))), rel=1e-6)
        assert result.value == pytest.approx(7.15e-3, rel=1e-2)

    def test_union_bhattacharyya_single_term(self, repetition):
        """Test P = gamma^h = e^{-3}"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(1.0))
        assert union_bhattacharyya(repetition, channel_set).log_total == pytest.approx(-3.0)

    def test_union_q_below_bhattacharyya(self, nsra, two_channels):
        """Test that the exact union bound is tighter than the Bhattacharyya form"""
        uq = union_bound_q(nsra, two_channels)
        ub = union_bhattacharyya(nsra, two_channels)
        assert uq.log_unclamped <= ub.log_unclamped + SLACK

    def test_union_q_needs_biawgn(self, repetition):
        """Test UnsupportedChannelError on a BSC"""
        with pytest.raises(UnsupportedChannelError):
            union_bound_q(repetition, ParallelChannelSet.single(MbiosChannel.bsc(0.1)))

    def test_total_clamped(self, nsra):
        """Test that a useless channel clamps the bound at 1 and keeps the raw sum"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(0.0))
        result = union_bhattacharyya(nsra, channel_set)
        assert result.log_total == 0.0
        assert result.log_unclamped == pytest.approx(math.log(2.0 ** 5 - 1.0))


class TestTilting:
    """Unit tests for the DS2 tilting measures"""

    def test_k_at_rho_one(self):
        """Test k = delta/(1-delta) / sum sqrt(p0 p1) for BSC(0.1), lambda = 1/2, rho = 1"""
        channel_set = ParallelChannelSet.single(MbiosChannel.bsc(0.1))
        solution = ds2_tilting_solve(0.3, 0.5, 1.0, channel_set)
        assert solution.k == pytest.approx(0.714286, rel=1e-5)

    def test_k_vanishes_at_zero_weight(self):
        """Test k = 0 at delta = 0"""
        channel_set = ParallelChannelSet.single(MbiosChannel.bsc(0.1))
        assert ds2_tilting_solve(0.0, 0.5, 0.5, channel_set).k == 0.0

    def test_measures_normalized(self, two_channels, config):
        """Test sum_y psi(y; j) = 1 on every channel"""
        solution = ds2_tilting_solve(0.2, 0.8, 0.6, two_channels, config.quadrature)
        tables = two_channels.tables(config.quadrature)
        np.testing.assert_allclose(solution.normalization(tables), [1.0, 1.0], atol=1e-10)

    def test_k_slope_at_zero(self):
        """Test dk/d(delta) at 0 for BSC(0.1) at lambda = 1/2"""
        channel_set = ParallelChannelSet.single(MbiosChannel.bsc(0.1))
        assert ds2_k_slope_at_zero(0.5, channel_set) == pytest.approx(1.0 / 0.6, rel=1e-10)

    def test_parameter_validation(self, two_channels):
        """Test rejection of rho outside (0, 1]"""
        with pytest.raises(ValueError):
            ds2_tilting_solve(0.2, 0.5, 1.5, two_channels)


class TestSubcodeBounds:
    """Unit tests for the per-subcode optimizers"""

    def test_ds2_below_union_per_subcode(self, nsra, two_channels, config):
        """Test optimized DS2 <= A_h gamma_bar^h for every weight"""
        ds2 = ds2_bound(nsra, two_channels, config=config)
        ub = union_bhattacharyya(nsra, two_channels, config=config.quadrature).log_values()
        assert ds2.per_subcode
        for term in ds2.per_subcode:
            assert term.log_value <= ub[term.h] + QUAD_SLACK

    def test_ds2_subcode_validation(self, two_channels, config):
        """Test weight and multiplicity checks"""
        with pytest.raises(ValueError):
            ds2_subcode_bound(0.0, 0, 10, two_channels, config)
        with pytest.raises(ValueError):
            ds2_subcode_bound(LOG_ZERO, 3, 10, two_channels, config)

    def test_gallager_fallback_is_union(self, two_channels, config):
        """Test that the rho = 1 corner is the Bhattacharyya union term"""
        evaluator = GallagerSubcode(15, two_channels, config)
        gamma_bar = 0.5 * sum(math.exp(-nu) for nu in two_channels.nus)
        assert evaluator.fallback(0.5, 4) == pytest.approx(0.5 + 4 * math.log(gamma_bar), abs=QUAD_SLACK)

    def test_gallager_below_fallback(self, nsra, two_channels, config):
        """Test optimized Gallager <= its rho = 1 fallback"""
        evaluator = GallagerSubcode(nsra.n, two_channels, config)
        result = gallager_bound(nsra, two_channels, config=config)
        for term in result.per_subcode:
            assert term.log_value <= evaluator.fallback(float(nsra.log_a[term.h]), term.h) + SLACK

    def test_sphere_corner_is_union(self, two_channels, config):
        """Test that the rho = 1, beta = 1 corner is the Bhattacharyya union term"""
        evaluator = SphereSubcode(15, two_channels, config)
        gamma_bar = 0.5 * sum(math.exp(-nu) for nu in two_channels.nus)
        assert evaluator.fallback(0.5, 4) == pytest.approx(0.5 + 4 * math.log(gamma_bar), abs=1e-12)

    def test_sphere_needs_biawgn(self, config):
        """Test the BIAWGN restriction of the sphere bound"""
        channel_set = ParallelChannelSet.single(MbiosChannel.bsc(0.1))
        with pytest.raises(UnsupportedChannelError):
            SphereSubcode(10, channel_set, config)

    def test_hybrid_tight_below_jensen(self, two_channels, config):
        """Test tight form <= Jensen form on distinct channels"""
        for h in (2, 5, 9):
            tight, jensen = hybrid_subcode_value(1.0, h, 15, two_channels, 0.4, 0.7, config=config)
            assert tight <= jensen + SLACK

    def test_hybrid_forms_agree_on_one_channel(self, config):
        """Test that both forms coincide for J = 1"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(0.8))
        tight, jensen = hybrid_subcode_value(1.0, 5, 15, channel_set, 0.4, 0.7, config=config)
        assert tight == pytest.approx(jensen, abs=1e-10)


class TestShulmanFeder:
    """Unit tests for the SF and MSF bounds"""

    def test_variants_agree_at_rho_one(self, two_channels, config):
        """Test gallager78 = ds2_81 at rho = 1"""
        stack = channel_stack(two_channels, config.quadrature)
        g78 = sf_base(stack, 30, 1.0 / 3.0, [1.0], 'gallager78')
        d81 = sf_base(stack, 30, 1.0 / 3.0, [1.0], 'ds2_81')
        np.testing.assert_allclose(g78, d81, atol=1e-12)

    def test_ds2_variant_tighter_on_one_channel(self, config):
        """Test ds2_81 <= gallager78 pointwise for J = 1 (no entropy factor)"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(0.7))
        stack = channel_stack(channel_set, config.quadrature)
        rho = np.linspace(0.05, 1.0, 20)
        g78 = sf_base(stack, 30, 1.0 / 3.0, rho, 'gallager78')
        d81 = sf_base(stack, 30, 1.0 / 3.0, rho, 'ds2_81')
        assert np.all(d81 <= g78 + 1e-12)

    def test_unknown_variant(self, nsra, two_channels, config):
        """Test variant validation"""
        with pytest.raises(ValueError):
            sf_bound(nsra, two_channels, variant='sf99', config=config)

    def test_sf_is_whole_code_term(self, nsra, two_channels, config):
        """Test that SF yields one whole-code term with its rho"""
        result = sf_bound(nsra, two_channels, config=config)
        assert len(result.per_subcode) == 1
        assert result.per_subcode[0].h is None
        assert config.rho_min <= result.per_subcode[0].params["rho"] <= 1.0

    def test_msf_initial_range(self, two_channels, config):
        """Test that the partition rule crosses zero around delta*"""
        lo, hi = msf_initial_range(two_channels, config)
        assert 0.0 < lo < hi <= 1.0

    def test_msf_refinement_never_hurts(self, nsra, two_channels, config):
        """Test refined MSF <= MSF on the initial partition"""
        refined, partition = msf_bound(nsra, two_channels, finite_length=True, config=config)
        plain, _ = msf_bound(nsra, two_channels, finite_length=False, config=config)
        assert refined.log_unclamped <= plain.log_unclamped + SLACK
        assert partition.is_split


class TestTiltingShapes:
    """Unit tests for the symmetry of the tilting functions"""

    def test_induced_tilting_not_even(self, config):
        """Test that the f implied by a DS2 measure differs at y and -y"""
        channel = MbiosChannel.biawgn(0.8)
        solution = ds2_tilting_solve(0.3, 1.0, 0.5, ParallelChannelSet.single(channel), config.quadrature)
        assert solution.k > 0.0
        f = induced_gallager_tilting(solution, channel, 0.4, [0.8, -0.8])
        assert np.all(f > 0.0)
        assert not math.isclose(f[0], f[1], rel_tol=1e-3)

    def test_cube_tilting_even_and_nonnegative(self):
        """Test f(y) = f(-y) >= 0 over a 5 x 5 x 5 (rho, s, c) grid"""
        channel = MbiosChannel.biawgn(0.8)
        y = np.linspace(0.25, 4.0, 16)
        lp0, lp1 = channel.log_density(y, 0), channel.log_density(y, 1)
        lp0_mirror, lp1_mirror = channel.log_density(-y, 0), channel.log_density(-y, 1)
        grid = np.linspace(0.2, 1.0, 5)
        for rho in grid:
            for s in grid:
                for c in np.linspace(0.0, 1.0, 5):
                    log_f = log_cube_tilting(lp0, lp1, rho, s, c)
                    log_f_mirror = log_cube_tilting(lp0_mirror, lp1_mirror, rho, s, c)
                    assert not np.any(np.isnan(log_f))
                    assert np.all(np.exp(log_f) >= 0.0)
                    np.testing.assert_allclose(log_f, log_f_mirror, rtol=1e-9, atol=1e-12)

    def test_tilting_parameter_checks(self, two_channels, config):
        """Test the parameter ranges of the Gallager tilting families"""
        with pytest.raises(ValueError):
            gallager_cube_tilting(two_channels, 0.5, 0.5, 1.5, config.quadrature)
        with pytest.raises(ValueError):
            gallager_random_tilting(two_channels, 0.2, 0.5, config.quadrature)


class TestWholeCodeBounds:
    """Unit tests for the single-measure whole-code evaluators"""

    def test_gallager_rho_one_is_union(self, nsra, two_channels, config):
        """Test that r = 0 reduces the whole-code Gallager bound to sum_h A_h gamma_bar^h"""
        union = union_bhattacharyya(nsra, two_channels, config=config.quadrature).log_unclamped
        families = [
            gallager_cube_tilting(two_channels, 1.0, 0.6, 0.5, config.quadrature),
            gallager_random_tilting(two_channels, 0.0, 0.5, config.quadrature),
        ]
        for f in families:
            value = gallager_whole_code_bound(nsra, two_channels, 1.0, 0.6, f, config=config)
            assert value == pytest.approx(union, abs=QUAD_SLACK)

    def test_gallager_whole_code_validation(self, nsra, two_channels, config):
        """Test the rho range and the number of tilting arrays"""
        f = gallager_cube_tilting(two_channels, 0.5, 0.5, 0.5, config.quadrature)
        with pytest.raises(ValueError):
            gallager_whole_code_bound(nsra, two_channels, 0.0, 0.5, f, config=config)
        with pytest.raises(ValueError):
            gallager_whole_code_bound(nsra, two_channels, 0.5, 0.5, f[:1], config=config)

    def test_sf_tilting_reproduces_closed_form(self, config):
        """Test the whole-code Gallager bound with SF tilting against the closed-form SF bound at rho = 0.5"""
        spectrum = random_code_spectrum(30, 1.0 / 3.0)
        channel_set = ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [1.0, 3.0], [0.5, 0.5])
        stack = channel_stack(channel_set, config.quadrature)
        closed = float(sf_base(stack, 30, spectrum.rate, [0.5], 'gallager78')[0]) + 0.5 * max_spectral_ratio(spectrum)
        whole = gallager_sf_tilting_bound(spectrum, channel_set, 0.5, config=config)
        assert whole <= closed + SLACK
        assert whole == pytest.approx(closed, abs=1e-3)

    def test_ds2_rho_one_is_union(self, nsra, two_channels, config):
        """Test that (lambda, rho) = (1/2, 1) reduces the single-measure DS2 bound to the union bound"""
        union = union_bhattacharyya(nsra, two_channels, config=config.quadrature).log_unclamped
        for delta in (0.2, 0.6):
            value = ds2_whole_code(nsra, two_channels, 0.5, 1.0, delta, config=config)
            assert value == pytest.approx(union, abs=QUAD_SLACK)
        with pytest.raises(ValueError):
            ds2_whole_code(nsra, two_channels, -0.1, 0.5, 0.3, config=config)

    def test_sphere_whole_code_corner(self, nsra, two_channels):
        """Test that rho = 1, beta = 1 gives the union bound"""
        union = union_bhattacharyya(nsra, two_channels).log_unclamped
        assert sphere_whole_code(nsra, two_channels, 1.0, 1.0) == pytest.approx(union, abs=1e-12)

    def test_sphere_whole_code_validation(self, nsra, two_channels):
        """Test the (rho, beta) range and the BIAWGN restriction"""
        with pytest.raises(ValueError):
            sphere_whole_code(nsra, two_channels, 0.5, 2.5)
        with pytest.raises(UnsupportedChannelError):
            sphere_whole_code(nsra, ParallelChannelSet.single(MbiosChannel.bsc(0.1)), 0.5, 1.2)


class TestErrorBound:
    """Unit tests for the error_bound dispatcher"""

    def test_every_kind_decreases_with_snr(self, nsra, config):
        """Test that each bound is nonincreasing as Eb/N0 of channel 2 rises"""
        for kind in BoundKind:
            values = [
                error_bound(nsra, ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [2.0, e2], [0.5, 0.5]),
                            kind, config=config).log_total
                for e2 in (1.0, 2.0, 3.0)
            ]
            assert values[0] >= values[1] - 1e-6, kind
            assert values[1] >= values[2] - 1e-6, kind

    def test_kind_parsing(self):
        """Test names with underscores and dashes"""
        assert BoundKind.parse('union_q') is BoundKind.UNION_Q
        assert BoundKind.parse('HYBRID67') is BoundKind.HYBRID67
        with pytest.raises(ValueError):
            BoundKind.parse('tsb')

    def test_bit_needs_iowe(self, repetition):
        """Test MissingIoweError for bit bounds without bit weights"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(1.0))
        with pytest.raises(MissingIoweError):
            error_bound(repetition, channel_set, 'ub', target='bit')

    def test_bit_below_block(self, nsra, two_channels, config):
        """Test bit bound <= block bound on a fixed grid without warm starts"""
        exact = replace(config, threshold=0.0, warm_window=0.0, grid=GridConfig(coarse=5, refine_rounds=0))
        block = error_bound(nsra, two_channels, 'ds2', target='block', config=exact)
        bit = error_bound(nsra, two_channels, 'ds2', target='bit', config=exact)
        assert bit.log_unclamped <= block.log_unclamped + SLACK

    def test_expurgation_of_specific_code(self, repetition, config):
        """Test that expurgation drops weights above n - k for a specific code"""
        channel_set = ParallelChannelSet.single(MbiosChannel.biawgn(1.0))
        result = error_bound(repetition, channel_set, 'ub', config=replace(config, expurgate=True))
        assert result.log_total == LOG_ZERO

    def test_expurgation_ignored_for_ensembles(self, nsra, two_channels, config):
        """Test that ensemble spectra keep all weights"""
        plain = error_bound(nsra, two_channels, 'ub', config=config)
        expurgated = error_bound(nsra, two_channels, 'ub', config=replace(config, expurgate=True))
        assert plain.log_total == expurgated.log_total

    def test_threshold_shortcut(self, nsra, config):
        """Test that subcodes with negligible union terms skip the optimizer"""
        strong = ParallelChannelSet.biawgn_ebno(1.0 / 3.0, [10.0, 10.0], [0.5, 0.5])
        result = error_bound(nsra, strong, 'ds2', config=replace(config, threshold=0.5))
        assert result.skipped == len(result.per_subcode)
        assert all(t.method == 'union' for t in result.per_subcode)

    def test_zero_threshold_optimizes_all(self, nsra, two_channels, config):
        """Test that threshold 0 sends every subcode through the optimizer"""
        result = error_bound(nsra, two_channels, 'ds2', config=replace(config, threshold=0.0))
        assert result.skipped == 0

    def test_ensemble_source(self, two_channels, config):
        """Test that an EnsembleSpec is accepted directly"""
        result = error_bound(EnsembleSpec(kind='random', N=10, rate=0.5), two_channels, 'ub', config=config)
        assert result.log_total <= 0.0

    def test_sweep_threads_agree(self, nsra, config):
        """Test that threaded sweeps reproduce the serial rows"""
        serial, _ = sweep_bound(nsra, 1.0 / 3.0, 2.0, [1.0, 3.0], [0.5, 0.5], 'ub', config=config, threads=1)
        threaded, diagnostics = sweep_bound(nsra, 1.0 / 3.0, 2.0, [1.0, 3.0], [0.5, 0.5], 'ub',
                                            config=config, threads=2)
        assert serial == threaded
        assert [row["snr2_db"] for row in serial] == [1.0, 3.0]
        assert diagnostics[0]["kind"] == 'ub'
        assert serial[0]["log10_Pe"] >= serial[1]["log10_Pe"]

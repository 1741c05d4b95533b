"""
Parallel-Channel Bounds - Spectra Unit Tests

Unit tests for IOWE containers, the component enumerators, uniform-interleaver
concatenation and the ensemble enumerators, checked against closed forms and
against exhaustive interleaver enumeration.

Run with: pytest tests/test_spectra.py
"""

import math

import numpy as np
import pytest

from src.core.errors import DimensionMismatchError, OracleTooLargeError
from src.numerics.logmath import LOG_ZERO
from src.spectra import (
    DistanceSpectrum,
    EnsembleKind,
    EnsembleSpec,
    Iowe,
    acc_iowe,
    component_iowe,
    ensemble_oracle,
    marginalize,
    nsra_iowe,
    random_code_spectrum,
    rep_iowe,
    serial_concat,
    spara_iowe,
    spc3_iowe_closed_form,
    spc_iowe,
    spra_iowe,
    spra_iowe_closed_form,
)


def assert_same_iowe(a: Iowe, b: Iowe, atol: float = 1e-10):
    assert (a.n, a.k) == (b.n, b.k)
    np.testing.assert_allclose(np.exp(a.log_a), np.exp(b.log_a), atol=atol)


class TestIowe:
    """Unit tests for the IOWE and spectrum containers"""

    def test_shape_checked(self):
        """Test that the table shape must be (k+1, n+1)"""
        with pytest.raises(ValueError):
            Iowe(n=3, k=1, log_a=np.zeros((3, 4)))

    def test_rejects_nan(self):
        """Test that NaN entries are rejected"""
        table = np.full((2, 3), LOG_ZERO)
        table[1, 1] = math.nan
        with pytest.raises(ValueError):
            Iowe(n=2, k=1, log_a=table)

    def test_from_entries_and_get(self):
        """Test sparse construction and out-of-range access"""
        iowe = Iowe.from_entries(3, 1, {(0, 0): 0.0, (1, 3): 0.0})
        assert iowe.get(1, 3) == 0.0
        assert iowe.get(1, 2) == LOG_ZERO
        assert iowe.get(5, 5) == LOG_ZERO
        assert list(iowe.entries()) == [(0, 0, 0.0), (1, 3, 0.0)]
        assert iowe.check_count()

    def test_from_entries_out_of_range(self):
        """Test rejection of entries outside the table"""
        with pytest.raises(ValueError):
            Iowe.from_entries(3, 1, {(2, 0): 0.0})

    def test_table_is_read_only(self):
        """Test that stored tables cannot be mutated"""
        iowe = Iowe.identity(3)
        with pytest.raises(ValueError):
            iowe.log_a[0, 0] = 1.0

    def test_bit_weights_cannot_exceed_spectrum(self):
        """Test the A'_h <= A_h check"""
        with pytest.raises(ValueError):
            DistanceSpectrum(n=2, k=1, log_a=np.array([0.0, LOG_ZERO, 0.0]),
                             log_weighted=np.array([LOG_ZERO, LOG_ZERO, 1.0]))

    def test_bit_multiplicities_need_weights(self):
        """Test that a spectrum without bit weights refuses target='bit'"""
        spectrum = DistanceSpectrum(n=2, k=1, log_a=np.array([0.0, LOG_ZERO, 0.0]))
        assert not spectrum.has_bit_weights
        with pytest.raises(ValueError):
            spectrum.multiplicities('bit')


class TestComponents:
    """Unit tests for REP, ACC and SPC enumerators"""

    def test_rep(self):
        """Test A_{w,qw} = C(k, w)"""
        iowe = rep_iowe(3, 2)
        assert math.exp(iowe.get(1, 3)) == pytest.approx(2.0)
        assert math.exp(iowe.get(2, 6)) == pytest.approx(1.0)
        assert iowe.check_count()

    def test_acc_counts_all_words(self):
        """Test that the accumulator is a bijection on n bits"""
        for n in (1, 4, 9):
            assert acc_iowe(n).check_count(1e-9)

    def test_acc_single_input(self):
        """Test that one input 1 at position i gives weight n - i"""
        iowe = acc_iowe(4)
        np.testing.assert_allclose(np.exp(iowe.log_a[1, 1:]), [1.0, 1.0, 1.0, 1.0], atol=1e-12)

    def test_spc_counts_all_words(self):
        """Test that SPC(3) on two groups accounts for 2^6 inputs"""
        assert spc_iowe(3, 2).check_count(1e-9)

    @pytest.mark.parametrize("groups", [1, 2, 4])
    def test_spc3_closed_form(self, groups):
        """Test the SPC(3) generating-function form against the double sum"""
        assert_same_iowe(spc_iowe(3, groups), spc3_iowe_closed_form(groups))

    def test_component_dispatch(self):
        """Test component_iowe by name"""
        assert_same_iowe(component_iowe('rep', q=2, k=3), rep_iowe(2, 3))
        assert_same_iowe(component_iowe('acc', n=5), acc_iowe(5))

    def test_concat_dimension_mismatch(self):
        """Test outer.n != inner.k"""
        with pytest.raises(DimensionMismatchError):
            serial_concat(rep_iowe(3, 2), acc_iowe(5))

    def test_identity_outer_code(self):
        """Test that an uncoded outer stage leaves the inner enumerator unchanged"""
        inner = acc_iowe(6)
        assert_same_iowe(serial_concat(Iowe.identity(6), inner), inner)


class TestEnsembles:
    """Unit tests for the ensemble enumerators"""

    def test_nsra_small_case(self):
        """Test NSRA(N=2, q=3) against the hand-computed enumerator"""
        iowe = nsra_iowe(2, 3)
        assert math.exp(iowe.get(1, 2)) == pytest.approx(0.4)
        assert math.exp(iowe.get(2, 3)) == pytest.approx(1.0)

        spectrum = marginalize(iowe)
        np.testing.assert_allclose(np.exp(spectrum.log_a), [1.0, 0.0, 0.4, 1.6, 0.6, 0.4, 0.0], atol=1e-12)
        assert math.exp(spectrum.log_total) == pytest.approx(4.0)
        np.testing.assert_allclose(np.exp(spectrum.log_weighted[2:4]), [0.2, 1.3], atol=1e-12)

    def test_nsra_matches_oracle(self):
        """Test NSRA(N=2, q=3) and NSRA(N=3, q=3) against interleaver enumeration"""
        for N in (2, 3):
            assert_same_iowe(nsra_iowe(N, 3), ensemble_oracle('nsra', N, q=3))

    def test_spra_matches_oracle(self):
        """Test SPRA(N=1) against interleaver enumeration"""
        assert_same_iowe(spra_iowe(1), ensemble_oracle('spra', 1))

    @pytest.mark.parametrize("M", [0, 1])
    def test_spara_matches_oracle(self, M):
        """Test SPARA(N=1, M) against interleaver enumeration"""
        assert_same_iowe(spara_iowe(1, M), ensemble_oracle('spara', 1, M=M))

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_spra_closed_form(self, N):
        """Test the SPRA pipeline against the explicit triple sum"""
        assert_same_iowe(spra_iowe(N), spra_iowe_closed_form(N), atol=1e-8)

    def test_spara_full_pass_through_is_spra(self):
        """Test that M = N reduces SPARA to SPRA"""
        assert_same_iowe(spara_iowe(4, 4), spra_iowe(4), atol=1e-8)

    def test_counts_conserved(self):
        """Test that every ensemble accounts for 2^N codewords"""
        for N in range(1, 5):
            assert nsra_iowe(N, 3).check_count(1e-9)
            assert spra_iowe(N).check_count(1e-9)
            for M in range(N + 1):
                assert spara_iowe(N, M).check_count(1e-9)

    def test_oracle_too_large(self):
        """Test the interleaver-length cap"""
        with pytest.raises(OracleTooLargeError):
            ensemble_oracle('nsra', 4, q=3)

    def test_random_spectrum(self):
        """Test A_h = C(n, h) 2^{-n(1-R)} for n = 4, R = 1/2"""
        spectrum = random_code_spectrum(4, 0.5)
        np.testing.assert_allclose(np.exp(spectrum.log_a), [1.0, 1.0, 1.5, 1.0, 0.25], atol=1e-12)
        assert math.exp(spectrum.log_weighted[2]) == pytest.approx(0.75)

    def test_random_needs_integral_k(self):
        """Test that n R must be an integer"""
        with pytest.raises(ValueError):
            random_code_spectrum(5, 0.5)


class TestEnsembleSpec:
    """Unit tests for ensemble selection"""

    def test_nsra_defaults(self):
        """Test default repetition order and rate"""
        spec = EnsembleSpec(kind='nsra', N=10)
        assert spec.kind is EnsembleKind.NSRA
        assert spec.q == 3
        assert spec.rate == pytest.approx(1.0 / 3.0)
        assert spec.tag == "nsra(q=3)"

    def test_spara_alpha(self):
        """Test alpha = M / 3N"""
        spec = EnsembleSpec(kind='spara', N=15, M=6)
        assert spec.alpha == pytest.approx(2.0 / 15.0)
        assert spec.rate == pytest.approx(1.0 / 3.0)

    def test_spara_needs_m(self):
        """Test that SPARA needs M"""
        with pytest.raises(ValueError):
            EnsembleSpec(kind='spara', N=15)

    def test_file_needs_path(self):
        """Test that the file ensemble needs a path, and built-ins refuse one"""
        with pytest.raises(ValueError):
            EnsembleSpec(kind='file')
        with pytest.raises(ValueError):
            EnsembleSpec(kind='nsra', iowe_path='x.csv')

    def test_random_spectrum_length(self):
        """Test that the random ensemble uses n = N / R by default"""
        spectrum = EnsembleSpec(kind='random', N=10, rate=0.5).spectrum()
        assert spectrum.n == 20
        assert spectrum.k == 10

    def test_random_has_no_iowe(self):
        """Test that the random ensemble only offers a spectrum"""
        with pytest.raises(ValueError):
            EnsembleSpec(kind='random', N=10, rate=0.5).build_iowe()

    def test_spectrum_of_built_in(self):
        """Test spectrum() for NSRA against marginalize(nsra_iowe)"""
        spectrum = EnsembleSpec(kind='nsra', N=2).spectrum()
        np.testing.assert_allclose(spectrum.log_a, marginalize(nsra_iowe(2, 3)).log_a)

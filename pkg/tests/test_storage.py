"""
Parallel-Channel Bounds - Storage Unit Tests

Unit tests for IOWE/spectrum CSV files and result emission.

Run with: pytest tests/test_storage.py
"""

import json

import numpy as np
import pytest

from src.core.errors import OutputError, ParseError
from src.spectra import marginalize, nsra_iowe
from src.storage import (
    emit,
    load_iowe,
    load_spectrum,
    read_header,
    read_results,
    read_run_config,
    save_iowe,
    save_spectrum,
    write_sidecar,
)


class TestIoweStore:
    """Unit tests for IOWE and spectrum files"""

    @pytest.fixture
    def iowe(self):
        """Small NSRA enumerator"""
        return nsra_iowe(2, 3)

    def test_iowe_file_layout(self, iowe, tmp_path):
        """Test the header and column line"""
        path = save_iowe(iowe, tmp_path / "nsra.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "# iowe n=6 k=2"
        assert lines[1] == "w,h,log_value"
        assert lines[2] == "0,0,0.0"

    def test_iowe_reload(self, iowe, tmp_path):
        """Test that a saved IOWE reloads entry for entry"""
        path = save_iowe(iowe, tmp_path / "nsra.csv")
        loaded = load_iowe(path)
        assert (loaded.n, loaded.k) == (6, 2)
        np.testing.assert_array_equal(loaded.log_a, iowe.log_a)
        assert loaded.label == "nsra"

    def test_spectrum_reload(self, iowe, tmp_path):
        """Test spectrum files with bit weights"""
        spectrum = marginalize(iowe)
        path = save_spectrum(spectrum, tmp_path / "spectrum.csv")
        loaded = load_spectrum(path)
        np.testing.assert_array_equal(loaded.log_a, spectrum.log_a)
        np.testing.assert_array_equal(loaded.log_weighted, spectrum.log_weighted)
        assert not loaded.deterministic

    def test_missing_rows_are_zero(self, tmp_path):
        """Test that omitted weights read back as zero multiplicities"""
        path = tmp_path / "sparse.csv"
        path.write_text("# spectrum n=4 k=1 deterministic=1\nh,log_A,log_Aprime\n0,0.0,\n4,0.0,\n")
        spectrum = load_spectrum(path)
        assert spectrum.deterministic
        assert spectrum.log_weighted is None
        assert list(spectrum.support()) == [4]

    def test_bad_header(self, tmp_path):
        """Test the header line check"""
        path = tmp_path / "bad.csv"
        path.write_text("# spectrum n=4 k=1\nw,h,log_value\n")
        with pytest.raises(ParseError) as info:
            load_iowe(path)
        assert info.value.line == 1

    def test_bad_row_reports_line(self, tmp_path):
        """Test that a malformed value names its file line"""
        path = tmp_path / "bad.csv"
        path.write_text("# iowe n=3 k=1\nw,h,log_value\n0,0,0.0\n1,3,abc\n")
        with pytest.raises(ParseError) as info:
            load_iowe(path)
        assert info.value.line == 4

    def test_duplicate_entry(self, tmp_path):
        """Test duplicate (w, h) rejection"""
        path = tmp_path / "dup.csv"
        path.write_text("# iowe n=3 k=1\nw,h,log_value\n1,3,0.0\n1,3,0.0\n")
        with pytest.raises(ParseError) as info:
            load_iowe(path)
        assert info.value.line == 4

    def test_out_of_range_weight(self, tmp_path):
        """Test rejection of weights beyond the header's n"""
        path = tmp_path / "range.csv"
        path.write_text("# iowe n=3 k=1\nw,h,log_value\n1,7,0.0\n")
        with pytest.raises(ParseError):
            load_iowe(path)

    def test_positive_infinity_rejected(self, tmp_path):
        """Test that +inf is not a valid log multiplicity"""
        path = tmp_path / "inf.csv"
        path.write_text("# iowe n=3 k=1\nw,h,log_value\n1,3,inf\n")
        with pytest.raises(ParseError):
            load_iowe(path)

    def test_mixed_bit_weight_columns(self, tmp_path):
        """Test that log_Aprime must be given on all rows or none"""
        path = tmp_path / "mixed.csv"
        path.write_text("# spectrum n=2 k=1\nh,log_A,log_Aprime\n0,0.0,\n2,0.0,-0.5\n")
        with pytest.raises(ParseError):
            load_spectrum(path)


class TestResultWriter:
    """Unit tests for result emission"""

    @pytest.fixture
    def rows(self):
        return [
            {"snr2_db": 1.0, "log10_Pe": -2.123456789012345, "kind": "ds2"},
            {"snr2_db": 2.0, "log10_Pe": -float('inf'), "kind": "ds2"},
        ]

    def test_csv_deterministic(self, rows, tmp_path):
        """Test that two runs produce identical bytes"""
        config = {"command": "bound", "options": {"rate": 1.0 / 3.0}}
        first = emit(rows, tmp_path / "a.csv", run_config=config).read_bytes()
        second = emit(rows, tmp_path / "b.csv", run_config=config).read_bytes()
        assert first == second

    def test_csv_round_trip(self, rows, tmp_path):
        """Test read_results and the embedded configuration"""
        path = emit(rows, tmp_path / "out.csv", run_config={"command": "bound"})
        frame = read_results(path)
        assert list(frame.columns) == ["snr2_db", "log10_Pe", "kind"]
        assert frame["log10_Pe"][0] == pytest.approx(-2.12345678901, abs=1e-10)
        assert read_run_config(path) == {"command": "bound"}

    def test_json_infinities(self, rows, tmp_path):
        """Test that JSON output encodes infinities as strings"""
        path = emit(rows, tmp_path / "out.json", fmt='json')
        payload = json.loads(path.read_text())
        assert payload["columns"] == ["snr2_db", "log10_Pe", "kind"]
        assert payload["rows"][1]["log10_Pe"] == "-inf"

    def test_unknown_format(self, rows, tmp_path):
        """Test format validation"""
        with pytest.raises(ValueError):
            emit(rows, tmp_path / "out.txt", fmt='xml')

    def test_unwritable_path(self, rows, tmp_path):
        """Test that I/O failures surface as OutputError"""
        with pytest.raises(OutputError):
            emit(rows, tmp_path / "missing" / "out.csv")

    def test_header_lines(self, rows, tmp_path):
        """Test extra header lines ahead of the embedded configuration"""
        path = emit(rows, tmp_path / "curve.csv", run_config={"command": "growth"},
                    header={"ensemble": "nsra(q=3)", "rate": "0.333333333333"})
        assert path.read_text().splitlines()[0] == "# ensemble=nsra(q=3)"
        assert read_header(path)["ensemble"] == "nsra(q=3)"
        assert read_run_config(path) == {"command": "growth"}
        assert len(read_results(path)) == 2

        json_path = emit(rows, tmp_path / "curve.json", fmt='json', header={"ensemble": "nsra(q=3)"})
        payload = json.loads(json_path.read_text())
        assert payload["header"] == {"ensemble": "nsra(q=3)"}

    def test_missing_run_config(self, tmp_path):
        """Test read_run_config on a plain CSV"""
        path = tmp_path / "plain.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_run_config(path)

    def test_sidecar(self, tmp_path):
        """Test the diagnostics sidecar"""
        path = write_sidecar({"points": [{"log_total": -float('inf')}]}, tmp_path / "d.json")
        assert json.loads(path.read_text()) == {"points": [{"log_total": "-inf"}]}

"""
Series CSV input and atomic artifact writes.
"""

import numpy as np
import pytest

from vqar.adapters.store import ArtifactStore
from vqar.adapters.store import read_series_csv
from vqar.core.simulate import simulate
from vqar.errors import SeriesIOError
from vqar.models.config import SimConfig


class TestSeriesCsv:
    def test_simulated_series_reads_back_bit_exact(self, tmp_path):
        series = simulate(SimConfig(case=1, T=600, T0=100, seed=3))
        store = ArtifactStore(str(tmp_path))
        path = store.write_series("series.csv", series)
        np.testing.assert_array_equal(read_series_csv(path), series)

    def test_awkward_decimals_survive(self, tmp_path):
        values = np.array([[0.1, 1 / 3], [2.0 / 7.0, -1e-300], [np.nextafter(1.0, 2.0), 123456.789]])
        path = ArtifactStore(str(tmp_path)).write_series("s.csv", values)
        np.testing.assert_array_equal(read_series_csv(path), values)

    def test_rows_sorted_by_time(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("t,x1,x2\n2,3.0,4.0\n1,1.0,2.0\n", encoding="utf-8")
        np.testing.assert_array_equal(read_series_csv(str(path)), [[1.0, 2.0], [3.0, 4.0]])

    def test_missing_file(self, tmp_path):
        with pytest.raises(SeriesIOError, match="not found"):
            read_series_csv(str(tmp_path / "absent.csv"))

    def test_no_value_columns(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("t,y\n1,2\n", encoding="utf-8")
        with pytest.raises(SeriesIOError, match="x1..xd"):
            read_series_csv(str(path))


class TestArtifactStore:
    def test_records_written_paths(self, tmp_path):
        store = ArtifactStore(str(tmp_path / "out"))
        store.write_json("a.json", {"k": 1})
        store.write_text("b.svg", "<svg/>")
        assert [p.rsplit("/", 1)[-1] for p in store.written] == ["a.json", "b.svg"]
        assert not list((tmp_path / "out").glob("*.lock"))
        assert not list((tmp_path / "out").glob("*.tmp"))

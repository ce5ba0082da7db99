import numpy as np
import pytest

from driftsched import RunTrace
from driftsched._version import __version__


def small_trace():
    return RunTrace(
        columns={
            "t": np.arange(1, 5),
            "lambda": np.array([0.05, 0.1, 0.2, 0.2]),
            "eval_return": np.array([np.nan, 1.5, np.nan, -2.0]),
            "pattern": np.asarray(["abrupt"] * 4, dtype=object),
        },
        meta={"seed": 3, "task": "demo"},
    )


class TestRunTrace:
    def test_ragged_rejected(self):
        with pytest.raises(ValueError, match="ragged"):
            RunTrace(columns={"a": np.arange(3), "b": np.arange(4)})

    def test_len_and_access(self):
        tr = small_trace()
        assert len(tr) == 4
        assert tr.has("lambda") and not tr.has("zeta")
        assert tr.column("lambda")[2] == 0.2

    def test_csv_roundtrip(self, tmp_path):
        tr = small_trace()
        path = tmp_path / "trace.csv"
        tr.to_csv(path)
        back = RunTrace.from_csv(path)
        assert back.meta == tr.meta
        assert np.array_equal(back.column("t"), tr.column("t"))
        assert np.array_equal(back.column("lambda"), tr.column("lambda"))
        assert np.array_equal(back.column("eval_return"), tr.column("eval_return"),
                              equal_nan=True)
        assert list(back.column("pattern")) == ["abrupt"] * 4

    def test_version_stamp(self, tmp_path):
        path = tmp_path / "trace.csv"
        small_trace().to_csv(path)
        first = path.read_text().splitlines()[0]
        assert first == f"# driftsched={__version__}"

    def test_deterministic_bytes(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        small_trace().to_csv(p1)
        small_trace().to_csv(p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_stamp_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,lambda\n1,0.5\n")
        with pytest.raises(ValueError, match="stamp"):
            RunTrace.from_csv(path)

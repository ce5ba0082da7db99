"""Per-step run records and their CSV form.

A RunTrace is a bag of equal-length columns plus free-form metadata.
Optimization runs emit the core columns (t, lambda, eta, alpha, proxy,
regret_inc, regret_cum); learner runs add eval_return, regret_rl_inc,
pattern and seed. CSV output is deterministic: the first line stamps
the library version, the second carries the metadata as sorted JSON.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__

CORE_COLUMNS = ("t", "lambda", "eta", "alpha", "proxy", "regret_inc", "regret_cum")


def _format_cell(v) -> str:
    if isinstance(v, str):
        return v
    f = float(v)
    if math.isnan(f):
        return ""
    if f == int(f) and abs(f) < 1e15:
        return repr(int(f)) if isinstance(v, (int, np.integer)) else repr(f)
    return repr(f)


@dataclass
class RunTrace:
    """Columnar per-step record of one run."""

    columns: dict
    meta: dict = field(default_factory=dict)
    policies: list | None = None  # planner snapshots; not serialized

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"ragged columns: {lengths}")
        self.columns = {
            name: np.asarray(col) for name, col in self.columns.items()
        }

    def __len__(self) -> int:
        if not self.columns:
            return 0
        return len(next(iter(self.columns.values())))

    def has(self, name: str) -> bool:
        return name in self.columns

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self, path) -> None:
        names = list(self.columns)
        with open(path, "w", newline="") as fh:
            fh.write(f"# driftsched={__version__}\n")
            fh.write(f"# meta={json.dumps(self.meta, sort_keys=True)}\n")
            writer = csv.writer(fh)
            writer.writerow(names)
            for i in range(len(self)):
                writer.writerow(
                    [_format_cell(self.columns[n][i]) for n in names]
                )

    @staticmethod
    def from_csv(path) -> "RunTrace":
        with open(path, newline="") as fh:
            first = fh.readline()
            if not first.startswith("# driftsched="):
                raise ValueError(f"{path} lacks a version stamp")
            meta_line = fh.readline()
            meta = json.loads(meta_line.split("=", 1)[1]) if meta_line.startswith("# meta=") else {}
            reader = csv.reader(fh)
            names = next(reader)
            rows = list(reader)
        cols: dict = {}
        for j, name in enumerate(names):
            vals = [row[j] for row in rows]
            if name in ("pattern", "method"):
                cols[name] = np.asarray(vals, dtype=object)
            else:
                cols[name] = np.asarray(
                    [float(v) if v != "" else math.nan for v in vals]
                )
        return RunTrace(columns=cols, meta=meta)

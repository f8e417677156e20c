"""Experiment records and their CSV serialization.

The CSV is the single source of truth for sweep results: aggregations
are always recomputed from it.  Floats are serialized with 17 significant
digits so a re-run with the same seed reproduces the file byte for byte.
"""

import csv
import math
from dataclasses import dataclass

CSV_HEADER = [
    "run_id", "model", "d", "q", "N", "M",
    "sigma0", "eps", "lambda", "rel_error", "wall_seconds",
]


@dataclass(frozen=True)
class ExperimentRecord:
    run_id: int
    model: str
    d: int
    q: int
    n: int
    m: int
    sigma0: float
    epsilon: float
    lam: float
    rel_error: float  # NaN marks a failed cell
    wall_seconds: float

    @property
    def failed(self):
        return math.isnan(self.rel_error)

    def row(self):
        return [
            str(self.run_id), self.model, str(self.d), str(self.q),
            str(self.n), str(self.m),
            _fmt(self.sigma0), _fmt(self.epsilon), _fmt(self.lam),
            _fmt(self.rel_error), _fmt(self.wall_seconds),
        ]


def _fmt(x):
    return f"{float(x):.17g}"


def write_records(path, records):
    """Write records as UTF-8 CSV with LF line endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())


def read_records(path):
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            out.append(ExperimentRecord(
                run_id=int(row[0]), model=row[1], d=int(row[2]), q=int(row[3]),
                n=int(row[4]), m=int(row[5]), sigma0=float(row[6]),
                epsilon=float(row[7]), lam=float(row[8]),
                rel_error=float(row[9]), wall_seconds=float(row[10]),
            ))
    return out

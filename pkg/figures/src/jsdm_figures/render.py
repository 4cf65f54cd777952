"""Turn simulator result CSVs into line plots.

The input contract is the simulator's result-row schema (one header line,
eleven named columns).  Each figure kind declares which column is the
x axis, which is the y axis, which column groups rows into series, and
which rows participate; values are averaged over seeds per (series, x)
point.  Output is deterministic: the same CSV bytes give the same image
bytes.
"""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

RESULT_COLUMNS = ("experiment", "seed", "snr_db", "alpha", "dol_th", "approach",
                  "sum_rate", "jain_index", "num_schedules", "num_clusters",
                  "elapsed_ms")

KINDS = ("rate", "fairness", "precoders", "threshold")


class SchemaError(ValueError):
    """The CSV header does not match the result-row schema."""


@dataclass
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    series_column: str = None   # defaults to the kind's grouping column

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("kind must be one of %s" % (KINDS,))
        if self.series_column is None:
            self.series_column = _KIND_TABLE[self.kind][2]
        elif self.series_column not in RESULT_COLUMNS:
            raise ValueError("series_column %r is not a result column"
                             % (self.series_column,))


# kind -> (x column, y column, default series column, x label, y label)
_KIND_TABLE = {
    "rate": ("snr_db", "sum_rate", "experiment",
             "SNR (dB)", "sum rate (bits/s/Hz)"),
    "fairness": ("snr_db", "jain_index", "experiment",
                 "SNR (dB)", "Jain fairness index"),
    "precoders": ("snr_db", "sum_rate", "experiment",
                  "SNR (dB)", "sum rate (bits/s/Hz)"),
    "threshold": ("dol_th", "sum_rate", "snr_db",
                  "clustering threshold", "sum rate (bits/s/Hz)"),
}


def read_rows(csv_path):
    """Parse a result CSV, validating the header against the schema."""
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty CSV: %s" % csv_path) from None
        if tuple(header) != RESULT_COLUMNS:
            missing = [c for c in RESULT_COLUMNS if c not in header]
            extra = [c for c in header if c not in RESULT_COLUMNS]
            raise SchemaError(
                "CSV schema mismatch: missing columns %s, unexpected columns %s"
                % (missing or "none", extra or "none"))
        rows = []
        for record in reader:
            if not record:
                continue
            rows.append(dict(zip(RESULT_COLUMNS, record)))
    return rows


def _keep(row, kind):
    experiment = row["experiment"]
    if kind in ("precoders", "threshold"):
        return experiment.endswith(":best")
    return experiment.endswith(":best") or experiment.endswith(":noscheduling")


def collect_series(rows, kind, series_column=None):
    """Group rows into plottable series: {series label: [(x, y), ...]},
    y averaged over seeds, x ascending."""
    x_col, y_col, default_series, _, _ = _KIND_TABLE[kind]
    series_col = series_column or default_series
    kept = [r for r in rows if _keep(r, kind)]
    if not kept:          # plain CSVs without tagged rows: plot everything
        kept = rows
    buckets = {}
    for row in kept:
        key = (row[series_col], float(row[x_col]))
        buckets.setdefault(key, []).append(float(row[y_col]))
    series = {}
    for (label, x), ys in sorted(buckets.items()):
        series.setdefault(str(label), []).append((x, sum(ys) / len(ys)))
    return series


def render(spec):
    """Render one figure; returns the output path."""
    rows = read_rows(spec.csv_path)
    series = collect_series(rows, spec.kind, spec.series_column)
    x_col, _, _, x_label, y_label = _KIND_TABLE[spec.kind]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, points in series.items():
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        name = ("SNR %s dB" % label) if spec.series_column == "snr_db" else label
        ax.plot(xs, ys, marker="o", label=name)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.out_path, format="png", dpi=120,
                metadata={"Software": None})
    plt.close(fig)
    return spec.out_path

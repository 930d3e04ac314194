"""Calibration CSV reports.

Layout::

    # schema=1
    method,geometry,d,K,n_steps,n_collected,ks_stat,p_value,stuck_count,mean_evals_per_iter,accepted,seed,wall_seconds
    cube-slice,shell2,2,200,1,2499,0.0123,0.41,0,4.9,true,0,
    ...
    # summary method=cube-slice k=4 min_efficiency_d_percent=5.97

Floats are written with ``repr`` so files are locale independent and
byte-identical for identical inputs.  ``wall_seconds`` is empty unless
timing was requested.
"""

import csv
import io

from .calibration import CalibrationRow, summarize_scaling

__all__ = ["SCHEMA", "HEADER", "ReportError", "format_rows", "write_csv", "read_csv",
           "summary_line"]

SCHEMA = "1"
HEADER = CalibrationRow.FIELDS


class ReportError(ValueError):
    """Malformed report file; ``line`` is the 1-based line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_line(summary):
    eff = summary.min_efficiency_d_percent
    return (f"# summary method={summary.method} k={summary.k_label} "
            f"min_efficiency_d_percent={'--' if eff is None else repr(round(eff, 6))}")


def format_rows(rows_by_method):
    """Render ``{method: rows}`` as the CSV text."""
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for rows in rows_by_method.values():
        for r in rows:
            writer.writerow([_fmt(getattr(r, f)) for f in HEADER])
    for method, rows in rows_by_method.items():
        if rows:
            buf.write(summary_line(summarize_scaling(rows, method)) + "\n")
    return buf.getvalue()


def write_csv(rows_by_method, path):
    text = format_rows(rows_by_method)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


_CONVERTERS = {
    "method": str, "geometry": str, "d": int, "K": int, "n_steps": int, "n_collected": int,
    "ks_stat": float, "p_value": float, "stuck_count": int, "mean_evals_per_iter": float,
    "seed": int,
}


def _parse_bool(s):
    if s == "true":
        return True
    if s == "false":
        return False
    raise ValueError(f"expected true/false, got {s!r}")


def read_csv(path):
    """Read a calibration CSV back into ``{method: rows}`` (summary lines are recomputed)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ReportError("empty file", 1)
    if lines[0].strip() != f"# schema={SCHEMA}":
        raise ReportError(f"expected '# schema={SCHEMA}' header", 1)
    if len(lines) < 2 or tuple(lines[1].split(",")) != HEADER:
        raise ReportError("missing or unexpected column header", 2)
    out = {}
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip() or line.startswith("#"):
            continue
        fields = next(csv.reader([line]))
        if len(fields) != len(HEADER):
            raise ReportError(f"expected {len(HEADER)} fields, got {len(fields)}", lineno)
        values = dict(zip(HEADER, fields))
        try:
            kwargs = {k: conv(values[k]) for k, conv in _CONVERTERS.items()}
            kwargs["accepted"] = _parse_bool(values["accepted"])
            kwargs["wall_seconds"] = float(values["wall_seconds"]) if values["wall_seconds"] else None
        except ValueError as exc:
            raise ReportError(str(exc), lineno) from None
        row = CalibrationRow(**kwargs)
        out.setdefault(row.method, []).append(row)
    if not out:
        raise ReportError("no data rows", len(lines))
    return out

"""CSV ingestion and rolling-window risk reports.

Input files carry one dated observation per line under a ``date,value``
header.  Interpretation of ``value`` depends on the mode: losses are taken
as-is, returns are negated (a gain is a negative loss), and prices become
negated log-returns attached to the later date.  Reports rebuild the
empirical loss model on each trailing window; numbers are printed with 12
significant digits so identical inputs give byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date as _date

from .adjusted import adjusted_es
from .errors import BadInput, NonMonotoneDates, ParseError, WindowTooLong
from .profiles import h_function
from .quantiles import empirical_from_samples

MODES = ("losses", "returns", "prices")

REPORT_HEADER = "date,var_p1,es_p1,adj_es,argmax_p"


def format_number(x) -> str:
    """Report number format: 12 significant digits, no negative zero."""
    out = "%.12g" % float(x)
    return "0" if out == "-0" else out


@dataclass(frozen=True)
class LossSeries:
    """Dated losses in observation order (dates strictly increasing)."""

    dates: tuple
    values: tuple


@dataclass(frozen=True)
class ReportRow:
    date: str
    var_p1: float
    es_p1: float
    adj_es: float
    argmax_p: float


def ingest_text(text: str, mode: str = "losses") -> LossSeries:
    """Parse a ``date,value`` CSV into a loss series.

    Dates are ISO calendar dates and must strictly increase.  Mode
    ``returns`` negates values; ``prices`` needs two or more positive rows
    and emits one loss per consecutive pair.  Malformed rows abort with the
    offending line number; nothing is imputed.
    """
    if mode not in MODES:
        raise BadInput(f"mode: must be one of {', '.join(MODES)}")
    lines = text.splitlines()
    first = 0
    while first < len(lines) and not lines[first].strip():
        first += 1
    if first == len(lines):
        raise ParseError("empty input; expected header 'date,value'")
    if lines[first].strip() != "date,value":
        raise ParseError("expected header 'date,value'", line=first + 1)
    dates: list = []
    values: list = []
    linenos: list = []
    prev = None
    for k in range(first + 1, len(lines)):
        row = lines[k].strip()
        if not row:
            continue
        fields = row.split(",")
        if len(fields) != 2:
            raise ParseError(f"expected 2 comma-separated fields, got {len(fields)}", line=k + 1)
        text_date, text_value = fields[0].strip(), fields[1].strip()
        try:
            parsed = _date.fromisoformat(text_date)
        except ValueError:
            raise ParseError(f"bad date {text_date!r}", line=k + 1) from None
        try:
            value = float(text_value)
        except ValueError:
            raise ParseError(f"bad number {text_value!r}", line=k + 1) from None
        if not math.isfinite(value):
            raise ParseError(f"value must be finite, got {text_value!r}", line=k + 1)
        if prev is not None and parsed <= prev:
            raise NonMonotoneDates(
                f"line {k + 1}: date {text_date} does not increase over the previous row"
            )
        prev = parsed
        dates.append(text_date)
        values.append(value)
        linenos.append(k + 1)
    if not values:
        raise ParseError("no data rows after the header")
    if mode == "losses":
        return LossSeries(tuple(dates), tuple(values))
    if mode == "returns":
        return LossSeries(tuple(dates), tuple(-v for v in values))
    if len(values) < 2:
        raise ParseError("prices mode needs at least two rows")
    for v, ln in zip(values, linenos):
        if v <= 0.0:
            raise ParseError(f"price must be positive, got {v!r}", line=ln)
    losses = tuple(math.log(a / b) for a, b in zip(values, values[1:]))
    return LossSeries(tuple(dates[1:]), losses)


def ingest(path, mode: str = "losses") -> LossSeries:
    """Read and parse a CSV file; see :func:`ingest_text`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return ingest_text(text, mode)


def reference_level(profile) -> float:
    """First breakpoint of the profile (1.0 when there is none): the level
    whose plain quantile and shortfall are reported beside the adjusted
    figure."""
    grid = h_function(profile).grid
    return grid[1] if len(grid) > 1 else 1.0


def rolling_report(series: LossSeries, profile, *, window, smooth=0, atoms=None) -> list:
    """Trailing-window empirical risk table.

    Row t (one per date from the ``window``-th on) reports the quantile and
    shortfall at the profile's first breakpoint plus the adjusted shortfall
    and its maximizing level, all from the empirical model of the window
    ending at t.  ``smooth`` > 1 replaces the three risk columns with
    trailing means over that many rows (fewer while warming up); the
    maximizing level stays raw.
    """
    if isinstance(window, bool) or not isinstance(window, int) or window < 2:
        raise BadInput("window: must be an integer >= 2")
    if isinstance(smooth, bool) or not isinstance(smooth, int) or smooth < 0:
        raise BadInput("smooth: must be a nonnegative integer")
    n = len(series.values)
    if window > n:
        raise WindowTooLong(f"window {window} exceeds the {n} available observations")
    if smooth > n:
        raise WindowTooLong(f"smoothing span {smooth} exceeds the {n} available observations")
    p1 = reference_level(profile)
    raw: list = []
    for i in range(n - window + 1):
        dist = empirical_from_samples(series.values[i : i + window])
        res = adjusted_es(dist, profile, atoms=atoms)
        raw.append(
            ReportRow(
                series.dates[i + window - 1],
                dist.var(p1),
                dist.es(p1),
                res.value,
                res.argmax_p,
            )
        )
    if smooth <= 1:
        return raw
    rows: list = []
    for j, row in enumerate(raw):
        lo = max(0, j - smooth + 1)
        span = j - lo + 1
        rows.append(
            ReportRow(
                row.date,
                sum(r.var_p1 for r in raw[lo : j + 1]) / span,
                sum(r.es_p1 for r in raw[lo : j + 1]) / span,
                sum(r.adj_es for r in raw[lo : j + 1]) / span,
                row.argmax_p,
            )
        )
    return rows


def render_report(rows) -> str:
    """Rows to CSV text, trailing newline included."""
    lines = [REPORT_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                (
                    r.date,
                    format_number(r.var_p1),
                    format_number(r.es_p1),
                    format_number(r.adj_es),
                    format_number(r.argmax_p),
                )
            )
        )
    return "\n".join(lines) + "\n"

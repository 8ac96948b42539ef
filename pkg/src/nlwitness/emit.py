"""Sweep serialization: CSV for analysis, JSON for archival, SVG for eyes.

The CSV carries the count-based estimates only; the JSON additionally
carries analytic values, oracle verdicts and tomography cross-checks.  The
SVG is generated directly (no plotting dependency) and draws the three
witness curves with one-sigma error bars over the analytic lines.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

from .errors import NumericalContractError
from .sweep import SweepPoint, SweepResult
from .witness import SingularVerdict

CSV_COLUMNS = (
    "phase",
    "w_L_plus",
    "w_L_plus_sigma",
    "w_L_minus",
    "w_L_minus_sigma",
    "w_inf",
    "w_inf_sigma",
    "u",
    "negativity",
    "singular",
)

FORMATS = ("csv", "json", "svg")

_CURVE_COLORS = ("#1f77b4", "#d62728", "#2ca02c")

__all__ = ["CSV_COLUMNS", "FORMATS", "csv_text", "json_text", "svg_text", "emit"]


def _cell(value: float) -> str:
    if not math.isfinite(value):
        raise NumericalContractError(f"non-finite value {value!r} in CSV output")
    return repr(value)


def _csv_row(point: SweepPoint) -> list[str]:
    if isinstance(point.est_w_inf, SingularVerdict):
        w_inf = w_inf_sigma = ""
    else:
        w_inf = _cell(point.est_w_inf.value)
        w_inf_sigma = _cell(point.est_w_inf.sigma)
    return [
        _cell(point.phase),
        _cell(point.est_w_l_plus.value),
        _cell(point.est_w_l_plus.sigma),
        _cell(point.est_w_l_minus.value),
        _cell(point.est_w_l_minus.sigma),
        w_inf,
        w_inf_sigma,
        _cell(point.est_u.value),
        _cell(point.negativity),
        "true" if point.singular else "false",
    ]


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for point in result.points:
        writer.writerow(_csv_row(point))
    return buf.getvalue()


def json_text(result: SweepResult) -> str:
    try:
        return json.dumps(result.to_json_dict(), indent=2, allow_nan=False) + "\n"
    except ValueError as exc:
        raise NumericalContractError(f"non-finite value in JSON output: {exc}") from exc


# SVG layout constants: canvas size and plot-area margins in pixels.
_W, _H = 720, 460
_ML, _MR, _MT, _MB = 70.0, 20.0, 20.0, 50.0

_X_TICKS = (
    (0.0, "0"),
    (math.pi / 2, "π/2"),
    (math.pi, "π"),
    (3 * math.pi / 2, "3π/2"),
    (2 * math.pi, "2π"),
)


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _curves(result: SweepResult):
    """Per curve: (label, analytic pairs, estimate triples (phase, value, sigma))."""
    assert result.config.witnesses is not None
    labels = result.config.witnesses
    analytic = ([], [], [])
    estimates = ([], [], [])
    for p in result.points:
        analytic[0].append((p.phase, p.analytic_w_l_plus))
        analytic[1].append((p.phase, p.analytic_w_l_minus))
        if p.analytic_w_inf is not None:
            analytic[2].append((p.phase, p.analytic_w_inf))
        estimates[0].append((p.phase, p.est_w_l_plus.value, p.est_w_l_plus.sigma))
        estimates[1].append((p.phase, p.est_w_l_minus.value, p.est_w_l_minus.sigma))
        if not isinstance(p.est_w_inf, SingularVerdict):
            estimates[2].append((p.phase, p.est_w_inf.value, p.est_w_inf.sigma))
    order = (labels[1], labels[2], labels[0])
    return [
        (order[i], analytic[i], estimates[i], _CURVE_COLORS[i]) for i in range(3)
    ]


def svg_text(result: SweepResult) -> str:
    curves = _curves(result)
    values = [0.0]
    for _, analytic, estimates, _ in curves:
        values.extend(v for _, v in analytic)
        for _, v, s in estimates:
            values.extend((v - s, v + s))
    for v in values:
        if not math.isfinite(v):
            raise NumericalContractError(f"non-finite value {v!r} in SVG output")
    lo, hi = min(values), max(values)
    pad = 0.05 * (hi - lo) if hi > lo else 0.1
    lo, hi = lo - pad, hi + pad

    def x_px(phase: float) -> float:
        return _ML + phase / (2.0 * math.pi) * (_W - _ML - _MR)

    def y_px(v: float) -> float:
        return _MT + (hi - v) / (hi - lo) * (_H - _MT - _MB)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
    ]

    axis = 'stroke="#333333" stroke-width="1"'
    x0, x1 = _fmt(x_px(0.0)), _fmt(x_px(2.0 * math.pi))
    y_bot, y_top = _fmt(_H - _MB), _fmt(_MT)
    parts.append(f'<line x1="{x0}" y1="{y_bot}" x2="{x1}" y2="{y_bot}" {axis}/>')
    parts.append(f'<line x1="{x0}" y1="{y_bot}" x2="{x0}" y2="{y_top}" {axis}/>')
    for phase, label in _X_TICKS:
        x = _fmt(x_px(phase))
        parts.append(
            f'<line x1="{x}" y1="{_fmt(_H - _MB)}" x2="{x}" y2="{_fmt(_H - _MB + 5)}" {axis}/>'
        )
        parts.append(
            f'<text x="{x}" y="{_fmt(_H - _MB + 20)}" text-anchor="middle" '
            f'font-size="13" fill="#333333">{label}</text>'
        )
    for k in range(5):
        v = lo + k * (hi - lo) / 4.0
        y = _fmt(y_px(v))
        parts.append(f'<line x1="{_fmt(_ML - 5)}" y1="{y}" x2="{x0}" y2="{y}" {axis}/>')
        parts.append(
            f'<text x="{_fmt(_ML - 9)}" y="{y}" text-anchor="end" dominant-baseline="middle" '
            f'font-size="12" fill="#333333">{format(v, ".3g")}</text>'
        )
    parts.append(
        f'<text x="{_fmt((_ML + _W - _MR) / 2)}" y="{_fmt(_H - 12)}" text-anchor="middle" '
        'font-size="14" fill="#333333">phase (rad)</text>'
    )

    if lo < 0.0 < hi:
        y = _fmt(y_px(0.0))
        parts.append(
            f'<line class="zero-line" x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" '
            'stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>'
        )

    for label, analytic, estimates, color in curves:
        d = " ".join(
            f'{"M" if i == 0 else "L"} {_fmt(x_px(ph))} {_fmt(y_px(v))}'
            for i, (ph, v) in enumerate(analytic)
        )
        parts.append(
            f'<path class="curve-analytic" d="{d}" fill="none" stroke="{color}" '
            'stroke-width="1.5" opacity="0.6"/>'
        )
        series = [f'<g class="series" fill="{color}" stroke="{color}">']
        for ph, v, s in estimates:
            x = _fmt(x_px(ph))
            series.append(
                f'<line x1="{x}" y1="{_fmt(y_px(v - s))}" x2="{x}" '
                f'y2="{_fmt(y_px(v + s))}" stroke-width="1.5"/>'
            )
            series.append(f'<circle cx="{x}" cy="{_fmt(y_px(v))}" r="3"/>')
        series.append("</g>")
        parts.append("".join(series))

    legend_x = _W - _MR - 150
    for i, (label, _, _, color) in enumerate(curves):
        y = _MT + 16 + 18 * i
        parts.append(
            f'<rect x="{_fmt(legend_x)}" y="{_fmt(y - 9)}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(legend_x + 18)}" y="{_fmt(y + 1)}" font-size="13" '
            f'fill="#333333">{label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit(result: SweepResult, fmt: str, path: str) -> None:
    """Write a sweep in one of the FORMATS; path ``-`` means stdout."""
    if fmt == "csv":
        text = csv_text(result)
    elif fmt == "json":
        text = json_text(result)
    elif fmt == "svg":
        text = svg_text(result)
    else:
        raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")

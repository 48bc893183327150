"""CSV/JSON/SVG emitters and matching readers."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .power import PowerCurve

CURVE_HEADER = ("norm", "power", "stderr")


def fmt(x: float) -> str:
    """Six significant digits, as used in every emitted CSV."""
    return f"{float(x):.6g}"


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, np.integer)) else fmt(v) for v in row])
    return buf.getvalue()


def curve_csv(curve: PowerCurve) -> str:
    return csv_text(CURVE_HEADER, zip(curve.norms, curve.powers, curve.stderrs))


def widths_csv(d) -> str:
    return csv_text(("k", "d_k"), ((int(k), v) for k, v in enumerate(d)))


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Parse an emitted CSV back into its header and a float array of rows."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float)
    return header, data.reshape(len(body), len(header))


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def curve_svg(curves: Sequence[PowerCurve], title: str, x_max: float, labels=None) -> str:
    """Minimal SVG line chart: power against norm, one polyline per curve."""
    W, H, L, R, T, B = 480, 360, 60, 20, 40, 50
    pw, ph = W - L - R, H - T - B
    sx = lambda x: L + pw * (x / x_max if x_max > 0 else 0.0)
    sy = lambda y: T + ph * (1.0 - y)
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="13">{_esc(title)}</text>',
        f'<line x1="{L}" y1="{T + ph}" x2="{L + pw}" y2="{T + ph}" stroke="black"/>',
        f'<line x1="{L}" y1="{T}" x2="{L}" y2="{T + ph}" stroke="black"/>',
    ]
    for i in range(6):
        xv = x_max * i / 5
        yv = i / 5
        out.append(f'<line x1="{sx(xv):.1f}" y1="{T + ph}" x2="{sx(xv):.1f}" y2="{T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(xv):.1f}" y="{T + ph + 18}" text-anchor="middle" font-size="10">{xv:.2g}</text>')
        out.append(f'<line x1="{L - 5}" y1="{sy(yv):.1f}" x2="{L}" y2="{sy(yv):.1f}" stroke="black"/>')
        out.append(f'<text x="{L - 8}" y="{sy(yv) + 3:.1f}" text-anchor="end" font-size="10">{yv:.1f}</text>')
    out.append(f'<text x="{L + pw / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="11">||mu||_2</text>')
    out.append(
        f'<text x="15" y="{T + ph / 2:.1f}" text-anchor="middle" font-size="11" '
        f'transform="rotate(-90 15 {T + ph / 2:.1f})">power</text>'
    )
    for j, c in enumerate(curves):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(c.norms, c.powers))
        color = colors[j % len(colors)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if labels:
            out.append(
                f'<text x="{L + 10}" y="{T + 14 + 14 * j}" font-size="10" fill="{color}">{_esc(labels[j])}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def read_vector(path) -> np.ndarray:
    """Whitespace- or newline-separated reals."""
    text = Path(path).read_text()
    try:
        return np.array([float(tok) for tok in text.split()], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None

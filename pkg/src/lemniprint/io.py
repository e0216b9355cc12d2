"""File formats: polynomial/Blaschke JSON, diffeo and curve CSV, SVG plots."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .blaschke import TWO_PI, BlaschkeProduct, CircleDiffeo
from .conformal import JordanCurveSamples
from .polynomial import ComplexPolynomial


class InputError(ValueError):
    """Malformed input file."""


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex(v, what: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise InputError(f"{what}: expected [re, im], got {v!r}")


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def _dump_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def polynomial_to_dict(p: ComplexPolynomial) -> dict:
    return {"degree": p.degree, "coeffs": [_pair(c) for c in p.coeffs]}


def polynomial_from_dict(data: dict, where: str = "polynomial") -> ComplexPolynomial:
    coeffs = data.get("coeffs")
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError(f"{where}: 'coeffs' must be a nonempty list")
    c = [_complex(v, f"{where} coeffs[{i}]") for i, v in enumerate(coeffs)]
    if "degree" in data and data["degree"] != len(c) - 1:
        raise InputError(f"{where}: degree {data['degree']} does not match {len(c)} coefficients")
    if c[-1] == 0:
        raise InputError(f"{where}: leading coefficient is zero")
    return ComplexPolynomial(c)


def read_polynomial(path) -> ComplexPolynomial:
    return polynomial_from_dict(_load_json(path), str(path))


def write_polynomial(path, p: ComplexPolynomial) -> None:
    _dump_json(path, polynomial_to_dict(p))


def blaschke_to_dict(B: BlaschkeProduct) -> dict:
    return {"lambda": _pair(B.lam), "zeros": [_pair(a) for a in B.zeros]}


def blaschke_from_dict(data: dict, where: str = "blaschke") -> BlaschkeProduct:
    if "lambda" not in data or "zeros" not in data:
        raise InputError(f"{where}: need 'lambda' and 'zeros'")
    lam = _complex(data["lambda"], f"{where} lambda")
    if not isinstance(data["zeros"], list):
        raise InputError(f"{where}: 'zeros' must be a list")
    zeros = [_complex(v, f"{where} zeros[{i}]") for i, v in enumerate(data["zeros"])]
    try:
        return BlaschkeProduct(lam, zeros)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def read_blaschke(path) -> BlaschkeProduct:
    return blaschke_from_dict(_load_json(path), str(path))


def write_blaschke(path, B: BlaschkeProduct, extra: dict | None = None) -> None:
    data = blaschke_to_dict(B)
    if extra:
        data.update(extra)
    _dump_json(path, data)


def read_json(path) -> dict:
    return _load_json(path)


def write_json(path, data: dict) -> None:
    _dump_json(path, data)


def _read_csv(path, header: list[str]) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != header:
        raise InputError(f"{path}: expected header {','.join(header)}")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(header) or data.shape[0] == 0:
        raise InputError(f"{path}: expected rows of {len(header)} numbers")
    if not np.all(np.isfinite(data)):
        raise InputError(f"{path}: non-finite value")
    return data


def _write_csv(path, header: list[str], columns) -> None:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join("%.17g" % v for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_diffeo(path, k: CircleDiffeo) -> None:
    _write_csv(path, ["theta", "lift", "derivative"], [k.theta, k.lift, k.derivative])


def read_diffeo(path) -> CircleDiffeo:
    data = _read_csv(path, ["theta", "lift", "derivative"])
    M = data.shape[0]
    if np.max(np.abs(data[:, 0] - TWO_PI * np.arange(M) / M)) > 1e-9:
        raise InputError(f"{path}: theta must be the uniform grid 2 pi j / M")
    try:
        return CircleDiffeo(data[:, 1], data[:, 2])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_curve(path, curve) -> None:
    pts = np.asarray(getattr(curve, "points", curve), dtype=complex)
    _write_csv(path, ["x", "y"], [pts.real, pts.imag])


def read_curve_points(path) -> np.ndarray:
    data = _read_csv(path, ["x", "y"])
    return data[:, 0] + 1j * data[:, 1]


def read_curve(path) -> JordanCurveSamples:
    try:
        return JordanCurveSamples(read_curve_points(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _svg(polylines: list[tuple[np.ndarray, bool, str]]) -> str:
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1" width="512" height="512">',
    ]
    for pts, closed, color in polylines:
        if closed:
            pts = np.append(pts, pts[:1])
        coords = " ".join("%.6f,%.6f" % (p.real, p.imag) for p in pts)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="0.004"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curve_svg(curve, margin: float = 0.05) -> str:
    """Closed polyline scaled into the unit square (y axis pointing up)."""
    pts = np.asarray(getattr(curve, "points", curve), dtype=complex)
    lo_x, hi_x = pts.real.min(), pts.real.max()
    lo_y, hi_y = pts.imag.min(), pts.imag.max()
    span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
    scale = (1 - 2 * margin) / span
    x = margin + (pts.real - lo_x) * scale + 0.5 * (1 - 2 * margin - (hi_x - lo_x) * scale)
    y = margin + (hi_y - pts.imag) * scale + 0.5 * (1 - 2 * margin - (hi_y - lo_y) * scale)
    return _svg([(x + 1j * y, True, "black")])


def diffeo_svg(k: CircleDiffeo) -> str:
    """Graph of (lift - lift(0)) / 2 pi against theta / 2 pi, with the diagonal for reference."""
    x = np.append(k.theta, TWO_PI) / TWO_PI
    y = (np.append(k.lift, k.lift[0] + TWO_PI) - k.lift[0]) / TWO_PI
    graph = x + 1j * (1 - y)
    diag = np.array([0 + 1j, 1 + 0j])
    return _svg([(diag, False, "gray"), (graph, False, "black")])


def emit_plot(data, path) -> list[Path]:
    """Write CSV and SVG for a curve or a diffeo; ``path`` names the CSV file."""
    path = Path(path)
    svg = path.with_suffix(".svg")
    if isinstance(data, CircleDiffeo):
        write_diffeo(path, data)
        svg.write_text(diffeo_svg(data))
    else:
        write_curve(path, data)
        svg.write_text(curve_svg(data))
    return [path, svg]


def finite(x: float) -> float | None:
    """JSON-safe float (infinities become null)."""
    return float(x) if math.isfinite(x) else None

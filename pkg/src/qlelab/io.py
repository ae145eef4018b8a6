"""File formats and deterministic report emission.

All numeric output uses 17 significant digits ('.17g'), '.' decimals and LF
line endings, so identical inputs produce byte-identical files.  Writes are
atomic (temp file + rename).

Surface file:   {"band_limit": L, "X": {"kind": ...}} or
                {"band_limit": L, "X_coeffs": [[...], [...], [...]]}
Metric file:    {"band_limit": L, "h": {"theta_theta": [...],
                 "theta_phi": [...], "phi_phi": [...]}} or
                {"band_limit": L, "surface": {...X spec...}}
Data config:    {"family": "schwarzschild"|"composite"|"flat",
                 "mass": m, "momentum": [p1, p2, p3]}

Coefficient lists use the real spherical-harmonic ordering with l ascending
and m from -l to l (flat index l^2 + l + m).
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .sphere import InducedMetric, SphereGrid, make_grid
from .surfaces import EmbeddedSurface, surface_from_spec, surface_geometry


def fmt(x) -> str:
    """Canonical 17-significant-digit representation of a float."""
    return format(float(x), ".17g")


def atomic_write_text(path: str, text: str):
    """Write text to path atomically (temp file in the same directory)."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qlelab-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _canonical(obj):
    """Recursively map floats/arrays to canonical string-formatted floats."""
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_canonical(v) for v in obj.tolist()]
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return None          # keep the JSON strict
        return float(fmt(obj))
    if isinstance(obj, (int, np.integer, str, bool)) or obj is None:
        return obj
    raise InvalidArgumentError(f"cannot serialize object of type {type(obj)!r}")


def write_json(path: str, payload: dict):
    atomic_write_text(path, json.dumps(_canonical(payload), indent=2) + "\n")


def write_csv(path: str, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else fmt(cell)
                              for cell in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON file {path!r}: {exc}") from exc


def _require_keys(obj: dict, allowed, what: str):
    extra = set(obj) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {what}: {sorted(extra)}")


def surface_from_file(payload: dict, grid: SphereGrid | None = None):
    """Build (grid, EmbeddedSurface) from a parsed surface file."""
    _require_keys(payload, {"band_limit", "X", "X_coeffs"}, "surface file")
    if grid is None:
        grid = make_grid(int(payload.get("band_limit", 24)))
    if ("X" in payload) == ("X_coeffs" in payload):
        raise ConfigError("surface file needs exactly one of 'X', 'X_coeffs'")
    if "X" in payload:
        try:
            return grid, surface_from_spec(grid, payload["X"])
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
    coeffs = np.asarray(payload["X_coeffs"], dtype=float)
    if coeffs.shape != (3, grid.n_coef):
        raise ConfigError(
            f"X_coeffs must be 3 lists of {grid.n_coef} coefficients")
    return grid, surface_geometry(grid, coeffs=coeffs.T)


def surface_payload(surface: EmbeddedSurface) -> dict:
    return {
        "band_limit": surface.grid.band_limit,
        "X_coeffs": [surface.coeffs[:, j] for j in range(3)],
    }


def metric_from_file(payload: dict, grid: SphereGrid | None = None):
    """Build (grid, InducedMetric) from a parsed metric file."""
    _require_keys(payload, {"band_limit", "h", "surface"}, "metric file")
    if grid is None:
        grid = make_grid(int(payload.get("band_limit", 24)))
    if ("h" in payload) == ("surface" in payload):
        raise ConfigError("metric file needs exactly one of 'h', 'surface'")
    if "surface" in payload:
        try:
            return grid, surface_from_spec(grid, payload["surface"]).metric
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from exc
    h = payload["h"]
    _require_keys(h, {"theta_theta", "theta_phi", "phi_phi"}, "metric components")
    comps = []
    for key in ("theta_theta", "theta_phi", "phi_phi"):
        if key not in h:
            raise ConfigError(f"metric file is missing component {key!r}")
        c = np.asarray(h[key], dtype=float)
        if c.size > grid.n_coef:
            raise ConfigError(f"component {key!r} exceeds the band limit")
        full = np.zeros(grid.n_coef)
        full[: c.size] = c
        comps.append(grid.synthesis(full))
    return grid, InducedMetric(grid, comps[0], comps[1], comps[2])


def metric_payload(h: InducedMetric) -> dict:
    g = h.grid
    return {
        "band_limit": g.band_limit,
        "h": {
            "theta_theta": g.truncate(g.analysis(h.tt)),
            "theta_phi": g.truncate(g.analysis(h.tp)),
            "phi_phi": g.truncate(g.analysis(h.pp)),
        },
    }


def parse_radii(text: str):
    """Parse '25,50,100' or 'start:end:geometric' into an ascending list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or parts[2] != "geometric":
            raise ConfigError("radius range must be 'start:end:geometric'")
        try:
            start, end = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise ConfigError(f"bad radius range {text!r}") from exc
        if not (0 < start <= end):
            raise ConfigError("radius range needs 0 < start <= end")
        radii = [start]
        while radii[-1] * 2.0 <= end * (1 + 1e-12):
            radii.append(radii[-1] * 2.0)
        return radii
    try:
        radii = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad radius list {text!r}") from exc
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ConfigError("radii must be a nonempty ascending list")
    return radii


def parse_vector(text: str) -> np.ndarray:
    try:
        vec = np.asarray([float(tok) for tok in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"bad vector {text!r}") from exc
    if vec.shape != (3,):
        raise ConfigError(f"expected three comma-separated numbers, got {text!r}")
    return vec

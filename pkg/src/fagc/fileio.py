"""CSV formats and the per-run manifest.

Formats (UTF-8, comma-separated, floats at 17 significant digits so values
round-trip bit-exactly):

  feature CSV    header ``label,f1,...,fn``; one raw feature per row
  pre-shape CSV  header ``label,c1,...,c2n[,source]``; source is real|augmented
  curve CSV      first line ``# fagc-curves v1`` (schema version), then
                 ``label,theta,residual,v1..v2n,w1..w2n``, one row per label

Structural problems raise InputFormatError with the offending file line;
rows that parse but violate domain invariants raise the domain error.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .augment import Category, LabeledDataset
from .errors import InputFormatError, NotUnitNorm
from .geodesic import FitReport, GeodesicCurve, curve_between
from .preshape import NORM_TOL

CURVE_SCHEMA = "# fagc-curves v1"


def fmt(x: float) -> str:
    """17 significant digits: enough for exact float64 round-trips."""
    return f"{float(x):.17g}"


def write_feature_csv(path, rows: list[tuple[str, np.ndarray]]) -> None:
    rows = [(label, np.asarray(vec, dtype=float)) for label, vec in rows]
    if not rows:
        raise ValueError("refusing to write an empty feature CSV")
    n = rows[0][1].size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"f{i + 1}" for i in range(n)])
        for label, vec in rows:
            writer.writerow([label] + [fmt(v) for v in vec])


def read_feature_csv(path) -> list[tuple[str, np.ndarray]]:
    header, data = _read_rows(path, min_cols=3)
    if header[0] != "label":
        raise InputFormatError(f"{path}: first header column must be 'label', got {header[0]!r}")
    width = len(header)
    out = []
    for line_no, row in data:
        if len(row) != width:
            raise InputFormatError(
                f"{path} line {line_no}: expected {width} cells, got {len(row)}"
            )
        out.append((row[0], _floats(path, line_no, row[1:])))
    return out


def write_preshape_csv(path, rows: list[tuple[str, np.ndarray, str]]) -> None:
    """Rows are (label, coords, source) with source real|augmented."""
    if not rows:
        raise ValueError("refusing to write an empty pre-shape CSV")
    dim = np.asarray(rows[0][1]).size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"c{i + 1}" for i in range(dim)] + ["source"])
        for label, vec, source in rows:
            writer.writerow([label] + [fmt(v) for v in np.asarray(vec)] + [source])


def read_preshape_csv(path) -> LabeledDataset:
    """Group a pre-shape CSV into a dataset, preserving first-appearance label order."""
    header, data = _read_rows(path, min_cols=5)
    if header[0] != "label":
        raise InputFormatError(f"{path}: first header column must be 'label', got {header[0]!r}")
    has_source = header[-1] == "source"
    ncoords = len(header) - 1 - int(has_source)
    if ncoords < 4 or ncoords % 2:
        raise InputFormatError(
            f"{path}: pre-shape files need an even coordinate count >= 4, got {ncoords}"
        )
    members: dict[str, list[np.ndarray]] = {}
    provenance: dict[str, list[str]] = {}
    for line_no, row in data:
        if len(row) != len(header):
            raise InputFormatError(
                f"{path} line {line_no}: expected {len(header)} cells, got {len(row)}"
            )
        label = row[0]
        coords = _floats(path, line_no, row[1 : 1 + ncoords])
        norm = float(np.linalg.norm(coords))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotUnitNorm(
                f"{path} line {line_no} (label {label!r}): norm {norm!r} is not 1 within {NORM_TOL}"
            )
        source = row[-1] if has_source else "real"
        if source not in ("real", "augmented"):
            raise InputFormatError(
                f"{path} line {line_no}: source must be real|augmented, got {source!r}"
            )
        members.setdefault(label, []).append(coords)
        provenance.setdefault(label, []).append(source)
    return LabeledDataset(
        [
            Category(label, np.array(members[label]), tuple(provenance[label]))
            for label in members
        ]
    )


def write_curves_csv(path, curves: dict[str, GeodesicCurve], residuals: dict[str, float]) -> None:
    if not curves:
        raise ValueError("refusing to write an empty curve file")
    dim = next(iter(curves.values())).v_star.size
    with open(path, "w", newline="") as fh:
        fh.write(CURVE_SCHEMA + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["label", "theta", "residual"]
            + [f"v{i + 1}" for i in range(dim)]
            + [f"w{i + 1}" for i in range(dim)]
        )
        for label in sorted(curves):
            c = curves[label]
            writer.writerow(
                [label, fmt(c.theta), fmt(residuals[label])]
                + [fmt(v) for v in c.v_star]
                + [fmt(w) for w in c.w_star]
            )


def read_curves_csv(path) -> dict[str, tuple[GeodesicCurve, float]]:
    """Curves keyed by label, each with its stored fit residual.

    Endpoints are revalidated: the curve is rebuilt from (v*, w*) and the
    stored theta must agree with the recomputed arc length within 1e-9.
    """
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CURVE_SCHEMA:
            raise InputFormatError(
                f"{path}: expected schema line {CURVE_SCHEMA!r}, got {first!r}"
            )
        reader = csv.reader(fh)
        rows = [(i, row) for i, row in enumerate(reader, start=2) if row]
    if not rows:
        raise InputFormatError(f"{path}: no header row")
    header = rows[0][1]
    ncols = len(header)
    if (ncols - 3) % 2 or ncols < 11:
        raise InputFormatError(f"{path}: malformed curve header ({ncols} columns)")
    dim = (ncols - 3) // 2
    out: dict[str, tuple[GeodesicCurve, float]] = {}
    for line_no, row in rows[1:]:
        if len(row) != ncols:
            raise InputFormatError(
                f"{path} line {line_no}: expected {ncols} cells, got {len(row)}"
            )
        label = row[0]
        if label in out:
            raise InputFormatError(f"{path} line {line_no}: duplicate label {label!r}")
        theta, residual = _floats(path, line_no, row[1:3])
        v = _floats(path, line_no, row[3 : 3 + dim])
        w = _floats(path, line_no, row[3 + dim :])
        curve = curve_between(v, w)
        if abs(curve.theta - theta) > NORM_TOL:
            raise InputFormatError(
                f"{path} line {line_no}: stored theta {theta!r} disagrees with "
                f"endpoints (recomputed {curve.theta!r})"
            )
        out[label] = (curve, float(residual))
    return out


@dataclass
class RunManifest:
    """Provenance record written next to every successful command's output."""

    tool_version: str
    command: str
    config: dict
    fit_reports: dict = field(default_factory=dict)
    input_digests: dict = field(default_factory=dict)
    output_digests: dict = field(default_factory=dict)
    duration_seconds: float = 0.0

    def write(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(output_path) -> Path:
    return Path(str(output_path) + ".manifest.json")


def report_summary(report: FitReport) -> dict:
    return {
        "iterations": report.iterations,
        "converged": report.converged,
        "best_residual": report.best_residual,
        "best_iteration": report.best_iteration,
    }


def _read_rows(path, min_cols: int):
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = [(i, row) for i, row in enumerate(reader, start=1) if row]
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputFormatError(f"{path}: empty file")
    header = rows[0][1]
    if len(header) < min_cols:
        raise InputFormatError(f"{path}: header has {len(header)} columns, need >= {min_cols}")
    data = rows[1:]
    if not data:
        raise InputFormatError(f"{path}: no data rows")
    return header, data


def _floats(path, line_no: int, cells: list[str]) -> np.ndarray:
    try:
        return np.array([float(c) for c in cells], dtype=float)
    except ValueError as exc:
        raise InputFormatError(f"{path} line {line_no}: non-numeric cell ({exc})") from exc

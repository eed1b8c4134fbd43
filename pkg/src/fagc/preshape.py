"""Projection into the pre-shape sphere and the two distances on it.

A raw n-dimensional feature vector is duplicated coordinate-wise into the
interleaved layout (x1, y1, ..., xn, yn) with y_i = x_i, centered per axis,
and scaled to unit norm. The result lives on the unit hypersphere of
centered configurations (the pre-shape sphere) and, by construction, in the
pair-equality subspace x_i = y_i, which is closed under linear combination.

Distances: ``geodesic_distance`` is the arc length arccos<v1, v2>;
``procrustes_distance`` treats consecutive coordinate pairs as complex
numbers and minimizes over planar rotation, arccos|sum v1_j * conj(v2_j)|.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateFeature, NonFinite, NotUnitNorm, OddDimension

# Validation tolerances. Fixed here, configurable nowhere else.
NORM_TOL = 1e-9
DEGENERATE_TOL = 1e-12


def project(raw) -> np.ndarray:
    """Project a raw feature vector onto the pre-shape sphere.

    Duplicates each entry into an (x_i, y_i) pair, removes the per-axis
    means, and normalizes to unit length. Deterministic; scale and
    translation of the input do not change the output.

    Raises:
        NonFinite: any entry is NaN or infinite.
        DegenerateFeature: the centered feature has norm <= 1e-12
            (constant features have no shape).
    """
    x = np.asarray(raw, dtype=float).ravel()
    if x.size and not np.all(np.isfinite(x)):
        raise NonFinite(f"raw feature contains non-finite entries: {x[~np.isfinite(x)][:4]}")
    centered = x - x.mean() if x.size else x
    # Interleave the duplicated copies: both axes carry the same centered values.
    v = np.repeat(centered, 2)
    norm = float(np.linalg.norm(v))
    if norm <= DEGENERATE_TOL:
        raise DegenerateFeature(
            f"feature of dimension {x.size} centers to norm {norm:.3e}; no pre-shape exists"
        )
    return v / norm


def validate_unit(v: np.ndarray, name: str = "vector") -> np.ndarray:
    """Return v as a float array, raising NotUnitNorm unless ||v|| = 1 within 1e-9."""
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotUnitNorm(f"{name} has norm {norm!r}, expected 1 within {NORM_TOL}")
    return v


def is_preshape(v: np.ndarray, tol: float = NORM_TOL) -> bool:
    """Check the pre-shape invariants: unit norm and zero mean on each axis."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 2 != 0 or not np.all(np.isfinite(v)):
        return False
    if abs(float(np.linalg.norm(v)) - 1.0) > tol:
        return False
    return abs(float(v[0::2].mean())) <= tol and abs(float(v[1::2].mean())) <= tol


def geodesic_distance(v1: np.ndarray, v2: np.ndarray) -> float:
    """Arc length between two unit vectors: the angle arccos<v1, v2>.

    Evaluated as 2*atan2(||v1 - v2||, ||v1 + v2||), which is the same angle
    but exact at both ends of the range: arccos of a rounded inner product
    loses ~1e-8 near coincident or antipodal inputs, which would break the
    d(v, v) = 0 identity at the 1e-9 tolerance the rest of the package
    relies on. Result is in [0, pi] and symmetric in the arguments.
    """
    v1 = validate_unit(v1, "v1")
    v2 = validate_unit(v2, "v2")
    if v1.shape != v2.shape:
        raise ValueError(f"dimension mismatch: {v1.shape} vs {v2.shape}")
    return 2.0 * float(np.arctan2(np.linalg.norm(v1 - v2), np.linalg.norm(v1 + v2)))


def procrustes_distance(v1: np.ndarray, v2: np.ndarray) -> float:
    """Rotation-minimized distance between two pre-shapes.

    Interprets the interleaved coordinates as n complex numbers
    x_j + i*y_j and returns the angle arccos|sum_j v1_j * conj(v2_j)|,
    i.e. the geodesic distance after rotating v2 by the optimal unit
    complex scalar. Invariant under planar rotation of either argument;
    result is in [0, pi/2] and never exceeds the geodesic distance.

    The angle is evaluated by actually aligning v2 (multiplying by the
    phase of the conjugate sum) and applying the stable atan2 form, so
    identical inputs give exactly 0.

    Raises:
        OddDimension: coordinate count is odd.
        NotUnitNorm: either input is off the unit sphere.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.size % 2 or v2.size % 2:
        raise OddDimension(f"coordinate counts {v1.size}, {v2.size} must be even")
    validate_unit(v1, "v1")
    validate_unit(v2, "v2")
    if v1.shape != v2.shape:
        raise ValueError(f"dimension mismatch: {v1.shape} vs {v2.shape}")
    z1 = v1[0::2] + 1j * v1[1::2]
    z2 = v2[0::2] + 1j * v2[1::2]
    s = np.sum(z1 * np.conj(z2))
    m = abs(s)
    # Any phase works when the conjugate sum vanishes (distance is pi/2).
    aligned = z2 * (s / m if m > 0.0 else 1.0)
    return 2.0 * float(np.arctan2(np.linalg.norm(z1 - aligned), np.linalg.norm(z1 + aligned)))

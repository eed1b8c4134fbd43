"""Great-circle arcs on the pre-shape sphere and the iterative curve fit.

A curve is stored by its endpoints (v*, w*), their arc length theta, and the
unit tangent u = (w* - v* cos(theta)) / sin(theta), so that
``curve_point(curve, s) = cos(s) v* + sin(s) u`` traces the arc for
s in [0, theta].

``fit_curve`` selects one arc per point cloud: initialize v* at the point
with maximal distance sum, then repeatedly (a) take the two points w0, w1
farthest from v*, (b) lay S candidate endpoints uniformly in arc parameter
along the w0-w1 arc (endpoints included), (c) keep the candidate whose arc
from v* minimizes the sum of squared point-to-arc distances, and (d) move
v* there. The minimum-residual endpoint pair seen across all iterations is
returned, not the last iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGeodesic,
    NoValidCandidate,
    ParamOutOfRange,
    TooFewPoints,
)
from .preshape import geodesic_distance, validate_unit

# Endpoint pairs closer than this (or closer than this to antipodal) have no
# usable tangent direction.
THETA_TOL = 1e-9


@dataclass(frozen=True)
class GeodesicCurve:
    """An arc with endpoints v_star, w_star, arc length theta, unit tangent."""

    v_star: np.ndarray
    w_star: np.ndarray
    theta: float
    tangent: np.ndarray


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the iterative fit.

    num_candidates: temporary endpoints placed on the w0-w1 arc per iteration.
    tol: endpoint motion (radians) below which the loop stops.
    max_iters: hard iteration cap.
    """

    num_candidates: int = 100
    tol: float = 1e-6
    max_iters: int = 50

    def __post_init__(self):
        if self.num_candidates < 2:
            raise ValueError(f"num_candidates must be >= 2, got {self.num_candidates}")
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class FitReport:
    """Convergence trace of one fit."""

    iterations: int
    residual_trace: list[tuple[int, float]] = field(default_factory=list)
    converged: bool = False
    best_residual: float = float("inf")
    best_iteration: int = 0


def curve_between(v: np.ndarray, w: np.ndarray) -> GeodesicCurve:
    """Construct the arc from v to w.

    Raises DegenerateGeodesic if the endpoints are numerically coincident
    or antipodal (theta outside (1e-9, pi - 1e-9)).
    """
    v = validate_unit(v, "v")
    w = validate_unit(w, "w")
    theta = geodesic_distance(v, w)
    if theta < THETA_TOL or theta > np.pi - THETA_TOL:
        raise DegenerateGeodesic(
            f"endpoints at arc distance {theta!r} admit no unique tangent direction"
        )
    tangent = (w - v * np.cos(theta)) / np.sin(theta)
    return GeodesicCurve(v_star=v, w_star=w, theta=theta, tangent=tangent)


def curve_point(curve: GeodesicCurve, s: float) -> np.ndarray:
    """Point at arc parameter s in [0, theta]: cos(s) v* + sin(s) u."""
    if not 0.0 <= s <= curve.theta:
        raise ParamOutOfRange(f"s={s!r} outside [0, {curve.theta!r}]")
    return np.cos(s) * curve.v_star + np.sin(s) * curve.tangent


def point_to_curve_distance(z: np.ndarray, curve: GeodesicCurve) -> float:
    """Minimum geodesic distance from z to the arc.

    Closed form: with a = <z, v*> and b = <z, u>, the inner product with
    the curve is a cos(s) + b sin(s) = R cos(s - s_hat) for R = sqrt(a^2+b^2)
    and s_hat = atan2(b, a). If the unconstrained maximizer s_hat falls
    inside [0, theta] the distance is arccos(min(1, R)); otherwise the
    nearer endpoint wins. The on-arc branch is evaluated as
    atan2(||z - a v* - b u||, R), the stable form of the same angle, so
    points constructed on the arc measure ~1e-16 instead of ~1e-8.
    """
    z = validate_unit(z, "z")
    a = float(np.dot(z, curve.v_star))
    b = float(np.dot(z, curve.tangent))
    s_hat = float(np.arctan2(b, a))
    if 0.0 <= s_hat <= curve.theta:
        perp = z - a * curve.v_star - b * curve.tangent
        return float(np.arctan2(np.linalg.norm(perp), np.hypot(a, b)))
    d_v = geodesic_distance(z, curve.v_star)
    d_w = geodesic_distance(z, curve.w_star)
    return min(d_v, d_w)


def init_v_star(points) -> int:
    """Index of the point with the maximum sum of geodesic distances to the rest.

    Ties break to the lowest index. Requires at least 3 points.
    """
    pts = _as_points(points)
    gram = np.clip(pts @ pts.T, -1.0, 1.0)
    sums = np.arccos(gram).sum(axis=1)
    return int(np.argmax(sums))


def farthest_pair(points, v_star: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The two points farthest from v_star, in decreasing distance order.

    The first exact occurrence of v_star (if it is among the points) is
    excluded; remaining duplicates stay eligible, so the pair can consist
    of two copies of the same vector. Ties break to the lowest index.
    """
    pts = _as_points(points)
    v_star = np.asarray(v_star, dtype=float)
    dists = np.arccos(np.clip(pts @ v_star, -1.0, 1.0))
    candidates = list(range(len(pts)))
    for i, p in enumerate(pts):
        if np.array_equal(p, v_star):
            candidates.remove(i)
            break
    i0 = max(candidates, key=lambda i: (dists[i], -i))
    candidates.remove(i0)
    i1 = max(candidates, key=lambda i: (dists[i], -i))
    return pts[i0], pts[i1]


def fit_curve(points, config: FitConfig | None = None) -> tuple[GeodesicCurve, FitReport]:
    """Fit one arc to a point cloud; returns the curve and its FitReport.

    Raises:
        TooFewPoints: fewer than 3 points.
        DegenerateGeodesic: the w0-w1 endpoint pair of some iteration is
            coincident or antipodal (e.g. duplicated samples).
        NoValidCandidate: every candidate arc from v* is degenerate.
    """
    config = config or FitConfig()
    pts = _as_points(points)
    for row in pts:
        validate_unit(row, "point")

    v = pts[init_v_star(pts)]
    best_residual = float("inf")
    best_pair: tuple[np.ndarray, np.ndarray] | None = None
    best_iteration = 0
    trace: list[tuple[int, float]] = []
    converged = False
    iterations = 0

    for it in range(1, config.max_iters + 1):
        iterations = it
        w0, w1 = farthest_pair(pts, v)
        base = curve_between(w0, w1)
        s_grid = np.linspace(0.0, base.theta, config.num_candidates)
        cand = np.cos(s_grid)[:, None] * base.v_star + np.sin(s_grid)[:, None] * base.tangent
        residuals, valid = _candidate_residuals(pts, v, cand)
        if not valid.any():
            raise NoValidCandidate(
                f"all {config.num_candidates} candidate endpoints are degenerate with v*"
            )
        k = int(np.argmin(np.where(valid, residuals, np.inf)))
        w = cand[k]
        residual = float(residuals[k])
        trace.append((it, residual))
        if residual < best_residual:
            best_residual = residual
            best_pair = (v, w)
            best_iteration = it
        motion = geodesic_distance(v, w)
        v = w
        if motion < config.tol:
            converged = True
            break

    assert best_pair is not None
    curve = curve_between(*best_pair)
    report = FitReport(
        iterations=iterations,
        residual_trace=trace,
        converged=converged,
        best_residual=best_residual,
        best_iteration=best_iteration,
    )
    return curve, report


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        pts = np.atleast_2d(pts)
    if len(pts) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(pts)}")
    return pts


def _pairwise_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angles between rows of a (m, dim) and rows of b (s, dim), stable form."""
    diff = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    summ = np.linalg.norm(a[:, None, :] + b[None, :, :], axis=2)
    return 2.0 * np.arctan2(diff, summ)


def _candidate_residuals(
    pts: np.ndarray, v: np.ndarray, cand: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Sum of squared point-to-arc distances for every candidate endpoint.

    Vectorized twin of ``point_to_curve_distance`` (same formulas) over the
    S candidate arcs (v, cand[k]); candidates degenerate with v are flagged
    invalid and get residual +inf.
    """
    theta = _pairwise_angles(cand, v[None, :])[:, 0]
    valid = (theta > THETA_TOL) & (theta < np.pi - THETA_TOL)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (cand - np.cos(theta)[:, None] * v) / np.sin(theta)[:, None]
        a = pts @ v
        b = pts @ u.T
        s_hat = np.arctan2(b, a[:, None])
        on_arc = (s_hat >= 0.0) & (s_hat <= theta[None, :])
        perp = (pts - np.outer(a, v))[:, None, :] - b[:, :, None] * u[None, :, :]
        d_proj = np.arctan2(np.linalg.norm(perp, axis=2), np.hypot(a[:, None], b))
        d_v = _pairwise_angles(pts, v[None, :])[:, 0]
        d_end = np.minimum(d_v[:, None], _pairwise_angles(pts, cand))
        dist = np.where(on_arc, d_proj, d_end)
        residuals = np.square(dist).sum(axis=0)
    return np.where(valid, residuals, np.inf), valid

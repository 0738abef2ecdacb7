"""Loewner traces and fractal estimators.

Chordal traces in the upper half plane are generated by composing inverse
vertical-slit maps, one per capacity step: over a step of size ``dt`` with
driving value ``W`` the uniformising map is ``W + sqrt((z-W)^2 + 4 dt)``,
and the trace tip is obtained by threading the newest slit tip through all
earlier inverse maps.  For zero driving this discretisation is exact
(``gamma(t) = 2 i sqrt(t)``), which anchors the tests.

The estimators: box-counting dimension of a polyline, the neighbourhood-area
scaling (Minkowski-content) estimator ``r^(alpha-2) area{dist < r}``, and a
Monte Carlo occupation-time estimator for the Brownian local time spent near
a curve, ``eps^(alpha-2) int_0^T 1{dist(B_t, curve) < eps} dt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, ResolutionError
from .geometry import CurvePolyline


@dataclass
class DrivingPath:
    """Driving function samples: ``values[k] = W(times[k])`` with
    ``Var(W increments) = kappa * dt``."""

    times: np.ndarray
    values: np.ndarray
    kappa: float


@dataclass
class TraceResult:
    curve: CurvePolyline
    capacity_times: np.ndarray
    stats: dict = field(default_factory=dict)


def sample_driving(kappa: float, N: int, dt: float, seed) -> DrivingPath:
    """Brownian driving path, deterministic given the seed."""
    if N < 1 or dt <= 0:
        raise ValueError("need N >= 1 and dt > 0")
    rng = np.random.default_rng(seed)
    inc = rng.standard_normal(N) * np.sqrt(kappa * dt)
    w = np.concatenate([[0.0], np.cumsum(inc)])
    t = dt * np.arange(N + 1)
    return DrivingPath(times=t, values=w, kappa=kappa)


def _half_plane_sqrt(u: np.ndarray) -> np.ndarray:
    """Square root branch landing in the closed upper half plane."""
    s = np.sqrt(u.astype(complex))
    return np.where(s.imag < 0, -s, s)


def loewner_trace(path: DrivingPath, n_out: int | None = None) -> TraceResult:
    """Trace of the chordal Loewner evolution by inverse slit-map composition.

    ``n_out`` limits the number of output points (evenly spread in capacity
    time); the map composition always uses every driving step.
    """
    W = np.asarray(path.values, dtype=float)
    t = np.asarray(path.times, dtype=float)
    N = len(W) - 1
    if N < 1:
        raise ValueError("driving path too short")
    dt = np.diff(t)
    n_out = min(N, n_out or 2048)
    out_idx = np.unique(np.linspace(1, N, n_out).round().astype(int))
    # pts[j] accumulates the inverse maps still owed to trace point out_idx[j];
    # iterate k downward: first apply map k to every point activated at an
    # index > k, then activate point k with its own slit tip (map k included)
    pts = np.zeros(len(out_idx), dtype=complex)
    jmin = len(out_idx)
    for k in range(N, 0, -1):
        if jmin < len(pts):
            seg = pts[jmin:] - W[k]
            pts[jmin:] = W[k] + _half_plane_sqrt(seg**2 - 4 * dt[k - 1])
        if jmin > 0 and out_idx[jmin - 1] == k:
            jmin -= 1
            pts[jmin] = W[k] + 2j * np.sqrt(dt[k - 1])
    if np.any(~np.isfinite(pts)):
        raise ConfigurationError("trace blow-up: reduce dt")
    curve = CurvePolyline(pts, closed=False) if len(pts) >= 8 else CurvePolyline(
        np.concatenate([pts, pts[::-1]]), closed=False)
    return TraceResult(curve=curve, capacity_times=t[out_idx],
                       stats={"n_steps": N, "n_out": len(out_idx)})


def forward_flow_value(path: DrivingPath, z: complex, upto: int) -> complex:
    """Discrete forward uniformising flow applied to a point (for the
    self-consistency check: the trace point at step m returns to W[m])."""
    W = np.asarray(path.values, dtype=float)
    dt = np.diff(np.asarray(path.times, dtype=float))
    val = complex(z)
    for k in range(1, upto + 1):
        val = W[k] + complex(_half_plane_sqrt(np.array([(val - W[k]) ** 2 + 4 * dt[k - 1]]))[0])
    return val


def box_counts(curve: CurvePolyline, scales) -> np.ndarray:
    """Occupied-box counts of the point set at each box size."""
    pts = curve.points
    xy = np.column_stack([pts.real, pts.imag])
    counts = []
    for r in np.asarray(scales, dtype=float):
        boxes = np.unique(np.floor(xy / r), axis=0)
        counts.append(len(boxes))
    return np.asarray(counts, dtype=float)


def box_dimension(curve: CurvePolyline, scales) -> float:
    """Least-squares box-counting dimension over the given box sizes."""
    scales = np.asarray(scales, dtype=float)
    if len(scales) < 4 or np.max(scales) / np.min(scales) < 10**1.5:
        raise ValueError("need >= 4 scales spanning >= 1.5 decades")
    counts = box_counts(curve, scales)
    if np.any(counts < 2):
        raise ValueError("degenerate box counts; adjust scales")
    slope = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)[0]
    return float(slope)


def _densified(points: np.ndarray, max_seg: float) -> np.ndarray:
    """Insert intermediate points so no segment exceeds ``max_seg``."""
    out = [points[:1]]
    for a, b in zip(points[:-1], points[1:]):
        d = abs(b - a)
        if d > max_seg:
            k = int(np.ceil(d / max_seg))
            out.append(a + (b - a) * np.arange(1, k + 1) / k)
        else:
            out.append(np.array([b]))
    return np.concatenate(out)


def minkowski_content(curve: CurvePolyline, r_list, alpha: float) -> np.ndarray:
    """Neighbourhood-area estimator ``r^(alpha-2) area{dist(z, curve) < r}``.

    The area is grid-counted with cells of side r/3; the polyline is
    densified so its resolution does not bias distances at scale r.
    """
    r_list = np.asarray(r_list, dtype=float)
    pts = _densified(curve.points, float(np.min(r_list)) / 4.0)
    seg = np.max(np.abs(np.diff(curve.points)))
    if np.min(r_list) < seg / 2:
        raise ResolutionError(f"r below polyline resolution {seg:.3g}")
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    out = []
    for r in r_list:
        cell = r / 6.0
        x0, x1 = pts.real.min() - r, pts.real.max() + r
        y0, y1 = pts.imag.min() - r, pts.imag.max() + r
        # cell-centre sampling: unbiased for generic boundaries, exact for
        # grid-aligned ones
        gx = np.arange(x0 + cell / 2, x1 + cell, cell)
        gy = np.arange(y0 + cell / 2, y1 + cell, cell)
        X, Y = np.meshgrid(gx, gy)
        q = np.column_stack([X.ravel(), Y.ravel()])
        d, _ = tree.query(q, distance_upper_bound=r)
        area = np.count_nonzero(np.isfinite(d)) * cell * cell
        out.append(r ** (alpha - 2.0) * area)
    return np.asarray(out)


def brownian_local_time(curve: CurvePolyline, x: complex, T: float, eps: float,
                        n_mc: int, seed, alpha: float = 1.25,
                        dt_factor: float = 0.05):
    """Monte Carlo mean and standard error of the occupation-time functional

        I(T, eps) = eps^(alpha-2) int_0^T 1{dist(B_t, curve) < eps} dt,

    for Brownian paths started at ``x``.  The Euler step is
    ``dt = dt_factor * eps^2`` (a configuration error if that undercuts the
    scale separation); per-path values are returned too, so paired
    eps-stability comparisons can reuse common noise.
    """
    if n_mc < 100:
        raise ValueError("n_mc >= 100 required")
    dt = dt_factor * eps * eps
    if dt > eps**2 / 4:
        raise ConfigurationError("time step too coarse relative to eps^2")
    seg = np.max(np.abs(np.diff(curve.points)))
    if eps < seg:
        raise ResolutionError("eps below polyline resolution")
    n_steps = int(np.ceil(T / dt))
    rng = np.random.default_rng(seed)
    pos = np.full(n_mc, complex(x))
    tree = cKDTree(np.column_stack([curve.points.real, curve.points.imag]))
    occupied = np.zeros(n_mc)
    scale = np.sqrt(dt)
    for _ in range(n_steps):
        d, _ = tree.query(np.column_stack([pos.real, pos.imag]),
                          distance_upper_bound=eps)
        occupied += np.isfinite(d) * dt
        pos = pos + scale * (rng.standard_normal(n_mc)
                             + 1j * rng.standard_normal(n_mc))
    vals = eps ** (alpha - 2.0) * occupied
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(n_mc))
    return mean, stderr, vals

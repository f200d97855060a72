"""Estimators for projection-averaged metrics on convex bodies.

delta_j averages, over random j-dimensional subspaces, the j-volume of the
symmetric difference of the two bodies' projections, scaled by the flag
coefficient.  With one operand absent the same code path yields the
intrinsic volume V_j; with j = d no subspace averaging happens and the
metric is exactly the symmetric difference metric.

Inner volumes are exact for j <= 2 (interval / polygon oracles) and Monte
Carlo for j >= 3.  Every random draw is addressed by (seed, sample index),
so estimates are bit-identical for any worker count: sample i consumes
streams 2i (subspace) and 2i+1 (points), and the reduction runs in index
order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bodies import (
    DEFAULT_TOL,
    Interval,
    VPolytope,
    distance_to_hull,
    hull_2d,
    line_fiber,
    membership,
    polygon_area,
    polygon_clip,
    ring_contains,
)
from .grassmann import Subspace, axis_split, full_space, haar_sample, project_body
from .numerics import RngStream, flag_coefficient, uniform_block

__all__ = [
    "MetricEstimate",
    "SamplingPlan",
    "UnsupportedModeError",
    "projected_volume",
    "symdiff_volume",
    "delta_j",
    "intrinsic_volume",
    "hausdorff",
    "FiberRow",
    "FiberProfile",
    "fiber_profile",
]

# auxiliary draws (good-subspace scans, standalone estimates) live far away
# from the per-sample stream ids 2i / 2i+1
AUX_STREAM_BASE = 1 << 32


class UnsupportedModeError(ValueError):
    """Exact inner volumes were requested in a dimension that has none."""


@dataclass(frozen=True)
class SamplingPlan:
    n_subspaces: int = 2000
    n_points: int = 2000
    seed: int = 0
    mode: str = "auto"  # auto | monte_carlo | exact

    def __post_init__(self):
        if self.n_subspaces < 1 or self.n_points < 1:
            raise ValueError("n_subspaces and n_points must be >= 1")
        if self.mode not in ("auto", "monte_carlo", "exact"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")


@dataclass(frozen=True)
class MetricEstimate:
    """A metric value with its standard error and sample provenance."""

    value: float
    std_error: float
    n_subspaces: int
    n_points_per_subspace: int
    exact: bool
    per_subspace: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        if self.exact and self.std_error != 0.0:
            raise ValueError("exact estimates carry zero standard error")


# ---------------------------------------------------------------------------
# Inner volume/symdiff evaluators in fixed dimension j.
# ---------------------------------------------------------------------------


def _affine_rank(verts: np.ndarray) -> int:
    if verts.shape[0] == 1:
        return 0
    centered = verts - verts[0]
    sv = np.linalg.svd(centered, compute_uv=False)
    scale = max(1.0, float(sv[0]) if sv.size else 1.0)
    return int(np.sum(sv > 1e-12 * scale))


def _hull_equations(verts: np.ndarray):
    """Facet inequalities A x + b <= 0 of conv(verts) for bulk membership in
    dimension >= 3; None when the hull is degenerate (volume zero)."""
    if _affine_rank(verts) < verts.shape[1]:
        return None
    from scipy.spatial import ConvexHull  # deferred: only the MC path needs it

    eq = ConvexHull(verts).equations
    return eq[:, :-1], eq[:, -1]


def _bulk_inside(verts: np.ndarray, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    j = verts.shape[1]
    if j == 1:
        lo, hi = float(verts.min()), float(verts.max())
        return (pts[:, 0] >= lo - tol) & (pts[:, 0] <= hi + tol)
    if j == 2:
        return ring_contains(hull_2d(verts), pts, tol)
    eqs = _hull_equations(verts)
    if eqs is None:
        return np.zeros(pts.shape[0], dtype=bool)
    a, b = eqs
    scale = max(1.0, float(np.max(np.abs(verts))))
    return np.all(pts @ a.T + b <= tol * scale, axis=1)


def _interval_of(verts: np.ndarray) -> Interval:
    return Interval(float(verts.min()), float(verts.max()))


def _exact_volume(verts: np.ndarray, j: int) -> float:
    if j == 1:
        return _interval_of(verts).length
    if j == 2:
        return polygon_area(hull_2d(verts))
    raise UnsupportedModeError(f"no exact volume oracle in dimension {j}")


def _ring_key(ring: np.ndarray):
    return ring.shape[0], tuple(ring.ravel())


def _exact_symdiff(va: np.ndarray, vb: np.ndarray, j: int) -> float:
    if j == 1:
        ia, ib = _interval_of(va), _interval_of(vb)
        overlap = max(0.0, min(ia.hi, ib.hi) - max(ia.lo, ib.lo))
        return max(0.0, ia.length + ib.length - 2.0 * overlap)
    if j == 2:
        ra, rb = hull_2d(va), hull_2d(vb)
        if _ring_key(rb) < _ring_key(ra):  # canonical order: operand-symmetric bits
            ra, rb = rb, ra
        inter = polygon_area(polygon_clip(ra, rb))
        return max(0.0, polygon_area(ra) + polygon_area(rb) - 2.0 * inter)
    raise UnsupportedModeError(f"no exact symmetric difference oracle in dimension {j}")


def _sample_box(verts: np.ndarray, n: int, stream: RngStream):
    lo = verts.min(axis=0) - 1e-9
    hi = verts.max(axis=0) + 1e-9
    u = uniform_block(stream, n * verts.shape[1]).reshape(n, verts.shape[1])
    vol = float(np.prod(hi - lo))
    return lo + u * (hi - lo), vol


def _mc_volume(verts: np.ndarray, j: int, n: int, stream: RngStream) -> tuple[float, float]:
    if _affine_rank(verts) < j:
        return 0.0, 0.0
    pts, box_vol = _sample_box(verts, n, stream)
    phat = float(np.count_nonzero(_bulk_inside(verts, pts))) / n
    return box_vol * phat, box_vol * math.sqrt(phat * (1.0 - phat) / n)


def _mc_symdiff(va: np.ndarray, vb: np.ndarray, j: int, n: int,
                stream: RngStream) -> tuple[float, float]:
    pts, box_vol = _sample_box(np.vstack([va, vb]), n, stream)
    hit = _bulk_inside(va, pts) ^ _bulk_inside(vb, pts)
    phat = float(np.count_nonzero(hit)) / n
    return box_vol * phat, box_vol * math.sqrt(phat * (1.0 - phat) / n)


def _inner_exact(j: int, mode: str) -> bool:
    if mode == "exact":
        if j > 2:
            raise UnsupportedModeError(f"exact mode is unavailable for j={j} (>= 3)")
        return True
    if mode == "monte_carlo":
        return False
    return j <= 2  # auto


# ---------------------------------------------------------------------------
# Per-sample evaluation: pure in (seed, index), hence worker-independent.
# ---------------------------------------------------------------------------


def _pair_value(seed: int, index: int, d: int, j: int,
                va: np.ndarray | None, vb: np.ndarray | None,
                n_points: int, exact_inner: bool) -> tuple[float, float]:
    """Raw symmetric-difference volume of the two projections for sample
    `index` (empty operand = empty projection), with its inner MC error."""
    if j == d:
        h = full_space(d)
    else:
        h = haar_sample(d, j, RngStream(seed, 2 * index))
    pa = va @ h.basis if va is not None else None
    pb = vb @ h.basis if vb is not None else None
    if exact_inner:
        if pa is None:
            return _exact_volume(pb, j), 0.0
        if pb is None:
            return _exact_volume(pa, j), 0.0
        return _exact_symdiff(pa, pb, j), 0.0
    pstream = RngStream(seed, 2 * index + 1)
    if pa is None:
        return _mc_volume(pb, j, n_points, pstream)
    if pb is None:
        return _mc_volume(pa, j, n_points, pstream)
    return _mc_symdiff(pa, pb, j, n_points, pstream)


def _batch_values(task) -> np.ndarray:
    seed, lo, hi, d, j, va, vb, n_points, exact_inner = task
    out = np.empty(hi - lo)
    for index in range(lo, hi):
        out[index - lo] = _pair_value(seed, index, d, j, va, vb, n_points, exact_inner)[0]
    return out


def _collect_values(seed, n, d, j, va, vb, n_points, exact_inner, workers) -> np.ndarray:
    if workers <= 1 or n < 2 * workers:
        return _batch_values((seed, 0, n, d, j, va, vb, n_points, exact_inner))
    bounds = np.linspace(0, n, workers + 1, dtype=int)
    tasks = [(seed, int(a), int(b), d, j, va, vb, n_points, exact_inner)
             for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_batch_values, tasks))
    return np.concatenate(chunks)  # chunk order == index order


# ---------------------------------------------------------------------------
# Public estimators.
# ---------------------------------------------------------------------------


def projected_volume(body: VPolytope, h: Subspace, plan: SamplingPlan,
                     sample_index: int = AUX_STREAM_BASE) -> MetricEstimate:
    """j-volume of the projection of the body into h (in h coordinates)."""
    if body.ambient_dim != h.ambient_dim:
        raise ValueError("body and subspace ambient dimensions differ")
    j = h.dim
    verts = body.vertices @ h.basis
    if _inner_exact(j, plan.mode):
        val = _exact_volume(verts, j)
        return MetricEstimate(val, 0.0, 1, 0, exact=True, per_subspace=((0, val),))
    stream = RngStream(plan.seed, 2 * sample_index + 1)
    val, se = _mc_volume(verts, j, plan.n_points, stream)
    # degenerate bodies short-circuit to an exact zero inside _mc_volume
    exact = _affine_rank(verts) < j
    return MetricEstimate(val, se, 1, plan.n_points, exact=exact, per_subspace=((0, val),))


def symdiff_volume(a: VPolytope, b: VPolytope, plan: SamplingPlan,
                   sample_index: int = AUX_STREAM_BASE) -> MetricEstimate:
    """Volume of the symmetric difference of two bodies in their common R^j."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("operands live in different dimensions")
    j = a.ambient_dim
    if _inner_exact(j, plan.mode):
        val = _exact_symdiff(a.vertices, b.vertices, j)
        return MetricEstimate(val, 0.0, 1, 0, exact=True)
    stream = RngStream(plan.seed, 2 * sample_index + 1)
    val, se = _mc_symdiff(a.vertices, b.vertices, j, plan.n_points, stream)
    return MetricEstimate(val, se, 1, plan.n_points, exact=False)


def delta_j(a: VPolytope | None, b: VPolytope | None, j: int, plan: SamplingPlan,
            workers: int = 1) -> MetricEstimate:
    """Flag-scaled average projection discrepancy between two bodies.

    Either operand may be None (the empty set); the projection of the empty
    set is empty, so its per-subspace contribution is the other body's
    projected volume.  delta_j(empty, empty) = 0 exactly, and identical
    operands short-circuit to 0 with no samples drawn.
    """
    if a is None and b is None:
        return MetricEstimate(0.0, 0.0, 0, 0, exact=True, per_subspace=())
    d = a.ambient_dim if a is not None else b.ambient_dim
    if a is not None and b is not None and a.ambient_dim != b.ambient_dim:
        raise ValueError("operands live in different dimensions")
    if not 1 <= j <= d:
        raise ValueError(f"need 1 <= j <= d, got (j={j}, d={d})")
    if a is not None and b is not None and np.array_equal(a.vertices, b.vertices):
        return MetricEstimate(0.0, 0.0, 0, 0, exact=True, per_subspace=())

    va = a.vertices if a is not None else None
    vb = b.vertices if b is not None else None
    exact_inner = _inner_exact(j, plan.mode)
    flag = flag_coefficient(d, j)

    if j == d:  # no subspace averaging: the symmetric difference metric
        f, inner_se = _pair_value(plan.seed, 0, d, j, va, vb, plan.n_points, exact_inner)
        return MetricEstimate(
            value=flag * f,
            std_error=flag * inner_se,
            n_subspaces=1,
            n_points_per_subspace=0 if exact_inner else plan.n_points,
            exact=exact_inner,
            per_subspace=((0, f),),
        )

    n = plan.n_subspaces
    fvals = _collect_values(plan.seed, n, d, j, va, vb, plan.n_points, exact_inner, workers)
    value = flag * float(np.mean(fvals))
    se = flag * float(np.std(fvals, ddof=1)) / math.sqrt(n) if n > 1 else 0.0
    return MetricEstimate(
        value=value,
        std_error=se,
        n_subspaces=n,
        n_points_per_subspace=0 if exact_inner else plan.n_points,
        exact=False,
        per_subspace=tuple((i, float(f)) for i, f in enumerate(fvals)),
    )


def intrinsic_volume(body: VPolytope, j: int, plan: SamplingPlan,
                     workers: int = 1) -> MetricEstimate:
    """j-th intrinsic volume: the distance to the empty set, by construction
    the identical code path (and bits) as delta_j(body, None)."""
    return delta_j(body, None, j, plan, workers=workers)


def hausdorff(a: VPolytope, b: VPolytope, tol: float = DEFAULT_TOL) -> float:
    """max of the two directed vertex-to-hull distances; valid for convex
    bodies because the farthest point of a polytope from a convex set is
    attained at a vertex."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("operands live in different dimensions")
    d_ab = max(distance_to_hull(v, b, tol) for v in a.vertices)
    d_ba = max(distance_to_hull(w, a, tol) for w in b.vertices)
    return max(d_ab, d_ba)


# ---------------------------------------------------------------------------
# Fiber-profile diagnostic: where, transversally, does a hull extension
# actually add fiber length, and is that support confined to the needle's
# projected tube?
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberRow:
    y: tuple[float, ...]
    diff_length: float
    in_tube: bool


@dataclass(frozen=True)
class FiberProfile:
    rows: tuple[FiberRow, ...]
    cell_measure: float
    diff_measure: float          # transverse measure where fibers lengthened
    diff_measure_outside_tube: float
    tube_measure: float


def fiber_profile(outer: VPolytope, inner: VPolytope, h: Subspace, u: np.ndarray,
                  grid_n: int, tube: VPolytope | None = None,
                  tol: float = DEFAULT_TOL) -> FiberProfile:
    """Transverse profile of the fiber-length difference between two nested
    bodies, measured inside h along the projected axis of u.

    `tube`, when given, is the transverse cross-section polytope (in ambient
    coordinates, at the needle base); each grid point reports whether it lies
    in the image of that cross-section inside the transverse coordinates.
    Differences below 100*tol are clamped to zero.
    """
    if outer.ambient_dim != inner.ambient_dim or outer.ambient_dim != h.ambient_dim:
        raise ValueError("bodies and subspace dimensions differ")
    if h.dim < 2:
        raise ValueError("fiber profiling needs a subspace of dimension >= 2")
    for v in inner.vertices:
        if not membership(v, outer, max(tol, 1e-9)):
            raise ValueError("inner body is not contained in the outer body")
    u_h, e_basis = axis_split(h, u)
    j = h.dim
    tdim = j - 1

    proj_outer = project_body(h, outer)
    proj_inner = project_body(h, inner)
    ys_outer = proj_outer.vertices @ e_basis
    lo = ys_outer.min(axis=0)
    hi = ys_outer.max(axis=0)

    n_axis = max(1, int(round(grid_n ** (1.0 / tdim))))
    if tdim == 1:
        n_axis = max(1, grid_n)
    extent = np.maximum(hi - lo, 1e-30)
    cell = float(np.prod(extent / n_axis))
    axes = [lo[k] + (np.arange(n_axis) + 0.5) * (extent[k] / n_axis) for k in range(tdim)]
    mesh = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)

    tube_e: VPolytope | None = None
    if tube is not None:
        tube_e = VPolytope((tube.vertices @ h.basis) @ e_basis)

    clamp = 100.0 * tol
    rows = []
    n_diff = 0
    n_diff_outside = 0
    for y in mesh:
        base = e_basis @ y
        len_outer = line_fiber(proj_outer, base, u_h, tol).length
        len_inner = line_fiber(proj_inner, base, u_h, tol).length
        diff = len_outer - len_inner
        if diff < clamp:
            diff = 0.0
        in_tube = bool(tube_e is not None and membership(y, tube_e, tol))
        if diff > 0.0:
            n_diff += 1
            if not in_tube:
                n_diff_outside += 1
        rows.append(FiberRow(tuple(float(c) for c in y), diff, in_tube))

    if tube_e is None:
        tube_measure = 0.0
    elif tdim == 1:
        tube_measure = _interval_of(tube_e.vertices).length
    elif tdim == 2:
        tube_measure = polygon_area(hull_2d(tube_e.vertices))
    else:
        tube_measure = cell * sum(1 for r in rows if r.in_tube)

    return FiberProfile(
        rows=tuple(rows),
        cell_measure=cell,
        diff_measure=cell * n_diff,
        diff_measure_outside_tube=cell * n_diff_outside,
        tube_measure=tube_measure,
    )

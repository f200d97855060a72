"""Needle bodies and the parameter schedules that drive the experiments.

Two thin attached bodies are used: a prism (translated segment times a
transverse cross-section) and a spindle (hull of a centered segment and a
transverse cross-section).  Ball cross-sections are replaced by inscribed
cross-polytopes: their volume is exact in closed form, they stay inside the
ball so upper-bound constants remain valid, and lower bounds use their own
volume, keeping every verification self-consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import VPolytope, bounding_radius
from .grassmann import GoodnessCertificate, Subspace, complete_to_basis
from .numerics import needle_bound_constant

__all__ = [
    "NeedleSpec",
    "ScheduleRow",
    "BlockBounds",
    "cross_section",
    "prism_needle",
    "spindle_needle",
    "needle_exact_volume",
    "augment",
    "thm1_sequence",
    "thm2_sequence",
    "thm3_sequence",
    "block_bounds",
]


@dataclass(frozen=True)
class NeedleSpec:
    """Parameters of one needle: base point, unit axis inside the plane,
    the construction plane, axial extent, transverse radius, and shape kind
    (prism uses [0, L] along the axis, spindle uses [-L, L])."""

    x0: np.ndarray
    u: np.ndarray
    plane: Subspace
    length: float
    eps: float
    kind: str  # prism | spindle

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float)
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "u", u)
        if self.kind not in ("prism", "spindle"):
            raise ValueError(f"kind must be 'prism' or 'spindle', got {self.kind!r}")
        if self.length <= 0 or self.eps <= 0:
            raise ValueError("length and eps must be positive")
        if abs(float(np.linalg.norm(u)) - 1.0) > 1e-10:
            raise ValueError("axis u must be a unit vector")
        b = self.plane.basis
        if float(np.linalg.norm(b @ (b.T @ u) - u)) > 1e-10:
            raise ValueError("axis u must lie in the construction plane")

    @property
    def cross_vertices(self) -> int:
        return 2 * (self.plane.dim - 1)


@dataclass(frozen=True)
class ScheduleRow:
    m: int
    length: float
    eps: float
    offset: float          # base-point shift along the axis
    x_m: np.ndarray
    exclusion_radius: float
    body_radius: float
    claimed_step_bound: float


def cross_section(plane: Subspace, u: np.ndarray, eps: float) -> VPolytope:
    """The transverse cross-polytope: vertices +-eps*b_i for an orthonormal
    basis {b_i} of the axis complement inside the plane (a linear slice
    through the origin, independent of the base point).  Its (j-1)-volume is
    (2 eps)^(j-1) / (j-1)! and it is inscribed in the eps-ball."""
    j = plane.dim
    if j < 2:
        raise ValueError("cross-section needs a plane of dimension >= 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    u = np.asarray(u, dtype=float)
    u_plane = plane.basis.T @ u
    nrm = float(np.linalg.norm(u_plane))
    if nrm <= 1e-12:
        raise ValueError("axis u must have a component in the plane")
    comp = plane.basis @ complete_to_basis(u_plane / nrm)  # d x (j-1), ambient
    verts = np.vstack([eps * comp.T, -eps * comp.T])
    return VPolytope(verts)


def cross_section_volume(j: int, eps: float) -> float:
    return (2.0 * eps) ** (j - 1) / math.factorial(j - 1)


def prism_needle(spec: NeedleSpec) -> VPolytope:
    """Cross-section swept from x0 to x0 + L*u."""
    if spec.kind != "prism":
        raise ValueError("spec.kind must be 'prism'")
    q = cross_section(spec.plane, spec.u, spec.eps).vertices
    tip = spec.x0 + spec.length * spec.u
    return VPolytope(np.vstack([spec.x0 + q, tip + q]))


def spindle_needle(spec: NeedleSpec) -> VPolytope:
    """Bipyramid over the cross-section with apexes at x0 +- L*u."""
    if spec.kind != "spindle":
        raise ValueError("spec.kind must be 'spindle'")
    q = cross_section(spec.plane, spec.u, spec.eps).vertices
    apexes = np.vstack([spec.x0 - spec.length * spec.u, spec.x0 + spec.length * spec.u])
    return VPolytope(np.vstack([apexes, spec.x0 + q]))


def needle_exact_volume(spec: NeedleSpec) -> float:
    """Closed-form j-volume: base (j-1)-volume times height for the prism,
    the double-cone formula (2L/j) * base for the spindle."""
    j = spec.plane.dim
    base = cross_section_volume(j, spec.eps)
    if spec.kind == "prism":
        return spec.length * base
    return (2.0 * spec.length / j) * base


def make_needle(spec: NeedleSpec) -> VPolytope:
    return prism_needle(spec) if spec.kind == "prism" else spindle_needle(spec)


def augment(body: VPolytope, needle: VPolytope) -> VPolytope:
    """conv(body U needle) as the concatenated vertex list (hulling is
    deferred to the oracles, which tolerate interior vertices)."""
    if body.ambient_dim != needle.ambient_dim:
        raise ValueError("body and needle live in different dimensions")
    return VPolytope(np.vstack([body.vertices, needle.vertices]))


def _diameter(body: VPolytope) -> float:
    v = body.vertices
    d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(np.max(d2)))


def thm1_sequence(body: VPolytope, plane: Subspace, x0: np.ndarray, u: np.ndarray,
                  l0: float, steps: int) -> list[tuple[ScheduleRow, VPolytope]]:
    """Doubling prism needles with eps_i = L_i^(-2): the claimed per-step
    discrepancy bound decays like L_i^(3-2j) while the needle tip drifts."""
    d, j = plane.ambient_dim, plane.dim
    c1 = needle_bound_constant(d, j, "one_sided")
    out = []
    for i in range(steps):
        length = l0 * 2.0**i
        eps = length**-2
        spec = NeedleSpec(x0=x0, u=u, plane=plane, length=length, eps=eps, kind="prism")
        grown = augment(body, prism_needle(spec))
        rho = bounding_radius(grown)
        out.append((ScheduleRow(
            m=i, length=length, eps=eps, offset=0.0, x_m=np.asarray(x0, dtype=float),
            exclusion_radius=rho + 1.0, body_radius=rho,
            claimed_step_bound=c1 * length * eps ** (j - 1),
        ), grown))
    return out


def _dyadic_sequence(body: VPolytope, plane: Subspace, x0: np.ndarray, u: np.ndarray,
                     lengths, steps: int, step_targets) -> list[tuple[ScheduleRow, VPolytope]]:
    d, j = plane.ambient_dim, plane.dim
    c2 = needle_bound_constant(d, j, "two_sided")
    x0 = np.asarray(x0, dtype=float)
    u = np.asarray(u, dtype=float)
    if lengths is None:
        lengths = [2.0**m for m in range(steps)]
    if len(lengths) < steps:
        raise ValueError(f"need {steps} lengths, got {len(lengths)}")
    offset_unit = max(1.0, _diameter(body))
    out = []
    current = body
    for m in range(steps):
        length = float(lengths[m])
        target = step_targets(m)
        eps = (target / (c2 * length)) ** (1.0 / (j - 1))
        offset = m * offset_unit
        x_m = x0 + offset * u
        spec = NeedleSpec(x0=x_m, u=u, plane=plane, length=length, eps=eps, kind="spindle")
        rho = bounding_radius(current)  # radius before this step's needle
        current = augment(current, spindle_needle(spec))
        out.append((ScheduleRow(
            m=m, length=length, eps=eps, offset=offset, x_m=x_m,
            exclusion_radius=rho + 1.0, body_radius=rho,
            claimed_step_bound=target,
        ), current))
    return out


def thm2_sequence(body: VPolytope, plane: Subspace, x0: np.ndarray, u: np.ndarray,
                  lengths, steps: int) -> list[tuple[ScheduleRow, VPolytope]]:
    """Spindle needles with dyadic step targets 2^-(m+1): the claimed step
    bounds sum to 1/2, making the sequence Cauchy in the averaged metric.
    Requires j >= 2 (the transverse radius is undefined at j = 1)."""
    if plane.dim < 2:
        raise ValueError("sequence needs plane dimension >= 2")
    return _dyadic_sequence(body, plane, x0, u, lengths, steps,
                            lambda m: 2.0 ** -(m + 1))


def thm3_sequence(body: VPolytope, plane: Subspace, x0: np.ndarray, u: np.ndarray,
                  lengths, steps: int, a0: float) -> list[tuple[ScheduleRow, VPolytope]]:
    """Like thm2_sequence but with targets scaled by a0/4, where a0 is the
    base body's distance to the empty set: the cumulative claimed drift stays
    below a0/4, leaving a claimed floor of (3/4) a0."""
    if plane.dim < 2:
        raise ValueError("sequence needs plane dimension >= 2")
    if a0 <= 0:
        raise ValueError(f"a0 must be positive, got {a0}")
    return _dyadic_sequence(body, plane, x0, u, lengths, steps,
                            lambda m: (a0 / 4.0) * 2.0 ** -(m + 1))


@dataclass(frozen=True)
class BlockBounds:
    """Two lower bounds for a needle's projected volume in a good subspace:
    the full rectangular-block value (segment length times transverse
    cross-section mass, using the ball cross-section), and the corrected
    value using the cross-polytope volume with, for spindles, the
    double-cone factor 1/j - which equals the exact projected volume."""

    rect_bound: float
    cone_bound: float


def block_bounds(cert: GoodnessCertificate, spec: NeedleSpec) -> BlockBounds:
    if cert.sigma_min <= 0.0 or cert.c <= 0.0:
        return BlockBounds(0.0, 0.0)
    j = spec.plane.dim
    rect = cert.c * spec.eps ** (j - 1) * spec.length
    base = cert.jacobian * cross_section_volume(j, spec.eps)
    if spec.kind == "spindle":
        cone = (2.0 * spec.length * cert.ell / j) * base
    else:
        cone = spec.length * cert.ell * base
    return BlockBounds(rect, cone)

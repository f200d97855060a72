"""Random subspaces, projections, and good-subspace certificates.

A subspace is stored as an orthonormal basis; all downstream geometry is
done in the j coordinates of that basis, never in ambient coordinates, so
j-dimensional volume is well-defined and the exact 2-D oracles apply."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bodies import VPolytope
from .numerics import (
    RankDeficiencyError,
    RngStream,
    ball_volume,
    gaussian_block,
    gram_jacobian,
    gram_schmidt,
    singular_min,
)

__all__ = [
    "Subspace",
    "GoodnessCertificate",
    "DegenerateDirectionError",
    "full_space",
    "axis_subspace",
    "haar_sample",
    "project_point",
    "project_body",
    "axis_split",
    "complete_to_basis",
    "goodness",
]

DEGENERACY_TOL = 1e-12


class DegenerateDirectionError(ValueError):
    """The direction projects to (numerically) zero inside the subspace."""


@dataclass(frozen=True)
class Subspace:
    """A j-dimensional linear subspace of R^d, carried by a d x j orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2 or not 1 <= b.shape[1] <= b.shape[0]:
            raise ValueError("basis must be d x j with 1 <= j <= d")
        gram = b.T @ b
        if float(np.max(np.abs(gram - np.eye(b.shape[1])))) >= 1e-10:
            raise ValueError("basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def full_space(d: int) -> Subspace:
    return Subspace(np.eye(d))


def axis_subspace(d: int, axes) -> Subspace:
    """span{e_i : i in axes} with the canonical basis order."""
    b = np.zeros((d, len(axes)))
    for col, ax in enumerate(axes):
        b[ax, col] = 1.0
    return Subspace(b)


def haar_sample(d: int, j: int, s: RngStream) -> Subspace:
    """Rotation-invariant random subspace: orthonormalized Gaussian d x j frame.

    The measure-zero rank-deficiency event triggers a redraw from the next
    counter block; five failures raise."""
    if not 1 <= j <= d:
        raise ValueError(f"need 1 <= j <= d, got (d={d}, j={j})")
    for _ in range(5):
        g = gaussian_block(s, d * j).reshape(d, j)
        try:
            return Subspace(gram_schmidt(g))
        except RankDeficiencyError:
            continue
    raise RankDeficiencyError("5 consecutive rank-deficient Gaussian frames")


def project_point(h: Subspace, x: np.ndarray) -> np.ndarray:
    """Coordinates of the orthogonal projection of x in the basis of h."""
    x = np.asarray(x, dtype=float)
    if x.shape != (h.ambient_dim,):
        raise ValueError(f"point has shape {x.shape}, ambient dimension is {h.ambient_dim}")
    return h.basis.T @ x


def project_body(h: Subspace, body: VPolytope) -> VPolytope:
    """Vertex-wise projection; the hull of the projections is the projection
    of the hull, so no vertices need pruning."""
    if body.ambient_dim != h.ambient_dim:
        raise ValueError(f"body dimension {body.ambient_dim} != ambient {h.ambient_dim}")
    return VPolytope(body.vertices @ h.basis)


def complete_to_basis(v: np.ndarray) -> np.ndarray:
    """Orthonormal completion of a unit vector v in R^j to a j x (j-1) frame
    of v-perp, via the Householder reflection exchanging v and +-e1.

    Sign convention: each completion column has its first nonzero coordinate
    positive, so results are reproducible across platforms."""
    v = np.asarray(v, dtype=float)
    j = v.shape[0]
    if j == 1:
        return np.zeros((1, 0))
    alpha = -1.0 if v[0] >= 0 else 1.0
    w = v - alpha * np.eye(j)[0]
    ww = float(w @ w)  # = 2 (1 - alpha*v[0]) >= 2, never cancels
    refl = np.eye(j) - 2.0 * np.outer(w, w) / ww
    comp = refl[:, 1:].copy()
    for col in range(comp.shape[1]):
        lead = comp[:, col][np.abs(comp[:, col]) > 1e-14]
        if lead.size and lead[0] < 0:
            comp[:, col] = -comp[:, col]
    return comp


def axis_split(h: Subspace, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split h along the projected direction u: returns (u_h, e_basis) in
    h-coordinates, where u_h is the unit projected axis and e_basis is an
    orthonormal (j-1)-frame of its complement inside h."""
    pu = project_point(h, u)
    ell = float(np.linalg.norm(pu))
    if ell <= DEGENERACY_TOL:
        raise DegenerateDirectionError(f"direction projects to norm {ell:.3e} inside the subspace")
    u_h = pu / ell
    return u_h, complete_to_basis(u_h)


@dataclass(frozen=True)
class GoodnessCertificate:
    """Per-subspace quantities witnessing that a subspace sees the
    construction plane with full rank.

    sigma_min is the smallest singular value of the projection restricted to
    the plane; ell is the length of the projected axis; the transverse map
    acts on the axis-complement inside the plane, and its Jacobian scales
    the transverse cross-section volume.  c = 2 * ell * b by construction."""

    sigma_min: float
    ell: float
    u_h: np.ndarray
    e_h_basis: np.ndarray
    transverse_map: np.ndarray
    jacobian: float
    b: float
    c: float


def goodness(h: Subspace, plane: Subspace, u: np.ndarray) -> GoodnessCertificate:
    """Certificate for subspace h against construction plane `plane` and unit
    axis u (u must lie in the plane).

    A degenerate projected axis is reported, never resampled: the certificate
    then carries sigma_min and ell with jacobian = b = c = 0."""
    if plane.dim != h.dim:
        raise ValueError(f"plane dimension {plane.dim} != subspace dimension {h.dim}")
    u = np.asarray(u, dtype=float)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-10:
        raise ValueError("axis u must be a unit vector")
    if float(np.linalg.norm(plane.basis @ (plane.basis.T @ u) - u)) > 1e-10:
        raise ValueError("axis u must lie in the construction plane")
    j = h.dim

    proj_matrix = h.basis.T @ plane.basis  # map of the restricted projection, j x j
    sigma = singular_min(proj_matrix)
    pu = h.basis.T @ u
    ell = float(np.linalg.norm(pu))

    if ell <= DEGENERACY_TOL:
        return GoodnessCertificate(
            sigma_min=sigma, ell=ell,
            u_h=np.zeros(j), e_h_basis=np.zeros((j, max(j - 1, 0))),
            transverse_map=np.zeros((max(j - 1, 0), max(j - 1, 0))),
            jacobian=0.0, b=0.0, c=0.0,
        )

    u_h = pu / ell
    e_h_basis = complete_to_basis(u_h)
    # orthonormal frame of the axis complement inside the plane, in ambient coords
    u_plane = plane.basis.T @ u
    plane_comp = plane.basis @ complete_to_basis(u_plane / np.linalg.norm(u_plane))
    transverse = e_h_basis.T @ (h.basis.T @ plane_comp)  # (j-1) x (j-1)
    jac = gram_jacobian(transverse)
    b = jac * ball_volume(j - 1)
    return GoodnessCertificate(
        sigma_min=sigma, ell=ell, u_h=u_h, e_h_basis=e_h_basis,
        transverse_map=transverse, jacobian=jac, b=b, c=2.0 * ell * b,
    )

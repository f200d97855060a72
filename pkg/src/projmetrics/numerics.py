"""Scalar and small-matrix kernels shared by every estimator.

Ball volumes and flag coefficients come from the exact two-step recursion
vol_0 = 1, vol_1 = 2, vol_m = (2*pi/m) * vol_{m-2}, so no gamma-function
approximation enters any constant.  The random stream is counter-based:
every draw is a pure function of (seed, stream, counter), which is what
makes sampling independent of how work is split across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RankDeficiencyError",
    "ball_volume",
    "flag_coefficient",
    "needle_bound_constant",
    "gram_schmidt",
    "gram_jacobian",
    "singular_min",
    "RngStream",
    "rng_uniform",
    "rng_gaussian",
    "uniform_block",
    "gaussian_block",
]

_MASK64 = (1 << 64) - 1


class RankDeficiencyError(ValueError):
    """Input matrix has numerically dependent columns."""


def ball_volume(m: int) -> float:
    """Volume of the Euclidean unit ball in R^m (vol_0 = 1 by convention)."""
    if m < 0:
        raise ValueError(f"ball dimension must be >= 0, got {m}")
    even, odd = 1.0, 2.0  # vol_0, vol_1
    if m == 0:
        return even
    if m == 1:
        return odd
    for k in range(2, m + 1):
        if k % 2 == 0:
            even *= 2.0 * math.pi / k
        else:
            odd *= 2.0 * math.pi / k
    return even if m % 2 == 0 else odd


def flag_coefficient(d: int, j: int) -> float:
    """binom(d,j) * vol_d(B_d) / (vol_j(B_j) * vol_{d-j}(B_{d-j}))."""
    if not 1 <= j <= d:
        raise ValueError(f"flag coefficient needs 1 <= j <= d, got (d={d}, j={j})")
    return math.comb(d, j) * ball_volume(d) / (ball_volume(j) * ball_volume(d - j))


def needle_bound_constant(d: int, j: int, sided: str = "one_sided") -> float:
    """Constant bounding the average projection discrepancy added by a unit
    thin needle: flag_coefficient(d,j) * vol_{j-1}(B_{j-1}), doubled for the
    two-sided (centered-segment) variant."""
    if not 2 <= j <= d:
        raise ValueError(f"needle bound constant needs 2 <= j <= d, got (d={d}, j={j})")
    c = flag_coefficient(d, j) * ball_volume(j - 1)
    if sided == "one_sided":
        return c
    if sided == "two_sided":
        return 2.0 * c
    raise ValueError(f"sided must be 'one_sided' or 'two_sided', got {sided!r}")


def gram_schmidt(mat: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of a d x k matrix, preserving column span.

    Two modified-Gram-Schmidt passes per column keep ||Q^T Q - I||_max below
    1e-10 on well-conditioned input.  Raises RankDeficiencyError when a
    residual norm falls below 1e-12.
    """
    m = np.array(mat, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    d, k = m.shape
    if k > d:
        raise ValueError(f"cannot orthonormalize {k} columns in dimension {d}")
    q = np.empty_like(m)
    for i in range(k):
        v = m[:, i].copy()
        for _ in range(2):  # re-orthogonalization pass
            for l in range(i):
                v -= (q[:, l] @ v) * q[:, l]
        nrm = float(np.linalg.norm(v))
        if nrm < 1e-12:
            raise RankDeficiencyError(f"column {i} is numerically dependent (residual {nrm:.3e})")
        q[:, i] = v / nrm
    return q


def gram_jacobian(mat: np.ndarray) -> float:
    """sqrt(det(M^T M)) = product of singular values; 0 for rank-deficient M."""
    m = np.asarray(mat, dtype=float)
    if m.size == 0:
        return 1.0  # empty product: the 0-dimensional Jacobian
    sv = np.linalg.svd(m, compute_uv=False)
    return float(np.prod(sv))


def singular_min(mat: np.ndarray) -> float:
    """Smallest singular value."""
    m = np.asarray(mat, dtype=float)
    sv = np.linalg.svd(m, compute_uv=False)
    return float(sv[-1])


# ---------------------------------------------------------------------------
# Counter-based random stream.
#
# Every draw is bits(seed, stream, counter) through a chain of SplitMix-style
# 64-bit finalizers, so any cell is addressable directly: workers computing
# disjoint counter/stream ranges reproduce exactly what a serial run would.
# ---------------------------------------------------------------------------


@dataclass
class RngStream:
    """Addressable random stream: output depends only on (seed, stream, counter)."""

    seed: int
    stream: int = 0
    counter: int = 0


def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer, elementwise on uint64 (wrapping arithmetic).
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _cell_bits(seed: int, stream: int, counter0: int, n: int) -> np.ndarray:
    counters = np.arange(counter0, counter0 + n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _mix64(np.uint64(seed & _MASK64))
        key = _mix64(key ^ np.uint64(stream & _MASK64))
        return _mix64(key ^ counters)


def uniform_block(s: RngStream, n: int) -> np.ndarray:
    """n uniforms in [0,1); advances the counter by n."""
    bits = _cell_bits(s.seed, s.stream, s.counter, n)
    s.counter += n
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussian_block(s: RngStream, n: int) -> np.ndarray:
    """n standard normals via Box-Muller; advances the counter by 2n."""
    u = uniform_block(s, 2 * n)
    r = np.sqrt(-2.0 * np.log1p(-u[0::2]))  # log(1-u) > -inf since u < 1
    return r * np.cos(2.0 * math.pi * u[1::2])


def rng_uniform(s: RngStream) -> float:
    return float(uniform_block(s, 1)[0])


def rng_gaussian(s: RngStream) -> float:
    return float(gaussian_block(s, 1)[0])

"""Measures, norms, deterministic point-set generators, and moments.

Two kinds of probability measures are supported: finitely supported
(atoms + weights) and the uniform law on the unit cube [0,1]^d.  All
containers are immutable after construction and every generator is a
pure function of its arguments, so identical inputs give bit-identical
outputs on any platform.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import roots_legendre

from .errors import DimensionMismatchError, DimTooLargeError, DomainError

WEIGHT_TOL = 1e-12

# First 16 primes: Halton bases for dimensions 1..16.
_HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


class Domain(enum.Enum):
    UNIT_CUBE = "unit"
    REAL_SPACE = "real"


class Norm(enum.Enum):
    """Choice of norm on R^d: sup-norm, Euclidean, or taxicab."""

    LINF = "linf"
    L2 = "l2"
    L1 = "l1"

    def length(self, x: np.ndarray) -> np.ndarray:
        """Norm of each row of ``x`` (shape (n, d) or (d,))."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self is Norm.LINF:
            return np.abs(x).max(axis=1)
        if self is Norm.L2:
            return np.sqrt((x * x).sum(axis=1))
        return np.abs(x).sum(axis=1)

    def distance(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.length(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))[0])


def diameter(norm: Norm, d: int) -> float:
    """Diameter of the half-open unit cube (0,1]^d under ``norm``.

    Equals 1, sqrt(d), d for the sup, Euclidean and taxicab norms: the
    supremum of |y-x| is approached by opposite corners of the cube.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if norm is Norm.LINF:
        return 1.0
    if norm is Norm.L2:
        return math.sqrt(d)
    return float(d)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure: n points in R^d with weights.

    Weights must sum to one within 1e-12.  When ``domain`` is UNIT_CUBE
    every coordinate must lie in [0,1]; coordinates exactly 0 or 1 are
    legal.
    """

    points: np.ndarray
    weights: np.ndarray
    domain: Domain = Domain.UNIT_CUBE

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DomainError("points must be a nonempty (n, d) array")
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float)).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise DomainError("weights length must match number of points")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {w.sum()!r}, expected 1 within {WEIGHT_TOL}")
        if self.domain is Domain.UNIT_CUBE and (pts.min() < 0.0 or pts.max() > 1.0):
            raise OutOfUnitCube("unit-cube measure has a coordinate outside [0,1]")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]


class OutOfUnitCube(DomainError):
    """A unit-cube measure was built with coordinates outside [0,1]."""


@dataclass(frozen=True)
class UniformCube:
    """The uniform law on [0,1]^d: mass of a box is its Lebesgue volume."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dim}")


Measure = Union[DiscreteMeasure, UniformCube]


def measure_dim(m: Measure) -> int:
    return m.dim


def require_same_dim(mu: Measure, nu: Measure) -> int:
    if mu.dim != nu.dim:
        raise DimensionMismatchError(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    return mu.dim


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def midpoint_grid(n: int) -> DiscreteMeasure:
    """1D measure with equal weights at the interval midpoints (2k-1)/(2n)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    pts = (2.0 * np.arange(1, n + 1) - 1.0) / (2.0 * n)
    return DiscreteMeasure(pts.reshape(-1, 1), np.full(n, 1.0 / n))


def radical_inverse(k: np.ndarray, base: int) -> np.ndarray:
    """Radical inverse of integers ``k`` >= 1 in the given base."""
    k = np.asarray(k, dtype=np.int64).copy()
    out = np.zeros(k.shape, dtype=float)
    denom = float(base)
    while np.any(k > 0):
        out += (k % base) / denom
        k //= base
        denom *= base
    return out


def van_der_corput(n: int, base: int = 2) -> DiscreteMeasure:
    """First n van der Corput points in the given base (indices start at 1)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if base < 2:
        raise DomainError(f"base must be >= 2, got {base}")
    pts = radical_inverse(np.arange(1, n + 1), base)
    return DiscreteMeasure(pts.reshape(-1, 1), np.full(n, 1.0 / n))


def halton(n: int, d: int) -> DiscreteMeasure:
    """First n Halton points in dimension d (coordinate i uses the i-th prime).

    Index starts at 1, which skips the all-zeros point, matching classical
    low-discrepancy usage.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if d > len(_HALTON_PRIMES):
        raise DimTooLargeError(f"halton supports d <= {len(_HALTON_PRIMES)}, got {d}")
    idx = np.arange(1, n + 1)
    cols = [radical_inverse(idx, _HALTON_PRIMES[i]) for i in range(d)]
    return DiscreteMeasure(np.column_stack(cols), np.full(n, 1.0 / n))


# SplitMix64 constants (Steele, Lea & Flood 2014).  A counter-based mixing
# generator rather than an OS source: the whole stream is a pure function of
# (seed, counter), so point sets are bit-reproducible across platforms.
_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _SM64_M1
    z = (z ^ (z >> np.uint64(27))) * _SM64_M2
    return z ^ (z >> np.uint64(31))


def iid_uniform(n: int, d: int, seed: int) -> DiscreteMeasure:
    """n pseudo-random points in [0,1)^d, a pure function of the seed.

    Stream: coordinate j of point k is mix64(seed + (k*d + j + 1)*GAMMA),
    the SplitMix64 sequence seeded at ``seed``, mapped to [0,1) by taking
    the top 53 bits.
    """
    if n < 1 or d < 1:
        raise DomainError(f"n and d must be >= 1, got n={n}, d={d}")
    counters = np.arange(1, n * d + 1, dtype=np.uint64)
    bits = _mix64(np.uint64(seed % (1 << 64)) + counters * _SM64_GAMMA)
    pts = (bits >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
    return DiscreteMeasure(pts.reshape(n, d), np.full(n, 1.0 / n))


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def moment(m: Measure, q: float, norm: Norm) -> float:
    """q-th moment of |X| under ``norm``: sum w_k |x_k|^q, or the cube integral.

    For UniformCube with the sup-norm the integral is d/(d+q) in closed form
    (P(max U_i <= t) = t^d).  Other norms have no general closed form and are
    integrated by tensor-product Gauss-Legendre quadrature; the integrand is
    smooth on the cube, so 64 nodes per axis leave the relative error far
    below 1e-10 at the supported dimensions.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if isinstance(m, DiscreteMeasure):
        return float(np.dot(m.weights, norm.length(m.points) ** q))
    d = m.dim
    if norm is Norm.LINF:
        return d / (d + q)
    if d == 1:
        return 1.0 / (1.0 + q)
    if d > 4:
        raise DomainError("uniform-cube moment quadrature supports d <= 4")
    nodes, wq = roots_legendre(64)
    nodes = 0.5 * (nodes + 1.0)
    wq = 0.5 * wq
    grids = np.meshgrid(*([nodes] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wprod = np.ones(pts.shape[0])
    wgrids = np.meshgrid(*([wq] * d), indexing="ij")
    for g in wgrids:
        wprod = wprod * g.ravel()
    return float(np.dot(wprod, norm.length(pts) ** q))


# ---------------------------------------------------------------------------
# CSV point-set format
# ---------------------------------------------------------------------------
# Header: ``dim=<d>,domain=<unit|real>`` then one point per row with d
# comma-separated fields; an optional trailing column carries weights
# (absent => uniform 1/n).

_HEADER_RE = re.compile(r"^dim=(\d+),domain=(unit|real)$")


def write_points_csv(m: DiscreteMeasure, path: str) -> None:
    uniform = bool(np.allclose(m.weights, 1.0 / m.size, rtol=0, atol=1e-15))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim={m.dim},domain={m.domain.value}\n")
        for k in range(m.size):
            row = [format(v, ".17g") for v in m.points[k]]
            if not uniform:
                row.append(format(m.weights[k], ".17g"))
            fh.write(",".join(row) + "\n")


def read_points_csv(path: str) -> DiscreteMeasure:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        match = _HEADER_RE.match(header)
        if not match:
            raise DomainError(f"bad point-set header: {header!r}")
        d = int(match.group(1))
        domain = Domain.UNIT_CUBE if match.group(2) == "unit" else Domain.REAL_SPACE
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        raise DomainError("point-set file has no rows")
    data = [[float(tok) for tok in row.split(",")] for row in rows]
    widths = {len(r) for r in data}
    if widths == {d}:
        pts = np.asarray(data)
        w = np.full(len(data), 1.0 / len(data))
    elif widths == {d + 1}:
        arr = np.asarray(data)
        pts, w = arr[:, :d], arr[:, d]
    else:
        raise DomainError(f"rows must have {d} or {d + 1} fields, got widths {sorted(widths)}")
    return DiscreteMeasure(pts, w, domain)

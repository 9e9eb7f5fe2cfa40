"""Weyl group action, the polytope Omega, and exact orbit-hull membership.

Membership in the convex hull of a Weyl orbit is decided by (weak)
majorization of dominant representatives: prefix sums of descending sorts for
the permutation action, prefix sums of descending absolute values for the
signed-permutation action.  This is exact and O(n log n); an LP feasibility
oracle over the explicit orbit lives in the test suite as a cross-check.
"""

from __future__ import annotations

import dataclasses
import itertools
import math

import numpy as np

from .errors import RejectionStall
from .groups import Family, GroupContext
from .rng import substream

MEMBERSHIP_TOL = 1e-9
DEDUP_TOL = 1e-12
REJECTION_MIN_RATE = 1e-4
_REJECTION_PROBE = 200_000


@dataclasses.dataclass(frozen=True)
class OmegaSpec:
    """Open convex Weyl-invariant subset of the polytope Omega.

    shape "scale": omega = c * Omega for c in (0, 1].
    shape "ball":  omega = {|X| < radius} intersected with Omega.
    """

    shape: str
    scale: float | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.shape == "scale":
            if self.scale is None or not (0.0 < self.scale <= 1.0):
                raise ValueError("scale shape needs scale in (0, 1]")
        elif self.shape == "ball":
            if self.radius is None or self.radius <= 0.0:
                raise ValueError("ball shape needs radius > 0")
        else:
            raise ValueError(f"unknown omega shape {self.shape!r}")

    @classmethod
    def parse(cls, text: str) -> "OmegaSpec":
        kind, _, value = text.partition(":")
        if kind == "scale":
            return cls("scale", scale=float(value))
        if kind == "ball":
            return cls("ball", radius=float(value))
        raise ValueError(f"cannot parse omega spec {text!r}")

    @property
    def label(self) -> str:
        if self.shape == "scale":
            return f"scale:{self.scale}"
        return f"ball:{self.radius}"

    def as_dict(self) -> dict:
        return {"shape": self.shape, "scale": self.scale, "radius": self.radius}


FULL_OMEGA = OmegaSpec("scale", scale=1.0)


def weyl_order(ctx: GroupContext) -> int:
    n = ctx.n
    if ctx.family is Family.SPECIAL_LINEAR:
        return math.factorial(n)
    return math.factorial(n) * 2 ** n


def weyl_elements(ctx: GroupContext):
    """All (permutation, signs) pairs of the Weyl group, identity first."""
    n = ctx.n
    perms = list(itertools.permutations(range(n)))
    if ctx.family is Family.SPECIAL_LINEAR:
        return [(p, (1,) * n) for p in perms]
    signs = list(itertools.product((1, -1), repeat=n))
    return [(p, s) for p in perms for s in signs]


def apply_weyl(x, element):
    """Coordinates of w.x for an abstract (permutation, signs) element."""
    perm, signs = element
    x = np.asarray(x)
    out = np.empty_like(x)
    for j, (p, s) in enumerate(zip(perm, signs)):
        out[p] = s * x[j]
    return out


def weyl_orbit(ctx: GroupContext, x, tol: float = DEDUP_TOL) -> np.ndarray:
    """Orbit of x without duplicates, shape (orbit_size, n)."""
    pts = np.array([apply_weyl(x, w) for w in weyl_elements(ctx)])
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    keep = [0]
    for i in range(1, len(pts)):
        if np.max(np.abs(pts[i] - pts[keep[-1]])) > tol:
            keep.append(i)
    return pts[keep]


def dominant_rep(ctx: GroupContext, x) -> np.ndarray:
    """Canonical chamber representative: descending sort (absolute values for sp)."""
    x = np.asarray(x, dtype=float)
    if ctx.family is Family.SPECIAL_LINEAR:
        return np.sort(x)[::-1]
    return np.sort(np.abs(x))[::-1]


@dataclasses.dataclass(frozen=True)
class OrbitPolytope:
    """conv(W.x) with its dominant representative and membership queries."""

    source: np.ndarray
    dominant: np.ndarray
    ctx: GroupContext

    @classmethod
    def of(cls, ctx: GroupContext, x) -> "OrbitPolytope":
        x = np.asarray(x, dtype=float)
        return cls(source=x, dominant=dominant_rep(ctx, x), ctx=ctx)

    def contains(self, y, tol: float = MEMBERSHIP_TOL):
        return hull_contains(self.ctx, self.source, y, tol)


def hull_margin(ctx: GroupContext, x, y) -> float:
    """Minimum slack of the majorization constraints for y in conv(W.x).

    Positive inside, negative outside.  For the special linear family the
    trace-equality constraint is enforced separately by hull_contains and does
    not enter the margin (it would pin every margin at roundoff scale).
    """
    xs = dominant_rep(ctx, x)
    ys = dominant_rep(ctx, y)
    slacks = np.cumsum(xs) - np.cumsum(ys)
    if ctx.family is Family.SPECIAL_LINEAR:
        slacks = slacks[:-1]
        if slacks.size == 0:
            return 0.0
    return float(np.min(slacks))


def hull_contains(ctx: GroupContext, x, y, tol: float = MEMBERSHIP_TOL):
    """Membership of y in conv(W.x) with ties at tol resolved toward inside.

    Returns (member, margin).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    margin = hull_margin(ctx, x, y)
    if ctx.family is Family.SPECIAL_LINEAR:
        drift = abs(float(np.sum(y) - np.sum(x)))
        if drift > tol:
            margin = min(margin, tol - drift)
    return margin >= -tol, margin


def hull_margins_batch(ctx: GroupContext, xs, ys) -> np.ndarray:
    """Vectorized hull_margin over rows of xs, ys (shape (B, n))."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ctx.family is Family.SYMPLECTIC:
        xs, ys = np.abs(xs), np.abs(ys)
    xd = -np.sort(-xs, axis=1)
    yd = -np.sort(-ys, axis=1)
    slacks = np.cumsum(xd, axis=1) - np.cumsum(yd, axis=1)
    if ctx.family is Family.SPECIAL_LINEAR:
        slacks = slacks[:, :-1]
    return slacks.min(axis=1)


def omega_margin(ctx: GroupContext, spec: OmegaSpec, x) -> float:
    """Distance of x from the active constraints of omega in functional units.

    Positive exactly when x lies in omega.
    """
    x = np.asarray(x, dtype=float)
    vals = np.abs(ctx.root_datum.evaluate(x))
    if spec.shape == "scale":
        return float(spec.scale * np.pi / 2.0 - np.max(vals))
    margin = float(np.pi / 2.0 - np.max(vals))
    return min(margin, float(spec.radius - np.linalg.norm(x)))


def omega_distance(ctx: GroupContext, spec: OmegaSpec, x) -> float:
    """Euclidean distance of an interior point to the boundary of omega."""
    x = np.asarray(x, dtype=float)
    vals = np.abs(ctx.root_datum.evaluate(x))
    norms = np.linalg.norm(ctx.root_datum.roots, axis=1)
    cutoff = (spec.scale if spec.shape == "scale" else 1.0) * np.pi / 2.0
    dist = float(np.min((cutoff - vals) / norms))
    if spec.shape == "ball":
        dist = min(dist, float(spec.radius - np.linalg.norm(x)))
    return dist


def _helmert(n: int) -> np.ndarray:
    """Orthonormal basis of the trace-zero hyperplane, shape (n, n-1)."""
    cols = []
    for k in range(1, n):
        v = np.zeros(n)
        v[:k] = 1.0
        v[k] = -k
        cols.append(v / np.linalg.norm(v))
    return np.column_stack(cols)


def _omega_box(ctx: GroupContext, spec: OmegaSpec):
    """Half-width of the coordinate box bounding omega (in sampling coordinates)."""
    c = spec.scale if spec.shape == "scale" else 1.0
    if ctx.family is Family.SPECIAL_LINEAR:
        n = ctx.n
        half = c * np.pi / 2.0 * (n - 1) / n * np.sqrt(n)
    else:
        half = c * np.pi / 4.0
    if spec.shape == "ball":
        half = min(half, spec.radius)
    return half


def draw_omega_point(ctx: GroupContext, spec: OmegaSpec, rng) -> np.ndarray:
    """One uniform draw from omega by rejection from its bounding box."""
    half = _omega_box(ctx, spec)
    helmert = _helmert(ctx.n) if ctx.family is Family.SPECIAL_LINEAR else None
    dim = ctx.n - 1 if helmert is not None else ctx.n
    for attempt in range(1, _REJECTION_PROBE + 1):
        u = rng.uniform(-half, half, size=dim)
        x = helmert @ u if helmert is not None else u
        if omega_margin(ctx, spec, x) > 0.0:
            return x
        if attempt * REJECTION_MIN_RATE > 1.0:
            break
    raise RejectionStall(f"acceptance rate below {REJECTION_MIN_RATE} for {spec.label}")


def sample_omega(ctx: GroupContext, spec: OmegaSpec, seed: int, count: int) -> np.ndarray:
    """count i.i.d. uniform samples from omega, deterministic per (seed, index)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.array([draw_omega_point(ctx, spec, substream(seed, i)) for i in range(count)])

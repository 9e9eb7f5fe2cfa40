"""Crown domains, horospherical tubes, and their sampling verifiers.

A crown point is represented as z = g exp(iX) with g in the real group and X
in an open Weyl-invariant convex subset omega of the admissible polytope.  The
tube over a compact base k consists of the points whose translate by k^{-1}
projects into the abelian tube of omega; membership is decided by tracking
log a along t -> k^{-1} g exp(itX) and testing the imaginary part against
omega.  Only compact bases are tested: the full tube intersection reduces to
them because the triangular subgroup preserves the base tube.
"""

from __future__ import annotations

import dataclasses
import time

import numpy as np

from .errors import BranchBreakdown
from .groups import GroupContext
from .iwasawa import (
    ARG_STEP_CAP,
    PIVOT_FLOOR,
    RECON_RTOL,
    CrownPoint,
    _track,
    track_batch,
)
from .parallel import chunk_ranges, map_chunks
from .report import VerificationReport, matrix_wire, vector_wire
from .rng import NS_TUBE, substream
from .sampling import haar_k, sample_group_element
from .weyl import MEMBERSHIP_TOL, OmegaSpec, draw_omega_point, omega_distance, omega_margin


@dataclasses.dataclass(frozen=True)
class TubeSpec:
    """Horospherical tube with a compact base point."""

    base_k: np.ndarray
    omega: OmegaSpec

    def __post_init__(self):
        k = np.asarray(self.base_k, dtype=float)
        if np.linalg.norm(k @ k.T - np.eye(k.shape[0])) > 1e-10 * k.shape[0]:
            raise ValueError("tube base must lie in the compact subgroup")
        object.__setattr__(self, "base_k", k)


def sample_xi(ctx: GroupContext, omega: OmegaSpec, count: int, seed: int,
              mode: str = "full-g") -> list[CrownPoint]:
    """count seeded crown points z = g exp(iX), X in omega."""
    if count < 1:
        raise ValueError("count must be >= 1")
    points = []
    for i in range(count):
        rng = substream(seed, i)
        x = draw_omega_point(ctx, omega, rng)
        g = sample_group_element(ctx, rng, mode)
        z = g @ ctx.a_exp(1j * x)
        points.append(CrownPoint(z=z, base_g=g, direction_x=x, omega_tag=omega))
    return points


def tube_contains(ctx: GroupContext, tube: TubeSpec, point: CrownPoint,
                  tol: float = MEMBERSHIP_TOL, steps_hint: int = 16):
    """(member, margin) of a crown point in a tube.

    The margin is the omega margin of Im log a of the translated point; the
    translate k^{-1} g is again real, so the tracked branch stays anchored.
    """
    base = tube.base_k.T @ point.base_g
    log_full, _, _, _ = _track(ctx, base, [point.direction_x], steps_hint)
    margin = omega_margin(ctx, tube.omega, log_full[: ctx.n].imag)
    return margin >= -tol, float(margin)


def verify_tube_intersection(ctx: GroupContext, omega: OmegaSpec, z_count: int,
                             k_count: int, seed: int, tol: float = MEMBERSHIP_TOL,
                             steps_hint: int = 16,
                             threads: int | None = None) -> VerificationReport:
    """Assert every sampled crown point lies in every sampled compact tube."""
    if z_count < 1 or k_count < 1:
        raise ValueError("counts must be >= 1")
    start = time.monotonic()
    nn = ctx.n
    points = sample_xi(ctx, omega, z_count, seed)
    tubes = np.array([haar_k(ctx, substream(seed, NS_TUBE + j)) for j in range(k_count)])
    gs = np.array([p.base_g for p in points])
    xs = np.array([p.direction_x for p in points])
    pairs = [(zi, kj) for zi in range(z_count) for kj in range(k_count)]

    def run_chunk(lo, hi):
        idx = pairs[lo:hi]
        z_idx = np.array([a for a, _ in idx])
        k_idx = np.array([b for _, b in idx])
        base = np.swapaxes(tubes[k_idx], 1, 2) @ gs[z_idx]
        log_full, _, max_steps, bad = track_batch(ctx, base, xs[z_idx], steps_hint)
        ok = ~bad
        margins = np.array([
            omega_margin(ctx, omega, log_full[i, :nn].imag) if ok[i] else np.inf
            for i in range(len(idx))
        ])
        i_min = int(np.argmin(margins))
        witness = {
            "z_index": int(z_idx[i_min]),
            "k_index": int(k_idx[i_min]),
            "margin": float(margins[i_min]),
            "x": vector_wire(xs[z_idx[i_min]]),
        } if ok.any() else None
        return {
            "completed": int(ok.sum()),
            "indeterminate": int(bad.sum()),
            "violations": int(np.sum(margins < -tol)),
            "min_margin": float(margins.min()) if ok.any() else np.inf,
            "witness": witness,
            "max_arg_step": float(max_steps[ok].max()) if ok.any() else 0.0,
        }

    parts = map_chunks(run_chunk, chunk_ranges(len(pairs)), threads)
    return _fold(parts, command="tubes", ctx=ctx, omega=omega, seed=seed,
                 requested=len(pairs), tol=tol, start=start,
                 extras={"z_count": z_count, "k_count": k_count})


def _fold(parts, *, command, ctx, omega, seed, requested, tol, start, extras=None):
    completed = sum(p["completed"] for p in parts)
    indeterminate = sum(p["indeterminate"] for p in parts)
    min_margin = np.inf
    witness = None
    for p in parts:
        if p["min_margin"] < min_margin:
            min_margin = p["min_margin"]
            witness = p["witness"]
    all_extras = {"max_arg_step": max(p.get("max_arg_step", 0.0) for p in parts)}
    if extras:
        all_extras.update(extras)
    return VerificationReport(
        command=command,
        group={"family": ctx.family.value, "n": ctx.n,
               "killing_scale": ctx.killing_scale},
        omega=omega.as_dict() if omega is not None else None,
        seed=seed,
        samples_requested=requested,
        samples_completed=completed,
        samples_indeterminate=indeterminate,
        violations=sum(p["violations"] for p in parts),
        min_margin=None if not np.isfinite(min_margin) else float(min_margin),
        worst_witness=witness,
        wall_time_ms=int((time.monotonic() - start) * 1000),
        tolerance_set={"membership_tol": tol, "pivot_floor": PIVOT_FLOOR,
                       "arg_step_cap": ARG_STEP_CAP, "reconstruction_rtol": RECON_RTOL},
        extras=all_extras,
    )


def verify_image(ctx: GroupContext, omega: OmegaSpec, samples: int, seed: int,
                 tol: float = MEMBERSHIP_TOL, steps_hint: int = 16,
                 threads: int | None = None) -> VerificationReport:
    """Both inclusions of a(Xi(omega)) = A exp(i omega), sampled.

    Forward: Im log a of sampled crown points stays in omega.  Backward:
    points exp(iY) for sampled Y in omega are their own projections, which
    witnesses surjectivity on the abelian slice.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    start = time.monotonic()
    nn = ctx.n

    def run_chunk(lo, hi):
        count = hi - lo
        xs = np.empty((count, nn))
        gs = np.empty((count, ctx.ambient_size, ctx.ambient_size))
        ws = np.empty((count, nn))
        for i in range(count):
            rng = substream(seed, lo + i)
            xs[i] = draw_omega_point(ctx, omega, rng)
            gs[i] = sample_group_element(ctx, rng, "full-g")
            ws[i] = draw_omega_point(ctx, omega, rng)
        log_full, _, max_steps, bad = track_batch(ctx, gs, xs, steps_hint)
        ok = ~bad
        margins = np.array([
            omega_margin(ctx, omega, log_full[i, :nn].imag) if ok[i] else np.inf
            for i in range(count)
        ])
        slice_eye = np.tile(np.eye(ctx.ambient_size), (count, 1, 1))
        slice_log, _, _, slice_bad = track_batch(ctx, slice_eye, ws, steps_hint)
        witness_err = float(np.max(np.abs(slice_log[~slice_bad][:, :nn] - 1j * ws[~slice_bad]))) \
            if (~slice_bad).any() else np.inf
        i_min = int(np.argmin(margins))
        witness = {
            "sample_index": lo + i_min,
            "margin": float(margins[i_min]),
            "x": vector_wire(xs[i_min]),
            "g": matrix_wire(gs[i_min]),
        } if ok.any() else None
        return {
            "completed": int(ok.sum() + (~slice_bad).sum()),
            "indeterminate": int(bad.sum() + slice_bad.sum()),
            "violations": int(np.sum(margins < -tol)) + int(witness_err > 1e-10),
            "min_margin": float(margins.min()) if ok.any() else np.inf,
            "witness": witness,
            "max_arg_step": float(max_steps[ok].max()) if ok.any() else 0.0,
            "witness_err": witness_err,
        }

    parts = map_chunks(run_chunk, chunk_ranges(samples), threads)
    report = _fold(parts, command="image", ctx=ctx, omega=omega, seed=seed,
                   requested=2 * samples, tol=tol, start=start,
                   extras={"max_slice_witness_error": max(p["witness_err"] for p in parts)})
    return report


def boundary_path(ctx: GroupContext, omega: OmegaSpec, direction, steps: int = 12) -> list[np.ndarray]:
    """Geometric path (1 - 2^{-j}) X0 toward the boundary point X0 of omega along a ray.

    The direction should be regular so distances decrease strictly.
    """
    u = np.asarray(direction, dtype=float)
    vals = np.abs(ctx.root_datum.evaluate(u))
    cutoff = (omega.scale if omega.shape == "scale" else 1.0) * np.pi / 2.0
    s_star = cutoff / float(np.max(vals))
    if omega.shape == "ball":
        s_star = min(s_star, omega.radius / float(np.linalg.norm(u)))
    return [(1.0 - 0.5 ** j) * s_star * u for j in range(1, steps + 1)]


def boundary_probe(ctx: GroupContext, omega: OmegaSpec, g, x_path,
                   steps_hint: int = 16) -> list[tuple[int, float]]:
    """Boundary-approach distances of Im log a along a path toward the edge of omega.

    The path must stay in omega with strictly decreasing distance to the
    boundary, ending below 1e-3.  Returns (step, distance) pairs; distances
    are Euclidean.  Raises if a projected point ever leaves omega.
    """
    x_path = [np.asarray(x, dtype=float) for x in x_path]
    dists = [omega_distance(ctx, omega, x) for x in x_path]
    if any(d <= 0.0 for d in dists):
        raise ValueError("path must stay inside omega")
    if any(b >= a for a, b in zip(dists, dists[1:])):
        raise ValueError("path distances must be strictly decreasing")
    if dists[-1] >= 1e-3:
        raise ValueError("path must approach the boundary below 1e-3")
    g = np.asarray(g, dtype=float)
    out = []
    for step, x in enumerate(x_path):
        log_full, _, _, _ = _track(ctx, g, [x], steps_hint)
        y = log_full[: ctx.n].imag
        if omega_margin(ctx, omega, y) <= 0.0:
            raise BranchBreakdown(f"projected point left omega at step {step}")
        out.append((step, float(omega_distance(ctx, omega, y))))
    return out

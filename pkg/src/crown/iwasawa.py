"""Iwasawa factorization and its holomorphically tracked middle projection.

For z in the complexified group write z = n a k with n unit lower triangular,
a diagonal and k orthogonal (complex-orthogonal in the extension).  Then
``z z^T = n a^2 n^T`` because ``k k^T = I``, so the leading principal minors
Delta_j of z z^T satisfy ``a_j^2 = Delta_j / Delta_{j-1}``.  One elimination
pass produces the ratios as pivots and the unipotent factor as the multiplier
matrix.

On points ``z = g exp(iX)`` with g real and X inside the admissible polytope
the logarithm ``log a`` is determined by continuity along ``t -> g exp(itX)``
from the positive-definite real point at t = 0.  The branch is tracked by
unwrapping the arguments of the m pivot ratios: each step of the parameter
grid must move every ratio argument by less than pi/2, offending steps are
bisected, and the total number of segments is capped.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import (
    BranchBreakdown,
    NotInGroup,
    NumericalBreakdown,
    OmegaViolation,
    PivotBreakdown,
)
from .groups import Family, GroupContext
from .weyl import FULL_OMEGA, omega_margin

PIVOT_FLOOR = 1e-13
ARG_STEP_CAP = np.pi / 2.0
MAX_SEGMENTS = 2 ** 14
RECON_RTOL = 1e-10
SYM_TOL = 1e-10


@dataclasses.dataclass
class IwasawaFactors:
    """Factor triple (n, log a, k) with branch-tracking metadata.

    log_a holds Cartan coordinates (complex); the diagonal matrix is recovered
    through the context.  pair_residual records how well the redundant trailing
    log-ratios of the symplectic frame matched the negated leading ones.
    """

    n_part: np.ndarray
    log_a: np.ndarray
    k_part: np.ndarray
    path_steps: int
    max_arg_step: float
    pair_residual: float = 0.0


@dataclasses.dataclass(frozen=True)
class CrownPoint:
    """Point z = base_g exp(i X) of the crown, with its construction data."""

    z: np.ndarray
    base_g: np.ndarray
    direction_x: np.ndarray
    omega_tag: object = None


def _ldl(mat):
    """Batched one-pass LDL^T elimination without pivoting.

    Returns (ratios, unit_lower, norm_floor) where ratios[..., j] is
    Delta_j / Delta_{j-1} and norm_floor is the minimum over j of
    |Delta_j| divided by the Hadamard bound of the leading j rows.
    A nonpositive or NaN norm_floor flags a degenerate minor.
    """
    mat = np.asarray(mat)
    m = mat.shape[-1]
    work = np.array(mat, dtype=np.promote_types(mat.dtype, np.float64))
    lower = np.zeros_like(work)
    lower[..., range(m), range(m)] = 1.0
    ratios = np.empty(work.shape[:-2] + (m,), dtype=work.dtype)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(m):
            piv = work[..., j, j].copy()
            ratios[..., j] = piv
            if j + 1 < m:
                col = work[..., j + 1:, j] / piv[..., None]
                lower[..., j + 1:, j] = col
                work[..., j + 1:, j + 1:] -= col[..., :, None] * work[..., j, j + 1:][..., None, :]
    with np.errstate(invalid="ignore"):
        row_norms = np.sqrt(np.sum(np.abs(mat) ** 2, axis=-1))
        hadamard = np.maximum(np.cumprod(row_norms, axis=-1), np.finfo(float).tiny)
        abs_minors = np.cumprod(np.abs(ratios), axis=-1)
        norm_floor = np.min(abs_minors / hadamard, axis=-1)
    return ratios, lower, norm_floor


def normalized_minors(mat) -> np.ndarray:
    """|Delta_j| scaled by the Hadamard bound of the leading j rows."""
    mat = np.asarray(mat)
    ratios, _, _ = _ldl(mat)
    with np.errstate(invalid="ignore"):
        row_norms = np.sqrt(np.sum(np.abs(mat) ** 2, axis=-1))
        hadamard = np.maximum(np.cumprod(row_norms, axis=-1), np.finfo(float).tiny)
        return np.abs(np.cumprod(ratios, axis=-1)) / hadamard


def minor_ratios(mat, floor: float = PIVOT_FLOOR) -> np.ndarray:
    """Leading-principal-minor ratios (Delta_1/Delta_0, ..., Delta_m/Delta_{m-1}).

    The input must be symmetric to 1e-10.  Raises PivotBreakdown when a minor
    degenerates below the normalized floor.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    scale = 1.0 + float(np.max(np.abs(mat)))
    if np.max(np.abs(mat - mat.T)) > SYM_TOL * scale:
        raise ValueError("matrix is not symmetric to working precision")
    ratios, _, _ = _ldl(mat)
    norm = normalized_minors(mat)
    bad = np.flatnonzero(~(norm >= floor))
    if bad.size:
        j = int(bad[0])
        raise PivotBreakdown(
            f"minor {j + 1} degenerated (normalized size {norm[j]:.3e})",
            index=j, value=norm[j],
        )
    return ratios


def _path_ratios(ctx: GroupContext, g, coords):
    """Ratios of M(t) = g exp(2i diag(x_t)) g^T for a batch of diagonal paths.

    g has shape (..., m, m); coords has shape (..., T, n).
    """
    g = np.asarray(g)
    diag = np.exp(2j * ctx.full_diag(coords))        # (..., T, m)
    tmp = g[..., None, :, :] * diag[..., None, :]
    mats = tmp @ np.swapaxes(g, -1, -2)[..., None, :, :]
    return _ldl(mats)


def _refine(ss, bad):
    mids = 0.5 * (ss[bad] + ss[bad + 1])
    return np.sort(np.concatenate([ss, mids]))


def _track(ctx: GroupContext, g, waypoints, steps_hint: int):
    """Continuous branch of the log minor ratios along a polyline of directions.

    The path starts at direction 0 (the real point g) and moves linearly
    through the given waypoints.  Returns half of the tracked log ratios (the
    full diagonal of log a), the final unit lower factor, the number of grid
    segments used and the largest per-step argument move.
    """
    g = np.asarray(g, dtype=float)
    n = ctx.n
    arg = np.zeros(ctx.ambient_size)
    prev = np.zeros(n)
    total_steps = 0
    max_step = 0.0
    last_ratios = None
    last_lower = None
    for end in waypoints:
        end = np.asarray(end, dtype=float)
        ss = np.linspace(0.0, 1.0, max(int(steps_hint), 1) + 1)
        while True:
            coords = prev + ss[:, None] * (end - prev)[None, :]
            ratios, lower, floor = _path_ratios(ctx, g, coords)
            if not np.all(floor >= PIVOT_FLOOR):
                t_bad = float(ss[int(np.argmin(floor))])
                raise BranchBreakdown(
                    f"minor degenerated along the path near t={t_bad:.6f}", t=t_bad)
            dphi = np.angle(ratios[1:] / ratios[:-1])
            bad = np.flatnonzero(np.max(np.abs(dphi), axis=1) >= ARG_STEP_CAP)
            if not bad.size:
                break
            if len(ss) + bad.size - 1 > MAX_SEGMENTS:
                raise BranchBreakdown("subdivision cap exceeded while tracking the branch")
            ss = _refine(ss, bad)
        arg = arg + dphi.sum(axis=0)
        max_step = max(max_step, float(np.max(np.abs(dphi))) if dphi.size else 0.0)
        total_steps += len(ss) - 1
        prev = end
        last_ratios, last_lower = ratios[-1], lower[-1]
    log_full = 0.5 * (np.log(np.abs(last_ratios)) + 1j * arg)
    return log_full, last_lower, total_steps, max_step


def _assemble(ctx: GroupContext, g, x_end, log_full, lower, steps, max_step):
    z = np.asarray(g) @ ctx.a_exp(1j * np.asarray(x_end, dtype=float))
    a_diag = np.exp(log_full)
    k = np.linalg.solve(lower, z) / a_diag[:, None]
    if ctx.family is Family.SYMPLECTIC:
        nn = ctx.n
        pair = float(np.max(np.abs(log_full[:nn] + log_full[nn:][::-1])))
        coords = log_full[:nn].copy()
    else:
        pair = 0.0
        coords = log_full.copy()
    return IwasawaFactors(
        n_part=lower, log_a=coords, k_part=k,
        path_steps=steps, max_arg_step=max_step, pair_residual=pair,
    )


def project_complex(ctx: GroupContext, g, x, steps_hint: int = 16) -> IwasawaFactors:
    """Factors of z = g exp(iX) on the continuous branch anchored at t = 0.

    g must be a real group element and X must lie in the admissible polytope.
    """
    x = np.asarray(x, dtype=float)
    if omega_margin(ctx, FULL_OMEGA, x) <= 0.0:
        raise OmegaViolation("direction lies outside the admissible polytope")
    if not ctx.in_group(g):
        raise NotInGroup("base point fails the group membership check")
    log_full, lower, steps, max_step = _track(ctx, g, [x], steps_hint)
    return _assemble(ctx, g, x, log_full, lower, steps, max_step)


def project_complex_path(ctx: GroupContext, g, waypoints, steps_hint: int = 16) -> IwasawaFactors:
    """Same as project_complex but along a polyline 0 -> waypoints[0] -> ... .

    All waypoints must lie in the admissible polytope; the result for the last
    waypoint is path independent because the target tube is simply connected.
    """
    waypoints = [np.asarray(w, dtype=float) for w in waypoints]
    for w in waypoints:
        if omega_margin(ctx, FULL_OMEGA, w) <= 0.0:
            raise OmegaViolation("waypoint lies outside the admissible polytope")
    if not ctx.in_group(g):
        raise NotInGroup("base point fails the group membership check")
    log_full, lower, steps, max_step = _track(ctx, g, waypoints, steps_hint)
    return _assemble(ctx, g, waypoints[-1], log_full, lower, steps, max_step)


def decompose_real(ctx: GroupContext, g) -> IwasawaFactors:
    """Real Iwasawa factorization via LDL^T of g g^T."""
    g = np.asarray(g, dtype=float)
    if not ctx.in_group(g):
        raise NotInGroup("matrix fails the group membership check")
    ratios, lower, _ = _ldl(g @ g.T)
    if not np.all(ratios > 0.0):
        raise NumericalBreakdown("nonpositive pivot for a claimed group element")
    log_full = 0.5 * np.log(ratios)
    k = np.linalg.solve(lower, g) / np.exp(log_full)[:, None]
    if ctx.family is Family.SYMPLECTIC:
        nn = ctx.n
        pair = float(np.max(np.abs(log_full[:nn] + log_full[nn:][::-1])))
        coords = log_full[:nn].copy()
    else:
        pair = 0.0
        coords = log_full.copy()
    return IwasawaFactors(
        n_part=lower, log_a=coords, k_part=k,
        path_steps=0, max_arg_step=0.0, pair_residual=pair,
    )


def triangular_part(ctx: GroupContext, factors: IwasawaFactors) -> np.ndarray:
    """b = n a, lower triangular with diagonal exp(log a)."""
    diag = np.exp(ctx.full_diag(factors.log_a))
    return factors.n_part * diag[None, :]


def reconstruction_residual(ctx: GroupContext, factors: IwasawaFactors, z) -> float:
    """Relative Frobenius residual of n exp(log a) k against z."""
    z = np.asarray(z)
    recon = triangular_part(ctx, factors) @ factors.k_part
    return float(np.linalg.norm(recon - z) / max(np.linalg.norm(z), np.finfo(float).tiny))


def track_batch(ctx: GroupContext, g, xs, steps_hint: int = 16):
    """Vectorized branch tracking for a batch of (g_i, X_i) pairs.

    Runs the whole batch on one uniform grid and falls back to the adaptive
    scalar tracker for samples whose grid was too coarse, so per-sample results
    do not depend on the batch composition.

    Returns (log_full, lower, max_steps, bad) where bad marks samples whose
    tracking broke down; their rows are NaN.
    """
    g = np.asarray(g, dtype=float)
    xs = np.asarray(xs, dtype=float)
    batch = g.shape[0]
    ts = np.linspace(0.0, 1.0, max(int(steps_hint), 1) + 1)
    coords = ts[None, :, None] * xs[:, None, :]
    ratios, lower, floor = _path_ratios(ctx, g, coords)
    with np.errstate(invalid="ignore"):
        dphi = np.angle(ratios[:, 1:, :] / ratios[:, :-1, :])
    max_steps = np.max(np.abs(dphi), axis=(1, 2))
    floor_ok = np.all(floor >= PIVOT_FLOOR, axis=1)
    coarse = max_steps >= ARG_STEP_CAP
    log_full = 0.5 * (np.log(np.abs(ratios[:, -1, :])) + 1j * dphi.sum(axis=1))
    lower_last = lower[:, -1, :, :].copy()
    bad = np.zeros(batch, dtype=bool)
    for i in np.flatnonzero(~floor_ok | coarse):
        try:
            lf, ll, _, ms = _track(ctx, g[i], [xs[i]], steps_hint)
        except BranchBreakdown:
            bad[i] = True
            log_full[i] = np.nan
            continue
        log_full[i] = lf
        lower_last[i] = ll
        max_steps[i] = ms
    return log_full, lower_last, max_steps, bad


def batch_reconstruction_residual(ctx: GroupContext, g, xs, log_full, lower) -> np.ndarray:
    """Relative residuals of the factor products for a tracked batch."""
    g = np.asarray(g, dtype=float)
    xs = np.asarray(xs, dtype=float)
    z = g * np.exp(1j * ctx.full_diag(xs))[:, None, :]
    a_diag = np.exp(log_full)
    k = np.linalg.solve(lower, z) / a_diag[:, :, None]
    if ctx.family is Family.SYMPLECTIC:
        nn = ctx.n
        coords = log_full[:, :nn]
    else:
        coords = log_full
    diag_sym = np.exp(ctx.full_diag(coords))
    recon = (lower * diag_sym[:, None, :]) @ k
    num = np.linalg.norm(recon - z, axis=(1, 2))
    den = np.maximum(np.linalg.norm(z, axis=(1, 2)), np.finfo(float).tiny)
    return num / den

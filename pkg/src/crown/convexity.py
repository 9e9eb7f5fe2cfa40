"""Log-projection functionals on K, their critical points, and the convexity verifiers.

For a point a of the abelian tube and k in the maximal compact subgroup set
``f_a(k) = log a(k a)`` (tracked branch) and ``f_{a,lam}(k) = lam(f_a(k))`` for
a covector lam vanishing on the real Cartan subspace.  The derivative of
f_{a,lam} along exp(tX)k is ``kappa_R(X, Ad(n(ka)) H_lam)``, equivalently
``lam(p_a(Ad(b(ka))^{-1} X))`` through the triangular part; both routes are
implemented and cross-checked.  Critical points of f_{a,lam} for regular data
lie in the normalizer of the Cartan subspace, so seeded gradient ascents must
terminate at one of the finitely many values lam(i wX).
"""

from __future__ import annotations

import dataclasses
import itertools
import time

import numpy as np
import scipy.linalg

from .errors import InsideHull, NoConvergence, NonRealValue
from .groups import (
    GROUP_TOL,
    CovectorIA,
    Family,
    GroupContext,
    h_lambda,
    is_regular,
    pair_ia,
    project_a,
)
from .iwasawa import (
    batch_reconstruction_residual,
    project_complex,
    track_batch,
    triangular_part,
    ARG_STEP_CAP,
    PIVOT_FLOOR,
    RECON_RTOL,
)
from .parallel import chunk_ranges, map_chunks
from .report import VerificationReport, matrix_wire, vector_wire
from .rng import substream
from .sampling import (
    P_RADIUS,
    haar_k,
    k_project,
    sample_group_element,
    unitary_embed,
)
from .weyl import (
    FULL_OMEGA,
    MEMBERSHIP_TOL,
    OmegaSpec,
    apply_weyl,
    draw_omega_point,
    hull_margins_batch,
    omega_margin,
    weyl_elements,
    weyl_orbit,
)

REGULARITY_FLOOR = 1e-3
ARMIJO_SLOPE = 0.1
ARMIJO_SHRINK = 0.5
STEP_FLOOR = 1e-12
STEP_CAP = 2.0 ** 20
IM_N_FLOOR = 1e-10
NORMALIZER_GAP = 0.1


@dataclasses.dataclass
class CriticalRun:
    """One gradient ascent on K with its diagnostic trail."""

    start_k: np.ndarray
    end_k: np.ndarray
    f_values: np.ndarray
    grad_norm_final: float
    matched_weyl_value: float
    iterations: int
    converged: bool
    gap: float


def weyl_k_representatives(ctx: GroupContext):
    """(abstract element, matrix in K) pairs realizing the Weyl group.

    Signed permutation matrices; for the special linear family the sign of one
    column is flipped when needed to land in SO(n).  The adjoint action of the
    matrix on Cartan coordinates equals the abstract element's action.
    """
    n = ctx.n
    out = []
    for element in weyl_elements(ctx):
        perm, signs = element
        if ctx.family is Family.SPECIAL_LINEAR:
            mat = np.zeros((n, n))
            for j, p in enumerate(perm):
                mat[p, j] = 1.0
            if np.linalg.det(mat) < 0.0:
                mat[:, 0] = -mat[:, 0]
        else:
            u = np.zeros((n, n), dtype=complex)
            for j, (p, s) in enumerate(zip(perm, signs)):
                u[p, j] = 1.0 if s > 0 else 1.0j
            mat = unitary_embed(ctx, u)
        out.append((element, mat))
    return out


def _sign_diagonals(n, even_only):
    for eps in itertools.product((1.0, -1.0), repeat=n):
        if even_only and np.prod(eps) < 0.0:
            continue
        yield np.array(eps)


def normalizer_elements(ctx: GroupContext) -> np.ndarray:
    """All elements of the normalizer of the Cartan subspace in K."""
    n = ctx.n
    if ctx.family is Family.SPECIAL_LINEAR:
        centr = [np.diag(eps) for eps in _sign_diagonals(n, even_only=True)]
    else:
        centr = [unitary_embed(ctx, np.diag(eps).astype(complex))
                 for eps in _sign_diagonals(n, even_only=False)]
    reps = [mat for _, mat in weyl_k_representatives(ctx)]
    return np.array([r @ z for r in reps for z in centr])


def metric_inner(ctx: GroupContext, x, y) -> float:
    """Riemannian metric on the compact subalgebra: -kappa_R(X, Y)."""
    return float(-2.0 * ctx.killing_scale * np.trace(np.asarray(x) @ np.asarray(y)).real)


def f_a(ctx: GroupContext, a_point, k, steps_hint: int = 16) -> np.ndarray:
    """log a(k exp(a_point)) on the branch tracked from k, as Cartan coordinates."""
    a_point = np.asarray(a_point, dtype=complex)
    g = np.asarray(k) @ ctx.a_exp(a_point.real)
    factors = project_complex(ctx, g, a_point.imag, steps_hint)
    return factors.log_a


def f_a_lambda(ctx: GroupContext, a_point, k, lam: CovectorIA,
               steps_hint: int = 16) -> float:
    """lam(f_a(k)) through the kappa_R pairing.

    The pairing of a Cartan-space value with i*M is real by construction; a
    broken branch surfaces as a non-finite value and is rejected.
    """
    value = pair_ia(ctx, f_a(ctx, a_point, k, steps_hint), lam.m_coords)
    if not np.isfinite(value):
        raise NonRealValue("functional evaluation is not a finite real number")
    return float(value)


def grad_f(ctx: GroupContext, a_point, k, lam: CovectorIA,
           steps_hint: int = 16) -> np.ndarray:
    """Riemannian gradient of f_{a,lam} at k, as an element of the compact subalgebra.

    Built from the unipotent factor of k exp(a_point): the directional
    derivative along X is kappa_R(X, Ad(n) H_lam), so the gradient is minus the
    metric projection of Ad(n) H_lam onto the compact subalgebra.
    """
    a_point = np.asarray(a_point, dtype=complex)
    g = np.asarray(k) @ ctx.a_exp(a_point.real)
    factors = project_complex(ctx, g, a_point.imag, steps_hint)
    h = h_lambda(ctx, lam)
    n_part = factors.n_part
    ad_n_h = n_part @ np.linalg.solve(n_part.T, h.T).T
    rhs = -2.0 * ctx.killing_scale * np.einsum("kij,ji->k", ctx.basis_k, ad_n_h).real
    coeff = scipy.linalg.cho_solve(ctx.k_gram_chol, -rhs)
    return np.tensordot(coeff, ctx.basis_k, axes=1)


def directional_derivative_triangular(ctx: GroupContext, a_point, k,
                                      lam: CovectorIA, x_dir,
                                      steps_hint: int = 16) -> float:
    """Derivative of f_{a,lam} along exp(tX)k evaluated through the triangular part.

    Independent route used to cross-check grad_f: lam(p_a(Ad(b)^{-1} X)).
    """
    a_point = np.asarray(a_point, dtype=complex)
    g = np.asarray(k) @ ctx.a_exp(a_point.real)
    factors = project_complex(ctx, g, a_point.imag, steps_hint)
    b = triangular_part(ctx, factors)
    ad_b_inv = np.linalg.solve(b, np.asarray(x_dir, dtype=complex) @ b)
    return float(pair_ia(ctx, project_a(ctx, ad_b_inv), lam.m_coords))


def weyl_values(ctx: GroupContext, x, lam: CovectorIA) -> np.ndarray:
    """Values lam(i wX) over the Weyl orbit of x."""
    orbit = weyl_orbit(ctx, x)
    return -2.0 * ctx.coord_weight * (orbit @ lam.m_coords)


def ascend_critical(ctx: GroupContext, a_point, k0, lam: CovectorIA,
                    max_iter: int = 1000, tol: float = 1e-6,
                    steps_hint: int = 16, raise_on_failure: bool = False) -> CriticalRun:
    """Riemannian gradient ascent of f_{a,lam} with Armijo backtracking.

    Requires regular lam and regular imaginary direction.  Non-converged runs
    are returned with converged=False unless raise_on_failure is set.
    """
    a_point = np.asarray(a_point, dtype=complex)
    x_im = a_point.imag
    if not is_regular(ctx, lam.m_coords):
        raise ValueError("covector must be regular")
    if not is_regular(ctx, x_im):
        raise ValueError("imaginary direction must be regular")
    k = np.asarray(k0, dtype=float)
    f_cur = f_a_lambda(ctx, a_point, k, lam, steps_hint)
    f_values = [f_cur]
    grad_norm = np.inf
    iterations = 0
    converged = False
    for iterations in range(max_iter + 1):
        grad = grad_f(ctx, a_point, k, lam, steps_hint)
        sq_norm = metric_inner(ctx, grad, grad)
        grad_norm = np.sqrt(max(sq_norm, 0.0))
        if grad_norm < tol:
            converged = True
            break
        if iterations == max_iter:
            break

        def trial(eta):
            k_t = k_project(ctx, scipy.linalg.expm(eta * grad) @ k)
            return k_t, f_a_lambda(ctx, a_point, k_t, lam, steps_hint)

        eta = 1.0
        k_trial, f_trial = trial(eta)
        if f_trial >= f_cur + ARMIJO_SLOPE * eta * sq_norm:
            # flat ridges want steps far above 1; expand while the slope test holds
            while eta < STEP_CAP:
                k_next, f_next = trial(2.0 * eta)
                if f_next < f_cur + ARMIJO_SLOPE * 2.0 * eta * sq_norm or f_next <= f_trial:
                    break
                eta *= 2.0
                k_trial, f_trial = k_next, f_next
        else:
            stalled = True
            while eta >= STEP_FLOOR:
                eta *= ARMIJO_SHRINK
                k_trial, f_trial = trial(eta)
                if f_trial >= f_cur + ARMIJO_SLOPE * eta * sq_norm:
                    stalled = False
                    break
            if stalled:
                break
        k, f_cur = k_trial, f_trial
        f_values.append(f_cur)
    matched = float(np.max(weyl_values(ctx, x_im, lam)))
    run = CriticalRun(
        start_k=np.asarray(k0, dtype=float),
        end_k=k,
        f_values=np.array(f_values),
        grad_norm_final=float(grad_norm),
        matched_weyl_value=matched,
        iterations=iterations,
        converged=converged,
        gap=abs(f_values[-1] - matched),
    )
    if raise_on_failure and not converged:
        raise NoConvergence("gradient norm stayed above tolerance", run=run)
    return run


def sample_covector(ctx: GroupContext, rng, floor: float = REGULARITY_FLOOR) -> CovectorIA:
    """Unit-norm regular covector parameter, rejection-sampled to the floor."""
    while True:
        m = rng.standard_normal(ctx.n)
        if ctx.family is Family.SPECIAL_LINEAR:
            m -= m.mean()
        m /= np.linalg.norm(m)
        if is_regular(ctx, m, floor=floor):
            return CovectorIA(m_coords=m, regular=True)


def sample_regular_direction(ctx: GroupContext, omega: OmegaSpec, rng,
                             floor: float = REGULARITY_FLOOR) -> np.ndarray:
    """Point of omega with all root values bounded away from zero."""
    while True:
        x = draw_omega_point(ctx, omega, rng)
        if is_regular(ctx, x, floor=floor):
            return x


def _base_tolerances(tol: float) -> dict:
    return {
        "membership_tol": tol,
        "pivot_floor": PIVOT_FLOOR,
        "arg_step_cap": ARG_STEP_CAP,
        "reconstruction_rtol": RECON_RTOL,
        "group_tol": GROUP_TOL,
    }


def _margin_gate_type_a(ctx, xs, ys, margins, tol):
    if ctx.family is not Family.SPECIAL_LINEAR:
        return margins
    drift = np.abs(ys.sum(axis=1) - xs.sum(axis=1))
    return np.where(drift > tol, np.minimum(margins, tol - drift), margins)


def verify_complex_convexity(ctx: GroupContext, omega: OmegaSpec, samples: int,
                             seed: int, tol: float = MEMBERSHIP_TOL,
                             mode: str = "k", steps_hint: int = 16,
                             threads: int | None = None) -> VerificationReport:
    """Monte-Carlo check that Im log a(g exp(iX)) stays in conv(WX).

    Per sample: X uniform in omega, g Haar in K ("k" mode) or k exp(S) with a
    bounded symmetric part ("full-g" mode).  A sample is a violation when the
    hull margin of the imaginary part drops below -tol.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    start = time.monotonic()
    nn = ctx.n

    def run_chunk(lo, hi):
        count = hi - lo
        xs = np.empty((count, nn))
        gs = np.empty((count, ctx.ambient_size, ctx.ambient_size))
        for i in range(count):
            rng = substream(seed, lo + i)
            xs[i] = draw_omega_point(ctx, omega, rng)
            gs[i] = sample_group_element(ctx, rng, mode)
        log_full, lower, max_steps, bad = track_batch(ctx, gs, xs, steps_hint)
        ok = ~bad
        ys = np.where(ok[:, None], log_full[:, :nn].imag, 0.0)
        margins = hull_margins_batch(ctx, xs, ys)
        margins = _margin_gate_type_a(ctx, xs, ys, margins, tol)
        margins = np.where(ok, margins, np.inf)
        resid = batch_reconstruction_residual(
            ctx, gs[ok], xs[ok], log_full[ok], lower[ok]) if ok.any() else np.zeros(0)
        i_min = int(np.argmin(margins)) if count else 0
        witness = {
            "sample_index": lo + i_min,
            "margin": float(margins[i_min]),
            "x": vector_wire(xs[i_min]),
            "y": vector_wire(ys[i_min]),
            "g": matrix_wire(gs[i_min]),
        } if ok.any() else None
        return {
            "completed": int(ok.sum()),
            "indeterminate": int(bad.sum()),
            "violations": int(np.sum(margins < -tol)),
            "min_margin": float(margins.min()) if ok.any() else np.inf,
            "witness": witness,
            "max_resid": float(resid.max()) if resid.size else 0.0,
            "max_arg_step": float(max_steps[ok].max()) if ok.any() else 0.0,
        }

    parts = map_chunks(run_chunk, chunk_ranges(samples), threads)
    return _fold_report(
        parts, command="verify-convexity", ctx=ctx, omega=omega, seed=seed,
        samples=samples, tol=tol, start=start,
        extras={"mode": mode, "p_radius": P_RADIUS if mode == "full-g" else 0.0},
    )


def _fold_report(parts, *, command, ctx, omega, seed, samples, tol, start,
                 extras=None) -> VerificationReport:
    completed = sum(p["completed"] for p in parts)
    indeterminate = sum(p["indeterminate"] for p in parts)
    violations = sum(p["violations"] for p in parts)
    min_margin = np.inf
    witness = None
    max_resid = 0.0
    max_arg_step = 0.0
    for p in parts:
        if p["min_margin"] < min_margin:
            min_margin = p["min_margin"]
            witness = p["witness"]
        max_resid = max(max_resid, p.get("max_resid", 0.0))
        max_arg_step = max(max_arg_step, p.get("max_arg_step", 0.0))
    all_extras = {
        "max_reconstruction_residual": max_resid,
        "max_arg_step": max_arg_step,
    }
    if extras:
        all_extras.update(extras)
    return VerificationReport(
        command=command,
        group={"family": ctx.family.value, "n": ctx.n,
               "killing_scale": ctx.killing_scale},
        omega=omega.as_dict() if omega is not None else None,
        seed=seed,
        samples_requested=samples,
        samples_completed=completed,
        samples_indeterminate=indeterminate,
        violations=violations,
        min_margin=None if not np.isfinite(min_margin) else float(min_margin),
        worst_witness=witness,
        wall_time_ms=int((time.monotonic() - start) * 1000),
        tolerance_set=_base_tolerances(tol),
        extras=all_extras,
    )


def verify_kostant_real(ctx: GroupContext, samples: int, seed: int,
                        tol: float = MEMBERSHIP_TOL, box: float = 1.0,
                        vertex_tol: float = 1e-10,
                        threads: int | None = None) -> VerificationReport:
    """Containment and vertex sharpness of the real convexity statement.

    Containment: log a(k exp X) lies in conv(WX) for Haar k and X from a
    bounded box.  Sharpness: for every Weyl representative k_w the projection
    of k_w exp(X) equals wX to vertex_tol, so every vertex is attained.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    start = time.monotonic()
    nn = ctx.n
    reps = weyl_k_representatives(ctx)
    from .weyl import _helmert
    helm = _helmert(nn) if ctx.family is Family.SPECIAL_LINEAR else None

    def run_chunk(lo, hi):
        count = hi - lo
        xs = np.empty((count, nn))
        gs = np.empty((count, ctx.ambient_size, ctx.ambient_size))
        for i in range(count):
            rng = substream(seed, lo + i)
            if helm is not None:
                xs[i] = helm @ rng.uniform(-box, box, nn - 1)
            else:
                xs[i] = rng.uniform(-box, box, nn)
            gs[i] = haar_k(ctx, rng) @ ctx.a_exp(xs[i])
        from .iwasawa import _ldl
        ratios, lower, _ = _ldl(gs @ np.swapaxes(gs, 1, 2))
        log_full = 0.5 * np.log(ratios)
        ys = log_full[:, :nn]
        margins = hull_margins_batch(ctx, xs, ys)
        margins = _margin_gate_type_a(ctx, xs, ys, margins, tol)
        a_diag = np.exp(log_full)
        k_parts = np.linalg.solve(lower, gs) / a_diag[:, :, None]
        diag_sym = np.exp(ctx.full_diag(ys))
        recon = (lower * diag_sym[:, None, :]) @ k_parts
        resid = np.linalg.norm(recon - gs, axis=(1, 2)) / np.linalg.norm(gs, axis=(1, 2))
        vertex_err = 0.0
        a_exps = np.stack([ctx.a_exp(x) for x in xs])
        for element, kw in reps:
            gw = np.einsum("ij,bjk->bik", kw, a_exps)
            rw, _, _ = _ldl(gw @ np.swapaxes(gw, 1, 2))
            got = 0.5 * np.log(rw)[:, :nn]
            want = np.array([apply_weyl(x, element) for x in xs])
            vertex_err = max(vertex_err, float(np.max(np.abs(got - want))))
        i_min = int(np.argmin(margins))
        witness = {
            "sample_index": lo + i_min,
            "margin": float(margins[i_min]),
            "x": vector_wire(xs[i_min]),
            "y": vector_wire(ys[i_min]),
        }
        return {
            "completed": count,
            "indeterminate": 0,
            "violations": int(np.sum(margins < -tol)),
            "min_margin": float(margins.min()),
            "witness": witness,
            "max_resid": float(resid.max()),
            "max_arg_step": 0.0,
            "vertex_err": vertex_err,
        }

    parts = map_chunks(run_chunk, chunk_ranges(samples), threads)
    report = _fold_report(
        parts, command="verify-kostant", ctx=ctx, omega=None, seed=seed,
        samples=samples, tol=tol, start=start,
        extras={"box_halfwidth": box,
                "max_vertex_error": max(p["vertex_err"] for p in parts),
                "vertex_tol": vertex_tol,
                "weyl_order": len(reps)},
    )
    report.violations += int(report.extras["max_vertex_error"] > vertex_tol)
    if report.violations > report.samples_completed:
        report.violations = report.samples_completed
    return report


def separating_functional(ctx: GroupContext, x, y,
                          tol: float = MEMBERSHIP_TOL) -> CovectorIA:
    """Regular covector separating y from conv(Wx), for diagnostics.

    Direction: y minus its Euclidean projection onto the orbit polytope,
    nudged minimally into regular position while keeping the strict gap.
    """
    from scipy.optimize import minimize

    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    from .weyl import hull_contains
    member, _ = hull_contains(ctx, x, y, tol)
    if member:
        raise InsideHull("point already lies in the orbit hull")
    orbit = weyl_orbit(ctx, x)
    a_mat = orbit.T
    count = orbit.shape[0]

    def objective(c):
        r = a_mat @ c - y
        return 0.5 * float(r @ r), a_mat.T @ r

    res = minimize(
        objective, np.full(count, 1.0 / count), jac=True, method="SLSQP",
        bounds=[(0.0, 1.0)] * count,
        constraints=[{"type": "eq", "fun": lambda c: c.sum() - 1.0,
                      "jac": lambda c: np.ones_like(c)}],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    mu = y - a_mat @ res.x
    scale = np.linalg.norm(mu)
    generic = np.cos(0.7 * np.arange(1, ctx.n + 1))
    if ctx.family is Family.SPECIAL_LINEAR:
        generic = generic - generic.mean()
    generic /= np.linalg.norm(generic)
    delta = 0.0
    while True:
        cand = mu + delta * scale * generic
        gap = float(cand @ y - np.max(orbit @ cand))
        if gap > 0.0 and is_regular(ctx, cand, floor=1e-9 * np.linalg.norm(cand)):
            break
        delta = 1e-10 if delta == 0.0 else delta * 10.0
        if delta > 1e-2:
            raise RuntimeError("could not regularize the separating direction")
    return CovectorIA(m_coords=-cand / (2.0 * ctx.coord_weight), regular=True)


def random_k_direction(ctx: GroupContext, rng) -> np.ndarray:
    """Unit tangent direction in the compact subalgebra."""
    coeff = rng.standard_normal(len(ctx.basis_k))
    t = np.tensordot(coeff, ctx.basis_k, axes=1)
    return t / np.sqrt(metric_inner(ctx, t, t))


def gradient_check(ctx: GroupContext, configs: int, seed: int,
                   fd_step: float = 1e-5, max_tol: float = 1e-5,
                   pair_tol: float = 1e-10, steps_hint: int = 16) -> VerificationReport:
    """Finite-difference and triangular-route validation of grad_f.

    Per configuration: random tube point, Haar k, random covector and tangent
    direction.  The pairing of the gradient with the direction is compared
    against a central difference of f_{a,lam} and against the independent
    evaluation through the triangular part.
    """
    if configs < 1:
        raise ValueError("configs must be >= 1")
    start = time.monotonic()
    rel_errs = np.empty(configs)
    pair_errs = np.empty(configs)
    witness = None
    worst = -np.inf
    for i in range(configs):
        rng = substream(seed, i)
        x = draw_omega_point(ctx, OmegaSpec("scale", scale=0.9), rng)
        re = 0.3 * rng.standard_normal(ctx.n)
        if ctx.family is Family.SPECIAL_LINEAR:
            re -= re.mean()
        a_point = re + 1j * x
        k = haar_k(ctx, rng)
        lam = sample_covector(ctx, rng)
        direction = random_k_direction(ctx, rng)
        grad = grad_f(ctx, a_point, k, lam, steps_hint)
        exact = metric_inner(ctx, direction, grad)
        f_plus = f_a_lambda(ctx, a_point, scipy.linalg.expm(fd_step * direction) @ k, lam, steps_hint)
        f_minus = f_a_lambda(ctx, a_point, scipy.linalg.expm(-fd_step * direction) @ k, lam, steps_hint)
        fd = (f_plus - f_minus) / (2.0 * fd_step)
        rel_errs[i] = abs(exact - fd) / (1.0 + abs(exact))
        other = directional_derivative_triangular(ctx, a_point, k, lam, direction, steps_hint)
        pair_errs[i] = abs(exact - other)
        if rel_errs[i] > worst:
            worst = rel_errs[i]
            witness = {"sample_index": i, "rel_err": float(rel_errs[i]),
                       "exact": float(exact), "fd": float(fd)}
    violations = int(np.sum((rel_errs > max_tol) | (pair_errs > pair_tol)))
    return VerificationReport(
        command="gradient-check",
        group={"family": ctx.family.value, "n": ctx.n,
               "killing_scale": ctx.killing_scale},
        omega=None,
        seed=seed,
        samples_requested=configs,
        samples_completed=configs,
        samples_indeterminate=0,
        violations=violations,
        min_margin=None,
        worst_witness=witness,
        wall_time_ms=int((time.monotonic() - start) * 1000),
        tolerance_set={"fd_step": fd_step, "median_rel_tol": 1e-7,
                       "max_rel_tol": max_tol, "route_agreement_tol": pair_tol,
                       "pivot_floor": PIVOT_FLOOR, "arg_step_cap": ARG_STEP_CAP},
        extras={"median_rel_err": float(np.median(rel_errs)),
                "max_rel_err": float(np.max(rel_errs)),
                "max_route_gap": float(np.max(pair_errs))},
    )


def critical_point_scan(ctx: GroupContext, runs: int, seed: int,
                        gap_tol: float = 1e-6, grad_tol: float = 1e-6,
                        max_iter: int = 1000, steps_hint: int = 16) -> VerificationReport:
    """Seeded gradient ascents checked against the enumerated Weyl maxima.

    Converged runs whose final value misses max_w lam(i wX) by more than
    gap_tol are violations; non-converged runs are flagged as indeterminate,
    not failed.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    start = time.monotonic()
    omega = OmegaSpec("scale", scale=0.9)
    converged = 0
    violations = 0
    indeterminate = 0
    max_gap = 0.0
    total_iter = 0
    witness = None
    for i in range(runs):
        rng = substream(seed, i)
        x = sample_regular_direction(ctx, omega, rng)
        lam = sample_covector(ctx, rng)
        k0 = haar_k(ctx, rng)
        run = ascend_critical(ctx, 1j * x, k0, lam, max_iter=max_iter,
                              tol=grad_tol, steps_hint=steps_hint)
        total_iter += run.iterations
        if not run.converged:
            indeterminate += 1
            continue
        converged += 1
        if run.gap > max_gap:
            max_gap = run.gap
            witness = {"sample_index": i, "gap": float(run.gap),
                       "f_final": float(run.f_values[-1]),
                       "matched_weyl_value": float(run.matched_weyl_value)}
        if run.gap > gap_tol:
            violations += 1
    return VerificationReport(
        command="critical-points",
        group={"family": ctx.family.value, "n": ctx.n,
               "killing_scale": ctx.killing_scale},
        omega=omega.as_dict(),
        seed=seed,
        samples_requested=runs,
        samples_completed=converged,
        samples_indeterminate=indeterminate,
        violations=violations,
        min_margin=None,
        worst_witness=witness,
        wall_time_ms=int((time.monotonic() - start) * 1000),
        tolerance_set={"gap_tol": gap_tol, "grad_tol": grad_tol,
                       "regularity_floor": REGULARITY_FLOOR,
                       "armijo_slope": ARMIJO_SLOPE, "armijo_shrink": ARMIJO_SHRINK},
        extras={"convergence_rate": converged / runs,
                "max_gap_converged": max_gap,
                "mean_iterations": total_iter / runs},
    )


def lemma24_probe(ctx: GroupContext, x, samples: int, seed: int,
                  floor: float = IM_N_FLOOR, steps_hint: int = 16,
                  threads: int | None = None) -> VerificationReport:
    """Contrapositive probe: far from the normalizer the unipotent factor is not real.

    For Haar k rejected to Frobenius distance > 0.1 from every element of the
    normalizer of the Cartan subspace, records the minimum over samples of the
    largest entry of |Im n(k exp(iX))|.  Samples at or below the engineering
    floor are counted as violations.
    """
    x = np.asarray(x, dtype=float)
    if not is_regular(ctx, x, floor=REGULARITY_FLOOR):
        raise ValueError("direction must be regular")
    if omega_margin(ctx, FULL_OMEGA, x) <= 0.0:
        raise ValueError("direction must lie inside the admissible polytope")
    start = time.monotonic()
    normalizers = normalizer_elements(ctx)

    def draw_far_k(rng):
        while True:
            k = haar_k(ctx, rng)
            dist = np.min(np.linalg.norm(normalizers - k[None], axis=(1, 2)))
            if dist > NORMALIZER_GAP:
                return k

    def run_chunk(lo, hi):
        count = hi - lo
        gs = np.empty((count, ctx.ambient_size, ctx.ambient_size))
        for i in range(count):
            gs[i] = draw_far_k(substream(seed, lo + i))
        xs = np.tile(x, (count, 1))
        log_full, lower, max_steps, bad = track_batch(ctx, gs, xs, steps_hint)
        ok = ~bad
        im_n = np.max(np.abs(lower.imag), axis=(1, 2))
        im_n = np.where(ok, im_n, np.inf)
        i_min = int(np.argmin(im_n))
        witness = {
            "sample_index": lo + i_min,
            "im_n": float(im_n[i_min]),
            "k": matrix_wire(gs[i_min]),
        } if ok.any() else None
        return {
            "completed": int(ok.sum()),
            "indeterminate": int(bad.sum()),
            "violations": int(np.sum(im_n[ok] <= floor)),
            "min_margin": float(im_n.min()) if ok.any() else np.inf,
            "witness": witness,
            "max_resid": 0.0,
            "max_arg_step": float(max_steps[ok].max()) if ok.any() else 0.0,
        }

    parts = map_chunks(run_chunk, chunk_ranges(samples), threads)
    report = _fold_report(
        parts, command="lemma24", ctx=ctx, omega=None, seed=seed,
        samples=samples, tol=floor, start=start,
        extras={"x": list(map(float, x))},
    )
    report.tolerance_set["im_n_floor"] = floor
    report.tolerance_set["normalizer_gap"] = NORMALIZER_GAP
    report.tolerance_set["regularity_floor"] = REGULARITY_FLOOR
    report.extras["min_im_n"] = report.min_margin
    return report

"""Beamformer weight solvers.

Five related designs over a loaded covariance R:

- ``mvdr``: minimize w^H R w subject to w^H a0 = 1, in closed form.
- ``solve_sc``: adds a p-norm penalty gamma*||w^H A||_p^p over a grid of
  candidate interference directions, solved by iteratively reweighted
  least squares (IRLS) where every reweighted subproblem is again an
  MVDR-form closed solve.
- ``solve_wsc``: same penalty with per-direction weights q applied to
  the columns of A.
- ``solve_rmvb``: replaces the equality constraint by a worst-case gain
  floor over an uncertainty ellipsoid of steering vectors, a second-order
  cone program solved by a log-barrier interior-point method on the
  real-composite embedding of the complex variables, then polished on
  the active-constraint KKT system to machine precision.
- ``solve_rwsc``: the weighted penalty and the ellipsoid constraint
  together; IRLS outer loop, cone-program inner step.

All solvers symmetrize the covariance on entry and apply diagonal
loading before factorization. Covariance inputs may also be raw M x K
snapshot matrices (see :func:`sparsebeam.covariance.ensure_covariance`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .arrays import ArrayGeometry, steering_matrix, steering_vector
from .covariance import diagonal_load, ensure_covariance
from .errors import DomainError, SolverError

__all__ = [
    "SolverOptions",
    "Diagnostics",
    "BeamformerWeights",
    "Ellipsoid",
    "mvdr",
    "solve_sc",
    "solve_wsc",
    "build_ellipsoid",
    "solve_rmvb",
    "solve_rwsc",
]

_IRLS_EPS_FLOOR = 1e-12
_BARRIER_GAP = 1e-9
_NEWTON_TOL = 1e-10


@dataclass(frozen=True)
class SolverOptions:
    """Shared tuning knobs for every solver.

    gamma trades output power against the sparsity penalty; p in (0, 1]
    selects the penalty norm; irls_epsilon smooths |u|^(p-2) at the
    origin and is annealed by 0.1 every 10 iterations down to 1e-12.
    diagonal_loading is the relative loading applied to R before any
    factorization.
    """

    gamma: float = 2.0
    p: float = 1.0
    max_iterations: int = 100
    objective_tolerance: float = 1e-8
    irls_epsilon: float = 1e-8
    diagonal_loading: float = 1e-6

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise DomainError(f"p must lie in (0, 1], got {self.p}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be nonnegative, got {self.gamma}")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if not self.objective_tolerance > 0:
            raise DomainError("objective_tolerance must be positive")
        if not self.irls_epsilon > 0:
            raise DomainError("irls_epsilon must be positive")
        if self.diagonal_loading < 0:
            raise DomainError("diagonal_loading must be nonnegative")


@dataclass(frozen=True)
class Diagnostics:
    """Solve bookkeeping attached to every weight vector.

    constraint_residual is |w^H a0 - 1| for the equality-constrained
    methods and the signed worst-case margin real(w^H c) - ||E^H w|| - 1
    for the ellipsoid-constrained ones. objective_history records the
    smoothed objective after each IRLS iteration (empty for closed-form
    solves).
    """

    iterations: int
    final_objective: float
    constraint_residual: float
    converged: bool = True
    objective_history: tuple[float, ...] = ()


@dataclass(frozen=True)
class BeamformerWeights:
    w: np.ndarray
    method: str
    diagnostics: Diagnostics


@dataclass(frozen=True)
class Ellipsoid:
    """Steering-vector uncertainty set {center + shape @ u : ||u|| <= 1}.

    ``shape`` is M x r with full column rank; r = 0 denotes a degenerate
    point ellipsoid.
    """

    center: np.ndarray
    shape: np.ndarray

    @property
    def rank(self) -> int:
        return self.shape.shape[1]


def _loaded(covariance, opts: SolverOptions) -> np.ndarray:
    r = ensure_covariance(covariance)
    return diagonal_load(r, opts.diagonal_loading)


def _chol_solve(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        factor = cho_factor(r, lower=True, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"covariance factorization failed: {exc}") from exc
    return cho_solve(factor, b, check_finite=False)


def _mvdr_direction(r: np.ndarray, a0: np.ndarray) -> np.ndarray:
    x = _chol_solve(r, a0)
    denom = a0.conj() @ x
    if abs(denom) < 1e-300:
        raise SolverError("steering vector annihilated by the covariance inverse")
    # Dividing by the complex scalar makes w^H a0 = 1 exact in floating point.
    return x / denom


def mvdr(covariance, a0, opts: SolverOptions | None = None) -> BeamformerWeights:
    """Closed-form minimum-variance distortionless response weights.

    Returns w = R^-1 a0 / (a0^H R^-1 a0), the unique minimizer of
    w^H R w subject to w^H a0 = 1 for positive-definite loaded R.
    """
    opts = opts or SolverOptions()
    a0 = np.asarray(a0, dtype=complex)
    if not np.any(a0):
        raise DomainError("steering vector a0 must be nonzero")
    r = _loaded(covariance, opts)
    w = _mvdr_direction(r, a0)
    objective = float((w.conj() @ r @ w).real)
    residual = float(abs(w.conj() @ a0 - 1.0))
    return BeamformerWeights(w, "mvdr", Diagnostics(1, objective, residual))


def _smoothed_penalty(u: np.ndarray, gamma: float, p: float, eps: float) -> float:
    return gamma * float(np.sum((np.abs(u) ** 2 + eps) ** (p / 2.0)))


def _run_irls(r, aq, opts: SolverOptions, inner):
    """Shared IRLS loop. ``inner(R_eff) -> w`` solves the reweighted subproblem.

    Returns (w, iterations, final_objective, converged, history). The
    recorded objective is the epsilon-smoothed one, which the
    majorize-minimize update never increases; annealing epsilon only
    lowers it further.
    """
    w = inner(r)
    gamma, p = opts.gamma, opts.p
    eps = opts.irls_epsilon
    history: list[float] = []
    previous = None
    best_w, best_obj = w, np.inf
    converged = False
    iterations = 0
    for step in range(opts.max_iterations):
        if step > 0 and step % 10 == 0:
            eps = max(eps * 0.1, _IRLS_EPS_FLOOR)
        u = aq.conj().T @ w
        d = (np.abs(u) ** 2 + eps) ** ((p - 2.0) / 2.0) * (p / 2.0)
        r_eff = r + gamma * (aq * d[None, :]) @ aq.conj().T
        r_eff = 0.5 * (r_eff + r_eff.conj().T)
        w = inner(r_eff)
        quad = float((w.conj() @ r @ w).real)
        objective = quad + _smoothed_penalty(aq.conj().T @ w, gamma, p, eps)
        history.append(objective)
        iterations = step + 1
        if objective < best_obj:
            best_w, best_obj = w, objective
        if previous is not None and abs(objective - previous) <= (
            opts.objective_tolerance * max(1.0, abs(previous))
        ):
            converged = True
            break
        previous = objective
    return best_w, iterations, best_obj, converged, tuple(history)


def _validate_penalty_inputs(a, a0=None, q=None):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise DomainError("steering matrix A must be 2-D")
    if a0 is not None:
        a0 = np.asarray(a0, dtype=complex)
        if a0.shape != (a.shape[0],):
            raise DomainError("a0 length must match the steering matrix rows")
    if q is not None:
        q = np.asarray(q, dtype=float)
        if q.shape != (a.shape[1],):
            raise DomainError("q length must match the steering matrix columns")
        if np.any(q < 0):
            raise DomainError("q entries must be nonnegative")
    return a, a0, q


def solve_sc(covariance, a, a0, opts: SolverOptions | None = None) -> BeamformerWeights:
    """Sparse-constraint beamformer.

    Approximately minimizes w^H R w + gamma*||w^H A||_p^p subject to
    w^H a0 = 1. Each IRLS iteration folds the reweighted penalty into an
    effective covariance R + gamma*A D A^H and reuses the closed-form
    distortionless solve. The grid behind A must exclude the steering
    direction.
    """
    opts = opts or SolverOptions()
    a, a0, _ = _validate_penalty_inputs(a, a0)
    r = _loaded(covariance, opts)
    if opts.gamma == 0:
        base = _mvdr_direction(r, a0)
        objective = float((base.conj() @ r @ base).real)
        residual = float(abs(base.conj() @ a0 - 1.0))
        return BeamformerWeights(base, "sc", Diagnostics(1, objective, residual))
    w, iters, objective, converged, history = _run_irls(
        r, a, opts, lambda r_eff: _mvdr_direction(r_eff, a0)
    )
    residual = float(abs(w.conj() @ a0 - 1.0))
    return BeamformerWeights(
        w, "sc", Diagnostics(iters, objective, residual, converged, history)
    )


def solve_wsc(covariance, a, q, a0, opts: SolverOptions | None = None) -> BeamformerWeights:
    """Weighted-sparse-constraint beamformer.

    Identical to :func:`solve_sc` with A replaced by A Q in the penalty,
    Q = diag(q). q = 1 reproduces solve_sc; q = 0 reproduces mvdr.
    """
    opts = opts or SolverOptions()
    a, a0, q = _validate_penalty_inputs(a, a0, q)
    r = _loaded(covariance, opts)
    aq = a * q[None, :]
    if opts.gamma == 0 or not np.any(q):
        base = _mvdr_direction(r, a0)
        objective = float((base.conj() @ r @ base).real)
        residual = float(abs(base.conj() @ a0 - 1.0))
        return BeamformerWeights(base, "wsc", Diagnostics(1, objective, residual))
    w, iters, objective, converged, history = _run_irls(
        r, aq, opts, lambda r_eff: _mvdr_direction(r_eff, a0)
    )
    residual = float(abs(w.conj() @ a0 - 1.0))
    return BeamformerWeights(
        w, "wsc", Diagnostics(iters, objective, residual, converged, history)
    )


def build_ellipsoid(
    geometry: ArrayGeometry,
    theta0_deg: float,
    half_width_deg: float,
    num_samples: int = 13,
) -> Ellipsoid:
    """Fit an ellipsoid around steering vectors near a nominal direction.

    Samples a(theta) for theta in [theta0 - half_width, theta0 + half_width],
    takes the sample mean as the center, and scales the principal
    components of the centered samples so every sample satisfies
    ||E^+ (a - c)|| <= 1. half_width_deg = 0 returns the degenerate point
    ellipsoid at a(theta0).
    """
    if num_samples < 2:
        raise DomainError(f"num_samples must be >= 2, got {num_samples}")
    if half_width_deg < 0:
        raise DomainError(f"half_width_deg must be nonnegative, got {half_width_deg}")
    m = geometry.num_elements
    if half_width_deg == 0:
        return Ellipsoid(steering_vector(geometry, theta0_deg), np.zeros((m, 0), dtype=complex))
    angles = np.linspace(theta0_deg - half_width_deg, theta0_deg + half_width_deg, num_samples)
    samples = steering_matrix(geometry, angles)
    center = samples.mean(axis=1)
    centered = samples - center[:, None]
    u, sigma, _ = np.linalg.svd(centered, full_matrices=False)
    if sigma.size == 0 or sigma[0] <= 0:
        return Ellipsoid(center, np.zeros((m, 0), dtype=complex))
    rank = int(np.sum(sigma > sigma[0] * 1e-12))
    u, sigma = u[:, :rank], sigma[:rank]
    coords = u.conj().T @ centered
    # Smallest uniform inflation of the principal-axis lengths that puts
    # every sample inside the unit ball of the ellipsoid coordinates,
    # padded by 1e-6 so containment survives pseudoinverse roundoff in
    # downstream checks (the axis lengths can span ~10 decades).
    alpha = float(np.max(np.linalg.norm(coords / sigma[:, None], axis=0))) * (1.0 + 1e-6)
    return Ellipsoid(center, u * (alpha * sigma)[None, :])


def _real_embed_matrix(r: np.ndarray) -> np.ndarray:
    t = np.block([[r.real, -r.imag], [r.imag, r.real]])
    return 0.5 * (t + t.T)


def _real_embed_cone(center: np.ndarray, shape: np.ndarray):
    ct = np.concatenate([center.real, center.imag])
    if shape.shape[1] == 0:
        g = np.zeros((0, 2 * center.size))
    else:
        g = np.block(
            [[shape.real.T, shape.imag.T], [-shape.imag.T, shape.real.T]]
        )
    return ct, g


def _margin(w: np.ndarray, center: np.ndarray, shape: np.ndarray) -> float:
    return float((w.conj() @ center).real - np.linalg.norm(shape.conj().T @ w))


def _feasible_start(r, center, shape, extra=None):
    candidates = []
    if extra is not None:
        candidates.append(extra)
    try:
        candidates.append(_chol_solve(r, center))
    except SolverError:
        pass
    candidates.append(center.astype(complex))
    if shape.shape[1]:
        u = np.linalg.svd(shape, full_matrices=False)[0]
        perp = center - u @ (u.conj().T @ center)
        # perp is orthogonal to every ellipsoid axis, so its cone term
        # vanishes and its margin is exactly ||perp||^2 > 0.
        if np.linalg.norm(perp) > 1e-10 * np.linalg.norm(center):
            candidates.append(perp)
        ee = shape @ shape.conj().T
        scale = float(np.trace(ee).real)
        eye = np.eye(center.size)
        # Damped directions (E E^H + mu I)^-1 c; as mu -> 0 the margin
        # tends to b(b - 1) with b = ||E^+ c||, which is positive exactly
        # when the problem is feasible in the full-column-space case.
        for mu in (1e-12, 1e-8, 1e-4, 1e-1):
            try:
                candidates.append(np.linalg.solve(ee + mu * scale * eye, center))
            except np.linalg.LinAlgError:
                continue
    for w in candidates:
        m = _margin(w, center, shape)
        # The margin is 1-homogeneous, so any candidate with positive
        # margin rescales to a strictly feasible interior point.
        if m > 1e-14 * max(1.0, float(np.linalg.norm(w))):
            return w * (1.5 / m)
    raise SolverError(
        "ellipsoid constraint is infeasible: no weight vector attains a "
        "positive worst-case gain (the uncertainty set contains the origin)"
    )


def _kkt_polish(t, ct, g, gtg, v, obj_scale):
    """Newton iteration on the active-constraint KKT system.

    At the optimum of min v^T T v s.t. ct.v - ||G v|| >= 1 with positive
    definite T the constraint is active; stationarity reads
    2 T v = lam * (ct - G^T Gv/||Gv||). Quadratic local convergence
    recovers machine-precision weights from the barrier estimate.
    """
    dim = v.size
    lam = None
    for _ in range(60):
        gv = g @ v
        s = float(np.linalg.norm(gv))
        if s < 1e-14:
            gradient = ct
            curvature = np.zeros((dim, dim))
        else:
            ghat = gv / s
            gt_ghat = g.T @ ghat
            gradient = ct - gt_ghat
            curvature = (gtg - np.outer(gt_ghat, gt_ghat)) / s
        tv2 = 2.0 * t @ v
        if lam is None:
            denom = float(gradient @ gradient)
            lam = max(float(gradient @ tv2) / denom, 1e-300) if denom > 0 else 1.0
        residual = np.concatenate([tv2 - lam * gradient, [1.0 + s - float(ct @ v)]])
        norm_res = float(np.linalg.norm(residual))
        if norm_res <= 1e-12 * max(1.0, obj_scale * float(np.linalg.norm(tv2))):
            break
        kkt = np.zeros((dim + 1, dim + 1))
        kkt[:dim, :dim] = 2.0 * t + lam * curvature
        kkt[:dim, dim] = -gradient
        kkt[dim, :dim] = -gradient
        try:
            delta = np.linalg.solve(kkt, -residual)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(kkt, -residual, rcond=None)[0]
        step = 1.0
        for _ in range(40):
            v_new = v + step * delta[:dim]
            lam_new = lam + step * delta[dim]
            gv_new = g @ v_new
            s_new = float(np.linalg.norm(gv_new))
            if s_new < 1e-14:
                grad_new = ct
            else:
                grad_new = ct - g.T @ (gv_new / s_new)
            res_new = np.concatenate(
                [2.0 * t @ v_new - lam_new * grad_new, [1.0 + s_new - float(ct @ v_new)]]
            )
            if float(np.linalg.norm(res_new)) < (1.0 - 0.25 * step) * norm_res:
                break
            step *= 0.5
        v = v + step * delta[:dim]
        lam = lam + step * delta[dim]
    return v


def _socp_min_quadratic(r, center, shape, warm=None):
    """Minimize w^H R w subject to real(w^H c) - ||E^H w|| >= 1.

    Log-barrier interior-point method over the real-composite embedding
    (complex M-vector as a real 2M-vector; the Hermitian form becomes a
    symmetric one), followed by a KKT polish. The rank-0 ellipsoid
    reduces to a closed-form linear-constraint solve.
    """
    m = center.size
    if shape.shape[1] == 0:
        x = _chol_solve(r, center)
        denom = (center.conj() @ x).real
        if denom <= 0:
            raise SolverError("center direction has nonpositive quadratic-form inverse power")
        return x / denom
    # Objective scaling does not move the minimizer; normalize for conditioning.
    scale = float(np.trace(r).real) / m
    if not scale > 0:
        raise SolverError("covariance has nonpositive trace")
    t = _real_embed_matrix(np.asarray(r) / scale)
    ct, g = _real_embed_cone(center, shape)
    gtg = g.T @ g
    ct_outer = np.outer(ct, ct)

    w0 = _feasible_start(r, center, shape, extra=warm)
    v = np.concatenate([w0.real, w0.imag])

    barrier_t = 1.0
    while True:
        for _ in range(60):
            s = float(ct @ v) - 1.0
            gv = g @ v
            d = s * s - float(gv @ gv)
            grad_d = 2.0 * s * ct - 2.0 * (g.T @ gv)
            grad = 2.0 * barrier_t * (t @ v) - grad_d / d
            hess = (
                2.0 * barrier_t * t
                - (2.0 * ct_outer - 2.0 * gtg) / d
                + np.outer(grad_d, grad_d) / (d * d)
            )
            try:
                dv = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                dv = np.linalg.lstsq(hess, -grad, rcond=None)[0]
            decrement = float(-grad @ dv)
            if decrement <= 2.0 * _NEWTON_TOL:
                break
            phi = barrier_t * float(v @ t @ v) - np.log(d)
            step = 1.0
            for _ in range(60):
                v_try = v + step * dv
                s_try = float(ct @ v_try) - 1.0
                if s_try > 0:
                    gv_try = g @ v_try
                    d_try = s_try * s_try - float(gv_try @ gv_try)
                    if d_try > 0:
                        phi_try = barrier_t * float(v_try @ t @ v_try) - np.log(d_try)
                        if phi_try <= phi - 0.25 * step * decrement:
                            break
                step *= 0.5
            else:
                break
            v = v + step * dv
        # Self-concordant barrier with parameter 2: duality gap <= 2/t.
        if 2.0 / barrier_t <= _BARRIER_GAP:
            break
        barrier_t *= 10.0

    v = _kkt_polish(t, ct, g, gtg, v, obj_scale=1.0)
    w = v[:m] + 1j * v[m:]
    if not np.all(np.isfinite(w)):
        raise SolverError("cone solve produced non-finite weights")
    return w


def solve_rmvb(covariance, ellipsoid: Ellipsoid, opts: SolverOptions | None = None) -> BeamformerWeights:
    """Robust minimum-variance beamformer over a steering ellipsoid.

    Minimizes w^H R w subject to the worst case of real(w^H a) over the
    ellipsoid staying at or above 1. The constraint is active at the
    optimum for positive definite loaded R.
    """
    opts = opts or SolverOptions()
    r = _loaded(covariance, opts)
    w = _socp_min_quadratic(r, ellipsoid.center, ellipsoid.shape)
    objective = float((w.conj() @ r @ w).real)
    residual = _margin(w, ellipsoid.center, ellipsoid.shape) - 1.0
    return BeamformerWeights(w, "rmvb", Diagnostics(1, objective, residual))


def solve_rwsc(
    covariance, a, q, ellipsoid: Ellipsoid, opts: SolverOptions | None = None
) -> BeamformerWeights:
    """Robust weighted-sparse beamformer.

    Minimizes w^H R w + gamma*||w^H A Q||_p^p under the ellipsoid
    worst-case gain floor. The IRLS outer loop folds the reweighted
    penalty into R_eff = R + gamma*A Q D Q A^H and each inner step is the
    ellipsoid-constrained cone solve. gamma = 0 reduces to solve_rmvb.
    """
    opts = opts or SolverOptions()
    a, _, q = _validate_penalty_inputs(a, q=q)
    r = _loaded(covariance, opts)
    center, shape = ellipsoid.center, ellipsoid.shape
    if opts.gamma == 0 or not np.any(q):
        w = _socp_min_quadratic(r, center, shape)
        objective = float((w.conj() @ r @ w).real)
        residual = _margin(w, center, shape) - 1.0
        return BeamformerWeights(w, "rwsc", Diagnostics(1, objective, residual))
    aq = a * q[None, :]
    state = {"last": None}

    def inner(r_eff):
        w_inner = _socp_min_quadratic(r_eff, center, shape, warm=state["last"])
        state["last"] = w_inner
        return w_inner

    w, iters, objective, converged, history = _run_irls(r, aq, opts, inner)
    residual = _margin(w, center, shape) - 1.0
    return BeamformerWeights(
        w, "rwsc", Diagnostics(iters, objective, residual, converged, history)
    )

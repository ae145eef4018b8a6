"""Isometric embedding of positive-curvature metrics on S^2 into R^3.

Gauss-Newton iteration on the degree-L harmonic coefficients of the
embedding X, driving the pointwise metric mismatch h(X) - h_target to zero.
The residual rows are equilibrated in the orthonormal round frame
(1, 1/sin th, 1/sin^2 th) so pole-adjacent nodes carry comparable weight,
and the whole problem is solved at unit scale (metric divided by
s^2 = area/4pi) so the tolerance is meaningful for spheres of any size.

The embedding is unique only up to rigid motions.  The returned surface is
gauge-fixed deterministically: proper orientation (outward normals), center
of mass at the origin, and rotation chosen by orthogonal Procrustes
alignment onto the round reference sphere, which aligns principal axes with
the coordinate axes for ellipsoidal shapes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, GridMismatchError, InvalidArgumentError, NotConvexError
from .sphere import InducedMetric, ScalarField, SphereGrid, integrate
from .surfaces import EmbeddedSurface, surface_geometry

DEFAULT_TOL = 1e-9
MAX_NEWTON_STEPS = 50


@dataclass(frozen=True)
class WeylSolution:
    """Converged (or best-effort) isometric embedding of a metric."""

    surface: EmbeddedSurface
    residual: float          # sup-norm metric mismatch, raw components
    residual_scaled: float   # same, on the area-normalized metric
    iterations: int
    converged: bool


def embedding_residual(surface: EmbeddedSurface, h: InducedMetric) -> float:
    """Sup-norm of the componentwise difference between X*delta and h."""
    if not surface.grid.compatible(h.grid):
        raise GridMismatchError("surface and metric live on different grids")
    hs = surface.metric
    return float(max(np.abs(hs.tt - h.tt).max(),
                     np.abs(hs.tp - h.tp).max(),
                     np.abs(hs.pp - h.pp).max()))


_SECOND_BASIS_CACHE: dict[int, tuple] = {}


def _second_bases(grid: SphereGrid):
    """(Ytt, Ytp, Ypp) synthesis matrices at the grid's working degree."""
    key = grid.band_limit
    if key not in _SECOND_BASIS_CACHE:
        from .harmonics import dphi_matrix, real_sh_basis
        _, Yt, _, Ytt = real_sh_basis(grid.theta, grid.phi, grid.work_degree, second=True)
        Ytp = dphi_matrix(Yt, grid.work_degree)
        Ypp = dphi_matrix(grid.Yp, grid.work_degree)
        _SECOND_BASIS_CACHE[key] = (Ytt, Ytp, Ypp)
    return _SECOND_BASIS_CACHE[key]


def _nhat_derivatives(grid: SphereGrid):
    """Analytic derivatives of the unit-sphere embedding up to third order.

    Returns a dict keyed by strings of 't'/'p' (e.g. 'tp' = d_theta d_phi),
    each an (n, 3) array.
    """
    st, ct = grid.sin_theta, grid.cos_theta
    cp, sp = np.cos(grid.phi), np.sin(grid.phi)
    zero = np.zeros_like(st)
    n = np.stack([st * cp, st * sp, ct], axis=-1)
    d = {
        "t": np.stack([ct * cp, ct * sp, -st], axis=-1),
        "p": np.stack([-st * sp, st * cp, zero], axis=-1),
        "tt": -n,
        "tp": np.stack([-ct * sp, ct * cp, zero], axis=-1),
        "pp": np.stack([-st * cp, -st * sp, zero], axis=-1),
    }
    d["ttt"] = -d["t"]
    d["ttp"] = -d["p"]
    d["tpp"] = np.stack([-ct * cp, -ct * sp, zero], axis=-1)
    d["ppp"] = np.stack([st * sp, -st * cp, zero], axis=-1)
    return d


def metric_gauss_curvature(h: InducedMetric) -> np.ndarray:
    """Gauss curvature of an abstract metric via the Brioschi formula.

    The raw (th, ph) components of a smooth metric are not smooth scalars on
    the sphere (they carry frame singularities at the poles), so they are
    first converted to the smooth ambient tensor

        H_ij = h_ab sigma^{aa'} sigma^{bb'} (d_a' nhat_i)(d_b' nhat_j),

    whose six entries are pole-safe scalars.  Chart derivatives of h are
    then reconstructed from spectral derivatives of H_ij and analytic
    derivatives of nhat, and fed to Brioschi.  Spectrally accurate for every
    smooth metric; used as the convexity precondition of the solver.
    """
    g = h.grid
    Ytt, Ytp, Ypp = _second_bases(g)
    dn = _nhat_derivatives(g)
    inv_s2 = 1.0 / g.sin_theta ** 2

    # Smooth ambient representation H_ij.
    Ut = dn["t"]
    Up = dn["p"] * inv_s2[:, None]
    H = (h.tt[:, None, None] * Ut[:, :, None] * Ut[:, None, :]
         + h.tp[:, None, None] * (Ut[:, :, None] * Up[:, None, :]
                                  + Up[:, :, None] * Ut[:, None, :])
         + h.pp[:, None, None] * Up[:, :, None] * Up[:, None, :])

    # Spectral derivatives of the six smooth entries.
    idx = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
    coef = {ij: g.analysis(H[:, ij[0], ij[1]]) for ij in idx}

    def d_matrix(key):
        return {"t": g.Yt, "p": g.Yp, "tt": Ytt, "tp": Ytp, "pp": Ypp}[key]

    def dH(key):
        out = np.empty((g.size, 3, 3))
        mat = d_matrix(key)
        for (i, j) in idx:
            out[:, i, j] = out[:, j, i] = mat @ coef[(i, j)]
        return out

    H1 = {k: dH(k) for k in ("t", "p")}
    H2 = {k: dH(k) for k in ("tt", "tp", "pp")}

    T = {"t": dn["t"], "p": dn["p"]}

    def key(*letters):
        """Canonical multi-index: all 't's before all 'p's."""
        joined = "".join(letters)
        return "t" * joined.count("t") + "p" * joined.count("p")

    def h_first(gamma, alpha, beta):
        """d_gamma h_{alpha beta} at the nodes."""
        return (np.einsum("nij,ni,nj->n", H1[gamma], T[alpha], T[beta])
                + np.einsum("nij,ni,nj->n", H, dn[key(gamma, alpha)], T[beta])
                + np.einsum("nij,ni,nj->n", H, T[alpha], dn[key(gamma, beta)]))

    def h_second(delta, gamma, alpha, beta):
        """d_delta d_gamma h_{alpha beta} at the nodes."""
        dga = dn[key(gamma, alpha)]
        dgb = dn[key(gamma, beta)]
        dda = dn[key(delta, alpha)]
        ddb = dn[key(delta, beta)]
        ddga = dn[key(delta, gamma, alpha)]
        ddgb = dn[key(delta, gamma, beta)]
        d2H = H2[key(delta, gamma)]
        return (np.einsum("nij,ni,nj->n", d2H, T[alpha], T[beta])
                + np.einsum("nij,ni,nj->n", H1[gamma], dda, T[beta])
                + np.einsum("nij,ni,nj->n", H1[gamma], T[alpha], ddb)
                + np.einsum("nij,ni,nj->n", H1[delta], dga, T[beta])
                + np.einsum("nij,ni,nj->n", H, ddga, T[beta])
                + np.einsum("nij,ni,nj->n", H, dga, ddb)
                + np.einsum("nij,ni,nj->n", H1[delta], T[alpha], dgb)
                + np.einsum("nij,ni,nj->n", H, dda, dgb)
                + np.einsum("nij,ni,nj->n", H, T[alpha], ddgb))

    E, F, G = h.tt, h.tp, h.pp
    E_u, E_v = h_first("t", "t", "t"), h_first("p", "t", "t")
    F_u, F_v = h_first("t", "t", "p"), h_first("p", "t", "p")
    G_u, G_v = h_first("t", "p", "p"), h_first("p", "p", "p")
    E_vv = h_second("p", "p", "t", "t")
    G_uu = h_second("t", "t", "p", "p")
    F_uv = h_second("t", "p", "t", "p")

    a = -0.5 * E_vv + F_uv - 0.5 * G_uu
    det1 = (a * (E * G - F * F)
            - 0.5 * E_u * ((F_v - 0.5 * G_u) * G - 0.5 * G_v * F)
            + (F_u - 0.5 * E_v) * ((F_v - 0.5 * G_u) * F - 0.5 * G_v * E))
    det2 = (-(0.5 * E_v) * (0.5 * E_v * G - 0.5 * G_u * F)
            + 0.5 * G_u * (0.5 * E_v * F - 0.5 * G_u * E))
    return (det1 - det2) / h.det ** 2


def _gauge_normalize(grid: SphereGrid, X: np.ndarray) -> np.ndarray:
    """Proper orientation, centering, Procrustes alignment to the round sphere."""
    S = surface_geometry(grid, X)
    if np.mean(S.k0) < 0.0:
        X = X * np.array([1.0, 1.0, -1.0])
        S = surface_geometry(grid, X)
    dv = grid.weights * S.metric.mu
    area = dv.sum()
    X = X - (dv @ X)[None, :] / area

    nhat = grid.nhat()
    B = (X * dv[:, None]).T @ nhat
    U, _, Vt = np.linalg.svd(B)
    Q = (Vt.T * np.array([1.0, 1.0, np.linalg.det(Vt.T @ U.T)])) @ U.T
    return X @ Q.T


def solve_weyl(h: InducedMetric, initial_guess: EmbeddedSurface | None = None,
               tol: float = DEFAULT_TOL, max_iterations: int = MAX_NEWTON_STEPS) -> WeylSolution:
    """Find an isometric embedding X of (S^2, h) into R^3.

    Preconditions: the Brioschi Gauss curvature of h must be positive
    everywhere (raises NotConvexError otherwise).  Raises ConvergenceError
    (carrying the best iterate) if the Gauss-Newton iteration fails to bring
    the scale-normalized sup-norm mismatch below `tol` within
    `max_iterations` steps.
    """
    if tol <= 0.0:
        raise InvalidArgumentError("tol must be positive")
    grid = h.grid
    if np.min(metric_gauss_curvature(h)) <= 0.0:
        raise NotConvexError("metric has nonpositive Gauss curvature somewhere")

    area = float(integrate(ScalarField(grid, np.ones(grid.size)), h))
    s = np.sqrt(area / (4.0 * np.pi))
    target = np.stack([h.tt, h.tp, h.pp]) / s ** 2

    if initial_guess is None:
        X = grid.nhat().copy()
    else:
        if not initial_guess.grid.compatible(grid):
            raise GridMismatchError("initial guess grid does not match the metric")
        X = initial_guess.X / s

    nc = grid.n_coef
    Ytc = grid.Yt[:, :nc]
    Ypc = grid.Yp[:, :nc]
    st = grid.sin_theta
    row_w = np.stack([np.ones_like(st), 1.0 / st, 1.0 / st ** 2])

    coeffs = grid.truncate(grid.analysis(X))

    def metric_of(c):
        Xt, Xp = grid.synth_deriv(c)
        return Xt, Xp, np.stack([
            np.einsum("ni,ni->n", Xt, Xt),
            np.einsum("ni,ni->n", Xt, Xp),
            np.einsum("ni,ni->n", Xp, Xp),
        ])

    Xt, Xp, comp = metric_of(coeffs)
    res_vec = (comp - target) * row_w
    best = (np.abs(comp - target).max(), coeffs)
    objective = float(np.sum(res_vec ** 2))
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        if best[0] <= tol:
            break
        # Jacobian of the weighted residual w.r.t. the 3*nc coefficients.
        J_tt = 2.0 * np.einsum("nj,nc->njc", Xt, Ytc)
        J_tp = np.einsum("nj,nc->njc", Xt, Ypc) + np.einsum("nj,nc->njc", Xp, Ytc)
        J_pp = 2.0 * np.einsum("nj,nc->njc", Xp, Ypc)
        J = np.concatenate([
            (J_tt * row_w[0][:, None, None]).reshape(grid.size, -1),
            (J_tp * row_w[1][:, None, None]).reshape(grid.size, -1),
            (J_pp * row_w[2][:, None, None]).reshape(grid.size, -1),
        ])
        r = res_vec.reshape(-1)
        A = J.T @ J
        ridge = 1e-12 * np.trace(A) / A.shape[0]
        A[np.diag_indices_from(A)] += ridge
        try:
            delta = -np.linalg.solve(A, J.T @ r)
        except np.linalg.LinAlgError:
            delta = -np.linalg.lstsq(J, r, rcond=1e-10)[0]
        delta = delta.reshape(3, nc).T

        # Backtracking line search on the weighted least-squares objective.
        step = 1.0
        improved = False
        for _ in range(12):
            trial = coeffs + step * delta
            Xt_n, Xp_n, comp_n = metric_of(trial)
            res_n = (comp_n - target) * row_w
            obj_n = float(np.sum(res_n ** 2))
            if obj_n < objective:
                coeffs, Xt, Xp, comp = trial, Xt_n, Xp_n, comp_n
                res_vec, objective = res_n, obj_n
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        sup = np.abs(comp - target).max()
        if sup < best[0]:
            best = (sup, coeffs)

    residual_scaled = float(best[0])
    X_final = _gauge_normalize(grid, grid.synthesis(best[1]) * s)
    surface = surface_geometry(grid, X_final)
    residual = embedding_residual(surface, h)
    converged = residual_scaled <= tol
    solution = WeylSolution(surface=surface, residual=residual,
                            residual_scaled=residual_scaled,
                            iterations=iterations, converged=converged)
    if not converged:
        raise ConvergenceError(
            f"solve_weyl: no convergence after {iterations} iterations "
            f"(best scaled residual {residual_scaled:.3e}, tol {tol:.3e})",
            best_residual=residual_scaled, iterations=iterations, best=solution)
    return solution

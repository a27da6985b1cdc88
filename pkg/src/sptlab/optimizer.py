"""Global minimization of the Landau potentials.

Deterministic multi-start strategy: the origin, closed-form stationary
candidates where the family admits them, a mode-ratio line scan for the
Dicke family, and the best points of a coarse grid are each polished by a
damped Newton iteration that uses the analytic gradient and a
finite-difference Hessian. No randomness anywhere, so repeated calls are
bit-identical.

The closed-form candidates are derived by solving grad phi = 0 directly:

* RabiStarkHubbard (v = 0, q = u^2, a = 1 - j_tilde, S = 1 + 2 u_tilde q):
  stationarity  a * sqrt(S^2 + 4 gamma^2 q) = S u_tilde + gamma^2  reduces
  to a quadratic in q whose unique positive root, written in a
  cancellation-free form, is

      q = ((u_tilde + gamma^2)^2 - a^2)
          / (2 sqrt(P) (a gamma sqrt(gamma^2 + 2 u_tilde)
                        + sqrt(P) (u_tilde + gamma^2))),
      P = a^2 - u_tilde^2.

  The root is positive exactly when gamma^2 + j_tilde + u_tilde > 1, which
  is therefore the phase boundary; the limit u_tilde -> 0 recovers
  q = (gamma^4 - a^2) / (4 gamma^2 a^2).

* AnisotropicRabiStark: the same expression with j_tilde = 0 and gamma
  replaced by gamma1 (u branch) or gamma2 (v branch). Stationary points
  with both quadratures nonzero exist only when gamma1 = gamma2, where the
  whole circle u^2 + v^2 = q is degenerate.

* MultimodeDicke12 with all gamma_prime = 0: u_nu^2 = gamma_nu^2
  (1 - 1/|gamma|^4) / 4 above |gamma| = 1.

For the Dicke family with two-photon couplings the stationarity conditions
pin the mode ratios to u_m = gamma_m u_1 / (gamma_1 + 2 (gamma_prime_1 -
gamma_prime_m) u_1), which turns the search into a one-dimensional scan
along that curve; the scan minimum is used as a polish start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .landau import (
    embed_reduced,
    grad_reduced,
    gradient,
    phi_batch,
    phi_reduced,
    reduced_dim,
)
from .models import (
    AnisotropicRabiStark,
    Model,
    MultimodeDicke12,
    RabiStarkHubbard,
    stability_check,
)

__all__ = [
    "MinimizeResult",
    "HessianReport",
    "OracleResult",
    "minimize",
    "hessian_check",
    "brute_force_oracle",
]

# Below this squared displacement a minimum is identified with the origin
# and reported as the normal phase.
NP_THRESHOLD = 1.0e-10
# Minima whose potential values differ by less than this are degenerate.
TIE_TOL = 1.0e-10


@dataclass(frozen=True)
class MinimizeResult:
    """Outcome of the global Landau-potential minimization.

    z_min uses the full coordinate layout of the model; order_parameter is
    |z_min|^2 (exactly 0.0 for the normal phase). degenerate_minima lists
    further minima whose potential ties z_min within TIE_TOL, sign copies
    included.
    """

    z_min: np.ndarray
    phi_min: float
    order_parameter: float
    converged: bool
    used_fallback: bool
    n_starts: int
    polish_iterations: int
    degenerate_minima: Tuple[np.ndarray, ...] = ()


# ======================================================================
# Closed-form stationary candidates
# ======================================================================

def _positive_stationary_q(gamma: float, j_tilde: float, u_tilde: float) -> Optional[float]:
    """Unique positive stationary q = u^2 of the hopping/Stark potential,
    or None in the normal phase. Cancellation-free for small u_tilde."""
    a = 1.0 - j_tilde
    g2 = gamma * gamma
    big_g = u_tilde + g2
    num = big_g * big_g - a * a
    if num <= 0.0:
        return None
    p = a * a - u_tilde * u_tilde
    # p > 0 is guaranteed by stability (a > u_tilde >= 0).
    sqrt_p = math.sqrt(p)
    den = 2.0 * sqrt_p * (a * gamma * math.sqrt(g2 + 2.0 * u_tilde) + sqrt_p * big_g)
    if den <= 0.0:
        return None
    return num / den


def _candidates_rsh(model: RabiStarkHubbard) -> List[np.ndarray]:
    q = _positive_stationary_q(model.gamma, model.j_tilde, model.u_tilde)
    if q is None:
        return []
    return [np.array([math.sqrt(q)])]


def _candidates_ars(model: AnisotropicRabiStark) -> List[np.ndarray]:
    out = []
    qu = _positive_stationary_q(model.gamma1, 0.0, model.u_tilde)
    if qu is not None:
        out.append(np.array([math.sqrt(qu), 0.0]))
    qv = _positive_stationary_q(model.gamma2, 0.0, model.u_tilde)
    if qv is not None:
        out.append(np.array([0.0, math.sqrt(qv)]))
    return out


def _dicke_line_scan(
    model: MultimodeDicke12, beta_omega, half_width: float, n_scan: int = 1024
) -> Optional[np.ndarray]:
    """Best point of the mode-ratio curve u_m(u_lead); None when flat."""
    g = np.asarray(model.gamma)
    gp = np.asarray(model.gamma_prime)
    lead = int(np.argmax(g))
    if g[lead] <= 0.0:
        return None
    # Poles of the ratio denominators bound the scan range.
    cap = half_width * max(1.0, float(np.max(g)))
    dgp = gp[lead] - gp
    for m in range(len(g)):
        if dgp[m] < 0.0:
            cap = min(cap, -g[lead] / (2.0 * dgp[m]) * 0.999)
    if cap <= 0.0:
        return None
    t = np.linspace(0.0, cap, n_scan)[1:]
    denom = g[lead] + 2.0 * np.outer(t, dgp)
    u = g * t[:, None] / denom
    vals = phi_reduced(model, u, beta_omega)
    k = int(np.argmin(vals))
    return u[k]


def _candidates_dicke(
    model: MultimodeDicke12, beta_omega, half_width: float
) -> List[np.ndarray]:
    g = np.asarray(model.gamma)
    gp = np.asarray(model.gamma_prime)
    out: List[np.ndarray] = []
    if np.all(gp == 0.0):
        g2 = float(g @ g)
        if g2 > 1.0:
            out.append(0.5 * g * math.sqrt(1.0 - 1.0 / (g2 * g2)))
        return out
    pt = _dicke_line_scan(model, beta_omega, half_width)
    if pt is not None and float(np.max(np.abs(pt))) > 0.0:
        out.append(pt)
    return out


def _analytic_candidates(model: Model, beta_omega, half_width: float) -> List[np.ndarray]:
    if isinstance(model, MultimodeDicke12):
        return _candidates_dicke(model, beta_omega, half_width)
    if isinstance(model, RabiStarkHubbard):
        return _candidates_rsh(model)
    return _candidates_ars(model)


# ======================================================================
# Newton polish
# ======================================================================

def _fd_hessian_reduced(model, x, beta_omega) -> np.ndarray:
    d = x.size
    h = 1.0e-6 * np.maximum(1.0, np.abs(x))
    cols = np.empty((d, d))
    for j in range(d):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h[j]
        xm[j] -= h[j]
        cols[:, j] = (
            grad_reduced(model, xp, beta_omega) - grad_reduced(model, xm, beta_omega)
        ) / (2.0 * h[j])
    return 0.5 * (cols + cols.T)


def _newton_polish(
    model, x0, beta_omega, max_iter: int, gtol: float = 1.0e-12, ftol: float = 1.0e-12
):
    """Damped Newton descent; returns (x, phi, iterations, converged)."""
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    f = float(phi_reduced(model, x, beta_omega))
    mu = 0.0
    last_df = math.inf
    it = 0
    eye = np.eye(d)
    for it in range(1, max_iter + 1):
        g = grad_reduced(model, x, beta_omega)
        gn = float(np.max(np.abs(g)))
        if gn < gtol and last_df < ftol:
            return x, f, it, True
        hess = _fd_hessian_reduced(model, x, beta_omega)
        accepted = False
        for _ in range(40):
            try:
                dx = np.linalg.solve(hess + mu * eye, -g)
            except np.linalg.LinAlgError:
                mu = max(10.0 * mu, 1.0e-8)
                continue
            fn = float(phi_reduced(model, x + dx, beta_omega))
            if fn <= f + 1.0e-15 and np.all(np.isfinite(dx)):
                accepted = True
                break
            mu = max(10.0 * mu, 1.0e-8)
        if not accepted:
            # No decreasing step exists at this damping range; accept the
            # point if first-order optimal at a relaxed level.
            return x, f, it, gn < 1.0e-9
        last_df = f - fn
        x = x + dx
        f = fn
        mu *= 0.25
    g = grad_reduced(model, x, beta_omega)
    return x, f, max_iter, bool(np.max(np.abs(g)) < gtol)


def _grid_starts(model, beta_omega, grid_points, half_width, n_keep=3):
    d = reduced_dim(model)
    if grid_points < 2 or d > 4:
        return []
    axis = np.linspace(-half_width, half_width, grid_points)
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    vals = phi_reduced(model, mesh, beta_omega)
    order = np.argsort(vals, kind="stable")[:n_keep]
    return [mesh[idx] for idx in order]


def _canonical_sign(model, x, f, beta_omega) -> np.ndarray:
    """Map to nonnegative coordinates when sign flips are exact symmetries."""
    xa = np.abs(x)
    if np.array_equal(xa, x):
        return x
    fa = float(phi_reduced(model, xa, beta_omega))
    if abs(fa - f) <= 1.0e-12 * max(1.0, abs(f)):
        return xa
    return x


def _sign_copies(model, x) -> List[np.ndarray]:
    """Exact symmetry partners of a minimizer (reduced coordinates)."""
    out: List[np.ndarray] = []
    if isinstance(model, RabiStarkHubbard):
        if abs(x[0]) > 0.0:
            out.append(-x)
    elif isinstance(model, AnisotropicRabiStark):
        for su, sv in ((-1, 1), (1, -1), (-1, -1)):
            y = x * np.array([su, sv], dtype=float)
            if not np.array_equal(y, x):
                out.append(y)
    elif isinstance(model, MultimodeDicke12):
        if np.all(np.asarray(model.gamma_prime) == 0.0) and np.any(x != 0.0):
            out.append(-x)
    # Drop duplicates introduced by zero components.
    uniq: List[np.ndarray] = []
    for y in out:
        if not any(np.array_equal(y, z) for z in uniq):
            uniq.append(y)
    return uniq


def minimize(
    model: Model,
    beta_omega: Optional[float] = None,
    *,
    grid_points: int = 9,
    grid_half_width: float = 3.0,
    polish_max_iter: int = 200,
) -> MinimizeResult:
    """Global minimum of the Landau potential.

    Raises ValueError for unstable parameters (the potential is unbounded
    or loses confinement there). Searches the reduced coordinate space in
    which all stationary points live, then reports the minimum in the full
    z layout. Results with |z_min|^2 < NP_THRESHOLD are snapped to the
    origin and reported with order_parameter exactly 0.0.
    """
    stab = stability_check(model)
    if not stab.stable:
        raise ValueError(f"unstable parameters: {stab.reason}")

    d = reduced_dim(model)
    origin = np.zeros(d)
    phi0 = float(phi_reduced(model, origin, beta_omega))

    starts: List[np.ndarray] = []
    starts.extend(_analytic_candidates(model, beta_omega, grid_half_width))
    starts.extend(_grid_starts(model, beta_omega, grid_points, grid_half_width))

    # The origin is stationary for every family, so it enters as a finished
    # candidate rather than a polish start.
    results = [(origin, phi0, 0, True)]
    for s in starts:
        x, f, its, ok = _newton_polish(model, s, beta_omega, polish_max_iter)
        results.append((x, f, its, ok))

    used_fallback = False
    if starts and not any(ok for _, _, _, ok in results[1:]):
        # Documented fallback: a fine grid scan replaces the failed polish.
        used_fallback = True
        fine = _grid_starts(model, beta_omega, 2001 if d <= 2 else 41,
                            grid_half_width, n_keep=1)
        if fine:
            x, f, its, ok = _newton_polish(model, fine[0], beta_omega, polish_max_iter)
            results.append((x, f, its, ok))

    phis = np.array([r[1] for r in results])
    best = int(np.argmin(phis))
    # Deterministic tie-break among degenerate minima: smallest potential,
    # then lexicographically smallest canonical coordinates.
    tied = [
        (_canonical_sign(model, r[0], r[1], beta_omega), r[1], r[2], r[3])
        for r in results
        if r[1] <= phis[best] + TIE_TOL
    ]
    tied.sort(key=lambda r: (r[1], tuple(r[0])))
    x_min, phi_min, win_iters, win_ok = tied[0]

    degenerate: List[np.ndarray] = []
    for x, f, _, _ in tied[1:]:
        if np.max(np.abs(x - x_min)) < 1.0e-6:
            continue
        if not any(np.max(np.abs(x - y)) < 1.0e-6 for y in degenerate):
            degenerate.append(x)
    for y in _sign_copies(model, x_min):
        if not any(np.max(np.abs(y - q)) < 1.0e-6 for q in degenerate):
            degenerate.append(y)

    if float(x_min @ x_min) < NP_THRESHOLD:
        x_min = np.zeros(d)
        phi_min = phi0
        order_parameter = 0.0
        degenerate = []
    else:
        order_parameter = float(x_min @ x_min)

    return MinimizeResult(
        z_min=embed_reduced(model, x_min),
        phi_min=float(phi_min),
        order_parameter=order_parameter,
        converged=bool(win_ok),
        used_fallback=used_fallback,
        n_starts=len(starts) + 1,
        polish_iterations=int(win_iters),
        degenerate_minima=tuple(embed_reduced(model, y) for y in degenerate),
    )


# ======================================================================
# Curvature diagnostics
# ======================================================================

@dataclass(frozen=True)
class HessianReport:
    classification: str  # "positive_definite" | "singular" | "indefinite"
    eigenvalues: np.ndarray


def hessian_check(
    model: Model,
    z,
    beta_omega: Optional[float] = None,
    *,
    grad_tol: float = 1.0e-6,
    eig_tol: float = 1.0e-8,
) -> HessianReport:
    """Classify the curvature of phi at a stationary point of the full space.

    Requires |grad phi|_inf <= grad_tol; the Hessian is built by central
    finite differences of the analytic gradient and symmetrized.
    """
    z = np.asarray(z, dtype=float)
    g = gradient(model, z, beta_omega)
    if float(np.max(np.abs(g))) > grad_tol:
        raise ValueError(
            f"hessian_check requires a stationary point; |grad|_inf = "
            f"{float(np.max(np.abs(g))):.3e} exceeds {grad_tol:g}"
        )
    d = z.size
    h = 1.0e-6 * np.maximum(1.0, np.abs(z))
    cols = np.empty((d, d))
    for j in range(d):
        zp = z.copy()
        zm = z.copy()
        zp[j] += h[j]
        zm[j] -= h[j]
        cols[:, j] = (
            gradient(model, zp, beta_omega) - gradient(model, zm, beta_omega)
        ) / (2.0 * h[j])
    hess = 0.5 * (cols + cols.T)
    eigs = np.linalg.eigvalsh(hess)
    if np.all(eigs > eig_tol):
        label = "positive_definite"
    elif np.any(eigs < -eig_tol):
        label = "indefinite"
    else:
        label = "singular"
    return HessianReport(label, eigs)


# ======================================================================
# Exhaustive oracle (test harness; not a hot path)
# ======================================================================

@dataclass(frozen=True)
class OracleResult:
    z_min: np.ndarray
    phi_min: float
    step: float
    n_points: int


def brute_force_oracle(
    model: Model,
    beta_omega: Optional[float] = None,
    *,
    half_width: float = 3.0,
    step: float = 1.0e-3,
    max_points: int = 300_000_000,
    chunk_rows: int = 64,
) -> OracleResult:
    """Exhaustive grid scan of phi over [-half_width, half_width]^z_dim.

    Deliberately independent of the multi-start machinery. Raises for
    grids above max_points; high-dimensional cases should be checked with
    per-mode reduced scans instead.
    """
    d = model.z_dim
    axis = np.arange(-half_width, half_width + 0.5 * step, step)
    n = axis.size
    total = n**d
    if total > max_points:
        raise ValueError(
            f"grid of {total} points exceeds max_points={max_points}; reduce the "
            "dimension with a per-mode reduced scan or coarsen the step"
        )
    best_val = math.inf
    best_z = np.zeros(d)
    if d == 1:
        vals = phi_batch(model, axis[:, None], beta_omega)
        k = int(np.argmin(vals))
        return OracleResult(axis[k : k + 1].copy(), float(vals[k]), step, n)
    rest = [axis] * (d - 1)
    rest_mesh = np.stack(np.meshgrid(*rest, indexing="ij"), axis=-1).reshape(-1, d - 1)
    for i0 in range(0, n, chunk_rows):
        block = axis[i0 : i0 + chunk_rows]
        pts = np.empty((block.size, rest_mesh.shape[0], d))
        pts[:, :, 0] = block[:, None]
        pts[:, :, 1:] = rest_mesh[None, :, :]
        vals = phi_batch(model, pts, beta_omega)
        k = int(np.argmin(vals))
        vmin = float(vals.flat[k])
        if vmin < best_val:
            best_val = vmin
            i, j = divmod(k, rest_mesh.shape[0])
            best_z = pts[i, j].copy()
    return OracleResult(best_z, best_val, step, total)

"""Phase classification, radial boundary tracing, and parameter sweeps.

The phase of a model is read off the global minimum of its Landau
potential: a zero minimizer is the normal phase (NP), a nonzero one the
superradiant phase (SP). Because the potential obeys the radial coupling
identity, the phase is monotone along rays from the origin of coupling
space: each ray crosses the boundary at most once, so bisection on the ray
parameter locates the boundary to any requested precision. The transition
order falls out of the same scan: a continuous order parameter at the
crossing signals second order, a jump signals first order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .models import (
    AnisotropicRabiStark,
    Model,
    MultimodeDicke12,
    RabiStarkHubbard,
    from_coupling_vector,
    stability_check,
)
from .optimizer import NP_THRESHOLD, _positive_stationary_q, minimize

__all__ = [
    "PhasePoint",
    "BoundaryCrossing",
    "classify",
    "model_params",
    "analytic_boundary",
    "analytic_radial_crossing",
    "radial_boundary",
    "closed_form_order_parameter",
    "first_order_jump",
    "sweep",
]

# Order-parameter jump below which a crossing counts as second order.
ORDER_EPS = 1.0e-6
# Hard cap on sweep sizes.
SWEEP_MAX_POINTS = 1_000_000


@dataclass(frozen=True)
class PhasePoint:
    """Classified point of a phase diagram.

    phase is one of "NP", "SP", "SP_u", "SP_v", "unstable". The split SP
    labels are used for the anisotropic family, where either quadrature can
    order; degenerate marks points whose minimum is non-unique beyond sign
    flips (the equal-coupling continuum)."""

    kind: str
    params: Dict[str, float]
    phase: str
    order_parameter: float
    phi: float
    z_min: Optional[np.ndarray]
    degenerate: bool = False


def model_params(model: Model) -> Dict[str, float]:
    """Flat parameter dictionary (stable key order, scalar values)."""
    if isinstance(model, MultimodeDicke12):
        out: Dict[str, float] = {}
        for i, g in enumerate(model.gamma, start=1):
            out[f"gamma{i}"] = g
        for i, gp in enumerate(model.gamma_prime, start=1):
            out[f"gamma_prime{i}"] = gp
        return out
    if isinstance(model, RabiStarkHubbard):
        return {
            "gamma": model.gamma,
            "j_tilde": model.j_tilde,
            "u_tilde": model.u_tilde,
        }
    return {
        "gamma1": model.gamma1,
        "gamma2": model.gamma2,
        "u_tilde": model.u_tilde,
    }


def _is_sign_copy(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.max(np.abs(np.abs(a) - np.abs(b))) < 1.0e-6)


def classify(model: Model, beta_omega: Optional[float] = None, **minimize_kwargs) -> PhasePoint:
    """Phase label of a single parameter point.

    Unstable parameter sets are labeled rather than raised, so sweeps can
    cover regions that touch the stability boundary."""
    stab = stability_check(model)
    if not stab.stable:
        return PhasePoint(
            kind=model.kind,
            params=model_params(model),
            phase="unstable",
            order_parameter=math.nan,
            phi=math.nan,
            z_min=None,
        )
    res = minimize(model, beta_omega, **minimize_kwargs)
    degenerate = any(
        not _is_sign_copy(z, res.z_min) for z in res.degenerate_minima
    )
    if res.order_parameter == 0.0:
        phase = "NP"
    elif isinstance(model, AnisotropicRabiStark) and not degenerate:
        u2 = res.z_min[0] ** 2
        v2 = res.z_min[1] ** 2
        if u2 > NP_THRESHOLD and v2 <= NP_THRESHOLD:
            phase = "SP_u"
        elif v2 > NP_THRESHOLD and u2 <= NP_THRESHOLD:
            phase = "SP_v"
        else:
            phase = "SP"
    else:
        phase = "SP"
    return PhasePoint(
        kind=model.kind,
        params=model_params(model),
        phase=phase,
        order_parameter=res.order_parameter,
        phi=res.phi_min,
        z_min=res.z_min,
        degenerate=degenerate,
    )


# ======================================================================
# Analytic boundaries
# ======================================================================

def analytic_boundary(model: Model) -> float:
    """Critical squared one-photon coupling magnitude.

    Returns the value of sum(gamma_nu^2) (Dicke, equal two-photon
    couplings), gamma^2 (hopping/Stark), or max(gamma1, gamma2)^2
    (anisotropic) at which the superradiant transition occurs, holding the
    remaining parameters fixed. Dicke input with unequal two-photon
    couplings has no closed boundary here; trace it with radial_boundary.
    """
    if isinstance(model, MultimodeDicke12):
        gp = np.asarray(model.gamma_prime)
        if np.max(gp) - np.min(gp) > 0.0:
            raise ValueError(
                "closed-form boundary requires equal two-photon couplings; "
                "use radial_boundary for the general case"
            )
        return 1.0 - float(gp[0]) ** 2
    if isinstance(model, RabiStarkHubbard):
        return 1.0 - model.j_tilde - model.u_tilde
    return 1.0 - model.u_tilde


def _direction_array(kind: str, direction: Sequence[float]) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    if d.ndim != 1 or d.size < 2:
        raise ValueError("direction must be a one-dimensional vector")
    if not np.all(np.isfinite(d)) or np.any(d < 0.0):
        raise ValueError("direction components must be finite and nonnegative")
    n = float(np.linalg.norm(d))
    if n == 0.0:
        raise ValueError("direction must be nonzero")
    d = d / n
    # Shape check via a throwaway construction at t=1.
    from_coupling_vector(kind, d)
    return d


def _stability_cap(kind: str, d: np.ndarray) -> float:
    """Largest ray parameter below which every point is strictly stable."""
    if kind == "multimode_dicke12":
        ds = float(np.max(d[d.size // 2 :]))
        return math.inf if ds == 0.0 else 1.0 / ds
    if kind == "rabi_stark_hubbard":
        r = math.hypot(d[1], d[2])
        return math.inf if r == 0.0 else 1.0 / r
    return math.inf if d[2] == 0.0 else 1.0 / d[2]


def analytic_radial_crossing(kind: str, direction: Sequence[float]) -> Optional[float]:
    """Closed-form boundary magnitude along a normalized ray, or None if the
    ray stays in the normal phase for its whole stable range.

    For the Dicke family the two-photon direction components must be equal
    so the equal-coupling boundary applies along the entire ray.
    """
    d = _direction_array(kind, direction)
    if kind == "multimode_dicke12":
        m = d.size // 2
        ds = d[m:]
        if np.max(ds) - np.min(ds) > 1.0e-12:
            raise ValueError(
                "closed-form crossing requires equal two-photon direction "
                "components; use radial_boundary instead"
            )
        c1 = float(d[:m] @ d[:m])
        s4 = float(ds[0]) ** 4
        if c1 == 0.0:
            return None
        if s4 == 0.0:
            return 1.0 / math.sqrt(c1)
        # boundary: c1 t^2 + s4 t^4 = 1
        t2 = (-c1 + math.sqrt(c1 * c1 + 4.0 * s4)) / (2.0 * s4)
        return math.sqrt(t2)
    if kind == "rabi_stark_hubbard":
        # boundary: gamma^2 + j + u = t^2 = 1, reached below the stability
        # cap only when the ray has a one-photon component
        return 1.0 if d[0] > 0.0 else None
    gmax = float(max(d[0], d[1]))
    if gmax == 0.0:
        return None
    return 1.0 / math.sqrt(gmax * gmax + d[2] * d[2])


@dataclass(frozen=True)
class BoundaryCrossing:
    """Result of a radial bisection for the phase boundary.

    t_c is the crossing magnitude along the normalized direction. jump is
    the boundary limit of the SP-side order parameter, obtained by linear
    extrapolation in t^2 from two probes just above the crossing; order is
    2 when that limit is below ORDER_EPS (continuous onset), 1 otherwise,
    and None when no crossing exists below the requested magnitude. z_c is
    the SP-side minimizer at probe_t, so for a first-order crossing it
    approximates the jump displacement."""

    found: bool
    direction: np.ndarray
    t_c: Optional[float] = None
    lambda_c: Optional[np.ndarray] = None
    order: Optional[int] = None
    z_c: Optional[np.ndarray] = None
    jump: Optional[float] = None
    probe_t: Optional[float] = None


# Relative probe offset above the crossing for the boundary-limit
# extrapolation, and the finer internal bracket it requires.
ORDER_PROBE_REL = 2.0e-5
ORDER_REFINE_REL = 1.0e-9


def radial_boundary(
    kind: str,
    direction: Sequence[float],
    max_magnitude: float,
    beta_omega: Optional[float] = None,
    *,
    t_tol: float = 1.0e-6,
    **minimize_kwargs,
) -> BoundaryCrossing:
    """Bisect the phase boundary along a coupling-space ray.

    The ray t * direction (direction normalized internally) must stay
    strictly inside the stability region up to max_magnitude. Phase
    monotonicity along rays guarantees at most one crossing. The reported
    t_c is resolved to t_tol; the transition order uses an internally
    refined bracket plus two SP-side probes whose order parameter is
    extrapolated linearly in t^2 to the boundary (exact for the
    leading-order continuous onset, so only a genuine jump survives).
    """
    d = _direction_array(kind, direction)
    cap = _stability_cap(kind, d)
    if not max_magnitude > 0.0:
        raise ValueError("max_magnitude must be positive")
    if max_magnitude >= cap:
        raise ValueError(
            f"max_magnitude={max_magnitude:g} reaches the stability limit "
            f"{cap:g} along this direction"
        )

    def order_parameter(t: float) -> float:
        model = from_coupling_vector(kind, t * d)
        return minimize(model, beta_omega, **minimize_kwargs).order_parameter

    if not order_parameter(max_magnitude) > 0.0:
        return BoundaryCrossing(found=False, direction=d)

    lo, hi = 0.0, max_magnitude
    while hi - lo > t_tol:
        mid = 0.5 * (lo + hi)
        if order_parameter(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    t_c = 0.5 * (lo + hi)

    # Refine the bracket well below the probe offset so the extrapolation
    # intercept is not polluted by the bracket width.
    refine_tol = ORDER_REFINE_REL * max(t_c, 1.0)
    while hi - lo > refine_tol:
        mid = 0.5 * (lo + hi)
        if order_parameter(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    t_fine = 0.5 * (lo + hi)

    # Probes must stay strictly inside the stability region; shrink the
    # offset if the ray ends close to the cap.
    probe_limit = min(max_magnitude * 1.001, cap * (1.0 - 1.0e-9))
    rel = min(ORDER_PROBE_REL, max(0.25 * (probe_limit / t_fine - 1.0), 0.0))
    t1 = t_fine * (1.0 + rel)
    t2 = t_fine * (1.0 + 2.0 * rel)
    probe = minimize(from_coupling_vector(kind, t1 * d), beta_omega, **minimize_kwargs)
    rho1 = probe.order_parameter
    rho2 = order_parameter(t2)
    x1 = t1 * t1 - t_fine * t_fine
    x2 = t2 * t2 - t_fine * t_fine
    if x2 > x1 > 0.0:
        jump = max(rho1 - x1 * (rho2 - rho1) / (x2 - x1), 0.0)
    else:
        jump = rho1
    order = 2 if jump < ORDER_EPS else 1
    return BoundaryCrossing(
        found=True,
        direction=d,
        t_c=t_c,
        lambda_c=t_c * d,
        order=order,
        z_c=probe.z_min,
        jump=jump,
        probe_t=t1,
    )


# ======================================================================
# Closed-form order parameters and jumps
# ======================================================================

def closed_form_order_parameter(model: Model) -> np.ndarray:
    """Squared displacement components of the global minimum, closed form.

    Supported regimes: Dicke with all two-photon couplings zero, the
    hopping/Stark family everywhere stable, and the anisotropic family.
    Values follow the stationarity solutions quoted in the optimizer
    module; below the boundary all components are zero. The layout matches
    the full z coordinate (per-mode u^2 components first, then v^2).
    """
    stab = stability_check(model)
    if not stab.stable:
        raise ValueError(f"unstable parameters: {stab.reason}")
    if isinstance(model, MultimodeDicke12):
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        if np.any(gp > 0.0):
            raise ValueError(
                "no closed-form minimizer with two-photon couplings; use minimize"
            )
        out = np.zeros(model.z_dim)
        g2 = float(g @ g)
        if g2 > 1.0:
            out[: model.n_modes] = 0.25 * g * g * (1.0 - 1.0 / (g2 * g2))
        return out
    if isinstance(model, RabiStarkHubbard):
        q = _positive_stationary_q(model.gamma, model.j_tilde, model.u_tilde)
        return np.array([q if q is not None else 0.0, 0.0])
    qu = _positive_stationary_q(model.gamma1, 0.0, model.u_tilde)
    qv = _positive_stationary_q(model.gamma2, 0.0, model.u_tilde)
    if model.gamma1 > model.gamma2:
        return np.array([qu if qu is not None else 0.0, 0.0])
    if model.gamma2 > model.gamma1:
        return np.array([0.0, qv if qv is not None else 0.0])
    # Equal couplings: the minimum is a circle; report the same canonical
    # representative the minimizer's tie-break selects.
    return np.array([0.0, qv if qv is not None else 0.0])


def first_order_jump(
    gamma_direction: Sequence[float], gamma_prime: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary location and displacement jump for the equal-two-photon
    Dicke family along a one-photon direction.

    Holding gamma_prime fixed and scaling the one-photon couplings along
    gamma_direction, the transition sits at sum(gamma_nu^2) = 1 -
    gamma_prime^2 and the superradiant minimum appears there with
    u_nu = gamma_nu * gamma_prime / (1 - gamma_prime^2). Returns
    (gamma_c, u_c); gamma_prime = 0 gives a continuous (zero-jump) onset.
    """
    gp = float(gamma_prime)
    if not 0.0 <= gp < 1.0:
        raise ValueError(f"gamma_prime must lie in [0, 1), got {gp!r}")
    d = np.asarray(gamma_direction, dtype=float)
    if d.ndim != 1 or d.size == 0 or not np.all(np.isfinite(d)) or np.any(d < 0.0):
        raise ValueError("gamma_direction must be a nonnegative finite vector")
    n = float(np.linalg.norm(d))
    if n == 0.0:
        raise ValueError("gamma_direction must be nonzero")
    d = d / n
    gamma_c = d * math.sqrt(1.0 - gp * gp)
    u_c = gamma_c * gp / (1.0 - gp * gp)
    return gamma_c, u_c


# ======================================================================
# Sweeps
# ======================================================================

def _build_model(kind: str, flat: Dict[str, float]) -> Model:
    if kind == "multimode_dicke12":
        gammas = sorted(k for k in flat if k.startswith("gamma") and
                        not k.startswith("gamma_prime"))
        m = len(gammas)
        gamma = [flat[f"gamma{i}"] for i in range(1, m + 1)]
        gamma_prime = [flat[f"gamma_prime{i}"] for i in range(1, m + 1)]
        return MultimodeDicke12(tuple(gamma), tuple(gamma_prime))
    if kind == "rabi_stark_hubbard":
        return RabiStarkHubbard(flat["gamma"], flat["j_tilde"], flat["u_tilde"])
    if kind == "anisotropic_rabi_stark":
        return AnisotropicRabiStark(flat["gamma1"], flat["gamma2"], flat["u_tilde"])
    raise ValueError(f"unknown model kind {kind!r}")


def _sweep_point(args) -> PhasePoint:
    kind, flat, beta_omega, minimize_kwargs = args
    try:
        model = _build_model(kind, flat)
    except ValueError:
        return PhasePoint(kind, dict(flat), "unstable", math.nan, math.nan, None)
    return classify(model, beta_omega, **minimize_kwargs)


def sweep(
    kind: str,
    base_params: Dict[str, float],
    axes: Sequence[Tuple[str, Sequence[float]]],
    beta_omega: Optional[float] = None,
    workers: int = 1,
    **minimize_kwargs,
) -> List[PhasePoint]:
    """Classify a row-major cartesian grid of parameter points.

    base_params is a flat parameter dictionary (see model_params); each
    axis overrides one key. The output order is the deterministic row-major
    order of the axes regardless of worker count.
    """
    for name, _ in axes:
        if name not in base_params:
            raise ValueError(
                f"sweep axis {name!r} is not a parameter of kind {kind!r}; "
                f"known keys: {sorted(base_params)}"
            )
    grids = [np.asarray(values, dtype=float) for _, values in axes]
    total = int(np.prod([g.size for g in grids])) if grids else 1
    if total > SWEEP_MAX_POINTS:
        raise ValueError(
            f"sweep of {total} points exceeds the {SWEEP_MAX_POINTS} cap"
        )
    tasks = []
    for combo in product(*grids):
        flat = dict(base_params)
        for (name, _), value in zip(axes, combo):
            flat[name] = float(value)
        tasks.append((kind, flat, beta_omega, minimize_kwargs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (8 * workers))
            return list(pool.map(_sweep_point, tasks, chunksize=chunk))
    return [_sweep_point(t) for t in tasks]

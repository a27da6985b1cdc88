"""Landau potentials, gradients, and the radial coupling identity.

The mean-field free-energy landscape phi(z) of every model family has the
same architecture: a confining quadratic form in the rescaled displacement
z plus the qubit free energy of an effective two-level splitting e(z) that
depends on couplings and displacement together,

    phi(z) = quadratic(z) - L(e(z)),

with L(e) = e/2 at zero temperature and
L(e) = ln(2 cosh(beta_omega * e / 2)) / beta_omega at finite temperature.

Because every coupling enters e(z) only through the products stored in the
coupling vector, the landscape obeys an exact radial identity

    z . grad_z phi = 2 |z|^2 + lam . grad_lam phi,

which ties the geometry of minima to radial motion in coupling space. The
residual of that identity (with the coupling gradient taken by central
finite differences) is exposed here as a diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import (
    AnisotropicRabiStark,
    Model,
    MultimodeDicke12,
    RabiStarkHubbard,
    coupling_vector,
    from_coupling_vector,
)

__all__ = [
    "PotentialValue",
    "ln2cosh",
    "potential",
    "gradient",
    "phi_batch",
    "radial_identity_residual",
]

# Largest supported inverse-temperature product; beyond this the finite-T
# potential is within 1e-4343 of the zero-T limit anyway.
BETA_OMEGA_MAX = 1.0e4


def ln2cosh(x):
    """log(2 cosh(x)), overflow-safe for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax))


def _check_beta_omega(beta_omega: Optional[float]) -> Optional[float]:
    if beta_omega is None:
        return None
    b = float(beta_omega)
    if not math.isfinite(b) or b <= 0.0:
        raise ValueError(f"beta_omega must be positive and finite, got {beta_omega!r}")
    if b > BETA_OMEGA_MAX:
        raise ValueError(
            f"beta_omega={b!r} exceeds the supported range (<= {BETA_OMEGA_MAX:g}); "
            "use beta_omega=None for the zero-temperature limit"
        )
    return b


def _qubit_free_energy(e, beta_omega):
    # L(e): zero-T limit is e/2, finite-T is the thermal log-cosh form.
    if beta_omega is None:
        return 0.5 * e
    return ln2cosh(0.5 * beta_omega * e) / beta_omega


def _thermal_weight(e, beta_omega):
    # L'(e); equals 1/2 * tanh(beta_omega e / 2) -> 1/2 at zero temperature.
    # Returned without the 1/2 so callers multiply by the zero-T gradient form.
    if beta_omega is None:
        return np.ones_like(np.asarray(e, dtype=float))
    return np.tanh(0.5 * beta_omega * e)


@dataclass(frozen=True)
class PotentialValue:
    """Potential value phi and, for the Dicke family, the field combination xi
    that sets the effective qubit splitting sqrt(1 + xi^2)."""

    phi: float
    xi: Optional[float] = None


# ======================================================================
# Reduced-coordinate kernels (vectorized over leading axes)
#
# The search space used by the optimizer drops coordinates that are pinned
# to zero at every stationary point:
#   Dicke:        v_nu = 0  (the v gradient is 2 v_nu (1 + gamma_prime_nu * t)
#                 with |t| < 1, strictly positive multiple of v_nu whenever
#                 gamma_prime_nu < 1)
#   RabiStark-H:  v = 0    (same argument with brace >= 1 - u_tilde > 0)
#   anisotropic:  none     (both quadratures can order)
# ======================================================================

def reduced_dim(model: Model) -> int:
    if isinstance(model, MultimodeDicke12):
        return model.n_modes
    if isinstance(model, RabiStarkHubbard):
        return 1
    return 2


def embed_reduced(model: Model, x: np.ndarray) -> np.ndarray:
    """Lift reduced search coordinates to the full z layout."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, MultimodeDicke12):
        return np.concatenate([x, np.zeros_like(x)])
    if isinstance(model, RabiStarkHubbard):
        return np.array([x[0], 0.0])
    return x.copy()


def phi_reduced(model: Model, x: np.ndarray, beta_omega: Optional[float] = None):
    """Potential on the reduced search space; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, MultimodeDicke12):
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        xi = 2.0 * (x @ g + (x * x) @ gp)
        e = np.sqrt(1.0 + xi * xi)
        return np.sum(x * x, axis=-1) - _qubit_free_energy(e, beta_omega)
    if isinstance(model, RabiStarkHubbard):
        u = x[..., 0]
        s = 1.0 + 2.0 * model.u_tilde * u * u
        e = np.sqrt(s * s + 4.0 * model.gamma**2 * u * u)
        return (1.0 - model.j_tilde) * u * u - _qubit_free_energy(e, beta_omega)
    u = x[..., 0]
    v = x[..., 1]
    rho = u * u + v * v
    s = 1.0 + 2.0 * model.u_tilde * rho
    e = np.sqrt(s * s + 4.0 * (model.gamma1**2 * u * u + model.gamma2**2 * v * v))
    return rho - _qubit_free_energy(e, beta_omega)


def grad_reduced(
    model: Model, x: np.ndarray, beta_omega: Optional[float] = None
) -> np.ndarray:
    """Analytic gradient on the reduced search space (single point)."""
    x = np.asarray(x, dtype=float)
    if isinstance(model, MultimodeDicke12):
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        xi = 2.0 * float(x @ g + (x * x) @ gp)
        e = math.sqrt(1.0 + xi * xi)
        t = float(_thermal_weight(e, beta_omega)) * xi / e
        return 2.0 * x - (g + 2.0 * gp * x) * t
    if isinstance(model, RabiStarkHubbard):
        u = float(x[0])
        ut, jt, ga = model.u_tilde, model.j_tilde, model.gamma
        s = 1.0 + 2.0 * ut * u * u
        e = math.sqrt(s * s + 4.0 * ga * ga * u * u)
        w = float(_thermal_weight(e, beta_omega))
        return np.array([2.0 * u * ((1.0 - jt) - w * (s * ut + ga * ga) / e)])
    u, v = float(x[0]), float(x[1])
    ut = model.u_tilde
    s = 1.0 + 2.0 * ut * (u * u + v * v)
    e = math.sqrt(
        s * s + 4.0 * (model.gamma1**2 * u * u + model.gamma2**2 * v * v)
    )
    w = float(_thermal_weight(e, beta_omega))
    return np.array(
        [
            2.0 * u * (1.0 - w * (s * ut + model.gamma1**2) / e),
            2.0 * v * (1.0 - w * (s * ut + model.gamma2**2) / e),
        ]
    )


def phi_batch(model: Model, z: np.ndarray, beta_omega: Optional[float] = None):
    """Potential on full z coordinates, broadcast over leading axes.

    z has shape (..., z_dim). Used by exhaustive grid scans.
    """
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != model.z_dim:
        raise ValueError(
            f"last axis of z must have length {model.z_dim}, got {z.shape[-1]}"
        )
    if isinstance(model, MultimodeDicke12):
        m = model.n_modes
        u = z[..., :m]
        v = z[..., m:]
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        xi = 2.0 * (u @ g + (u * u - v * v) @ gp)
        e = np.sqrt(1.0 + xi * xi)
        return np.sum(z * z, axis=-1) - _qubit_free_energy(e, beta_omega)
    u = z[..., 0]
    v = z[..., 1]
    rho = u * u + v * v
    if isinstance(model, RabiStarkHubbard):
        s = 1.0 + 2.0 * model.u_tilde * rho
        e = np.sqrt(s * s + 4.0 * model.gamma**2 * u * u)
        return (1.0 - model.j_tilde) * u * u + v * v - _qubit_free_energy(e, beta_omega)
    s = 1.0 + 2.0 * model.u_tilde * rho
    e = np.sqrt(s * s + 4.0 * (model.gamma1**2 * u * u + model.gamma2**2 * v * v))
    return rho - _qubit_free_energy(e, beta_omega)


# ======================================================================
# Full-coordinate interface
# ======================================================================

def _split_dicke(model: MultimodeDicke12, z: np.ndarray):
    m = model.n_modes
    return z[:m], z[m:]


def _validate_z(model: Model, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.shape != (model.z_dim,):
        raise ValueError(
            f"z must have shape ({model.z_dim},) for {type(model).__name__}, "
            f"got {z.shape}"
        )
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    return z


def potential(
    model: Model, z, beta_omega: Optional[float] = None
) -> PotentialValue:
    """Landau potential phi(z).

    z is (u_1..u_M, v_1..v_M) for the Dicke family and (u, v) otherwise.
    At z = 0 the zero-temperature value is -1/2 for every family; the
    finite-temperature value differs from the zero-temperature one by at
    most ln(2)/beta_omega everywhere.
    """
    beta_omega = _check_beta_omega(beta_omega)
    z = _validate_z(model, z)
    if isinstance(model, MultimodeDicke12):
        u, v = _split_dicke(model, z)
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        xi = 2.0 * float(u @ g + (u * u - v * v) @ gp)
        e = math.sqrt(1.0 + xi * xi)
        phi = float(np.sum(z * z)) - float(_qubit_free_energy(e, beta_omega))
        return PotentialValue(phi, xi)
    if isinstance(model, RabiStarkHubbard):
        u, v = z
        rho = u * u + v * v
        s = 1.0 + 2.0 * model.u_tilde * rho
        e = math.sqrt(s * s + 4.0 * model.gamma**2 * u * u)
        phi = (
            (1.0 - model.j_tilde) * u * u
            + v * v
            - float(_qubit_free_energy(e, beta_omega))
        )
        return PotentialValue(phi, None)
    u, v = z
    rho = u * u + v * v
    s = 1.0 + 2.0 * model.u_tilde * rho
    e = math.sqrt(
        s * s + 4.0 * (model.gamma1**2 * u * u + model.gamma2**2 * v * v)
    )
    phi = rho - float(_qubit_free_energy(e, beta_omega))
    return PotentialValue(phi, None)


def gradient(model: Model, z, beta_omega: Optional[float] = None) -> np.ndarray:
    """Analytic gradient of phi with respect to the full coordinate z."""
    beta_omega = _check_beta_omega(beta_omega)
    z = _validate_z(model, z)
    if isinstance(model, MultimodeDicke12):
        u, v = _split_dicke(model, z)
        g = np.asarray(model.gamma)
        gp = np.asarray(model.gamma_prime)
        xi = 2.0 * float(u @ g + (u * u - v * v) @ gp)
        e = math.sqrt(1.0 + xi * xi)
        t = float(_thermal_weight(e, beta_omega)) * xi / e
        du = 2.0 * u - (g + 2.0 * gp * u) * t
        dv = 2.0 * v * (1.0 + gp * t)
        return np.concatenate([du, dv])
    if isinstance(model, RabiStarkHubbard):
        u, v = z
        ut, jt, ga = model.u_tilde, model.j_tilde, model.gamma
        rho = u * u + v * v
        s = 1.0 + 2.0 * ut * rho
        e = math.sqrt(s * s + 4.0 * ga * ga * u * u)
        w = float(_thermal_weight(e, beta_omega))
        return np.array(
            [
                2.0 * u * ((1.0 - jt) - w * (s * ut + ga * ga) / e),
                2.0 * v * (1.0 - w * s * ut / e),
            ]
        )
    u, v = z
    ut = model.u_tilde
    rho = u * u + v * v
    s = 1.0 + 2.0 * ut * rho
    e = math.sqrt(
        s * s + 4.0 * (model.gamma1**2 * u * u + model.gamma2**2 * v * v)
    )
    w = float(_thermal_weight(e, beta_omega))
    return np.array(
        [
            2.0 * u * (1.0 - w * (s * ut + model.gamma1**2) / e),
            2.0 * v * (1.0 - w * (s * ut + model.gamma2**2) / e),
        ]
    )


def radial_identity_residual(
    model: Model,
    z,
    beta_omega: Optional[float] = None,
    rel_step: float = 1.0e-5,
) -> float:
    """Residual of the radial identity z.grad_z phi = 2|z|^2 + lam.grad_lam phi.

    The coupling gradient is taken by central finite differences on the
    coupling-vector components (step rel_step * max(1, |lam_i|), shrunk
    near zero so perturbed components stay nonnegative). Intended as a
    consistency diagnostic, not a hot-path computation.
    """
    beta_omega = _check_beta_omega(beta_omega)
    z = _validate_z(model, z)
    lhs = float(z @ gradient(model, z, beta_omega)) - 2.0 * float(z @ z)

    lam = coupling_vector(model)
    rhs = 0.0
    for i, li in enumerate(lam):
        if li < 1.0e-12:
            # The component multiplies its own derivative; at zero the
            # contribution vanishes identically.
            continue
        h = min(rel_step * max(1.0, abs(li)), li)
        lp = lam.copy()
        lm = lam.copy()
        lp[i] = li + h
        lm[i] = li - h
        phi_p = potential(from_coupling_vector(model.kind, lp), z, beta_omega).phi
        phi_m = potential(from_coupling_vector(model.kind, lm), z, beta_omega).phi
        rhs += li * (phi_p - phi_m) / (2.0 * h)
    return abs(lhs - rhs)

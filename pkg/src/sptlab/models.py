"""Model catalog for the superradiant phase-transition engine.

Three light-matter model families, all parameterized by dimensionless
couplings so that phase structure depends only on the numbers stored here:

* MultimodeDicke12 -- a qubit coupled to M bosonic modes through one-photon
  couplings gamma_nu and two-photon couplings gamma_prime_nu.
* RabiStarkHubbard -- a lattice of Rabi-Stark sites with photon hopping,
  treated per site with a mean-field hopping strength j_tilde and a
  nonlinear Stark shift u_tilde.
* AnisotropicRabiStark -- a single site with independent co-rotating and
  counter-rotating coupling combinations gamma1, gamma2 plus a Stark
  shift u_tilde.

Every family exposes the same geometric interface: a coupling vector
(the natural radial coordinates of its phase diagram), the dimension of
the Landau-potential coordinate z, and a strict stability predicate for
the quadratic form that keeps the potential bounded from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

__all__ = [
    "MultimodeDicke12",
    "RabiStarkHubbard",
    "AnisotropicRabiStark",
    "Model",
    "ModelSpec",
    "Stability",
    "coupling_vector",
    "coupling_magnitude",
    "from_coupling_vector",
    "stability_check",
    "z_dim",
]


def _as_float_tuple(values: Sequence[float], name: str) -> Tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) == 0:
        raise ValueError(f"{name} must contain at least one entry")
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{name} entries must be finite, got {v!r}")
        if v < 0.0:
            raise ValueError(
                f"{name} entries must be nonnegative, got {v!r}; a negative "
                "coupling is equivalent to a sign flip of the displacement"
            )
    return out


def _check_scalar(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if value < 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value!r}")
    return value


# ======================================================================
# Model families
# ======================================================================

@dataclass(frozen=True)
class MultimodeDicke12:
    """Qubit coupled to M modes with one- and two-photon interactions.

    gamma[nu]       = 2 g_nu / sqrt(Omega omega_nu)   (one-photon, dimensionless)
    gamma_prime[nu] = 2 g'_nu / omega_nu              (two-photon, dimensionless)

    The Landau coordinate is z = (u_1..u_M, v_1..v_M), the rescaled real
    and imaginary mode displacements. Stability of the potential at large
    displacement requires every gamma_prime[nu] < 1 (strict).
    """

    gamma: Tuple[float, ...]
    gamma_prime: Tuple[float, ...]

    kind = "multimode_dicke12"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", _as_float_tuple(self.gamma, "gamma"))
        object.__setattr__(
            self, "gamma_prime", _as_float_tuple(self.gamma_prime, "gamma_prime")
        )
        if len(self.gamma) != len(self.gamma_prime):
            raise ValueError(
                "gamma and gamma_prime must have the same length, got "
                f"{len(self.gamma)} and {len(self.gamma_prime)}"
            )

    @property
    def n_modes(self) -> int:
        return len(self.gamma)

    @property
    def z_dim(self) -> int:
        return 2 * self.n_modes


@dataclass(frozen=True)
class RabiStarkHubbard:
    """Rabi-Stark lattice site with mean-field photon hopping.

    gamma   = 2 g / sqrt(Omega omega)   (one-photon coupling)
    j_tilde = 4 J / omega               (hopping)
    u_tilde = U / omega                 (Stark nonlinearity)

    Landau coordinate z = (u, v). Stability requires 1 - j_tilde - u_tilde > 0
    (strict); on that boundary the quadratic confinement of u degenerates.
    """

    gamma: float
    j_tilde: float
    u_tilde: float

    kind = "rabi_stark_hubbard"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", _check_scalar(self.gamma, "gamma"))
        object.__setattr__(self, "j_tilde", _check_scalar(self.j_tilde, "j_tilde"))
        object.__setattr__(self, "u_tilde", _check_scalar(self.u_tilde, "u_tilde"))

    @property
    def z_dim(self) -> int:
        return 2


@dataclass(frozen=True)
class AnisotropicRabiStark:
    """Anisotropic Rabi model with a Stark nonlinearity.

    gamma1 = (g1 + g2) / sqrt(Omega omega)   (couples to the u quadrature)
    gamma2 = (g1 - g2) / sqrt(Omega omega)   (couples to the v quadrature)
    u_tilde = U / omega

    Landau coordinate z = (u, v); both quadratures can order, giving two
    superradiant branches. Stability requires u_tilde < 1 (strict).
    """

    gamma1: float
    gamma2: float
    u_tilde: float

    kind = "anisotropic_rabi_stark"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma1", _check_scalar(self.gamma1, "gamma1"))
        object.__setattr__(self, "gamma2", _check_scalar(self.gamma2, "gamma2"))
        object.__setattr__(self, "u_tilde", _check_scalar(self.u_tilde, "u_tilde"))

    @property
    def z_dim(self) -> int:
        return 2


Model = Union[MultimodeDicke12, RabiStarkHubbard, AnisotropicRabiStark]

_KINDS = {
    "multimode_dicke12": MultimodeDicke12,
    "rabi_stark_hubbard": RabiStarkHubbard,
    "anisotropic_rabi_stark": AnisotropicRabiStark,
}


@dataclass(frozen=True)
class ModelSpec:
    """A model together with its thermal mode.

    beta_omega is the product beta * Omega of inverse temperature and qubit
    splitting; None selects the zero-temperature potential. Finite
    temperature is supported by the potential layer but the phase-diagram
    results shipped with the test suite are pinned at zero temperature.
    """

    model: Model
    beta_omega: Optional[float] = None

    def __post_init__(self) -> None:
        if self.beta_omega is not None:
            b = float(self.beta_omega)
            if not math.isfinite(b) or b <= 0.0:
                raise ValueError(f"beta_omega must be positive and finite, got {b!r}")
            if b > 1.0e4:
                raise ValueError(
                    f"beta_omega={b!r} exceeds the supported range (<= 1e4); "
                    "use beta_omega=None for the zero-temperature limit"
                )
            object.__setattr__(self, "beta_omega", b)


# ======================================================================
# Coupling-space geometry
# ======================================================================

def coupling_vector(model: Model) -> np.ndarray:
    """Radial coordinates of the model in coupling space.

    The components are chosen so that every coupling enters the Landau
    potential polynomially through them:

      Dicke:       (gamma_1..gamma_M, sqrt(gamma_prime_1)..sqrt(gamma_prime_M))
      RabiStark-H: (gamma, sqrt(j_tilde), sqrt(u_tilde))
      anisotropic: (gamma1, gamma2, sqrt(u_tilde))
    """
    if isinstance(model, MultimodeDicke12):
        return np.concatenate(
            [np.asarray(model.gamma), np.sqrt(np.asarray(model.gamma_prime))]
        )
    if isinstance(model, RabiStarkHubbard):
        return np.array(
            [model.gamma, math.sqrt(model.j_tilde), math.sqrt(model.u_tilde)]
        )
    if isinstance(model, AnisotropicRabiStark):
        return np.array([model.gamma1, model.gamma2, math.sqrt(model.u_tilde)])
    raise TypeError(f"unsupported model type {type(model).__name__}")


def coupling_magnitude(model: Model) -> float:
    """Euclidean norm of the coupling vector."""
    return float(np.linalg.norm(coupling_vector(model)))


def from_coupling_vector(kind: str, lam: Sequence[float]) -> Model:
    """Inverse of coupling_vector: rebuild a model from radial coordinates.

    For the Dicke family the vector length must be even (M one-photon
    components followed by M square-root two-photon components).
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise ValueError("coupling vector must be one-dimensional")
    if np.any(lam < 0.0):
        raise ValueError("coupling-vector components must be nonnegative")
    if kind == "multimode_dicke12":
        if lam.size % 2 != 0:
            raise ValueError(
                "Dicke coupling vector must have even length, got %d" % lam.size
            )
        m = lam.size // 2
        return MultimodeDicke12(tuple(lam[:m]), tuple(lam[m:] ** 2))
    if kind == "rabi_stark_hubbard":
        if lam.size != 3:
            raise ValueError("RabiStarkHubbard coupling vector must have length 3")
        return RabiStarkHubbard(lam[0], lam[1] ** 2, lam[2] ** 2)
    if kind == "anisotropic_rabi_stark":
        if lam.size != 3:
            raise ValueError("AnisotropicRabiStark coupling vector must have length 3")
        return AnisotropicRabiStark(lam[0], lam[1], lam[2] ** 2)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(_KINDS)}")


def z_dim(model: Model) -> int:
    return model.z_dim


# ======================================================================
# Stability
# ======================================================================

@dataclass(frozen=True)
class Stability:
    """Result of the strict large-displacement stability test.

    margin is the distance of the binding inequality from its limit; it is
    zero exactly on the boundary, which is reported as unstable because the
    potential then loses its quadratic confinement.
    """

    stable: bool
    margin: float
    reason: Optional[str] = None


def stability_check(model: Model) -> Stability:
    """Strict stability of the Landau potential at large displacement.

    Dicke:        every gamma_prime_nu < 1
    RabiStark-H:  1 - j_tilde - u_tilde > 0
    anisotropic:  u_tilde < 1

    Equality means the confining quadratic form has a zero eigenvalue, so
    boundary values are reported unstable with margin 0.
    """
    if isinstance(model, MultimodeDicke12):
        margin = 1.0 - max(model.gamma_prime)
        if margin <= 0.0:
            worst = int(np.argmax(model.gamma_prime))
            return Stability(
                False,
                margin,
                f"gamma_prime[{worst}]={model.gamma_prime[worst]!r} reaches the "
                "two-photon instability at 1",
            )
        return Stability(True, margin)
    if isinstance(model, RabiStarkHubbard):
        margin = 1.0 - model.j_tilde - model.u_tilde
        if margin <= 0.0:
            return Stability(
                False,
                margin,
                f"j_tilde + u_tilde = {model.j_tilde + model.u_tilde!r} reaches "
                "the hopping/nonlinearity instability at 1",
            )
        return Stability(True, margin)
    if isinstance(model, AnisotropicRabiStark):
        margin = 1.0 - model.u_tilde
        if margin <= 0.0:
            return Stability(
                False,
                margin,
                f"u_tilde={model.u_tilde!r} reaches the nonlinearity instability at 1",
            )
        return Stability(True, margin)
    raise TypeError(f"unsupported model type {type(model).__name__}")

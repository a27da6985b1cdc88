"""Truncated-Fock-space exact diagonalization at finite frequency ratio.

The mean-field phase diagram becomes exact in the classical oscillator
limit eta = Omega/omega -> infinity. This module diagonalizes the finite-
eta Hamiltonians in a truncated product basis so the mean-field
predictions can be checked against converged numerics: ground-state
photon numbers against the order parameter, avoided-crossing gaps against
first-order jumps, and spectra for the self-consistent hopping condition.

Conventions are fixed once here. The qubit splitting sets the energy unit
(Omega = 1 unless overridden), so omega_nu = Omega / eta_nu, and the
dimensionless couplings map back to raw ones as

    g_nu  = gamma_nu * sqrt(Omega * omega_nu) / 2
    g'_nu = gamma'_nu * omega_nu / 2
    U     = u_tilde * omega
    J     = j_tilde * omega / 4
    g_1   = (gamma1 + gamma2) * sqrt(Omega * omega) / 2   (rotating)
    g_2   = (gamma1 - gamma2) * sqrt(Omega * omega) / 2   (counter-rotating)

Basis ordering is qubit (x) mode_1 (x) ... (x) mode_M with the qubit
states ordered (up, down), sigma_z = diag(1, -1). Every Hamiltonian here
is real symmetric in this basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .models import (
    AnisotropicRabiStark,
    Model,
    MultimodeDicke12,
    RabiStarkHubbard,
)

__all__ = [
    "EDConfig",
    "Basis",
    "SpectralResult",
    "ConvergenceReport",
    "build_hamiltonian",
    "lowest_eigenpairs",
    "rescaled_photon_numbers",
    "quadrature_components",
    "parity_expectations",
    "truncation_convergence",
]

# Dense eigensolver up to this dimension, Krylov above it.
DENSE_CUTOFF = 4000
# Per-pair residual bound, relative to the Frobenius norm of H.
RESIDUAL_RTOL = 1.0e-8

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]])


@dataclass(frozen=True)
class EDConfig:
    """Diagonalization controls.

    eta is the frequency ratio per mode (a scalar is broadcast); n_cut is
    the Fock truncation shared by all modes, so each mode keeps photon
    numbers 0..n_cut-1. max_dim caps the product-basis dimension before
    any matrix is assembled."""

    eta: Union[float, Sequence[float]] = 200.0
    n_cut: int = 40
    n_levels: int = 4
    max_dim: int = 200_000
    omega_qubit: float = 1.0

    def __post_init__(self):
        if self.n_cut < 2:
            raise ValueError(f"n_cut must be at least 2, got {self.n_cut}")
        if self.n_levels < 1:
            raise ValueError(f"n_levels must be positive, got {self.n_levels}")
        if self.max_dim < 4:
            # 2 * n_cut**n_modes is at least 4, so anything smaller can
            # never hold a Hamiltonian.
            raise ValueError(f"max_dim must be at least 4, got {self.max_dim}")
        if not self.omega_qubit > 0.0:
            raise ValueError("omega_qubit must be positive")
        etas = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if not np.all(np.isfinite(etas)) or np.any(etas <= 0.0):
            raise ValueError(f"eta must be positive and finite, got {self.eta!r}")

    def etas_for(self, n_modes: int) -> Tuple[float, ...]:
        etas = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if etas.size == 1:
            etas = np.repeat(etas, n_modes)
        if etas.size != n_modes:
            raise ValueError(
                f"got {etas.size} frequency ratios for {n_modes} modes"
            )
        return tuple(float(e) for e in etas)


@dataclass(frozen=True)
class Basis:
    """Product-basis bookkeeping for one assembled Hamiltonian."""

    kind: str
    n_modes: int
    n_cut: int
    etas: Tuple[float, ...]
    omega_qubit: float
    has_parity: bool

    @property
    def omegas(self) -> Tuple[float, ...]:
        return tuple(self.omega_qubit / e for e in self.etas)

    @property
    def dim(self) -> int:
        return 2 * self.n_cut**self.n_modes

    def qubit_operator(self, mat: np.ndarray) -> sp.csr_matrix:
        op = sp.csr_matrix(mat)
        return sp.kron(op, sp.identity(self.n_cut**self.n_modes), format="csr")

    def mode_operator(self, mat: sp.spmatrix, mode: int) -> sp.csr_matrix:
        """Embed a single-mode operator at the given mode index."""
        if not 0 <= mode < self.n_modes:
            raise ValueError(f"mode index {mode} out of range")
        pieces: List[sp.spmatrix] = [sp.identity(2)]
        for m in range(self.n_modes):
            pieces.append(mat if m == mode else sp.identity(self.n_cut))
        out = pieces[0]
        for p in pieces[1:]:
            out = sp.kron(out, p)
        return out.tocsr()


def _annihilation(n_cut: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1.0, n_cut)), 1, format="csr")


def raw_couplings(model: Model, config: EDConfig) -> dict:
    """Dimensionful couplings implied by the model and frequency ratios."""
    omega_q = config.omega_qubit
    if isinstance(model, MultimodeDicke12):
        etas = config.etas_for(model.n_modes)
        omegas = [omega_q / e for e in etas]
        return {
            "Omega": omega_q,
            "omega": tuple(omegas),
            "g": tuple(
                0.5 * g * math.sqrt(omega_q * w)
                for g, w in zip(model.gamma, omegas)
            ),
            "g_prime": tuple(
                0.5 * gp * w for gp, w in zip(model.gamma_prime, omegas)
            ),
        }
    (eta,) = config.etas_for(1)
    omega = omega_q / eta
    if isinstance(model, RabiStarkHubbard):
        return {
            "Omega": omega_q,
            "omega": omega,
            "g": 0.5 * model.gamma * math.sqrt(omega_q * omega),
            "U": model.u_tilde * omega,
            "J": 0.25 * model.j_tilde * omega,
        }
    root = math.sqrt(omega_q * omega)
    return {
        "Omega": omega_q,
        "omega": omega,
        "g1": 0.5 * (model.gamma1 + model.gamma2) * root,
        "g2": 0.5 * (model.gamma1 - model.gamma2) * root,
        "U": model.u_tilde * omega,
    }


def build_hamiltonian(
    model: Model,
    config: EDConfig,
    *,
    rsh_variant: str = "bare",
    psi: float = 0.0,
) -> Tuple[sp.csr_matrix, Basis]:
    """Assemble the real symmetric Hamiltonian in the truncated basis.

    For the hopping family the single-site spectrum is what finite-eta
    numerics can access: rsh_variant="bare" drops the hopping term
    entirely (the self-consistency condition needs this spectrum), while
    rsh_variant="effective" adds the decoupling mean-field term
    -4*J*psi*(a + a^dag) + 4*J*psi^2 for a real coherent field psi.
    """
    if isinstance(model, MultimodeDicke12):
        n_modes = model.n_modes
    else:
        n_modes = 1
    etas = config.etas_for(n_modes)
    dim = 2 * config.n_cut**n_modes
    if dim > config.max_dim:
        raise ValueError(
            f"dimension {dim} exceeds the configured budget {config.max_dim}"
        )

    raw = raw_couplings(model, config)
    omega_q = config.omega_qubit
    has_parity = not (
        isinstance(model, MultimodeDicke12) and any(g > 0.0 for g in model.gamma_prime)
    )
    basis = Basis(
        kind=model.kind,
        n_modes=n_modes,
        n_cut=config.n_cut,
        etas=etas,
        omega_qubit=omega_q,
        has_parity=has_parity,
    )

    a = _annihilation(config.n_cut)
    number = (a.T @ a).tocsr()
    x_op = (a + a.T).tocsr()

    h = 0.5 * omega_q * basis.qubit_operator(_SIGMA_Z)
    if isinstance(model, MultimodeDicke12):
        two_photon = (a @ a + (a @ a).T).tocsr()
        for m in range(n_modes):
            h = h + basis.omegas[m] * basis.mode_operator(number, m)
            coupling = raw["g"][m] * x_op + raw["g_prime"][m] * two_photon
            h = h + basis.qubit_operator(_SIGMA_X) @ basis.mode_operator(coupling, m)
        return h.tocsr(), basis

    omega = basis.omegas[0]
    n_full = basis.mode_operator(number, 0)
    x_full = basis.mode_operator(x_op, 0)
    if isinstance(model, RabiStarkHubbard):
        if rsh_variant not in ("bare", "effective"):
            raise ValueError(f"unknown rsh_variant {rsh_variant!r}")
        h = h + omega * n_full
        h = h + raw["U"] * basis.qubit_operator(_SIGMA_Z) @ n_full
        h = h + raw["g"] * basis.qubit_operator(_SIGMA_X) @ x_full
        if rsh_variant == "effective":
            if not np.isfinite(psi):
                raise ValueError("psi must be finite")
            shift = 4.0 * raw["J"] * psi
            h = h - shift * x_full + shift * psi * sp.identity(dim, format="csr")
        return h.tocsr(), basis

    # Anisotropic family: rotating plus counter-rotating parts, then Stark.
    rotating = sp.kron(sp.csr_matrix(_SIGMA_PLUS), a, format="csr")
    counter = sp.kron(sp.csr_matrix(_SIGMA_PLUS), a.T, format="csr")
    h = h + omega * n_full
    h = h + raw["U"] * basis.qubit_operator(_SIGMA_Z) @ n_full
    h = h + raw["g1"] * (rotating + rotating.T)
    h = h + raw["g2"] * (counter + counter.T)
    return h.tocsr(), basis


# ======================================================================
# Eigenpairs and observables
# ======================================================================

@dataclass(frozen=True)
class SpectralResult:
    """Lowest part of a spectrum with the standard observables attached.

    energies are ascending, in units of the qubit splitting when
    omega_qubit=1. photon_numbers holds the rescaled per-mode values
    <a^dag a>/eta, one row per state. parity is None when the model has
    no conserved parity (two-photon Dicke couplings present)."""

    energies: np.ndarray
    states: np.ndarray
    photon_numbers: np.ndarray
    parity: Optional[np.ndarray]
    basis: Basis
    converged: Optional[bool] = None


def lowest_eigenpairs(
    h: sp.spmatrix,
    basis: Basis,
    n_levels: int,
    *,
    dense_cutoff: int = DENSE_CUTOFF,
) -> SpectralResult:
    """Lowest n_levels eigenpairs with residual verification.

    Dense solve up to dense_cutoff, shift-free Krylov iteration above;
    each returned pair satisfies ||H x - E x|| <= 1e-8 ||H||_F.
    """
    dim = h.shape[0]
    if not 1 <= n_levels < dim:
        raise ValueError(f"n_levels must be in [1, {dim - 1}], got {n_levels}")
    h_norm = sp.linalg.norm(h)
    if dim <= dense_cutoff:
        vals, vecs = eigh(h.toarray())
        vals, vecs = vals[:n_levels], vecs[:, :n_levels]
    else:
        try:
            vals, vecs = eigsh(h, k=n_levels, which="SA")
        except ArpackNoConvergence as err:
            raise RuntimeError(
                f"Krylov eigensolver did not converge for dimension {dim}: "
                f"{len(err.eigenvalues)} of {n_levels} pairs found"
            ) from err
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    residuals = np.linalg.norm(h @ vecs - vecs * vals[None, :], axis=0)
    bound = RESIDUAL_RTOL * h_norm
    if np.any(residuals > bound):
        raise RuntimeError(
            f"eigenpair residual {residuals.max():.3e} exceeds {bound:.3e}"
        )
    photons = rescaled_photon_numbers(vecs, basis)
    parity = parity_expectations(vecs, basis) if basis.has_parity else None
    return SpectralResult(
        energies=vals,
        states=vecs,
        photon_numbers=photons,
        parity=parity,
        basis=basis,
    )


def rescaled_photon_numbers(states: np.ndarray, basis: Basis) -> np.ndarray:
    """Per-mode <a^dag a>/eta, one row per state column."""
    states = np.atleast_2d(states.T).T
    a = _annihilation(basis.n_cut)
    number = (a.T @ a).tocsr()
    out = np.empty((states.shape[1], basis.n_modes))
    for m in range(basis.n_modes):
        op = basis.mode_operator(number, m)
        out[:, m] = np.einsum("ij,ij->j", states, op @ states) / basis.etas[m]
    return out


def quadrature_components(states: np.ndarray, basis: Basis) -> Tuple[np.ndarray, np.ndarray]:
    """Squared displacement estimators (u^2, v^2) per mode and state.

    u^2 = (<(a+a^dag)^2> - 1)/(4 eta) and v^2 = (-<(a-a^dag)^2> - 1)/(4 eta);
    they subtract the vacuum contribution so both vanish on the decoupled
    ground state, and their sum is exactly <a^dag a>/eta.
    """
    states = np.atleast_2d(states.T).T
    a = _annihilation(basis.n_cut)
    # Normal-ordered forms keep the sum rule exact under truncation:
    # (a+a^dag)^2 = a^2 + a^dag^2 + 2 a^dag a + 1 and
    # -(a-a^dag)^2 = 2 a^dag a + 1 - (a^2 + a^dag^2).
    two_photon = (a @ a + (a @ a).T).tocsr()
    core = (2.0 * (a.T @ a) + sp.identity(basis.n_cut)).tocsr()
    x2 = (core + two_photon).tocsr()
    p2 = (core - two_photon).tocsr()
    n_states = states.shape[1]
    u2 = np.empty((n_states, basis.n_modes))
    v2 = np.empty((n_states, basis.n_modes))
    for m in range(basis.n_modes):
        ex2 = np.einsum("ij,ij->j", states, basis.mode_operator(x2, m) @ states)
        ep2 = np.einsum("ij,ij->j", states, basis.mode_operator(p2, m) @ states)
        u2[:, m] = (ex2 - 1.0) / (4.0 * basis.etas[m])
        v2[:, m] = (ep2 - 1.0) / (4.0 * basis.etas[m])
    return u2, v2


def _parity_diagonal(basis: Basis) -> np.ndarray:
    total = np.zeros(1, dtype=np.int64)
    for _ in range(basis.n_modes):
        total = (total[:, None] + np.arange(basis.n_cut)[None, :]).ravel()
    # Spin-up block first (adds one excitation), then spin-down.
    full = np.concatenate([total + 1, total])
    return np.where(full % 2 == 0, 1.0, -1.0)


def parity_expectations(states: np.ndarray, basis: Basis) -> np.ndarray:
    """Expectation of the excitation parity (-1)^(sum n_nu + [spin up]).

    Only defined when the Hamiltonian conserves it; any two-photon Dicke
    coupling flips the qubit without changing the photon parity and breaks
    the symmetry."""
    if not basis.has_parity:
        raise ValueError(
            "parity is not conserved with two-photon couplings present"
        )
    states = np.atleast_2d(states.T).T
    diag = _parity_diagonal(basis)
    return np.einsum("ij,ij->j", states, diag[:, None] * states)


# ======================================================================
# Truncation convergence
# ======================================================================

@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of the n_cut doubling schedule."""

    converged: bool
    n_cut: int
    energy: float
    photon_numbers: np.ndarray
    schedule: List[Tuple[int, float]] = field(default_factory=list)
    message: str = ""


def truncation_convergence(
    model: Model,
    config: EDConfig,
    *,
    energy_tol: float = 1.0e-8,
    photon_tol: float = 1.0e-6,
) -> ConvergenceReport:
    """Double n_cut until the ground state stops moving.

    Convergence requires both |E0(2n) - E0(n)| < energy_tol * Omega and a
    rescaled photon-number shift below photon_tol. The budget is the
    configured max_dim; exhausting it yields an explicit non-converged
    report rather than an error.
    """
    n_modes = model.n_modes if isinstance(model, MultimodeDicke12) else 1
    n_cut = config.n_cut
    schedule: List[Tuple[int, float]] = []
    prev_energy: Optional[float] = None
    prev_photons: Optional[np.ndarray] = None
    while True:
        cfg = EDConfig(
            eta=config.eta,
            n_cut=n_cut,
            n_levels=1,
            max_dim=config.max_dim,
            omega_qubit=config.omega_qubit,
        )
        h, basis = build_hamiltonian(model, cfg)
        res = lowest_eigenpairs(h, basis, 1)
        energy = float(res.energies[0])
        photons = res.photon_numbers[0]
        schedule.append((n_cut, energy))
        if prev_energy is not None:
            if (
                abs(energy - prev_energy) < energy_tol * config.omega_qubit
                and np.max(np.abs(photons - prev_photons)) < photon_tol
            ):
                return ConvergenceReport(
                    converged=True,
                    n_cut=n_cut,
                    energy=energy,
                    photon_numbers=photons,
                    schedule=schedule,
                )
        prev_energy, prev_photons = energy, photons
        next_cut = 2 * n_cut
        if 2 * next_cut**n_modes > config.max_dim:
            return ConvergenceReport(
                converged=False,
                n_cut=n_cut,
                energy=energy,
                photon_numbers=photons,
                schedule=schedule,
                message=(
                    f"dimension budget {config.max_dim} exhausted before "
                    f"convergence (next n_cut would be {next_cut})"
                ),
            )
        n_cut = next_cut

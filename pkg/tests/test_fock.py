import math

import numpy as np
import pytest
import scipy.sparse as sp

from sptlab.fock import (
    DENSE_CUTOFF,
    Basis,
    EDConfig,
    build_hamiltonian,
    lowest_eigenpairs,
    parity_expectations,
    quadrature_components,
    raw_couplings,
    rescaled_photon_numbers,
    truncation_convergence,
    _parity_diagonal,
)
from sptlab.models import (
    AnisotropicRabiStark,
    MultimodeDicke12,
    RabiStarkHubbard,
)
from sptlab.phases import closed_form_order_parameter


def _solve(model, config, **kwargs):
    h, basis = build_hamiltonian(model, config, **kwargs)
    return lowest_eigenpairs(h, basis, config.n_levels), h, basis


class TestConfig:
    def test_defaults(self):
        cfg = EDConfig()
        assert cfg.etas_for(2) == (200.0, 200.0)

    def test_eta_sequence(self):
        cfg = EDConfig(eta=(200.0, 180.0))
        assert cfg.etas_for(2) == (200.0, 180.0)
        with pytest.raises(ValueError):
            cfg.etas_for(3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eta": 0.0},
            {"eta": -5.0},
            {"eta": (100.0, -1.0)},
            {"n_cut": 1},
            {"n_levels": 0},
            {"max_dim": 0},
            {"omega_qubit": 0.0},
        ],
    )
    def test_invalid_config_rejected(self, kwargs):
        with pytest.raises(ValueError):
            EDConfig(**kwargs)

    def test_dimension_budget_enforced(self):
        cfg = EDConfig(n_cut=100, max_dim=150)
        with pytest.raises(ValueError, match="budget"):
            build_hamiltonian(RabiStarkHubbard(0.5, 0.0, 0.0), cfg)


class TestRawCouplings:
    def test_frequency_rescaling(self):
        cfg = EDConfig(eta=(100.0, 400.0))
        raw = raw_couplings(MultimodeDicke12((0.8, 0.6), (0.2, 0.4)), cfg)
        assert raw["omega"] == pytest.approx((0.01, 0.0025))
        assert raw["g"][0] == pytest.approx(0.5 * 0.8 * math.sqrt(0.01))
        assert raw["g_prime"][1] == pytest.approx(0.5 * 0.4 * 0.0025)

    def test_hopping_family(self):
        raw = raw_couplings(RabiStarkHubbard(0.9, 0.16, 0.04), EDConfig(eta=100.0))
        assert raw["J"] == pytest.approx(0.25 * 0.16 * 0.01)
        assert raw["U"] == pytest.approx(0.04 * 0.01)

    def test_anisotropic_split(self):
        raw = raw_couplings(AnisotropicRabiStark(0.7, 0.3, 0.1), EDConfig(eta=100.0))
        root = math.sqrt(0.01)
        assert raw["g1"] == pytest.approx(0.5 * 1.0 * root)
        assert raw["g2"] == pytest.approx(0.5 * 0.4 * root)


class TestAssembly:
    @pytest.mark.parametrize(
        "model",
        [
            MultimodeDicke12((0.8, 0.6), (0.3, 0.2)),
            RabiStarkHubbard(0.9, 0.2, 0.1),
            AnisotropicRabiStark(0.8, 0.5, 0.36),
        ],
    )
    def test_exactly_symmetric(self, model):
        h, basis = build_hamiltonian(model, EDConfig(eta=20.0, n_cut=8))
        assert (h != h.T).nnz == 0
        assert h.shape == (basis.dim, basis.dim)

    def test_decoupled_spectrum(self):
        cfg = EDConfig(eta=10.0, n_cut=6, n_levels=3)
        res, _, basis = _solve(MultimodeDicke12((0.0,), (0.0,)), cfg)
        omega = basis.omegas[0]
        assert res.energies[0] == pytest.approx(-0.5, abs=1.0e-12)
        assert res.energies[1] == pytest.approx(-0.5 + omega, abs=1.0e-12)
        assert res.energies[2] == pytest.approx(-0.5 + 2 * omega, abs=1.0e-12)
        assert res.photon_numbers[0, 0] == pytest.approx(0.0, abs=1.0e-14)
        assert res.parity[0] == pytest.approx(1.0, abs=1.0e-12)

    def test_rotating_limit_matches_two_level_closed_form(self):
        # Equal anisotropic couplings cancel the counter-rotating term, so
        # the block with one excitation diagonalizes by hand.
        cfg = EDConfig(eta=20.0, n_cut=30, n_levels=2)
        res, h, basis = _solve(AnisotropicRabiStark(0.4, 0.4, 0.0), cfg)
        omega = basis.omegas[0]
        g1 = raw_couplings(AnisotropicRabiStark(0.4, 0.4, 0.0), cfg)["g1"]
        assert res.energies[0] == pytest.approx(-0.5, abs=1.0e-12)
        expected_e1 = 0.5 * omega - math.hypot(0.5 * (1.0 - omega), g1)
        assert res.energies[1] == pytest.approx(expected_e1, abs=1.0e-10)

    def test_rotating_limit_conserves_excitation_number(self):
        cfg = EDConfig(eta=20.0, n_cut=12)
        model = AnisotropicRabiStark(0.5, 0.5, 0.2)
        h, basis = build_hamiltonian(model, cfg)
        a = sp.diags(np.sqrt(np.arange(1.0, cfg.n_cut)), 1, format="csr")
        n_exc = basis.mode_operator((a.T @ a).tocsr(), 0) + basis.qubit_operator(
            np.diag([1.0, 0.0])
        )
        comm = h @ n_exc - n_exc @ h
        assert sp.linalg.norm(comm) < 1.0e-14 * sp.linalg.norm(h)

    def test_decoupled_second_mode_is_inert(self):
        cfg2 = EDConfig(eta=(20.0, 35.0), n_cut=12, n_levels=1)
        res2, _, _ = _solve(MultimodeDicke12((0.9, 0.0), (0.3, 0.0)), cfg2)
        cfg1 = EDConfig(eta=20.0, n_cut=12, n_levels=1)
        res1, _, _ = _solve(MultimodeDicke12((0.9,), (0.3,)), cfg1)
        assert res2.energies[0] == pytest.approx(res1.energies[0], abs=1.0e-11)
        assert res2.photon_numbers[0, 1] == pytest.approx(0.0, abs=1.0e-13)

    def test_two_photon_term_lowers_ground_energy(self):
        cfg = EDConfig(eta=20.0, n_cut=40, n_levels=1)
        baseline, _, _ = _solve(MultimodeDicke12((0.0,), (0.0,)), cfg)
        squeezed, _, _ = _solve(MultimodeDicke12((0.0,), (0.6,)), cfg)
        assert squeezed.energies[0] < baseline.energies[0] - 1.0e-9
        assert squeezed.photon_numbers[0, 0] > 0.0

    def test_effective_variant(self):
        cfg = EDConfig(eta=30.0, n_cut=10)
        model = RabiStarkHubbard(0.9, 0.4, 0.1)
        h_bare, basis = build_hamiltonian(model, cfg)
        h_same, _ = build_hamiltonian(model, cfg, rsh_variant="effective", psi=0.0)
        assert (h_bare != h_same).nnz == 0
        psi = 0.7
        h_eff, _ = build_hamiltonian(model, cfg, rsh_variant="effective", psi=psi)
        a = sp.diags(np.sqrt(np.arange(1.0, cfg.n_cut)), 1, format="csr")
        x_full = basis.mode_operator((a + a.T).tocsr(), 0)
        j = raw_couplings(model, cfg)["J"]
        expected = h_bare - 4.0 * j * psi * x_full + 4.0 * j * psi**2 * sp.identity(
            basis.dim
        )
        assert sp.linalg.norm(h_eff - expected) < 1.0e-14

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError, match="rsh_variant"):
            build_hamiltonian(
                RabiStarkHubbard(0.5, 0.1, 0.0),
                EDConfig(n_cut=4),
                rsh_variant="meanfield",
            )


class TestEigenpairs:
    def test_orthonormal_and_residual_verified(self):
        cfg = EDConfig(eta=50.0, n_cut=60, n_levels=4)
        res, h, basis = _solve(RabiStarkHubbard(1.1, 0.0, 0.2), cfg)
        gram = res.states.T @ res.states
        assert np.max(np.abs(gram - np.eye(4))) < 1.0e-10
        assert np.all(np.diff(res.energies) >= -1.0e-12)

    def test_krylov_path_matches_dense(self):
        cfg = EDConfig(eta=50.0, n_cut=80, n_levels=3)
        h, basis = build_hamiltonian(RabiStarkHubbard(1.1, 0.0, 0.2), cfg)
        dense = lowest_eigenpairs(h, basis, 3)
        krylov = lowest_eigenpairs(h, basis, 3, dense_cutoff=10)
        assert np.allclose(dense.energies, krylov.energies, atol=1.0e-9)
        assert np.allclose(
            dense.photon_numbers, krylov.photon_numbers, atol=1.0e-7
        )

    def test_n_levels_validation(self):
        h, basis = build_hamiltonian(RabiStarkHubbard(0.5, 0.0, 0.0), EDConfig(n_cut=4))
        with pytest.raises(ValueError, match="n_levels"):
            lowest_eigenpairs(h, basis, 0)
        with pytest.raises(ValueError, match="n_levels"):
            lowest_eigenpairs(h, basis, basis.dim)

    def test_ground_energy_is_variational_in_n_cut(self):
        model = RabiStarkHubbard(1.3, 0.0, 0.1)
        energies = []
        for n_cut in (20, 40, 80):
            cfg = EDConfig(eta=50.0, n_cut=n_cut, n_levels=1)
            res, _, _ = _solve(model, cfg)
            energies.append(res.energies[0])
        assert energies[1] <= energies[0] + 1.0e-12
        assert energies[2] <= energies[1] + 1.0e-12


class TestObservables:
    def test_quadrature_sum_rule_exact_under_truncation(self):
        cfg = EDConfig(eta=30.0, n_cut=18, n_levels=3)
        res, _, basis = _solve(AnisotropicRabiStark(0.9, 0.6, 0.36), cfg)
        u2, v2 = quadrature_components(res.states, basis)
        assert np.max(np.abs(u2 + v2 - res.photon_numbers)) < 1.0e-14

    def test_vacuum_quadratures_vanish(self):
        cfg = EDConfig(eta=10.0, n_cut=6, n_levels=1)
        res, _, basis = _solve(MultimodeDicke12((0.0,), (0.0,)), cfg)
        u2, v2 = quadrature_components(res.states[:, 0], basis)
        assert abs(u2[0, 0]) < 1.0e-14
        assert abs(v2[0, 0]) < 1.0e-14

    def test_parity_diagonal_convention(self):
        basis = Basis("rabi_stark_hubbard", 1, 3, (10.0,), 1.0, True)
        diag = _parity_diagonal(basis)
        # Order: spin-up block (n = 0, 1, 2) then spin-down block.
        assert list(diag) == [-1.0, 1.0, -1.0, 1.0, -1.0, 1.0]

    def test_parity_commutes_with_hamiltonian(self):
        cfg = EDConfig(eta=20.0, n_cut=10)
        h, basis = build_hamiltonian(AnisotropicRabiStark(0.8, 0.5, 0.36), cfg)
        pi = sp.diags(_parity_diagonal(basis))
        assert sp.linalg.norm(h @ pi - pi @ h) < 1.0e-14 * sp.linalg.norm(h)

    def test_eigenstates_have_sharp_parity(self):
        cfg = EDConfig(eta=50.0, n_cut=40, n_levels=4)
        res, _, _ = _solve(RabiStarkHubbard(0.3, 0.1, 0.1), cfg)
        assert np.all(np.abs(np.abs(res.parity) - 1.0) < 1.0e-8)
        assert res.parity[0] == pytest.approx(1.0, abs=1.0e-8)

    def test_two_photon_coupling_breaks_parity(self):
        cfg = EDConfig(eta=20.0, n_cut=8, n_levels=1)
        h, basis = build_hamiltonian(MultimodeDicke12((0.5,), (0.3,)), cfg)
        assert not basis.has_parity
        res = lowest_eigenpairs(h, basis, 1)
        assert res.parity is None
        with pytest.raises(ValueError, match="parity"):
            parity_expectations(res.states, basis)

    def test_photon_numbers_accept_single_vector(self):
        cfg = EDConfig(eta=10.0, n_cut=6, n_levels=2)
        res, _, basis = _solve(RabiStarkHubbard(0.4, 0.0, 0.0), cfg)
        single = rescaled_photon_numbers(res.states[:, 0], basis)
        assert single.shape == (1, 1)
        assert single[0, 0] == pytest.approx(res.photon_numbers[0, 0])


class TestTruncationConvergence:
    def test_trivial_model_converges_immediately(self):
        report = truncation_convergence(
            MultimodeDicke12((0.0,), (0.0,)), EDConfig(eta=10.0, n_cut=4)
        )
        assert report.converged
        assert report.n_cut == 8
        assert len(report.schedule) == 2
        assert report.energy == pytest.approx(-0.5, abs=1.0e-12)

    def test_budget_exhaustion_reported_not_raised(self):
        report = truncation_convergence(
            RabiStarkHubbard(1.5, 0.0, 0.0),
            EDConfig(eta=200.0, n_cut=8, max_dim=192),
        )
        assert not report.converged
        assert "budget" in report.message
        assert report.n_cut == 64
        assert report.schedule[-1][0] == 64

    def test_supercritical_converges_with_headroom(self):
        model = AnisotropicRabiStark(0.9, 0.6, 0.36)
        report = truncation_convergence(
            model, EDConfig(eta=30.0, n_cut=16, max_dim=4000)
        )
        assert report.converged
        # Converged photon number sits near the mean-field prediction.
        rho_mf = float(np.sum(closed_form_order_parameter(model)))
        assert report.photon_numbers[0] == pytest.approx(rho_mf, rel=0.15)


class TestMeanFieldCrossCheck:
    def test_discrepancy_shrinks_with_frequency_ratio(self):
        model = AnisotropicRabiStark(0.9, 0.6, 0.36)
        rho_mf = float(np.sum(closed_form_order_parameter(model)))
        errors = []
        for eta, n_cut in ((50.0, 60), (400.0, 320)):
            cfg = EDConfig(eta=eta, n_cut=n_cut, n_levels=1)
            res, _, _ = _solve(model, cfg)
            errors.append(abs(res.photon_numbers[0, 0] - rho_mf) / rho_mf)
        assert errors[1] < 0.5 * errors[0]
        assert errors[1] < 0.05

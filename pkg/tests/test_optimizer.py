import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sptlab.landau import potential
from sptlab.models import (
    AnisotropicRabiStark,
    MultimodeDicke12,
    RabiStarkHubbard,
)
from sptlab.optimizer import (
    NP_THRESHOLD,
    brute_force_oracle,
    hessian_check,
    minimize,
)

# Frozen reference values, computed two independent ways before being
# pinned here: an exhaustive grid scan of the potential (1e-3 step,
# refined locally to 1e-7) and the stationarity closed forms quoted in
# the optimizer module docstring. Both agree to the digits shown.
RSH_REF = RabiStarkHubbard(0.9, 0.2, 0.1)
RSH_U_SQ = 0.08195131534283916
ARS_REF = AnisotropicRabiStark(1.0, 1.0, 0.36)
ARS_RHO = 0.17646329608783815
DICKE_REF = MultimodeDicke12((0.7245, 0.6), (0.5, 0.5))
DICKE_U = (0.58828072, 0.48718901)


def test_frozen_rsh_minimum():
    res = minimize(RSH_REF)
    assert res.converged
    assert res.z_min[0] ** 2 == pytest.approx(RSH_U_SQ, abs=1.0e-10)
    assert res.z_min[1] == 0.0
    assert res.order_parameter == pytest.approx(RSH_U_SQ, abs=1.0e-10)


def test_frozen_ars_minimum():
    res = minimize(ARS_REF)
    assert res.order_parameter == pytest.approx(ARS_RHO, abs=1.0e-10)
    # Equal couplings: the tie-break reports the v-branch representative.
    assert res.z_min[0] == 0.0
    assert res.z_min[1] == pytest.approx(np.sqrt(ARS_RHO), abs=1.0e-9)
    assert len(res.degenerate_minima) >= 1


def test_frozen_two_mode_dicke_minimum():
    res = minimize(DICKE_REF)
    assert np.allclose(res.z_min[:2], DICKE_U, atol=1.0e-6)
    assert np.allclose(res.z_min[2:], 0.0)
    # Mode ratio at a shared two-photon coupling reduces to gamma2/gamma1.
    assert res.z_min[1] / res.z_min[0] == pytest.approx(0.6 / 0.7245, abs=1.0e-9)


def test_multimode_qrm_closed_form():
    model = MultimodeDicke12((0.8, 0.9), (0.0, 0.0))
    res = minimize(model)
    g_sq = 0.8**2 + 0.9**2
    expected = np.array([0.8**2, 0.9**2]) * (1.0 - g_sq**-2) / 4.0
    assert np.allclose(res.z_min[:2] ** 2, expected, atol=1.0e-10)


def test_normal_phase_snaps_to_origin():
    res = minimize(RabiStarkHubbard(0.5, 0.2, 0.1))
    assert res.order_parameter == 0.0
    assert np.all(res.z_min == 0.0)
    assert res.phi_min == potential(RabiStarkHubbard(0.5, 0.2, 0.1), np.zeros(2)).phi


def test_unstable_parameters_raise():
    with pytest.raises(ValueError, match="unstable"):
        minimize(RabiStarkHubbard(0.5, 0.75, 0.375))
    with pytest.raises(ValueError, match="unstable"):
        minimize(MultimodeDicke12((0.5,), (1.0,)))


def test_boundary_point_is_normal_phase():
    # Exactly on the second-order boundary the origin is still the minimum.
    res = minimize(RabiStarkHubbard(0.8, 0.26, 0.1))
    assert res.order_parameter == 0.0


def test_minimize_result_metadata():
    res = minimize(RSH_REF)
    assert res.n_starts >= 1
    assert res.polish_iterations >= 0
    assert not res.used_fallback


def test_sign_degenerate_minima_reported():
    res = minimize(RabiStarkHubbard(1.1, 0.0, 0.0))
    # The -u partner of the reported minimum must appear.
    partners = [z for z in res.degenerate_minima if z[0] < 0.0]
    assert partners
    assert partners[0][0] == pytest.approx(-res.z_min[0], abs=1.0e-9)


def test_ars_diagonal_degeneracy():
    res = minimize(ARS_REF)
    mags = {tuple(np.round(np.abs(z), 6)) for z in res.degenerate_minima}
    # Besides sign partners, the u-branch twin of the v-branch minimum.
    assert any(abs(z[0]) > 0.1 and abs(z[1]) < 1.0e-8 for z in res.degenerate_minima)
    assert all(
        potential(ARS_REF, np.asarray(z)).phi
        == pytest.approx(res.phi_min, abs=1.0e-9)
        for z in res.degenerate_minima
    )
    assert mags  # non-empty by the assertions above


def test_hot_system_melts_superradiance():
    model = RabiStarkHubbard(1.05, 0.0, 0.0)
    assert minimize(model).order_parameter > 0.0
    assert minimize(model, beta_omega=1.0).order_parameter == 0.0


def test_finite_temperature_order_parameter_shrinks():
    model = RabiStarkHubbard(1.4, 0.0, 0.1)
    cold = minimize(model).order_parameter
    warm = minimize(model, beta_omega=5.0).order_parameter
    assert 0.0 < warm < cold


def test_hessian_check_at_minimum_and_origin():
    res = minimize(RSH_REF)
    report = hessian_check(RSH_REF, res.z_min)
    assert report.classification == "positive_definite"
    assert np.all(report.eigenvalues > 0.0)
    # In the superradiant phase the origin is a stationary saddle.
    report0 = hessian_check(RSH_REF, np.zeros(2))
    assert report0.classification == "indefinite"


def test_hessian_check_requires_stationary_point():
    with pytest.raises(ValueError, match="stationary"):
        hessian_check(RSH_REF, np.array([0.05, 0.0]))


def test_brute_force_oracle_matches_minimize():
    res = minimize(RSH_REF)
    oracle = brute_force_oracle(RSH_REF, half_width=1.0, step=2.0e-3)
    assert np.max(np.abs(np.abs(res.z_min) - np.abs(oracle.z_min))) <= oracle.step + 1.0e-12
    assert oracle.phi_min >= res.phi_min - 1.0e-12


def test_brute_force_oracle_rejects_oversized_grids():
    with pytest.raises(ValueError, match="grid"):
        brute_force_oracle(DICKE_REF, half_width=1.5, step=1.0e-3)


@settings(max_examples=25, deadline=None)
@given(
    gamma=st.floats(0.0, 1.3),
    j_tilde=st.floats(0.0, 0.45),
    u_tilde=st.floats(0.0, 0.45),
)
def test_minimize_is_global_on_random_probes(gamma, j_tilde, u_tilde):
    model = RabiStarkHubbard(gamma, j_tilde, u_tilde)
    if 1.0 - j_tilde - u_tilde <= 0.0:
        return
    res = minimize(model)
    rng = np.random.default_rng(42)
    probes = rng.uniform(-2.0, 2.0, (200, 2))
    phis = np.array([potential(model, z).phi for z in probes])
    assert res.phi_min <= phis.min() + 1.0e-9


@settings(max_examples=25, deadline=None)
@given(g1=st.floats(0.0, 1.4), g2=st.floats(0.0, 1.4), u=st.floats(0.0, 0.9))
def test_ars_order_parameter_depends_on_larger_coupling(g1, g2, u):
    res_a = minimize(AnisotropicRabiStark(g1, g2, u))
    res_b = minimize(AnisotropicRabiStark(g2, g1, u))
    assert res_a.order_parameter == pytest.approx(
        res_b.order_parameter, abs=1.0e-9
    )


def test_np_threshold_constant():
    assert NP_THRESHOLD == 1.0e-10

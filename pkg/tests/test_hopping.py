import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.linalg import eigh

from sptlab.fock import EDConfig, build_hamiltonian, parity_expectations, _annihilation
from sptlab.hopping import (
    compare_with_meanfield,
    critical_hopping,
)
from sptlab.models import RabiStarkHubbard

CFG = EDConfig(eta=400.0, n_cut=100, n_levels=4)

# Frozen spectral values at eta=400, n_cut=100, u_tilde=0.36. The gamma=0
# entry has the closed form 1 - u_tilde: the ground state couples only to
# the one-photon state, with weight 1 and energy cost omega (1 - u_tilde).
TABLE = {
    0.0: 0.64,
    0.3: 0.5502498403867352,
    0.5: 0.3910173289650169,
    0.7: 0.15410779358345525,
}


def test_decoupled_pin_is_exact():
    res = critical_hopping(0.0, 0.0, CFG)
    assert abs(res.j_tilde_critical - 1.0) < 1.0e-12
    assert res.terms_used == 1
    assert res.truncation_estimate == 0.0


def test_stark_only_closed_form():
    res = critical_hopping(0.0, 0.36, CFG)
    assert res.j_tilde_critical == pytest.approx(0.64, abs=1.0e-12)
    assert res.terms_used == 1


def test_frozen_table():
    for gamma, expected in TABLE.items():
        res = critical_hopping(gamma, 0.36, CFG)
        assert res.j_tilde_critical == pytest.approx(expected, abs=1.0e-9)
        assert res.spectral_sum == pytest.approx(1.0 / expected, rel=1.0e-9)


def test_monotone_decreasing_in_coupling():
    values = [critical_hopping(g, 0.36, CFG).j_tilde_critical for g in sorted(TABLE)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_close_to_meanfield_below_band_edge():
    rows = compare_with_meanfield(sorted(TABLE), 0.36, CFG)
    for row in rows:
        assert abs(row.j_spectral - row.j_meanfield) < 0.02
        assert row.relative_difference == pytest.approx(
            (row.j_spectral - row.j_meanfield) / row.j_meanfield
        )


def test_meanfield_exhausted_beyond_band_edge():
    rows = compare_with_meanfield([0.79, 0.8], 0.36, CFG)
    assert rows[0].j_meanfield == pytest.approx(0.0159, abs=1.0e-10)
    assert math.isnan(rows[1].j_meanfield)
    assert math.isnan(rows[1].relative_difference)
    # The spectral rule itself keeps working there.
    assert 0.0 < rows[1].j_spectral < rows[0].j_spectral


def test_parity_selection_rule():
    # Without the Stark term the model is the standard one-photon coupling
    # Hamiltonian; x only connects the ground state to opposite-parity
    # states, so same-parity weights must vanish.
    cfg = EDConfig(eta=50.0, n_cut=40)
    h, basis = build_hamiltonian(
        RabiStarkHubbard(0.5, 0.0, 0.0), cfg, rsh_variant="bare"
    )
    vals, vecs = eigh(h.toarray())
    parities = parity_expectations(vecs, basis)
    ladder = _annihilation(basis.n_cut)
    x_full = basis.mode_operator((ladder + ladder.T).tocsr(), 0)
    weights = vecs[:, 1:].T @ (x_full @ vecs[:, 0])
    same = np.abs(parities[1:] - parities[0]) < 1.0e-6
    assert np.any(same)
    assert np.max(np.abs(weights[same])) < 1.0e-10


def test_degenerate_ground_state_rejected():
    cfg = EDConfig(eta=50.0, n_cut=120)
    with pytest.raises(ValueError, match="self-consistency"):
        critical_hopping(2.0, 0.0, cfg)


def test_krylov_path_matches_dense():
    dense = critical_hopping(0.3, 0.36, CFG)
    res = critical_hopping(
        0.3, 0.36, EDConfig(eta=400.0, n_cut=2010), start_levels=64
    )
    assert res.j_tilde_critical == pytest.approx(
        dense.j_tilde_critical, abs=1.0e-9
    )
    assert res.truncation_estimate < 1.0e-6


def test_frequency_ratio_drift_shrinks():
    js = {
        eta: critical_hopping(0.3, 0.36, EDConfig(eta=eta, n_cut=100)).j_tilde_critical
        for eta in (100.0, 400.0, 800.0)
    }
    assert abs(js[100.0] - js[800.0]) > 3.0 * abs(js[400.0] - js[800.0])


def test_result_invariants():
    res = critical_hopping(0.4, 0.2, CFG)
    assert res.spectral_sum > 0.0
    assert res.j_tilde_critical == pytest.approx(1.0 / res.spectral_sum)
    assert res.truncation_estimate == 0.0  # dense path visits every level

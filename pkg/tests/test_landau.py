import math

import numpy as np
import pytest

from sptlab.landau import (
    embed_reduced,
    gradient,
    ln2cosh,
    phi_batch,
    phi_reduced,
    potential,
    radial_identity_residual,
    reduced_dim,
)
from sptlab.models import (
    AnisotropicRabiStark,
    MultimodeDicke12,
    RabiStarkHubbard,
)

MODELS = [
    MultimodeDicke12((0.7245, 0.6), (0.5, 0.5)),
    MultimodeDicke12((0.9,), (0.0,)),
    RabiStarkHubbard(0.9, 0.2, 0.1),
    AnisotropicRabiStark(1.0, 0.7, 0.36),
]


def test_ln2cosh_values_and_overflow():
    assert ln2cosh(np.array(0.0)) == pytest.approx(math.log(2.0))
    assert ln2cosh(np.array(1.0)) == pytest.approx(math.log(2.0 * math.cosh(1.0)))
    # Large arguments must not overflow: ln(2cosh x) -> |x|.
    big = ln2cosh(np.array([1.0e4, -1.0e4]))
    assert np.all(np.isfinite(big))
    assert big == pytest.approx([1.0e4, 1.0e4])


@pytest.mark.parametrize("model", MODELS)
def test_potential_at_origin(model):
    assert potential(model, np.zeros(model.z_dim)).phi == pytest.approx(-0.5)
    assert np.allclose(gradient(model, np.zeros(model.z_dim)), 0.0)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("beta_omega", [None, 2.0, 50.0])
def test_gradient_matches_finite_differences(model, beta_omega):
    rng = np.random.default_rng(7)
    for _ in range(5):
        z = rng.uniform(-0.8, 0.8, model.z_dim)
        g = gradient(model, z, beta_omega)
        h = 1.0e-6
        for i in range(model.z_dim):
            zp, zm = z.copy(), z.copy()
            zp[i] += h
            zm[i] -= h
            fd = (
                potential(model, zp, beta_omega).phi
                - potential(model, zm, beta_omega).phi
            ) / (2.0 * h)
            assert g[i] == pytest.approx(fd, abs=5.0e-9)


@pytest.mark.parametrize("model", MODELS)
def test_phi_batch_matches_pointwise(model):
    rng = np.random.default_rng(11)
    zs = rng.uniform(-1.0, 1.0, (20, model.z_dim))
    batch = phi_batch(model, zs)
    for z, val in zip(zs, batch):
        assert val == pytest.approx(potential(model, z).phi, rel=1.0e-14)


@pytest.mark.parametrize("model", MODELS)
def test_reduced_embedding_consistency(model):
    rng = np.random.default_rng(3)
    d = reduced_dim(model)
    xs = rng.uniform(-0.9, 0.9, (10, d))
    vals = phi_reduced(model, xs)
    for x, val in zip(xs, vals):
        z = embed_reduced(model, x)
        assert val == pytest.approx(potential(model, z).phi, rel=1.0e-14)


@pytest.mark.parametrize("model", MODELS)
def test_thermal_potential_bounded_by_entropy_term(model):
    # ln2cosh(x) - |x| is at most ln 2, so the finite-temperature value
    # sits within ln2/(beta*Omega) of the zero-temperature one.
    rng = np.random.default_rng(5)
    for beta_omega in (0.5, 2.0, 20.0, 500.0):
        for _ in range(5):
            z = rng.uniform(-1.0, 1.0, model.z_dim)
            cold = potential(model, z).phi
            warm = potential(model, z, beta_omega).phi
            assert abs(warm - cold) <= math.log(2.0) / beta_omega + 1.0e-15


@pytest.mark.parametrize("model", MODELS)
def test_zero_temperature_is_large_beta_limit(model):
    z = np.full(model.z_dim, 0.3)
    cold = potential(model, z).phi
    warm = potential(model, z, 1.0e4).phi
    assert warm == pytest.approx(cold, abs=1.0e-4)
    # Heat always lowers the potential: ln2cosh(x) >= |x|.
    assert warm <= cold + 1.0e-15


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("beta_omega", [None, 4.0])
def test_radial_identity(model, beta_omega):
    rng = np.random.default_rng(13)
    for _ in range(10):
        z = rng.uniform(-1.0, 1.0, model.z_dim)
        res = radial_identity_residual(model, z, beta_omega)
        assert res < 1.0e-8


def test_dicke_xi_reported():
    model = MultimodeDicke12((0.7, 0.5), (0.2, 0.1))
    z = np.array([0.3, 0.2, 0.1, 0.05])
    pv = potential(model, z)
    xi = 2.0 * (
        0.7 * 0.3
        + 0.5 * 0.2
        + 0.2 * (0.3**2 - 0.1**2)
        + 0.1 * (0.2**2 - 0.05**2)
    )
    assert pv.xi == pytest.approx(xi)
    assert pv.phi == pytest.approx(
        float(z @ z) - 0.5 * math.sqrt(1.0 + xi * xi)
    )


def test_invalid_beta_rejected():
    model = RabiStarkHubbard(0.5, 0.1, 0.1)
    z = np.zeros(2)
    with pytest.raises(ValueError):
        potential(model, z, 0.0)
    with pytest.raises(ValueError):
        potential(model, z, -1.0)
    with pytest.raises(ValueError):
        potential(model, z, 2.0e4)


def test_wrong_shape_rejected():
    model = RabiStarkHubbard(0.5, 0.1, 0.1)
    with pytest.raises(ValueError):
        potential(model, np.zeros(3))
    with pytest.raises(ValueError):
        gradient(model, np.zeros(4))

import numpy as np
import pytest

from diffid import (
    ConfigurationError,
    Domain,
    F_functional,
    ModeFieldSet,
    OmegaData,
    SpectralParams,
    build_grid,
    eigenvalue,
    frac_norm,
    omega_couplings,
    sine_coeff,
    sine_coeffs,
    synthesize,
)
from diffid.errors import DataError


def test_eigenvalue():
    assert eigenvalue(1) == 1.0
    assert eigenvalue(3) == 9.0
    assert eigenvalue(10) == 100.0
    with pytest.raises(ConfigurationError):
        eigenvalue(0)


def test_sine_coeff_orthonormal():
    params = SpectralParams(K=8, Ny=256)
    y = params.y
    v = np.sin(2 * y)
    assert sine_coeff(v, 2, y) == pytest.approx(1.0, abs=1e-10)
    assert sine_coeff(v, 1, y) == pytest.approx(0.0, abs=1e-10)
    assert sine_coeff(v, 3, y) == pytest.approx(0.0, abs=1e-10)
    assert sine_coeff(np.zeros_like(y), 5, y) == 0.0


def test_sine_coeff_parabola():
    # (2/pi) int y(pi-y) sin(ky) dy = 8/(pi k^3) for odd k, 0 for even k
    params = SpectralParams(K=9, Ny=256)
    y = params.y
    v = y * (np.pi - y)
    for k in range(1, 10):
        exact = 8.0 / (np.pi * k**3) if k % 2 == 1 else 0.0
        assert sine_coeff(v, k, y) == pytest.approx(exact, abs=1e-6)


def test_orthogonality_matrix():
    K = 32
    params = SpectralParams(K=K, Ny=4 * K)
    y = params.y
    for m in range(1, K + 1):
        coeffs = sine_coeffs(np.sin(m * y), K, y)
        expected = np.zeros(K)
        expected[m - 1] = 1.0
        assert np.max(np.abs(coeffs - expected)) < 1e-10


def test_synthesize_basics():
    params = SpectralParams(K=4, Ny=128)
    y = params.y
    coeffs = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.max(np.abs(synthesize(coeffs, y) - np.sin(y))) < 1e-14


def test_analysis_synthesis_roundtrip():
    params = SpectralParams(K=16, Ny=128)
    y = params.y
    rng = np.random.default_rng(3)
    coeffs = rng.standard_normal(16)
    v = synthesize(coeffs, y)
    back = sine_coeffs(v, 16, y)
    assert np.max(np.abs(back - coeffs)) < 1e-10
    assert np.max(np.abs(synthesize(back, y) - v)) < 1e-10


def test_synthesize_parabola_tail():
    K = 64
    params = SpectralParams(K=K, Ny=4 * K)
    y = params.y
    v = y * (np.pi - y)
    approx = synthesize(sine_coeffs(v, K, y), y)
    assert np.max(np.abs(approx - v)) <= 1e-3


def test_parseval_band_limited():
    params = SpectralParams(K=12, Ny=256)
    y = params.y
    rng = np.random.default_rng(11)
    coeffs = rng.standard_normal(12)
    v = synthesize(coeffs, y)
    norm_sq = np.trapezoid(v**2, y)
    assert norm_sq == pytest.approx((np.pi / 2) * np.sum(coeffs**2), abs=1e-8)


def test_couplings_sin():
    params = SpectralParams(K=6, Ny=256)
    om = OmegaData.from_callables(np.sin, lambda y: -np.sin(y), params)
    c = omega_couplings(om, 6)
    assert c[0] == pytest.approx(-np.pi / 2, abs=1e-10)
    assert np.max(np.abs(c[1:])) < 1e-10


def test_couplings_sin2():
    params = SpectralParams(K=6, Ny=256)
    om = OmegaData.from_callables(
        lambda y: np.sin(2 * y), lambda y: -4.0 * np.sin(2 * y), params)
    c = omega_couplings(om, 6)
    assert c[1] == pytest.approx(-2.0 * np.pi, abs=1e-10)
    mask = np.ones(6, dtype=bool)
    mask[1] = False
    assert np.max(np.abs(c[mask])) < 1e-10


def test_couplings_zero_omega():
    params = SpectralParams(K=4, Ny=128)
    om = OmegaData.from_profiles(params.y, np.zeros_like(params.y), 4,
                                 omega_dd=np.zeros_like(params.y))
    assert np.max(np.abs(om.couplings)) == 0.0


def test_coupling_identity_smooth_omegas():
    # quadrature against omega'' must agree with -lambda_j (pi/2) omega_j;
    # polynomial-type weights need the quadrature resolved well past 4K
    params = SpectralParams(K=32, Ny=4096)
    y = params.y
    cases = [
        (np.sin(y) + 0.3 * np.sin(3 * y), -np.sin(y) - 2.7 * np.sin(3 * y)),
        (y * (np.pi - y), -2.0 * np.ones_like(y)),
        ((y * (np.pi - y)) ** 2, 2 * np.pi**2 - 12 * np.pi * y + 12 * y**2),
    ]
    for omega, omega_dd in cases:
        om = OmegaData.from_profiles(y, omega, 32, omega_dd=omega_dd)
        assert np.max(np.abs(om.couplings - om.couplings_ibp)) <= 1e-8


def test_omega_boundary_check():
    params = SpectralParams(K=4, Ny=128)
    with pytest.raises(DataError):
        OmegaData.from_profiles(params.y, np.cos(params.y), 4,
                                omega_dd=-np.cos(params.y))


def make_grid(Nx=64, Nt=16, T=1.0):
    return build_grid(Domain((np.pi,), T), Nx=Nx, Nt=Nt)


def test_frac_norm_single_modes():
    g = make_grid()
    amp = np.sqrt(2.0 / np.pi)  # normalizes ||amp sin x||_{L2(0,pi)} to 1
    v1 = np.zeros((1,) + g.space_shape)
    v1[0] = amp * np.sin(g.x)
    for tau in (0.0, 0.25, 1.0):
        assert frac_norm(v1, g, tau, level=0, measure="G") == pytest.approx(1.0, abs=1e-9)

    v2 = np.zeros((2,) + g.space_shape)
    v2[1] = amp * np.sin(g.x)
    assert frac_norm(v2, g, 0.5, level=0, measure="G") == pytest.approx(4.0, abs=1e-8)

    v12 = np.zeros((2,) + g.space_shape)
    v12[0] = amp * np.sin(g.x)
    v12[1] = amp * np.sin(g.x)
    assert frac_norm(v12, g, 0.0, level=0, measure="G") == pytest.approx(2.0, abs=1e-8)


def test_frac_norm_monotone_in_tau():
    g = make_grid(Nx=32)
    rng = np.random.default_rng(5)
    v = rng.standard_normal((4,) + g.space_shape)
    vals = [frac_norm(v, g, tau, level=0, measure="G") for tau in (0.0, 0.3, 0.6, 1.0)]
    assert all(vals[i] <= vals[i + 1] + 1e-12 for i in range(len(vals) - 1))


def test_F_functional_static_mode():
    g = make_grid(Nx=128, Nt=16)
    params = SpectralParams(K=1, epsilon=1.0, Ny=64)
    vals = np.zeros((1,) + g.field_shape)
    vals[0, :] = np.sin(g.x)
    modes = ModeFieldSet(g, params, vals)
    assert F_functional(modes) == pytest.approx(np.pi, abs=1e-3)
    doubled = ModeFieldSet(g, params, 2.0 * vals)
    assert F_functional(doubled) == pytest.approx(4.0 * F_functional(modes), rel=1e-12)

    assert F_functional(ModeFieldSet.zeros(g, params)) == 0.0


def test_F_functional_triangle_inequality():
    g = make_grid(Nx=24, Nt=8)
    params = SpectralParams(K=3, epsilon=1.0, Ny=64)
    rng = np.random.default_rng(17)
    for _ in range(5):
        u = ModeFieldSet(g, params, 0.1 * rng.standard_normal((3,) + g.field_shape))
        v = ModeFieldSet(g, params, 0.1 * rng.standard_normal((3,) + g.field_shape))
        lhs = np.sqrt(F_functional(u + v))
        rhs = np.sqrt(F_functional(u)) + np.sqrt(F_functional(v))
        assert lhs <= rhs + 1e-10


def test_params_validation():
    with pytest.raises(ConfigurationError):
        SpectralParams(K=0)
    with pytest.raises(ConfigurationError):
        SpectralParams(K=4, epsilon=-1.0)
    with pytest.raises(ConfigurationError):
        SpectralParams(K=32, Ny=64)
    p = SpectralParams(K=4)
    assert p.tau1 == pytest.approx(0.5)
    assert p.tau2 == pytest.approx(1.0)
    p5 = SpectralParams(K=4, epsilon=5.0)
    assert p5.tau1 == pytest.approx(1.5)
    assert p5.tau2 == pytest.approx(2.0)

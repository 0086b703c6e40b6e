import numpy as np
import pytest

from diffid import (
    CertifyOptions,
    ConfigurationError,
    Domain,
    ModeFieldSet,
    OmegaData,
    ProblemData,
    ScalarField,
    SpectralParams,
    build_grid,
    build_scenario,
    check_global,
    check_local,
    compute_Psi,
    compute_certificate,
    estimate_sobolev_constant,
    first_dirichlet_eigenvalue,
    poincare_time_check,
)
from diffid.errors import DivisionHazardError
from diffid.grids import interior_margin_mask
from diffid.sinebasis import frac_norm


def constant_psi_data(Lx=np.pi, T=1.0, Nx=32, Nt=16, f_const=0.0, K=2, epsilon=1.0):
    """psi = 1 everywhere with a constant first source mode: every certificate
    constant is hand-computable."""
    grid = build_grid(Domain((Lx,), T), Nx=Nx, Nt=Nt)
    params = SpectralParams(K=K, epsilon=epsilon, Ny=64)
    om = OmegaData.from_callables(np.sin, lambda y: -np.sin(y), params)
    f_vals = np.zeros((K,) + grid.field_shape)
    f_vals[0] = f_const
    return ProblemData(
        grid=grid,
        psi=ScalarField(grid, np.ones(grid.field_shape)),
        f_modes=ModeFieldSet(grid, params, f_vals),
        phi_modes=np.zeros((K,) + grid.space_shape),
        omega=om,
        params=params,
    )


def test_Psi_mmsa_equals_two():
    grid = build_grid(Domain((np.pi,), 1.0), Nx=128, Nt=128)
    scn = build_scenario("MMS-A", grid, SpectralParams(K=4, Ny=256))
    Psi = compute_Psi(scn.data.psi, scn.data.f_modes, scn.omega, grid)
    mask = interior_margin_mask(grid, 2)
    assert np.max(np.abs(Psi.values[:, mask] - 2.0)) <= 1e-2


def test_Psi_caloric_measurement_vanishes():
    # psi = e^{-t} cos(x - pi/2) = e^{-t} sin x satisfies psi_t = psi_xx, so
    # with f = 0 the numerator vanishes up to FD error
    grid = build_grid(Domain((np.pi,), 1.0), Nx=128, Nt=128)
    params = SpectralParams(K=2, Ny=64)
    om = OmegaData.from_callables(np.sin, lambda y: -np.sin(y), params)
    psi = ScalarField.from_function(grid, lambda t, x: np.exp(-t) * np.sin(x))
    Psi = compute_Psi(psi, ModeFieldSet.zeros(grid, params), om, grid)
    mask = interior_margin_mask(grid, 2)
    assert np.max(np.abs(Psi.values[:, mask])) <= 1e-3


def test_Psi_scale_invariance():
    grid = build_grid(Domain((np.pi,), 0.5), Nx=48, Nt=24)
    params = SpectralParams(K=2, Ny=64)
    scn = build_scenario("MMS-A", grid, params)
    Psi1 = compute_Psi(scn.data.psi, scn.data.f_modes, scn.omega, grid)
    s = 7.3
    psi_s = ScalarField(grid, s * scn.data.psi.values)
    f_s = ModeFieldSet(grid, params, s * scn.data.f_modes.values)
    Psi2 = compute_Psi(psi_s, f_s, scn.omega, grid)
    assert np.max(np.abs(Psi1.values - Psi2.values)) <= 1e-12


def test_Psi_division_hazard_names_node():
    grid = build_grid(Domain((np.pi,), 1.0), Nx=16, Nt=8)
    params = SpectralParams(K=1, Ny=64)
    om = OmegaData.from_callables(np.sin, lambda y: -np.sin(y), params)
    psi = ScalarField(grid, np.zeros(grid.field_shape))
    with pytest.raises(DivisionHazardError) as err:
        compute_Psi(psi, ModeFieldSet.zeros(grid, params), om, grid)
    assert err.value.node is not None


def test_poincare_constant_interval_and_rectangle():
    g1 = build_grid(Domain((np.pi,), 1.0), Nx=8, Nt=4)
    assert abs(1.0 / first_dirichlet_eigenvalue(g1) - 1.0) <= 1e-12
    g2 = build_grid(Domain((2.0,), 1.0), Nx=8, Nt=4)
    assert 1.0 / first_dirichlet_eigenvalue(g2) == pytest.approx(
        (2.0 / np.pi) ** 2, abs=1e-12)
    g3 = build_grid(Domain((np.pi, np.pi / 2), 1.0), Nx=8, Nt=4, Ny=8)
    lam = np.pi**2 * (1 / np.pi**2 + 4 / np.pi**2)
    assert 1.0 / first_dirichlet_eigenvalue(g3) == pytest.approx(1.0 / lam, abs=1e-12)


def test_A_eps_closed_form():
    # eps = 1, omega = sin y, psi = 1: A = sqrt(pi) sqrt(3/2) sqrt(pi/2) = pi sqrt(0.75)
    data = constant_psi_data()
    cert = compute_certificate(data, CertifyOptions())
    assert abs(cert.A_eps - np.pi * np.sqrt(0.75)) <= 1e-12
    assert abs(cert.C_P - 1.0) <= 1e-12


def test_zero_Psi_M_local_time_condition_any_T():
    data = constant_psi_data(T=5.0, f_const=0.0)
    cert = compute_certificate(data, CertifyOptions())
    assert cert.Psi_M <= 1e-12
    assert cert.cond_local_T  # holds for every T when Psi_M = 0
    assert not cert.cond_T_le_1  # but the T <= 1 hypothesis still gates the verdict


def test_failing_q_names_condition():
    grid = build_grid(Domain((np.pi,), 0.5), Nx=32, Nt=16)
    scn = build_scenario("MMS-A", grid, SpectralParams(K=4, Ny=64))
    cert = compute_certificate(scn.data, CertifyOptions())
    assert cert.q_local > 1.0
    passed, margins = check_local(cert)
    assert not passed
    assert margins["4*R*B < 1"] < 0
    assert margins["2*Psi_M*T <= A_eps*C_S"] > 0


def test_homothety_flips_global_poincare_condition():
    # constant psi = 1 with unit first source mode: Psi_M = pi/2, A_1 = pi sqrt(0.75);
    # the global inequality fails on (0, 4) by less than 4x and holds on (0, 2)
    certs = {}
    for L in (4.0, 2.0):
        data = constant_psi_data(Lx=L, f_const=1.0)
        certs[L] = compute_certificate(data, CertifyOptions())
    assert certs[4.0].Psi_M == pytest.approx(np.pi / 2, abs=1e-10)
    assert not certs[4.0].cond_global_poincare
    lhs = 2.0 * certs[4.0].Psi_M**2 * certs[4.0].C_P
    rhs = certs[4.0].A_eps**2
    assert lhs / rhs < 4.0
    assert certs[2.0].cond_global_poincare
    assert certs[2.0].C_P == pytest.approx(certs[4.0].C_P / 4.0, rel=1e-12)


def test_R_terms_scale_quadratically():
    grid = build_grid(Domain((np.pi,), 0.5), Nx=32, Nt=16)
    params = SpectralParams(K=3, Ny=64)
    rng = np.random.default_rng(13)
    phi = rng.standard_normal((3,) + grid.space_shape)
    s = 3.0
    for tau, level in ((params.tau1, 1), (params.tau1, 0), (params.tau2, 0)):
        base = frac_norm(phi, grid, tau, level=level, measure="G")
        scaled = frac_norm(s * phi, grid, tau, level=level, measure="G")
        assert scaled == pytest.approx(s**2 * base, rel=1e-12)


def test_q_local_scale_covariance_with_fixed_Psi():
    # with f = 0 the lifted source is unaffected by data scaling, so scaling
    # phi alone multiplies every R-term, hence q, by s^2 exactly
    grid = build_grid(Domain((np.pi,), 0.5), Nx=32, Nt=16)
    params = SpectralParams(K=2, Ny=64)
    om = OmegaData.from_callables(np.sin, lambda y: -np.sin(y), params)
    rng = np.random.default_rng(3)
    phi = rng.standard_normal((2,) + grid.space_shape)
    psi = ScalarField(grid, np.ones(grid.field_shape))

    def cert_for(scale):
        data = ProblemData(grid=grid, psi=psi, f_modes=ModeFieldSet.zeros(grid, params),
                           phi_modes=scale * phi, omega=om, params=params)
        return compute_certificate(data, CertifyOptions())

    c1, c2 = cert_for(1.0), cert_for(2.5)
    assert c2.q_local == pytest.approx(2.5**2 * c1.q_local, rel=1e-12)
    assert c2.q_global == pytest.approx(2.5**2 * c1.q_global, rel=1e-12)


def test_increasing_T_never_rescues_local_verdict():
    params = SpectralParams(K=4, Ny=64)
    certs = []
    for T in (0.25, 0.5, 1.0):
        grid = build_grid(Domain((np.pi,), T), Nx=32, Nt=16)
        scn = build_scenario("MMS-A", grid, params)
        certs.append(compute_certificate(scn.data, CertifyOptions()))
    for prev, cur in zip(certs, certs[1:]):
        assert cur.R >= prev.R - 1e-9
        assert not (cur.local_pass and not prev.local_pass)


def test_certificate_json_roundtrip():
    from diffid.certificates import Certificate

    data = constant_psi_data(f_const=0.5)
    cert = compute_certificate(data, CertifyOptions())
    back = Certificate.from_json(cert.to_json())
    assert back == cert
    # floats survive the round trip exactly (repr carries 17 significant digits)
    assert back.A_eps == cert.A_eps


def test_check_global_margins():
    data = constant_psi_data(f_const=1.0, Lx=2.0)
    cert = compute_certificate(data, CertifyOptions())
    passed, margins = check_global(cert)
    assert passed == cert.global_pass
    assert set(margins) == {"2*Psi_M^2*C_P <= A_eps^2*C_S^2", "4*R1*B < 1"}


def test_invalid_options():
    with pytest.raises(ConfigurationError):
        CertifyOptions(C_S=0.0)
    with pytest.raises(ConfigurationError):
        CertifyOptions(boundary_margin=0)


def test_poincare_time_check_constant():
    g = np.full(101, 3.0)
    lhs, rhs = poincare_time_check(g, 1.0)
    assert lhs == pytest.approx(9.0, rel=1e-12)
    assert rhs == pytest.approx(18.0, rel=1e-12)


def test_poincare_time_check_linear():
    n = 4000
    t = np.linspace(0.0, 1.0, n + 1)
    lhs, rhs = poincare_time_check(t, 1.0)
    assert lhs == pytest.approx(1.0 / 3.0, abs=1e-6)
    assert rhs == pytest.approx(1.0, rel=1e-12)


def test_poincare_time_check_random_cubics():
    rng = np.random.default_rng(100)
    for _ in range(200):
        T = float(rng.choice([0.5, 1.0, 2.0]))
        coefs = rng.standard_normal(4)
        t = np.linspace(0.0, T, 2001)
        lhs, rhs = poincare_time_check(np.polyval(coefs, t), T)
        assert lhs <= rhs + 1e-8


def test_sobolev_probe_is_plausible_lower_bound():
    grid = build_grid(Domain((np.pi,), 1.0), Nx=32, Nt=32)
    est = estimate_sobolev_constant(grid, trials=50, seed=1)
    assert 0.0 < est < 10.0

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lossymzi import symplectic as sp
from lossymzi.errors import ContractError, DomainError, PureModeError

etas = st.floats(0.0, 1.0)
phases = st.floats(0.0, np.pi)
squeezes = st.floats(0.0, 2.0)


def test_tmsv_vacuum():
    np.testing.assert_allclose(sp.tmsv_covariance(0.0), np.eye(4), atol=0)


def test_tmsv_entries_use_doubled_squeeze():
    g = sp.tmsv_covariance(0.5)
    assert g[0, 0] == pytest.approx(np.cosh(1.0))
    assert g[0, 2] == pytest.approx(np.sinh(1.0))
    assert g[1, 3] == pytest.approx(-np.sinh(1.0))


def test_tmsv_photon_number():
    r = np.arcsinh(1.0)
    g = sp.tmsv_covariance(r)
    # <n1 + n2> = (tr(gamma) - 4) / 4 with vacuum = identity
    assert (np.trace(g) - 4.0) / 4.0 == pytest.approx(2.0, rel=1e-14)
    assert sp.photons_from_squeeze(r) == pytest.approx(2.0)
    assert sp.squeeze_from_photons(2.0) == pytest.approx(r)


def test_tmsv_is_pure():
    np.testing.assert_allclose(sp.symplectic_eigenvalues(sp.tmsv_covariance(np.arcsinh(1))), 1.0, atol=1e-12)


@pytest.mark.parametrize("r", [np.nan, np.inf, -0.1])
def test_tmsv_rejects_bad_squeeze(r):
    with pytest.raises(DomainError):
        sp.tmsv_covariance(r)


def test_basis_conversion_round_trip():
    k = sp.ladder_to_quadrature(2)
    np.testing.assert_allclose(k @ k.conj().T, np.eye(4), atol=1e-12)
    m = np.random.default_rng(3).normal(size=(4, 4))
    np.testing.assert_allclose(sp.to_ladder_basis(sp.to_quadrature_basis(m)), m, atol=1e-12)


def test_identity_transform():
    np.testing.assert_allclose(sp.lossy_mzi_transform(1.0, 1.0, 0.0), np.eye(8), atol=1e-15)


def test_total_loss_swaps_system_and_environment():
    t = sp.lossy_mzi_transform(0.0, 0.0, 0.0)
    np.testing.assert_allclose(np.abs(t[:4, 4:]), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(t[:4, :4], 0.0, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(etas, etas, phases)
def test_transform_is_real_symplectic(eta1, eta2, phi):
    t = sp.lossy_mzi_transform(eta1, eta2, phi)
    assert np.isrealobj(t)
    assert sp.is_symplectic(t, tol=1e-10)


@settings(max_examples=60, deadline=None)
@given(etas, etas, phases, etas, etas, phases)
def test_composition_stays_symplectic(a1, a2, p, b1, b2, q):
    t = sp.lossy_mzi_transform(a1, a2, p) @ sp.lossy_mzi_transform(b1, b2, q)
    assert sp.is_symplectic(t, tol=1e-9)


@pytest.mark.parametrize("eta", [-0.1, 1.1])
def test_transform_rejects_bad_eta(eta):
    with pytest.raises(DomainError):
        sp.lossy_mzi_transform(eta, 1.0, 0.0)


def test_evolution_lossless_identity():
    g0 = sp.tmsv_covariance(0.7)
    np.testing.assert_allclose(sp.evolve_and_reduce(g0, sp.lossy_mzi_transform(1, 1, 0)), g0, atol=1e-14)


def test_evolution_total_loss_gives_vacuum():
    g = sp.evolve_and_reduce(sp.tmsv_covariance(1.3), sp.lossy_mzi_transform(0, 0, 0.4))
    np.testing.assert_allclose(g, np.eye(4), atol=1e-14)


def test_evolution_example_point():
    r, e1, e2, phi = 1.0, 0.8, 1.0, 0.3
    g = sp.evolve_and_reduce(sp.tmsv_covariance(r), sp.lossy_mzi_transform(e1, e2, phi))
    d1 = 1 + 2 * e1 * np.sinh(r) ** 2
    d2 = 1 + 2 * e2 * np.sinh(r) ** 2
    a = np.sqrt(e1 * e2) * np.sinh(2 * r)
    assert g[0, 0] == pytest.approx(d1, abs=1e-12)
    assert g[2, 2] == pytest.approx(d2, abs=1e-12)
    assert np.hypot(g[0, 2], g[0, 3]) == pytest.approx(a, abs=1e-12)
    np.testing.assert_allclose(g, sp.lossy_tmsv_covariance(r, e1, e2, phi), atol=1e-10)


def test_evolution_dimension_mismatch():
    with pytest.raises(ContractError):
        sp.evolve_and_reduce(np.eye(6), sp.lossy_mzi_transform(1, 1, 0))


@settings(max_examples=200, deadline=None)
@given(squeezes, etas, etas, phases)
def test_evolution_matches_closed_form_and_is_physical(r, e1, e2, phi):
    g = sp.evolve_and_reduce(sp.tmsv_covariance(r), sp.lossy_mzi_transform(e1, e2, phi))
    np.testing.assert_allclose(g, sp.lossy_tmsv_covariance(r, e1, e2, phi), atol=1e-10 * max(1, np.cosh(2 * r)))
    assert sp.symplectic_eigenvalues(g).min() >= 1 - 1e-9


def test_phase_acts_as_rotation_of_first_mode():
    r, e1, e2 = 0.9, 0.6, 0.85
    g0 = sp.lossy_tmsv_covariance(r, e1, e2, 0.0)
    g1 = sp.lossy_tmsv_covariance(r, e1, e2, 0.7)
    c, s = np.cos(0.7), np.sin(0.7)
    rot = np.eye(4)
    rot[:2, :2] = [[c, s], [-s, c]]
    np.testing.assert_allclose(rot @ g0 @ rot.T, g1, atol=1e-12)
    assert g1[0, 0] == g0[0, 0] and g1[2, 2] == g0[2, 2]


def test_check_covariance_rejects_unphysical():
    with pytest.raises(DomainError):
        sp.check_covariance(0.5 * np.eye(4))
    with pytest.raises(ContractError):
        sp.check_covariance(np.arange(16.0).reshape(4, 4))


def test_williamson_identity():
    form = sp.williamson(np.eye(4))
    np.testing.assert_allclose(form.D, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(form.M, np.eye(4), atol=1e-12)
    assert form.degenerate


def test_williamson_pure_tmsv():
    form = sp.williamson(sp.tmsv_covariance(0.6))
    np.testing.assert_allclose(form.eigenvalues, 1.0, atol=1e-9)


def test_williamson_reconstruction_example():
    g = sp.lossy_tmsv_covariance(0.8, 0.7, 0.7, 0.5)
    form = sp.williamson(g)
    assert np.linalg.norm(form.reconstruct() - g) < 1e-9
    assert sp.is_symplectic(form.M, tol=1e-10)


@settings(max_examples=100, deadline=None)
@given(squeezes, st.floats(0.05, 0.99), st.floats(0.05, 1.0), phases)
def test_williamson_properties(r, e1, e2, phi):
    g = sp.lossy_tmsv_covariance(r, e1, e2, phi)
    form = sp.williamson(g)
    assert np.linalg.norm(form.reconstruct() - g) < 1e-9 * max(1, np.cosh(2 * r))
    assert form.eigenvalues.min() >= 1 - 1e-9
    assert form.eigenvalues[0] >= form.eigenvalues[1]
    d1, d2, a = sp.lossy_tmsv_coefficients(r, e1, e2)
    np.testing.assert_allclose(
        sorted(form.eigenvalues), sorted(sp.closed_symplectic_eigenvalues(d1, d2, a)), rtol=1e-9
    )


def test_williamson_is_deterministic():
    g = sp.lossy_tmsv_covariance(1.1, 0.4, 0.9, 2.0)
    a, b = sp.williamson(g), sp.williamson(g.copy())
    np.testing.assert_array_equal(a.M, b.M)


def test_candidate_eigenvalues_only_agree_without_correlation():
    # with a = 0 the candidate pair reduces to (d1, d2)
    np.testing.assert_allclose(sp.candidate_symplectic_eigenvalues(2.0, 1.5, 0.0), (2.0, 1.5))
    d1, d2, a = sp.lossy_tmsv_coefficients(0.8, 0.7, 0.7)
    candidate = np.array(sp.candidate_symplectic_eigenvalues(d1, d2, a))
    actual = sp.williamson(sp.lossy_tmsv_covariance(0.8, 0.7, 0.7, 0.5)).eigenvalues
    assert np.all(np.abs(candidate - actual) > 1.0)


def test_candidate_squeeze_angle_has_no_real_solution_for_strong_correlation():
    d1, d2, a = sp.lossy_tmsv_coefficients(0.8, 0.7, 0.7)
    assert d1 + d2 < 4 * a
    assert np.isnan(sp.candidate_r0(d1, d2, a))


def test_candidate_diagonalizer_does_not_reconstruct():
    # weakly correlated state where the candidate angle relation is solvable
    g = sp.lossy_tmsv_covariance(0.2, 0.5, 0.5, 0.3)
    d1, d2, a = sp.lossy_tmsv_coefficients(0.2, 0.5, 0.5)
    r0 = sp.candidate_r0(d1, d2, a)
    assert np.isfinite(r0)
    m = sp.candidate_diagonalizer(0.3, r0)
    d = np.diag(np.repeat(sp.closed_symplectic_eigenvalues(d1, d2, a), 2))
    assert np.linalg.norm(m.T @ d @ m - g) > 1e-3


def test_thermal_exponent_values():
    n0 = sp.thermal_exponent([3.0, 3.0])
    assert n0[0, 1] == pytest.approx(-np.log(0.5))
    assert n0[0, 0] == 0.0


def test_thermal_exponent_round_trip():
    form = sp.WilliamsonForm(D=np.diag([3.0, 3.0, 3.0, 3.0]), M=np.eye(4))
    exp = sp.exponent_from_covariance(form)
    np.testing.assert_allclose(sp.symplectic_eigenvalues(sp.covariance_from_exponent(exp)), 3.0, rtol=1e-9)


def test_exponent_round_trip_lossy_state():
    g = sp.lossy_tmsv_covariance(1.0, 0.8, 0.8, 0.2)
    exp = sp.exponent_from_covariance(sp.williamson(g))
    np.testing.assert_allclose(exp.N, exp.N.T, atol=1e-10)
    assert exp.mode_count == 2
    np.testing.assert_allclose(sp.covariance_from_exponent(exp), g, atol=1e-9)


def test_pure_mode_needs_regularization():
    form = sp.williamson(sp.tmsv_covariance(0.5))
    with pytest.raises(PureModeError):
        sp.exponent_from_covariance(form)
    reg = sp.regularize(form)
    assert reg.eigenvalues.min() >= 1 + 1e-9
    assert np.all(np.isfinite(sp.exponent_from_covariance(reg).N))

"""Parity detection at the interferometer output.

The expectation of the parity operator on mode ``a1`` is computed two ways:
the closed form in :func:`parity_expectation_closed` and the vacuum
expectation of a composed exponential-quadratic operator,
``<0|U|0> = det(C)^{-1/2}``, in :func:`parity_expectation_matrix`.

Operator representations act on the ladder vector
``(e1^dag, e2^dag, a1^dag, a2^dag, e1, e2, a1, a2)`` through
``U Lambda^T U^-1 = Lambda^T M(U)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DivergentEstimatorError, DomainError, SingularBlockError
from .qfi import LossyMziConfig

IMAG_TOL = 1e-8
SINGULAR_TOL = 1e-12
DIVERGENCE_TOL = 1e-9

# index of each operator in the ladder vector
E1D, E2D, A1D, A2D, E1, E2, A1, A2 = range(8)


@dataclass(frozen=True)
class ParityResult:
    expectation: float
    variance_phase: float = float("nan")
    omega: float = float("nan")

    @property
    def delta_phi(self):
        return float(np.sqrt(self.variance_phase))


def parity_matrix():
    m = np.eye(8, dtype=complex)
    m[A1D, A1D] = m[A1, A1] = -1.0
    return m


def squeeze_matrix(r):
    """Two-mode squeezer on ``a1, a2`` with real parameter ``r``."""
    if r < 0:
        raise DomainError(f"squeeze parameter must be >= 0, got {r}")
    m = np.eye(8, dtype=complex)
    c, s = np.cosh(r), np.sinh(r)
    m[A1D, A1D] = m[A2D, A2D] = m[A1, A1] = m[A2, A2] = c
    m[A1D, A2] = m[A2D, A1] = m[A2, A1D] = m[A1, A2D] = -s
    return m


def phase_matrix(phi):
    m = np.eye(8, dtype=complex)
    m[A1D, A1D] = np.exp(-1j * phi)
    m[A1, A1] = np.exp(1j * phi)
    return m


def beamsplitter_matrix():
    m = np.eye(8, dtype=complex)
    h = 1.0 / np.sqrt(2.0)
    m[A1D, A1D] = m[A2D, A2D] = h
    m[A1D, A2D] = m[A2D, A1D] = 1j * h
    m[A1, A1] = m[A2, A2] = h
    m[A1, A2] = m[A2, A1] = -1j * h
    return m


def loss_matrix(eta1, eta2):
    """Virtual beam splitters coupling each arm to its environment mode."""
    for eta in (eta1, eta2):
        if not (0.0 <= eta <= 1.0):
            raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    m = np.zeros((8, 8), dtype=complex)
    for e_d, a_d, e, a, eta in ((E1D, A1D, E1, A1, eta1), (E2D, A2D, E2, A2, eta2)):
        theta = np.arccos(np.sqrt(eta))
        c, s = np.cos(theta), np.sin(theta)
        m[e_d, e_d] = m[a_d, a_d] = m[e, e] = m[a, a] = c
        m[e_d, a_d] = m[a_d, e_d] = 1j * s
        m[e, a] = m[a, e] = -1j * s
    return m


def build_component_matrices(eta1, eta2, phi, r):
    """Return ``(M(Pi), M(S), M(U_phi), M(U_BS), M(U_loss))``."""
    return (
        parity_matrix(),
        squeeze_matrix(r),
        phase_matrix(phi),
        beamsplitter_matrix(),
        loss_matrix(eta1, eta2),
    )


def compose_u_all(components):
    """Representation of ``S^dag U^dag Pi U S`` with ``U = U_BS U_loss U_phi U_BS``.

    Adjoint representations are matrix inverses.
    """
    m_pi, m_s, m_phi, m_bs, m_loss = components
    m_mzi = m_bs @ m_loss @ m_phi @ m_bs
    return np.linalg.inv(m_s) @ np.linalg.inv(m_mzi) @ m_pi @ m_mzi @ m_s


def vacuum_expectation(m):
    """``|<0|U|0>|`` from the annihilation block ``C`` of ``M(U)``.

    The square root fixes the value only up to a global phase, so the
    modulus is returned.
    """
    c = m[4:, 4:]
    det = np.linalg.det(c)
    if abs(det) < SINGULAR_TOL:
        raise SingularBlockError(f"|det C| = {abs(det):.2e}")
    return abs(1.0 / np.sqrt(det + 0j))


def parity_omega(cfg):
    n, e1, e2 = cfg.n, cfg.eta1, cfg.eta2
    return 2.0 * e1 * e2 * (n + 2.0) * np.cos(cfg.phi) ** 2 + (e1 + e2) * (2.0 - e1 - e2)


def parity_expectation_closed(cfg):
    """Closed-form parity expectation ``sqrt(2 / (n omega + 2))``."""
    omega = parity_omega(cfg)
    return ParityResult(float(np.sqrt(2.0 / (cfg.n * omega + 2.0))), omega=float(omega))


def parity_expectation_matrix(cfg):
    """Parity expectation from the determinant of the composed representation."""
    comps = build_component_matrices(cfg.eta1, cfg.eta2, cfg.phi, cfg.r)
    value = vacuum_expectation(compose_u_all(comps))
    return ParityResult(float(value), omega=float(parity_omega(cfg)))


def ideal_parity(n, phi):
    return 1.0 / np.sqrt(1.0 + n * (n + 2.0) * np.cos(phi) ** 2)


def ideal_delta_phi(n, phi):
    """Lossless phase error ``(1 + n(n+2) cos^2 phi) / (|sin phi| sqrt(n(n+2)))``."""
    return (1.0 + n * (n + 2.0) * np.cos(phi) ** 2) / (abs(np.sin(phi)) * np.sqrt(n * (n + 2.0)))


def phase_variance(cfg):
    """Phase-estimation variance from parity detection, radians squared.

    ``omega (n omega + 2)^2 / (2 eta1^2 eta2^2 n (n+2)^2 sin^2 2phi)``, which
    equals the error-propagation formula with ``<Pi^2> = 1``. For lossless
    arms the lossless expression is used instead; it agrees with the general
    one wherever both are defined and remains finite at ``phi = pi/2``.

    Raises
    ------
    DivergentEstimatorError
        When ``|sin 2phi| < 1e-9`` (with loss) or ``|sin phi| < 1e-9`` (lossless).
    """
    n, e1, e2, phi = cfg.n, cfg.eta1, cfg.eta2, cfg.phi
    if not n > 0:
        raise DomainError("phase variance needs n > 0")
    base = parity_expectation_closed(cfg)
    omega = base.omega
    if e1 == 1.0 and e2 == 1.0:
        if abs(np.sin(phi)) < DIVERGENCE_TOL:
            raise DivergentEstimatorError(f"parity slope vanishes at phi = {phi}")
        var = ideal_delta_phi(n, phi) ** 2
    else:
        s2 = np.sin(2.0 * phi) ** 2
        if np.sqrt(s2) < DIVERGENCE_TOL or e1 * e2 == 0.0:
            raise DivergentEstimatorError(f"parity slope vanishes at phi = {phi}")
        var = omega * (n * omega + 2.0) ** 2 / (2.0 * e1**2 * e2**2 * n * (n + 2.0) ** 2 * s2)
    return ParityResult(base.expectation, float(var), omega)


def delta_phi(n, eta1, eta2, phi):
    """Parity phase error ``sqrt(phase_variance)``; ``inf`` where the estimator diverges."""
    try:
        return phase_variance(LossyMziConfig(n, eta1, eta2, phi)).delta_phi
    except DivergentEstimatorError:
        return float("inf")

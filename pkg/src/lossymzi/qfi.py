"""Quantum Fisher information of the lossy two-mode squeezed vacuum.

Two independent routes are provided: the closed form in ``qfi_closed`` and a
finite-difference of the Gaussian Bures fidelity in ``qfi_fidelity``.
"""
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import symplectic as sp
from .errors import DegenerateSpectrumError, DomainError

# Sigma of the fidelity formula, ladder order (a1^dag, a1, a2^dag, a2)
SIGMA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)
SIGMA_INV = np.linalg.inv(SIGMA)

IMAG_TOL = 1e-8
EIGVEC_COND_LIMIT = 1e20
WORKING_DPS = 30
RICHARDSON_STEPS = (1e-3, 5e-4)


@dataclass(frozen=True)
class LossyMziConfig:
    """One interferometer setting: mean photon number, arm transmissivities, phase."""

    n: float
    eta1: float = 1.0
    eta2: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.n) or self.n < 0:
            raise DomainError(f"mean photon number must be finite and >= 0, got {self.n}")
        for eta in (self.eta1, self.eta2):
            if not (0.0 <= eta <= 1.0):
                raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
        if not np.isfinite(self.phi):
            raise DomainError("phase must be finite")

    @classmethod
    def from_squeeze(cls, r, eta1=1.0, eta2=1.0, phi=0.0):
        return cls(sp.photons_from_squeeze(r), eta1, eta2, phi)

    @property
    def r(self):
        return sp.squeeze_from_photons(self.n)


@dataclass(frozen=True)
class QfiResult:
    f_q: float
    method: str

    @property
    def quantum_limit(self):
        """``1/sqrt(F_Q)``, radians; infinite when ``F_Q == 0``."""
        return np.inf if self.f_q <= 0 else self.f_q**-0.5


def qfi_closed(cfg):
    """Closed-form QFI, ``2 n (n+2) eta1 eta2 / (2 + n (eta1 + eta2 - 2 eta1 eta2))``.

    Independent of the phase.
    """
    n, e1, e2 = cfg.n, cfg.eta1, cfg.eta2
    f = 2.0 * n * (n + 2.0) * e1 * e2 / (2.0 + n * (e1 + e2 - 2.0 * e1 * e2))
    return QfiResult(float(f), "closed")


def qfi_equal_loss(n, eta):
    """QFI with the same transmissivity in both arms."""
    LossyMziConfig(n, eta, eta)
    return QfiResult(float(n * (n + 2.0) * eta**2 / (1.0 + n * (1.0 - eta) * eta)), "closed")


def qfi_one_arm(n, eta):
    """QFI with loss only in the phase-shifted arm (``eta2 = 1``)."""
    LossyMziConfig(n, eta, 1.0)
    return QfiResult(float(2.0 * eta * n * (n + 2.0) / (n * (1.0 - eta) + 2.0)), "closed")


class _Spectral:
    """Eigendecomposition of ``-N Sigma^-1`` held in extended precision."""

    def __init__(self, exponent):
        with mp.workdps(WORKING_DPS):
            x = -mp.matrix(exponent.N.tolist()) * mp.matrix(SIGMA_INV.tolist())
            self.w, self.v, self.v_inv = _eig(x)

    def exp(self, scale=1):
        with mp.workdps(WORKING_DPS):
            return self.v * mp.diag([mp.exp(scale * x) for x in self.w]) * self.v_inv

    def log_abs_det_exp_minus_identity(self):
        # det(e^X - I) = prod(expm1(lambda)) over the spectrum of X
        with mp.workdps(WORKING_DPS):
            return sum(mp.log(abs(mp.expm1(x))) for x in self.w)


def _eig(a):
    w, v = mp.eig(a)
    v_inv = mp.inverse(v)
    if mp.mnorm(v, 1) * mp.mnorm(v_inv, 1) > EIGVEC_COND_LIMIT:
        raise DegenerateSpectrumError(
            "matrix is numerically non-diagonalizable; jitter the transmissivities by ~1e-9"
        )
    return w, v, v_inv


def matrix_function(a, f):
    """Apply the scalar function ``f`` to a diagonalizable matrix via its eigendecomposition.

    Works in ``mpmath`` arithmetic at ``WORKING_DPS`` digits and returns an
    ``mpmath`` matrix.
    """
    with mp.workdps(WORKING_DPS):
        w, v, v_inv = _eig(mp.matrix(a))
        return v * mp.diag([f(x) for x in w]) * v_inv


def _log_fidelity(s1, s2):
    # 1 - F is ~1e-9 for neighbouring phases, below what double-precision
    # eigensolvers resolve, so this runs in extended precision
    with mp.workdps(WORKING_DPS):
        log_num = (s1.log_abs_det_exp_minus_identity() + s2.log_abs_det_exp_minus_identity()) / 2
        half1 = s1.exp(mp.mpf(1) / 2)
        inner = half1 * s2.exp() * half1
        mu = mp.eig(inner, right=False)
        root_minus_one = [mp.sqrt(m) - 1 for m in mu]
        den = mp.fprod(root_minus_one)
        if abs(mp.im(den)) > IMAG_TOL * abs(den):
            raise DegenerateSpectrumError(
                f"fidelity denominator has imaginary residue {float(mp.im(den)):.2e}"
            )
        log_den = sum(mp.log(abs(x)) for x in root_minus_one)
        # the determinant ratio is the squared root fidelity
        return (log_num - log_den) / 2


def bures_fidelity(exp1, exp2):
    """Root fidelity ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` of two Gaussian states.

    Parameters
    ----------
    exp1, exp2 : GaussianExponent
        Exponents of strictly mixed two-mode states.

    Notes
    -----
    The determinant ratio built from ``exp(-N Sigma^-1)`` equals the squared
    root fidelity; its square root is returned. Values are clamped to
    ``[0, 1]`` after checking that the imaginary residue is below ``1e-8``.
    """
    fid = float(mp.exp(_log_fidelity(_Spectral(exp1), _Spectral(exp2))))
    if fid > 1.0 + IMAG_TOL:
        raise ArithmeticError(f"fidelity {fid!r} exceeds 1 beyond tolerance")
    return min(max(fid, 0.0), 1.0)


def state_exponent(cfg, phi=None):
    """Gaussian exponent of the lossy TMSV for ``cfg`` at phase ``phi`` (defaults to ``cfg.phi``)."""
    phi = cfg.phi if phi is None else phi
    gamma = sp.lossy_tmsv_covariance(cfg.r, cfg.eta1, cfg.eta2, phi)
    return sp.exponent_from_covariance(sp.williamson(gamma))


def qfi_fidelity(cfg, dphi=RICHARDSON_STEPS[0]):
    """QFI from the Bures fidelity between states at ``phi`` and ``phi + dphi``.

    Uses ``F_Q = 8 (1 - F) / dphi^2`` at steps ``dphi`` and ``dphi/2`` combined
    by Richardson extrapolation. Both transmissivities must be below 1; the
    lossless state is pure and the exponent does not exist.
    """
    if not (1e-5 <= dphi <= 1e-2):
        raise DomainError(f"dphi must lie in [1e-5, 1e-2], got {dphi}")
    if cfg.eta1 >= 1.0 or cfg.eta2 >= 1.0:
        raise DomainError("the fidelity route needs eta1, eta2 < 1; use qfi_closed for lossless arms")
    if cfg.n == 0:
        return QfiResult(0.0, "fidelity")
    base = _Spectral(state_exponent(cfg))
    estimates = []
    for h in (dphi, dphi / 2.0):
        shifted = _Spectral(state_exponent(cfg, cfg.phi + h))
        estimates.append(float(-8 * mp.expm1(_log_fidelity(base, shifted))) / h**2)
    coarse, fine = estimates
    return QfiResult(max((4.0 * fine - coarse) / 3.0, 0.0), "fidelity")


def reference_limits(n, eta, model="two_arm"):
    """Reference precisions ``(sql, modified_hl, classical)`` in radians.

    ``model`` selects the classical limit: ``1/sqrt(n eta)`` for equal loss in
    both arms, ``(1 + sqrt(eta)) / (2 sqrt(n eta))`` for loss in one arm.
    """
    if not n > 0:
        raise DomainError(f"reference limits need n > 0, got {n}")
    if not (0.0 < eta <= 1.0):
        raise DomainError(f"transmissivity must lie in (0, 1], got {eta}")
    sql = 1.0 / np.sqrt(n)
    modified_hl = 1.0 / np.sqrt(n * (n + 2.0))
    if model == "two_arm":
        classical = 1.0 / np.sqrt(n * eta)
    elif model == "one_arm":
        classical = (1.0 + np.sqrt(eta)) / (2.0 * np.sqrt(n * eta))
    else:
        raise DomainError(f"unknown loss model {model!r}")
    return float(sql), float(modified_hl), float(classical)

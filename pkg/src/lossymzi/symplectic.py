"""Gaussian covariance matrices through the lossy interferometer.

Conventions used throughout the package:

* quadratures are ordered ``(x1, p1, x2, p2)``; environment modes, when
  present, are appended as ``(xe1, pe1, xe2, pe2)``;
* ``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))`` so the
  vacuum covariance is the identity;
* ladder vectors are ordered ``(a1^dag, a1, a2^dag, a2, ...)`` and related to
  quadratures by ``Gamma = K alpha`` with ``K = [[1, 1], [i, -i]]/sqrt(2)``
  on every mode.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import ContractError, DomainError, PureModeError

SYMMETRY_TOL = 1e-12
BONA_FIDE_TOL = 1e-9
PURE_MODE_TOL = 1e-12
REGULARIZATION_EPS = 1e-9
DEGENERACY_TOL = 1e-9

K_MODE = np.array([[1.0, 1.0], [1j, -1j]]) / np.sqrt(2.0)


def symplectic_form(n_modes):
    """Return the ``2n x 2n`` symplectic form in ``(x1, p1, x2, p2, ...)`` order."""
    return block_diag(*[np.array([[0.0, 1.0], [-1.0, 0.0]])] * n_modes)


def ladder_to_quadrature(n_modes):
    """Block-diagonal ``K`` mapping ladder vectors onto quadrature vectors."""
    return block_diag(*[K_MODE] * n_modes)


def to_quadrature_basis(m_ladder):
    """Convert a ladder-basis transform to the quadrature basis, ``K M K^-1``."""
    m_ladder = np.asarray(m_ladder)
    k = ladder_to_quadrature(m_ladder.shape[0] // 2)
    return k @ m_ladder @ k.conj().T


def to_ladder_basis(m_quad):
    """Inverse of :func:`to_quadrature_basis`."""
    m_quad = np.asarray(m_quad)
    k = ladder_to_quadrature(m_quad.shape[0] // 2)
    return k.conj().T @ m_quad @ k


def is_symplectic(m, tol=1e-10):
    m = np.asarray(m)
    omega = symplectic_form(m.shape[0] // 2)
    return np.allclose(m.T @ omega @ m, omega, rtol=0.0, atol=tol)


def symplectic_eigenvalues(gamma):
    """Symplectic eigenvalues of a covariance matrix, sorted in descending order.

    Computed as the moduli of the eigenvalues of ``i Omega gamma``, which come in
    ``+/-`` pairs.
    """
    gamma = np.asarray(gamma, dtype=float)
    omega = symplectic_form(gamma.shape[0] // 2)
    ev = np.sort(np.abs(np.linalg.eigvals(1j * omega @ gamma)))[::-1]
    return ev[::2]


def check_covariance(gamma, tol=BONA_FIDE_TOL):
    """Validate a covariance matrix and return it as a float array.

    Raises
    ------
    ContractError
        If the matrix is not square with even dimension, or not symmetric.
    DomainError
        If it violates the uncertainty principle.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise ContractError(f"covariance must be square with even size, got {gamma.shape}")
    if np.max(np.abs(gamma - gamma.T)) > SYMMETRY_TOL:
        raise ContractError("covariance matrix is not symmetric")
    nu = symplectic_eigenvalues(gamma)
    if nu.min() < 1.0 - tol:
        raise DomainError(f"not a physical covariance: symplectic eigenvalue {nu.min():.6g} < 1")
    return gamma


def tmsv_covariance(r):
    """Covariance matrix of a two-mode squeezed vacuum with squeeze parameter ``r``.

    The diagonal carries ``cosh 2r`` and the mode coupling ``+/- sinh 2r``, so
    that the mean total photon number is ``2 sinh^2 r``.
    """
    r = float(r)
    if not np.isfinite(r) or r < 0:
        raise DomainError(f"squeeze parameter must be finite and >= 0, got {r}")
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def squeeze_from_photons(n):
    """Squeeze parameter ``r`` with ``2 sinh^2 r = n``."""
    n = float(n)
    if not np.isfinite(n) or n < 0:
        raise DomainError(f"mean photon number must be finite and >= 0, got {n}")
    return float(np.arcsinh(np.sqrt(n / 2.0)))


def photons_from_squeeze(r):
    return 2.0 * np.sinh(r) ** 2


def _check_eta(*etas):
    for eta in etas:
        if not (0.0 <= eta <= 1.0):
            raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")


def _ladder_loss(eta1, eta2):
    # ladder order: a1^dag a1 a2^dag a2 e1^dag e1 e2^dag e2
    m = np.zeros((8, 8))
    for mode, eta in enumerate((eta1, eta2)):
        t, s = np.sqrt(eta), np.sqrt(1.0 - eta)
        for k in range(2):  # creation, annihilation components
            a = 2 * mode + k
            e = 4 + 2 * mode + k
            m[a, a], m[a, e] = t, -s
            m[e, a], m[e, e] = s, t
    return m


def _ladder_phase(phi):
    m = np.eye(8, dtype=complex)
    m[0, 0] = np.exp(1j * phi)
    m[1, 1] = np.exp(-1j * phi)
    return m


def loss_transform(eta1, eta2):
    """Quadrature-basis transform of the two virtual loss beam splitters (8x8)."""
    _check_eta(eta1, eta2)
    return to_quadrature_basis(_ladder_loss(eta1, eta2)).real


def phase_transform(phi):
    """Quadrature-basis transform for ``a1 -> exp(-i phi) a1`` (8x8)."""
    return to_quadrature_basis(_ladder_phase(float(phi))).real


def lossy_mzi_transform(eta1, eta2, phi):
    """Combined transform ``M_loss M_phi`` acting on system plus environment.

    Parameters
    ----------
    eta1, eta2 : float
        Transmissivities of the two arms.
    phi : float
        Phase shift on arm 1, radians.

    Returns
    -------
    ndarray
        Real symplectic 8x8 matrix in the quadrature basis.
    """
    m = loss_transform(eta1, eta2) @ phase_transform(phi)
    return m


def evolve_and_reduce(gamma0, transform):
    """Embed ``gamma0`` with vacuum environment, apply ``transform``, trace out the environment."""
    gamma0 = np.asarray(gamma0, dtype=float)
    transform = np.asarray(transform)
    if gamma0.shape != (4, 4) or transform.shape != (8, 8):
        raise ContractError(
            f"expected a 4x4 covariance and 8x8 transform, got {gamma0.shape} and {transform.shape}"
        )
    full = block_diag(gamma0, np.eye(4))
    out = transform @ full @ transform.T
    reduced = out[:4, :4]
    return 0.5 * (reduced + reduced.T)


def lossy_tmsv_coefficients(r, eta1, eta2):
    """Return ``(d1, d2, a)`` of the closed-form lossy covariance."""
    _check_eta(eta1, eta2)
    s2 = np.sinh(r) ** 2
    d1 = 1.0 + 2.0 * eta1 * s2
    d2 = 1.0 + 2.0 * eta2 * s2
    a = np.sqrt(eta1 * eta2) * np.sinh(2.0 * r)
    return d1, d2, a


def lossy_tmsv_covariance(r, eta1, eta2, phi):
    """Closed-form covariance of the TMSV after phase shift and loss."""
    d1, d2, a = lossy_tmsv_coefficients(r, eta1, eta2)
    c, s = a * np.cos(phi), a * np.sin(phi)
    return np.array(
        [
            [d1, 0.0, c, -s],
            [0.0, d1, -s, -c],
            [c, -s, d2, 0.0],
            [-s, -c, 0.0, d2],
        ]
    )


def closed_symplectic_eigenvalues(d1, d2, a):
    """Symplectic eigenvalues ``(r1, r2)`` of the closed-form lossy covariance."""
    root = np.sqrt((d1 + d2) ** 2 - 4.0 * a**2)
    return 0.5 * root + 0.5 * (d1 - d2), 0.5 * root - 0.5 * (d1 - d2)


def candidate_symplectic_eigenvalues(d1, d2, a):
    """Candidate ``(r1, r2) = (d1+d2) sqrt(4a^2+1)/2 +/- (d1-d2)/2``.

    Kept only as a comparison target; they disagree with
    :func:`closed_symplectic_eigenvalues` whenever ``a != 0``.
    """
    root = 0.5 * (d1 + d2) * np.sqrt(4.0 * a**2 + 1.0)
    return root + 0.5 * (d1 - d2), root - 0.5 * (d1 - d2)


def candidate_r0(d1, d2, a):
    """Solve ``coth(4 r0) = -(d1 + d2)/(4 a)`` for ``r0``; NaN when no real solution exists."""
    if a == 0:
        return 0.0
    s, q = -(d1 + d2), 4.0 * a
    if abs(s) <= abs(q):
        return float("nan")
    # coth(4 r0) = s/q  ->  r0 = ln((s + q)/(s - q)) / 8
    return 0.125 * np.log((s + q) / (s - q))


def candidate_diagonalizer(phi, r0):
    """Candidate explicit 4x4 congruence matrix parameterized by ``r0``, for cross-checks only."""
    ch, sh = np.cosh(r0), np.sinh(r0)
    s, c = np.sin(phi / 2.0), np.cos(phi / 2.0)
    return np.array(
        [
            [ch * s, -ch * c, sh * s, sh * c],
            [ch * s, sh * c, sh * c, -sh * s],
            [sh * s, sh * c, ch * s, -ch * c],
            [sh * c, -sh * s, ch * c, ch * s],
        ]
    )


@dataclass(frozen=True)
class WilliamsonForm:
    """``gamma = M^T D M`` with ``D = diag(r1, r1, r2, r2)`` and ``M`` symplectic."""

    D: np.ndarray
    M: np.ndarray
    r0: float = float("nan")
    degenerate: bool = False

    @property
    def eigenvalues(self):
        return self.D.diagonal()[::2].copy()

    def reconstruct(self):
        return self.M.T @ self.D @ self.M


def _sqrtm_psd(a):
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(w)) @ v.T


def _canonical_eigenvectors(mus, vecs):
    # inside a degenerate cluster the eigenbasis is arbitrary; replace it by the
    # Gram-Schmidt projections of the standard basis vectors onto the eigenspace
    vecs = vecs.copy()
    start = 0
    while start < len(mus):
        stop = start + 1
        while stop < len(mus) and mus[stop] - mus[start] < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            chosen = []
            for e in np.eye(block.shape[0]):
                u = block @ (block.conj().T @ e)
                for c in chosen:
                    u = u - c * (c.conj() @ u)
                norm = np.linalg.norm(u)
                if norm > 0.1:
                    chosen.append(u / norm)
                if len(chosen) == stop - start:
                    break
            vecs[:, start:stop] = np.column_stack(chosen)
        start = stop
    return vecs


def williamson(gamma):
    """Williamson normal form of a covariance matrix.

    The symplectic spectrum comes from the Hermitian matrix
    ``i gamma^{-1/2} Omega gamma^{-1/2}``, whose positive eigenvalues are the
    inverse symplectic eigenvalues. Eigenvalues are sorted descending and
    each eigenvector's largest-magnitude entry is rotated to be positive real.

    Returns
    -------
    WilliamsonForm
        ``degenerate`` is set when two symplectic eigenvalues coincide within
        ``1e-9``; the decomposition is still valid but not unique.
    """
    gamma = check_covariance(gamma)
    n = gamma.shape[0] // 2
    omega = symplectic_form(n)
    root = _sqrtm_psd(gamma)
    inv_root = np.linalg.inv(root)
    herm = 1j * inv_root @ omega @ inv_root
    herm = 0.5 * (herm + herm.conj().T)
    w, v = np.linalg.eigh(herm)
    # eigh sorts ascending; the top n eigenvalues are 1/nu, ascending in 1/nu
    # so they are descending in nu
    mus = w[n:]
    vecs = _canonical_eigenvectors(mus, v[:, n:])
    cols = []
    for k in range(n):
        u = vecs[:, k]
        big = np.argmax(np.abs(u))
        u = u * np.exp(-1j * np.angle(u[big]))
        cols.extend([np.sqrt(2.0) * u.real, -np.sqrt(2.0) * u.imag])
    o = np.column_stack(cols)
    nus = 1.0 / mus
    d_diag = np.repeat(nus, 2)
    s = root @ o @ np.diag(1.0 / np.sqrt(d_diag))
    degenerate = bool(n > 1 and np.min(np.abs(np.diff(nus))) < DEGENERACY_TOL)
    r0 = float("nan")
    if n == 2:
        r0 = candidate_r0(gamma[0, 0], gamma[2, 2], np.hypot(gamma[0, 2], gamma[0, 3]))
    return WilliamsonForm(D=np.diag(d_diag), M=s.T, r0=r0, degenerate=degenerate)


def regularize(form, eps=REGULARIZATION_EPS):
    """Clamp symplectic eigenvalues to at least ``1 + eps`` so the thermal exponent exists."""
    d = np.maximum(form.D.diagonal(), 1.0 + eps)
    return WilliamsonForm(D=np.diag(d), M=form.M, r0=form.r0, degenerate=form.degenerate)


@dataclass(frozen=True)
class GaussianExponent:
    """Symmetric matrix ``N`` of ``rho = exp(-alpha^T N alpha / 2)`` in ladder order."""

    N: np.ndarray

    @property
    def mode_count(self):
        return self.N.shape[0] // 2


def thermal_exponent(eigenvalues):
    """Ladder-basis exponent of a product of thermal modes with the given symplectic eigenvalues."""
    blocks = []
    for nu in eigenvalues:
        if nu <= 1.0 + PURE_MODE_TOL:
            raise PureModeError(
                f"symplectic eigenvalue {nu!r} is too close to 1; regularize the Williamson form first"
            )
        beta = -np.log((nu - 1.0) / (nu + 1.0))
        blocks.append(np.array([[0.0, beta], [beta, 0.0]]))
    return block_diag(*blocks)


def exponent_from_covariance(form):
    """Exponent ``N = K^T M^-1 K N0 K^T M^-T K`` for the state with Williamson form ``form``.

    Raises
    ------
    PureModeError
        If any symplectic eigenvalue is within ``1e-12`` of 1.
    """
    n0 = thermal_exponent(form.eigenvalues)
    k = ladder_to_quadrature(form.M.shape[0] // 2)
    m_inv = np.linalg.inv(form.M)
    n = k.T @ m_inv @ k @ n0 @ k.T @ m_inv.T @ k
    n = 0.5 * (n + n.T)
    return GaussianExponent(N=n)


def quadrature_exponent(exponent):
    """Real symmetric ``G`` with ``rho = exp(-Gamma^T G Gamma / 2)``."""
    k = ladder_to_quadrature(exponent.mode_count)
    g = k.conj() @ exponent.N @ k.conj().T
    return 0.5 * (g + g.T).real


def covariance_from_exponent(exponent):
    """Invert :func:`exponent_from_covariance`: recover the covariance matrix."""
    g = quadrature_exponent(exponent)
    form = williamson(g) if symplectic_eigenvalues(g).min() >= 1.0 else _williamson_any(g)
    # g = M^T diag(b) M  ->  gamma = M^-1 diag(coth(b/2)) M^-T
    b = form.D.diagonal()
    m_inv = np.linalg.inv(form.M)
    return m_inv @ np.diag(1.0 / np.tanh(b / 2.0)) @ m_inv.T


def _williamson_any(g):
    # williamson() validates physicality; the exponent is only positive definite
    scale = 1.0 / symplectic_eigenvalues(g).min()
    form = williamson(g * scale)
    return WilliamsonForm(D=form.D / scale, M=form.M)

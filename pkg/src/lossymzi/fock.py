"""Truncated Fock-space simulator used to cross-check the Gaussian formulas.

States are stored as an ensemble of unnormalized pure vectors, the columns of
a sparse matrix ``psi`` with ``rho = psi psi^dag``. Unitaries act on the
columns and a loss channel replaces each column by its Kraus images, so no
density matrix is formed unless one is needed.

The basis holds every ``|j1, j2>`` with ``j1 + j2 <= n_max``. It is closed
under the beam splitter and under photon loss, so the only truncation is the
cut of the input two-mode squeezed vacuum at ``cutoff`` photons per mode,
and ``1 - tr(rho)`` is exactly the probability that was discarded.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sps
from scipy.sparse.csgraph import connected_components
from scipy.stats import binom

from . import symplectic as sp
from .errors import ContractError, DomainError, TruncationError

DEFAULT_CUTOFF = 40
DEFICIT_LIMIT = 1e-10
SLD_FLOOR = 1e-12
FD_STEP = 1e-4


class FockBasis:
    """Two-mode states ``|j1, j2>`` with ``j1 + j2 <= n_max``, ordered by total number."""

    def __init__(self, n_max):
        if n_max < 0:
            raise DomainError(f"n_max must be >= 0, got {n_max}")
        self.n_max = int(n_max)
        totals = np.repeat(np.arange(self.n_max + 1), np.arange(1, self.n_max + 2))
        offsets = totals * (totals + 1) // 2
        self.j1 = np.arange(len(totals)) - offsets
        self.j2 = totals - self.j1
        self.size = len(totals)

    def index(self, j1, j2):
        j1, j2 = np.asarray(j1), np.asarray(j2)
        total = j1 + j2
        if np.any(total > self.n_max) or np.any(j1 < 0) or np.any(j2 < 0):
            raise ContractError("state lies outside the truncated basis")
        return total * (total + 1) // 2 + j1

    def counts(self, mode):
        if mode == 0:
            return self.j1
        if mode == 1:
            return self.j2
        raise ContractError(f"mode index must be 0 or 1, got {mode}")

    def _shift(self, mode, weights, lower):
        # maps |..j..> to weights[k] |..j-lower..> for every basis state k
        j = self.counts(mode)
        keep = (j >= lower) & (weights != 0)
        src = np.nonzero(keep)[0]
        dj1 = lower if mode == 0 else 0
        dst = self.index(self.j1[src] - dj1, self.j2[src] - (lower - dj1))
        return sps.csr_matrix((weights[keep], (dst, src)), shape=(self.size, self.size))

    @cached_property
    def lowering(self):
        return tuple(self._shift(m, np.sqrt(self.counts(m).astype(float)), 1) for m in (0, 1))

    def kraus(self, mode, eta):
        """Kraus operators ``E_l`` of the pure-loss channel on ``mode``."""
        j = self.counts(mode)
        ops = []
        for lost in range(self.n_max + 1):
            weights = np.sqrt(binom.pmf(lost, j, 1.0 - eta))
            if np.any(weights[j >= lost] > 0):
                ops.append(self._shift(mode, weights, lost))
        return ops

    @cached_property
    def beamsplitter(self):
        """``exp(i pi/4 (a1^dag a2 + a2^dag a1))`` assembled sector by sector."""
        blocks = []
        for total in range(self.n_max + 1):
            j = np.arange(total)
            hop = np.sqrt((j + 1.0) * (total - j))
            g, v = np.linalg.eigh(np.diag(hop, 1) + np.diag(hop, -1))
            blocks.append((v * np.exp(0.25j * np.pi * g)) @ v.T)
        return sps.block_diag(blocks, format="csr")


@dataclass
class FockState:
    """Unnormalized ensemble ``rho = psi psi^dag`` over a :class:`FockBasis`."""

    basis: FockBasis
    psi: sps.csc_matrix
    cutoff: int

    @property
    def trace(self):
        return float(np.real(self.psi.multiply(self.psi.conj()).sum()))

    @property
    def deficit(self):
        return max(1.0 - self.trace, 0.0)

    @property
    def truncated(self):
        """True when more than ``DEFICIT_LIMIT`` probability was cut off."""
        return self.deficit > DEFICIT_LIMIT

    def require(self, limit=DEFICIT_LIMIT):
        if self.deficit > limit:
            raise TruncationError(self.deficit, limit)
        return self

    def density(self):
        return (self.psi @ self.psi.conj().T).tocsr()

    def populations(self):
        return np.asarray(np.abs(self.psi.multiply(self.psi.conj()).sum(axis=1))).ravel()

    def expect_pair(self, left, right):
        """``tr(left rho right^dag)`` for operators in the basis."""
        return complex(((right @ self.psi).conj().multiply(left @ self.psi)).sum())

    def mean_photons(self):
        pop = self.populations()
        return float(pop @ (self.basis.j1 + self.basis.j2))


def _with_psi(state, psi):
    psi = sps.csc_matrix(psi)
    psi.eliminate_zeros()
    keep = np.diff(psi.indptr) > 0
    if not keep.all():
        psi = psi[:, keep]
    return FockState(state.basis, psi, state.cutoff)


def fock_state(j1, j2, cutoff=None):
    """Number state ``|j1, j2>``."""
    cutoff = max(j1, j2) if cutoff is None else cutoff
    basis = FockBasis(2 * cutoff)
    psi = sps.csc_matrix(([1.0 + 0j], ([int(basis.index(j1, j2))], [0])), shape=(basis.size, 1))
    return FockState(basis, psi, cutoff)


def tmsv_fock(r, cutoff=DEFAULT_CUTOFF):
    """Two-mode squeezed vacuum ``(1/cosh r) sum_k tanh^k r |k, k>`` for ``k <= cutoff``.

    The state is not renormalized: the discarded weight
    ``tanh^(2(cutoff+1)) r`` shows up as ``deficit`` and sets ``truncated``.
    """
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    if r < 0:
        raise DomainError(f"squeeze parameter must be >= 0, got {r}")
    basis = FockBasis(2 * cutoff)
    k = np.arange(cutoff + 1)
    amps = np.tanh(r) ** k / np.cosh(r)
    psi = sps.csc_matrix(
        (amps.astype(complex), (basis.index(k, k), np.zeros_like(k))), shape=(basis.size, 1)
    )
    return _with_psi(FockState(basis, psi, cutoff), psi)


def cutoff_for(r, tol=DEFICIT_LIMIT):
    """Smallest cutoff whose photon-number tail ``sum_{k>c} (k+1) p_k`` is below ``tol``.

    The extra factor bounds second-moment errors as well as the lost norm.
    """
    t2 = np.tanh(r) ** 2
    c = 1
    while (2 * c + 2) * t2 ** (c + 1) / (1.0 - t2) ** 2 > tol:
        c += 1
    return c


def apply_phase(state, phi, mode=0):
    """Phase shift ``exp(-i phi n_mode)``."""
    phase = np.exp(-1j * phi * state.basis.counts(mode))
    return _with_psi(state, sps.diags(phase) @ state.psi)


def apply_beamsplitter_50(state):
    """Balanced beam splitter ``exp(i pi/4 (a1^dag a2 + a2^dag a1))``."""
    return _with_psi(state, state.basis.beamsplitter @ state.psi)


def apply_loss(state, mode, eta):
    """Pure-loss channel of transmissivity ``eta`` on ``mode`` via its Kraus operators."""
    if not (0.0 <= eta <= 1.0):
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    state.basis.counts(mode)
    if eta == 1.0:
        return state
    ops = state.basis.kraus(mode, eta)
    return _with_psi(state, sps.hstack([e @ state.psi for e in ops]))


def parity_fock(state, mode=0):
    """``<(-1)^n_mode>`` of the (possibly truncated) state."""
    sign = 1.0 - 2.0 * (state.basis.counts(mode) % 2)
    return float(state.populations() @ sign)


def covariance_fock(state):
    """Quadrature covariance ``<{dR_i, dR_j}>`` from ladder moments, vacuum = identity.

    Only lowering operators are applied to the state, which keeps every
    moment exact in the truncated basis.
    """
    a = state.basis.lowering
    eye = sps.identity(state.basis.size, format="csr")
    # ladder order (a1^dag, a1, a2^dag, a2)
    first = [state.expect_pair(op, eye) for op in a]  # <a_i>
    means = np.array([np.conj(first[0]), first[0], np.conj(first[1]), first[1]])
    mom = np.empty((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            mom[2 * i + 1, 2 * j + 1] = state.expect_pair(a[i] @ a[j], eye)
            mom[2 * i, 2 * j] = np.conj(state.expect_pair(a[j] @ a[i], eye))
            mom[2 * i, 2 * j + 1] = state.expect_pair(a[j], a[i])
            mom[2 * i + 1, 2 * j] = state.expect_pair(a[i], a[j]) + (i == j) * state.trace
    sym = mom + mom.T - 2.0 * np.outer(means, means)
    k = sp.ladder_to_quadrature(2)
    gamma = k @ sym @ k.T
    if np.max(np.abs(gamma.imag)) > 1e-9:
        raise ArithmeticError("covariance has an imaginary part; state is not Hermitian")
    return gamma.real


def lossy_tmsv_fock(r, eta1, eta2, phi, cutoff=DEFAULT_CUTOFF):
    """TMSV with loss in each mode and phase ``phi`` on mode 1, no beam splitters.

    Loss commutes with the phase shift, so it is applied first.
    """
    state = tmsv_fock(r, cutoff).require()
    state = apply_loss(apply_loss(state, 0, eta1), 1, eta2)
    return apply_phase(state, phi)


def mzi_parity_fock(r, eta1, eta2, phi, cutoff=DEFAULT_CUTOFF):
    """Parity of output mode 1 for a TMSV sent through the lossy interferometer.

    The chain is beam splitter, phase, loss, beam splitter.
    """
    state = apply_beamsplitter_50(tmsv_fock(r, cutoff).require())
    state = apply_phase(state, phi)
    state = apply_loss(apply_loss(state, 0, eta1), 1, eta2)
    return parity_fock(apply_beamsplitter_50(state))


def _phase_factors(basis, rho, phi):
    rows, cols = rho.nonzero()
    return rows, cols, np.exp(-1j * phi * (basis.j1[rows] - basis.j1[cols]))


def _rho_derivative(basis, rho0, phi, h):
    rows, cols = rho0.nonzero()
    vals = np.asarray(rho0[rows, cols]).ravel()
    dj = basis.j1[rows] - basis.j1[cols]

    def at(p):
        return vals * np.exp(-1j * p * dj)

    coarse = (at(phi + h) - at(phi - h)) / (2.0 * h)
    fine = (at(phi + h / 2) - at(phi - h / 2)) / h
    return rows, cols, (4.0 * fine - coarse) / 3.0


def sld_qfi(rho, drho, floor=SLD_FLOOR):
    """``2 sum |<i|drho|j>|^2 / (l_i + l_j)`` over pairs with ``l_i + l_j > floor``.

    ``rho`` is diagonalized one connected block of its sparsity pattern at a
    time; ``drho`` must share that pattern.
    """
    rho = sps.csr_matrix(rho)
    drho = sps.csr_matrix(drho)
    n_comp, labels = connected_components(abs(rho) + abs(drho), directed=False)
    total = 0.0
    for c in range(n_comp):
        idx = np.nonzero(labels == c)[0]
        block = rho[idx][:, idx].toarray()
        if not np.any(block):
            continue
        lam, vec = np.linalg.eigh(0.5 * (block + block.conj().T))
        d = vec.conj().T @ drho[idx][:, idx].toarray() @ vec
        denom = lam[:, None] + lam[None, :]
        mask = denom > floor
        total += 2.0 * np.sum(np.abs(d[mask]) ** 2 / denom[mask])
    return float(total)


def qfi_fock(r, eta1, eta2, phi, cutoff=DEFAULT_CUTOFF, h=FD_STEP):
    """Oracle QFI for the phase on mode 1 of the lossy TMSV.

    ``d rho / d phi`` is a central difference with step ``h``, Richardson
    combined with step ``h/2``.

    Raises
    ------
    TruncationError
        If the cut input state misses more than ``1e-10`` of its norm.
    """
    base = lossy_tmsv_fock(r, eta1, eta2, 0.0, cutoff)
    rho0 = base.density()
    basis = base.basis
    rows, cols, vals = _rho_derivative(basis, rho0, phi, h)
    shape = rho0.shape
    drho = sps.csr_matrix((vals, (rows, cols)), shape=shape)
    rows, cols, fac = _phase_factors(basis, rho0, phi)
    rho = sps.csr_matrix((np.asarray(rho0[rows, cols]).ravel() * fac, (rows, cols)), shape=shape)
    return sld_qfi(rho, drho)

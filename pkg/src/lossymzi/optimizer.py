"""Choosing the measurement point and the per-shot photon number.

With loss the parity phase error is no longer smallest at ``pi/2``; the
optimal working point ``phi_o(n, eta1, eta2)`` is found numerically and the
unknown phase is shifted there before detection. Under a fixed total photon
budget ``N`` split into ``N/n`` repetitions there is also a best ``n``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .parity import phase_variance
from .qfi import LossyMziConfig, qfi_closed, reference_limits

SCAN_POINTS = 512
GUARD = 1e-6
PHI_TOL = 1e-10
N_GRID_POINTS = 200
N_GRID_MIN = 0.1
ADVANTAGE_TOL = 1e-6

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol):
    """Minimize a unimodal ``f`` on ``[lo, hi]`` until the bracket is narrower than ``tol``."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def model_of(eta1, eta2):
    if eta2 == 1.0:
        return "one_arm"
    if eta1 == eta2:
        return "two_arm"
    return "general"


def classical_limit(n, eta1, eta2):
    """Coherent-state limit ``(sqrt(eta1) + sqrt(eta2)) / (2 sqrt(n eta1 eta2))``.

    Reduces to ``1/sqrt(n eta)`` for equal loss and to
    ``(1 + sqrt(eta)) / (2 sqrt(n eta))`` for one-arm loss.
    """
    if not n > 0:
        raise DomainError(f"classical limit needs n > 0, got {n}")
    if eta1 <= 0.0 or eta2 <= 0.0:
        return np.inf
    return float((np.sqrt(eta1) + np.sqrt(eta2)) / (2.0 * np.sqrt(n * eta1 * eta2)))


def _log_variance(n, eta1, eta2):
    # log of the parity phase variance up to a phi-independent constant
    a = 2.0 * eta1 * eta2 * (n + 2.0)
    b = (eta1 + eta2) * (2.0 - eta1 - eta2)

    def f(phi):
        omega = a * np.cos(phi) ** 2 + b
        return np.log(omega) + 2.0 * np.log(n * omega + 2.0) - 2.0 * np.log(np.abs(np.sin(2.0 * phi)))

    return f


def optimal_phase(n, eta1, eta2, scan_points=SCAN_POINTS):
    """Working point ``phi_o`` in ``(0, pi/2)`` minimizing the parity phase error.

    A uniform scan locates the global basin, then golden-section search
    refines it to ``1e-10`` rad. Lossless arms return ``pi/2``.
    """
    if not n > 0:
        raise DomainError(f"the parity error is flat in phi for n = {n}; need n > 0")
    LossyMziConfig(n, eta1, eta2)
    if eta1 == 1.0 and eta2 == 1.0:
        return np.pi / 2.0
    if eta1 == 0.0 or eta2 == 0.0:
        raise DomainError("no phase information survives a fully lossy arm")
    f = _log_variance(n, eta1, eta2)
    grid = np.linspace(GUARD, np.pi / 2.0 - GUARD, scan_points)
    i = int(np.argmin(f(grid)))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, scan_points - 1)]
    return float(golden_section(f, lo, hi, PHI_TOL))


def single_shot_error(n, eta1, eta2):
    """``(phi_o, Delta phi(phi_o))`` for one experiment with ``n`` photons."""
    phi_o = optimal_phase(n, eta1, eta2)
    return phi_o, phase_variance(LossyMziConfig(n, eta1, eta2, phi_o)).delta_phi


@dataclass(frozen=True)
class PrecisionReport:
    f_q: float
    delta_phi_single: float
    delta_phi_repeated: float
    phi_opt: float
    sql: float
    modified_hl: float
    classical: float
    n_opt: float = float("nan")
    interior: bool = True

    @property
    def quantum_limit(self):
        return self.f_q**-0.5 if self.f_q > 0 else np.inf


def repeated_error(n, eta1, eta2, total_photons):
    """Phase error after splitting ``total_photons`` into ``N/n`` repetitions.

    ``delta phi = Delta phi(n, eta, phi_o) / sqrt(N/n)``. Reference limits are
    per shot, evaluated at ``n``.
    """
    if not (0.0 < n <= total_photons):
        raise DomainError(f"need 0 < n <= N, got n={n}, N={total_photons}")
    phi_o, single = single_shot_error(n, eta1, eta2)
    f_q = qfi_closed(LossyMziConfig(n, eta1, eta2)).f_q
    sql, mhl, _ = reference_limits(n, 1.0)
    return PrecisionReport(
        f_q=f_q,
        delta_phi_single=single,
        delta_phi_repeated=single / np.sqrt(total_photons / n),
        phi_opt=phi_o,
        sql=sql,
        modified_hl=mhl,
        classical=classical_limit(n, eta1, eta2),
    )


def default_n_grid(total_photons):
    return np.geomspace(N_GRID_MIN, total_photons, N_GRID_POINTS)


@dataclass(frozen=True)
class PhotonNumberOptimum:
    n_opt: float
    delta_phi: float
    interior: bool
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)


def optimal_photon_number(total_photons, eta1, eta2, n_grid=None):
    """Per-shot photon number minimizing the repeated-experiment parity error.

    The grid minimum is refined by golden-section search in ``log n`` between
    its neighbours. If the minimum sits on the grid boundary no refinement is
    done and ``interior`` is False.
    """
    grid = default_n_grid(total_photons) if n_grid is None else np.asarray(n_grid, dtype=float)
    if grid.min() <= 0 or grid.max() > total_photons:
        raise DomainError("photon-number grid must lie in (0, N]")
    grid = np.sort(grid)

    def objective(n):
        return single_shot_error(n, eta1, eta2)[1] * np.sqrt(n / total_photons)

    values = np.array([objective(n) for n in grid])
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        return PhotonNumberOptimum(float(grid[i]), float(values[i]), False, grid, values)
    log_n = golden_section(
        lambda x: objective(np.exp(x)), np.log(grid[i - 1]), np.log(grid[i + 1]), 1e-9
    )
    n_opt = float(np.exp(log_n))
    best = objective(n_opt)
    if best > values[i]:
        n_opt, best = float(grid[i]), float(values[i])
    return PhotonNumberOptimum(n_opt, float(best), True, grid, values)


def quantum_advantage_region(n, model="two_arm", tol=ADVANTAGE_TOL):
    """Smallest transmissivity at which ``1/sqrt(F_Q)`` beats the SQL ``1/sqrt(n)``.

    Found by bisection on ``F_Q(eta) - n``, which increases with ``eta``.
    """
    if not n > 0:
        raise DomainError(f"need n > 0, got {n}")
    if model == "two_arm":
        def f_q(eta):
            return qfi_closed(LossyMziConfig(n, eta, eta)).f_q
    elif model == "one_arm":
        def f_q(eta):
            return qfi_closed(LossyMziConfig(n, eta, 1.0)).f_q
    else:
        raise DomainError(f"unknown loss model {model!r}")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f_q(mid) > n:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MeasurementPlan:
    total_photons: float
    repetitions: float
    center_estimate: float
    predetection_shift: float
    report: PrecisionReport


def plan_measurement(n, eta1, eta2, total_photons, center_estimate=0.0):
    """Predetection shift ``phi_o - center_estimate`` and the precision it delivers.

    Shifting by a known amount leaves the estimator's error unchanged, so the
    report is the one at ``phi_o``.
    """
    report = repeated_error(n, eta1, eta2, total_photons)
    return MeasurementPlan(
        total_photons=float(total_photons),
        repetitions=float(total_photons / n),
        center_estimate=float(center_estimate),
        predetection_shift=float(report.phi_opt - center_estimate),
        report=report,
    )

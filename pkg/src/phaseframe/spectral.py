"""Mode weights, their grid-periodized sums and the circulant overlap matrix.

For the circle grid with N points at radius sqrt(p) the frame operator is
diagonal on the number basis with eigenvalues

    lam_m = N e^{-p} p^m / m!      (N times the Poisson pmf),

while the N x N overlap (Gram) matrix B of the sampled coherent states is a
Hermitian circulant whose eigenvalues are the periodized sums

    lhat_j = sum_{q >= 0} lam_{j + qN},   j = 0..N-1.

The relative excess nu_j = (lhat_j - lam_j)/lam_j measures how much aliased
weight a residue class carries and controls the reconstruction error.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ._validation import check_grid_size, check_mean_number, check_order, check_tol
from .fock import PhaseGrid, cs_overlap

__all__ = [
    "DEFAULT_SERIES_TOL",
    "resolve_series_tol",
    "log_mode_weight",
    "mode_weight",
    "folded_weight",
    "log_aliasing_excess",
    "aliasing_excess",
    "critical_radius",
    "critical_radius_asymptote",
    "default_n_max",
    "fourier_matrix",
    "SpectralData",
    "CirculantOverlap",
    "build_overlap",
    "apply_overlap_inverse",
    "rfm_orthogonality_defect",
    "rfm_orthogonality_check",
]

DEFAULT_SERIES_TOL = 1e-16
_TOL_ENV_VAR = "PHASE_FRAME_TOL"

# safety cap on series iterations; generous against any sane (p, N)
_MAX_FOLD_STEPS = 200_000


def resolve_series_tol(series_tol: float | None = None) -> float:
    """Explicit argument wins, then the PHASE_FRAME_TOL environment variable,
    then the built-in default."""
    if series_tol is not None:
        return check_tol(series_tol)
    env = os.environ.get(_TOL_ENV_VAR)
    if env is not None:
        try:
            value = float(env)
        except ValueError as exc:
            raise ValueError(f"{_TOL_ENV_VAR} must be a float, got {env!r}") from exc
        return check_tol(value, _TOL_ENV_VAR)
    return DEFAULT_SERIES_TOL


def log_mode_weight(m, p, N) -> np.ndarray:
    """log(N e^{-p} p^m / m!) for scalar or array m."""
    p = check_mean_number(p)
    N = check_grid_size(N)
    mf = np.asarray(m, dtype=float)
    if np.any(mf < 0):
        raise ValueError("mode index must be >= 0")
    return math.log(N) - p + mf * math.log(p) - gammaln(mf + 1.0)


def mode_weight(m, p, N):
    """Frame-operator eigenvalue lam_m = N e^{-p} p^m / m!.

    Evaluated in log space; underflows cleanly to 0.0 once the true value
    drops below double range.
    """
    out = np.exp(log_mode_weight(m, p, N))
    if np.ndim(m) == 0:
        return float(out)
    return out


def folded_weight(p, N, series_tol: float | None = None) -> np.ndarray:
    """Periodized weights lhat_j = sum_q lam_{j+qN} for j = 0..N-1.

    The q sum stops once the block index has passed the Poisson mode
    (q*N > p) and the freshly added terms are below series_tol times the
    running partial sums.
    """
    p = check_mean_number(p)
    N = check_grid_size(N)
    tol = resolve_series_tol(series_tol)
    j = np.arange(N)
    total = np.zeros(N)
    q = 0
    while True:
        terms = np.exp(log_mode_weight(q * N + j, p, N))
        total += terms
        if q * N > p and np.all(terms <= tol * total):
            break
        q += 1
        if q > _MAX_FOLD_STEPS:
            raise RuntimeError("periodized weight series failed to converge")
    return total


def _log_excess_terms(p, N, series_tol):
    """Log of the u-series terms n! p^{uN} / (n+uN)!, accumulated until the
    same stopping rule as folded_weight is met.  Returns the running
    logsumexp accumulator, one entry per n = 0..N-1."""
    tol = resolve_series_tol(series_tol)
    log_tol = math.log(tol)
    n = np.arange(N, dtype=float)
    base = gammaln(n + 1.0)
    accum = np.full(N, -np.inf)
    u = 1
    while True:
        lt = base - gammaln(n + u * N + 1.0) + u * N * math.log(p)
        accum = np.logaddexp(accum, lt)
        if u * N > p and np.all(lt <= log_tol + accum):
            break
        u += 1
        if u > _MAX_FOLD_STEPS:
            raise RuntimeError("aliasing excess series failed to converge")
    return accum


def log_aliasing_excess(p, N, series_tol: float | None = None) -> np.ndarray:
    """log(nu_n) for n = 0..N-1, stable even where nu underflows double range."""
    p = check_mean_number(p)
    N = check_grid_size(N)
    return _log_excess_terms(p, N, series_tol)


def aliasing_excess(p, N, series_tol: float | None = None) -> np.ndarray:
    """Relative aliased weight nu_n = (lhat_n - lam_n)/lam_n, n = 0..N-1.

    Computed directly from the series sum_{u>=1} n! p^{uN} / (n+uN)! rather
    than by dividing two nearly equal numbers, so it stays strictly positive
    and strictly decreasing in n down to the underflow floor.
    """
    return np.exp(log_aliasing_excess(p, N, series_tol))


def critical_radius(N) -> float:
    """p0(N) = ((2N)!/N!)^{1/N}, below which the first excess term dominates."""
    N = check_grid_size(N)
    return math.exp((gammaln(2 * N + 1) - gammaln(N + 1)) / N)


def critical_radius_asymptote(N) -> float:
    """Leading large-N behavior (4/e) N (1 + ln2/(2N))."""
    N = check_grid_size(N)
    return 4.0 / math.e * N * (1.0 + math.log(2.0) / (2.0 * N))


def default_n_max(p, N) -> int:
    """Default materialization cutoff p + 20 sqrt(p) + 10 N."""
    p = check_mean_number(p)
    N = check_grid_size(N)
    return int(math.ceil(p + 20.0 * math.sqrt(p) + 10.0 * N))


def fourier_matrix(N) -> np.ndarray:
    """Unitary DFT matrix F_{kn} = e^{-2 pi i k n / N} / sqrt(N).

    The k*n products are reduced mod N in exact integer arithmetic before
    exponentiation, so columns are orthonormal to machine precision.
    """
    N = check_grid_size(N)
    k = np.arange(N)
    return np.exp(-2j * np.pi * np.mod(np.outer(k, k), N) / N) / math.sqrt(N)


@dataclass
class SpectralData:
    """Precomputed weight arrays for one grid.

    weights[m] = lam_m for m = 0..n_max, folded[j] = lhat_j and
    excess[j] = nu_j for j = 0..N-1.
    """

    grid: PhaseGrid
    n_max: int
    series_tol: float
    log_weights: np.ndarray
    folded: np.ndarray
    excess: np.ndarray
    log_excess: np.ndarray

    @staticmethod
    def build(
        grid: PhaseGrid,
        n_max: int | None = None,
        series_tol: float | None = None,
    ) -> "SpectralData":
        if not isinstance(grid, PhaseGrid):
            raise ValueError("grid must be a PhaseGrid")
        tol = resolve_series_tol(series_tol)
        if n_max is None:
            n_max = default_n_max(grid.p, grid.N)
        n_max = check_order(n_max, "n_max")
        logw = log_mode_weight(np.arange(n_max + 1), grid.p, grid.N)
        log_nu = log_aliasing_excess(grid.p, grid.N, tol)
        return SpectralData(
            grid=grid,
            n_max=n_max,
            series_tol=tol,
            log_weights=logw,
            folded=folded_weight(grid.p, grid.N, tol),
            excess=np.exp(log_nu),
            log_excess=log_nu,
        )

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def weight_sum_defect(self) -> float:
        """|sum_m lam_m - N| over the materialized block; diagnostic for n_max."""
        return abs(float(np.sum(self.weights)) - self.grid.N)


@dataclass
class CirculantOverlap:
    """Gram matrix B_{kl} = <z_k|z_l> of the sampled coherent states.

    B is circulant: B_{kl} depends on l-k only, with first row
    C_l = e^{-p} exp(p e^{2 pi i l / N}) and eigenvalues lhat_j on the
    Fourier columns.
    """

    grid: PhaseGrid
    first_row: np.ndarray
    eigenvalues: np.ndarray
    series_tol: float

    def matrix(self) -> np.ndarray:
        k = np.arange(self.grid.N)
        idx = np.mod(k[None, :] - k[:, None], self.grid.N)  # B_{kl} = C_{l-k}
        return self.first_row[idx]

    def dft_eigenvalues(self) -> np.ndarray:
        """Eigenvalues recomputed as the DFT of the first row.

        Cross-validation route for the series values; its accuracy is limited
        by the absolute rounding floor of the DFT (about N*eps), so tiny
        eigenvalues carry a large relative error in this route.
        """
        N = self.grid.N
        k = np.arange(N)
        E = np.exp(-2j * np.pi * np.mod(np.outer(k, k), N) / N)
        return (E @ self.first_row).real

    def series_dft_defect(self) -> float:
        """Max |series - dft| / lhat_0; scale-relative consistency diagnostic."""
        dft = self.dft_eigenvalues()
        return float(np.max(np.abs(self.eigenvalues - dft)) / self.eigenvalues[0])

    def condition(self) -> float:
        lo = float(np.min(self.eigenvalues))
        hi = float(np.max(self.eigenvalues))
        return math.inf if lo == 0.0 else hi / lo

    def apply(self, v) -> np.ndarray:
        """B @ v through the explicit dense circulant."""
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected a length-{self.grid.N} vector")
        return self.matrix() @ v

    def solve(self, v) -> np.ndarray:
        """B^{-1} v = F diag(1/lhat) F* v with the unitary DFT matrix F."""
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected a length-{self.grid.N} vector")
        cond = self.condition()
        if cond > 1e12:
            warnings.warn(
                f"overlap matrix condition number {cond:.3e} exceeds 1e12; "
                "inverse application is unreliable",
                RuntimeWarning,
                stacklevel=2,
            )
        F = fourier_matrix(self.grid.N)
        return F @ ((F.conj().T @ v) / self.eigenvalues)


def build_overlap(grid: PhaseGrid, series_tol: float | None = None) -> CirculantOverlap:
    """Assemble the circulant overlap with series eigenvalues."""
    if not isinstance(grid, PhaseGrid):
        raise ValueError("grid must be a PhaseGrid")
    tol = resolve_series_tol(series_tol)
    N, p = grid.N, grid.p
    l = np.arange(N)
    first_row = np.exp(p * (np.exp(2j * np.pi * l / N) - 1.0))
    return CirculantOverlap(
        grid=grid,
        first_row=first_row,
        eigenvalues=folded_weight(p, N, tol),
        series_tol=tol,
    )


def apply_overlap_inverse(overlap: CirculantOverlap, v) -> np.ndarray:
    """Solve B c = v through the Fourier diagonalization."""
    if not isinstance(overlap, CirculantOverlap):
        raise ValueError("overlap must be a CirculantOverlap")
    return overlap.solve(v)


def rfm_orthogonality_defect(N, M) -> float:
    """Deviation of the rectangular root-of-unity matrix from mod-N
    orthogonality: max |sum_k conj(F_kn) F_km - delta_{(n-m) mod N, 0}|."""
    N = check_grid_size(N)
    M = check_order(M)
    F = fourier_matrix(N)
    cols = F[:, np.mod(np.arange(M + 1), N)]
    gram = cols.conj().T @ cols
    n = np.arange(M + 1)
    expected = (np.mod(np.subtract.outer(n, n), N) == 0).astype(float)
    return float(np.max(np.abs(gram - expected)))


def rfm_orthogonality_check(N, M, tol: float = 1e-12) -> bool:
    return rfm_orthogonality_defect(N, M) <= tol


def _check_grid_pair(grid) -> PhaseGrid:
    if not isinstance(grid, PhaseGrid):
        raise ValueError("grid must be a PhaseGrid")
    return grid


def overlap_from_points(grid: PhaseGrid) -> np.ndarray:
    """Dense Gram matrix built pairwise from cs_overlap; independent of the
    circulant closed form, used for cross-checks."""
    grid = _check_grid_pair(grid)
    zs = grid.points()
    out = np.empty((grid.N, grid.N), dtype=complex)
    for a in range(grid.N):
        for b in range(grid.N):
            out[a, b] = cs_overlap(zs[a], zs[b])
    return out

"""Brute-force dense linear-algebra reference implementations.

Everything here recomputes what the analytic modules produce in closed form,
using nothing but the explicit frame matrix T_{kn} = <z_k|n> and standard
dense solvers.  The production code is validated against these routes; they
are deliberately simple and size-capped rather than fast.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.special import gammaln

from ._validation import check_grid_size, check_mean_number, check_order
from .fock import FockVector, PhaseGrid, evaluate
from .spectral import (
    folded_weight,
    fourier_matrix,
    log_mode_weight,
    overlap_from_points,
)

__all__ = [
    "OracleSizeError",
    "DenseFrame",
    "dense_project",
    "dense_pseudoinverse_fit",
    "measured_error_sq",
    "quadrature_coefficient",
    "dense_eig_check",
]

_N_MAX_CAP = 2000
_EIG_N_CAP = 128


class OracleSizeError(ValueError):
    """Requested dense computation exceeds the oracle size caps."""


@dataclass
class DenseFrame:
    """Explicit N x (n_max+1) frame matrix T_{kn} = sqrt(lam_n/N) e^{-2 pi i k n/N}."""

    grid: PhaseGrid
    n_max: int
    T: np.ndarray

    @staticmethod
    def build(grid: PhaseGrid, n_max: int) -> "DenseFrame":
        if not isinstance(grid, PhaseGrid):
            raise ValueError("grid must be a PhaseGrid")
        n_max = check_order(n_max, "n_max")
        if n_max > _N_MAX_CAP:
            raise OracleSizeError(
                f"dense frame cap is n_max <= {_N_MAX_CAP}, got {n_max}"
            )
        N, p = grid.N, grid.p
        n = np.arange(n_max + 1)
        logu = 0.5 * (log_mode_weight(n, p, N) - math.log(N))
        k = np.arange(N)
        W = np.exp(-2j * np.pi * np.mod(np.outer(k, n), N) / N)
        return DenseFrame(grid=grid, n_max=n_max, T=W * np.exp(logu)[None, :])

    def gram(self) -> np.ndarray:
        """Overlap matrix built pairwise from cs_overlap, independent of the
        circulant closed form."""
        return overlap_from_points(self.grid)

    def coefficients_of(self, psi: FockVector) -> np.ndarray:
        if not isinstance(psi, FockVector):
            psi = FockVector(psi)
        if len(psi) > self.n_max + 1:
            raise OracleSizeError(
                f"state length {len(psi)} exceeds frame n_max + 1 = {self.n_max + 1}"
            )
        a = np.zeros(self.n_max + 1, dtype=complex)
        a[: len(psi)] = psi.coefficients
        return a

    def solve_gram(self, v: np.ndarray) -> np.ndarray:
        """B^{-1} v by Cholesky, falling back to eigenbasis division with
        eigenvalue clipping when the factorization breaks down."""
        B = self.gram()
        try:
            return cho_solve(cho_factor(B), v)
        except LinAlgError:
            vals, vecs = np.linalg.eigh(B)
            floor = np.max(vals) * 1e-18
            clipped = np.maximum(vals, floor)
            cond = float(np.max(vals) / floor)
            warnings.warn(
                f"Cholesky failed (condition ~{cond:.2e}); using clipped "
                "eigenbasis division",
                RuntimeWarning,
                stacklevel=2,
            )
            return vecs @ ((vecs.conj().T @ v) / clipped)


def dense_project(frame: DenseFrame, psi) -> np.ndarray:
    """Projection of psi onto the sample span: T* B^{-1} T a.

    Ground truth for alias_coefficients.
    """
    a = frame.coefficients_of(psi)
    v = frame.T @ a
    c = frame.solve_gram(v)
    return frame.T.conj().T @ c


def dense_pseudoinverse_fit(frame: DenseFrame, M: int, values) -> np.ndarray:
    """Least-squares coefficients over modes 0..M from sample values.

    Ground truth for the oversampled DFT recovery.
    """
    M = check_order(M, "M")
    if M > frame.n_max:
        raise OracleSizeError(f"M = {M} exceeds frame n_max = {frame.n_max}")
    values = np.asarray(values, dtype=complex)
    fit, *_ = np.linalg.lstsq(frame.T[:, : M + 1], values, rcond=None)
    return fit


def measured_error_sq(frame: DenseFrame, psi) -> float:
    """Squared relative projection distance 1 - <v, B^{-1} v>/||a||^2.

    Exact (up to the dense solve) even though the projection itself has an
    infinite coefficient tail; only the stored block of psi enters.
    """
    a = frame.coefficients_of(psi)
    norm_sq = float(np.vdot(a, a).real)
    if norm_sq == 0.0:
        raise ValueError("measured error undefined for the zero state")
    v = frame.T @ a
    c = frame.solve_gram(v)
    q = float(np.vdot(v, c).real)
    return max(0.0, 1.0 - q / norm_sq)


def quadrature_coefficient(psi: FockVector, n: int, p: float, Q: int) -> complex:
    """Trapezoid approximation of the circle Fourier integral for a_n:

        a_n ~ sqrt(n! / (p^n e^{-p})) * (1/Q) sum_q e^{i n theta_q} Psi(sqrt(p) e^{i theta_q}).

    Exact whenever no stored mode m != n satisfies (m - n) mod Q = 0; a
    warning is emitted when that aliasing condition is violated.
    """
    if not isinstance(psi, FockVector):
        psi = FockVector(psi)
    n = check_order(n, "n")
    Q = check_grid_size(Q)
    p = check_mean_number(p)
    aliased = [
        m for m in range(len(psi)) if m != n and (m - n) % Q == 0
    ]
    if aliased:
        warnings.warn(
            f"quadrature with Q = {Q} points aliases modes {aliased[:4]} onto "
            f"n = {n}; increase Q past the state order",
            RuntimeWarning,
            stacklevel=2,
        )
    theta = 2.0 * np.pi * np.arange(Q) / Q
    zq = math.sqrt(p) * np.exp(1j * theta)
    vals = evaluate(psi, zq)
    s = complex(np.mean(np.exp(1j * n * theta) * vals))
    if s == 0:
        return 0.0 + 0.0j
    log_pref = 0.5 * (gammaln(n + 1.0) - n * math.log(p) + p)
    return np.exp(log_pref + math.log(abs(s))) * (s / abs(s))


def dense_eig_check(grid: PhaseGrid, series_tol: float | None = None) -> float:
    """Max residual ||B f_j - lhat_j f_j||_inf over all Fourier columns f_j,
    with B built pairwise from cs_overlap and lhat_j from the series."""
    if not isinstance(grid, PhaseGrid):
        raise ValueError("grid must be a PhaseGrid")
    if grid.N > _EIG_N_CAP:
        raise OracleSizeError(f"dense eigencheck cap is N <= {_EIG_N_CAP}, got {grid.N}")
    B = overlap_from_points(grid)
    F = fourier_matrix(grid.N)
    lhat = folded_weight(grid.p, grid.N, series_tol)
    resid = B @ F - F * lhat[None, :]
    return float(np.max(np.abs(resid)))


def intertwining_defect(frame: DenseFrame, series_tol: float | None = None) -> float:
    """Max |B T - T diag(lhat_{n mod N})|.

    Frame columns are sliced Fourier eigenvectors of the overlap matrix, so
    the pairwise-built B must scale column n by the series-built folded
    weight of its residue class; any excess is numerical noise.
    """
    lhat = folded_weight(frame.grid.p, frame.grid.N, series_tol)
    j = np.mod(np.arange(frame.n_max + 1), frame.grid.N)
    lhs = frame.gram() @ frame.T
    rhs = frame.T * lhat[j][None, :]
    return float(np.max(np.abs(lhs - rhs)))

"""Exact reconstruction from oversampled phase circles (N > M).

For states supported on modes 0..M with N > M samples, the wave function is
recovered exactly by the discrete sinc-type kernel

    Xi_k(z) = (1/N) e^{(p - |z|^2)/2} sum_{m=0}^{M} w^m,   w = conj(z) z_k / p,

and the coefficients by a filtered DFT of the samples,

    a_m = (1/sqrt(N lam_m)) sum_k e^{2 pi i k m / N} Psi(z_k).

Both operations follow the sklearn estimator conventions: hyperparameters in
__init__, data work in fit/transform/predict.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ._validation import as_complex_vector, check_fitted, check_order
from .fock import FockVector, PhaseGrid, SampleSet, evaluate
from .spectral import log_mode_weight, resolve_series_tol

__all__ = ["ExactReconstructor"]


def _geometric_sum(w: np.ndarray, M: int) -> np.ndarray:
    """sum_{m=0}^{M} w^m with the removable singularity at w = 1 handled by
    direct summation."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.empty(w.shape, dtype=complex)
    near = np.abs(w - 1.0) < 1e-8
    if np.any(~near):
        wf = w[~near]
        out[~near] = (wf ** (M + 1) - 1.0) / (wf - 1.0)
    if np.any(near):
        wn = w[near]
        powers = wn[:, None] ** np.arange(M + 1)[None, :]
        out[near] = powers.sum(axis=1)
    return out


def _scaled_exp(log_prefactor: float, values: np.ndarray) -> np.ndarray:
    """values * exp(log_prefactor), combined in log space so that a large
    prefactor and a small sum (or vice versa) do not overflow on the way."""
    values = np.atleast_1d(values)
    out = np.zeros(values.shape, dtype=complex)
    nz = values != 0
    mag = np.abs(values[nz])
    out[nz] = np.exp(np.log(mag) + log_prefactor) * (values[nz] / mag)
    return out


class ExactReconstructor:
    """Recover a mode-limited state from N > M phase samples.

    Parameters
    ----------
    N : grid size (number of phase samples).
    p : squared circle radius / mean particle number.
    M : largest active mode; must satisfy M < N.
    series_tol : optional override for the spectral series tolerance.
    """

    def __init__(self, N=None, p=None, M=None, series_tol=None):
        self.N = N
        self.p = p
        self.M = M
        self.series_tol = series_tol
        self.coef_ = None
        self.samples_ = None

    # -- estimator plumbing -------------------------------------------------

    def get_params(self, deep: bool = True) -> dict:
        return {"N": self.N, "p": self.p, "M": self.M, "series_tol": self.series_tol}

    def set_params(self, **params) -> "ExactReconstructor":
        valid = self.get_params()
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for ExactReconstructor")
            setattr(self, key, value)
        self.coef_ = None
        self.samples_ = None
        return self

    def _context(self):
        grid = PhaseGrid(self.N, self.p)
        M = check_order(self.M, "M")
        if M >= grid.N:
            raise ValueError(
                f"exact mode needs strict oversampling: M = {M} must be < N = {grid.N}"
            )
        resolve_series_tol(self.series_tol)
        logw = log_mode_weight(np.arange(M + 1), grid.p, grid.N)
        return grid, M, logw

    def _coerce_samples(self, X) -> np.ndarray:
        grid, _, _ = self._context()
        if isinstance(X, SampleSet):
            if X.grid != grid:
                raise ValueError(
                    f"sample grid {X.grid} does not match reconstructor grid {grid}"
                )
            return X.values
        values = as_complex_vector(X, "samples")
        if len(values) != grid.N:
            raise ValueError(f"expected {grid.N} samples, got {len(values)}")
        return values

    # -- data interface -----------------------------------------------------

    def fit(self, X, y=None) -> "ExactReconstructor":
        """Store samples and recover the coefficient vector."""
        values = self._coerce_samples(X)
        self.samples_ = values
        self.coef_ = self.dft_coefficients(values).coefficients
        return self

    def transform(self, X) -> np.ndarray:
        """Coefficient rows for one sample vector or a stack of them."""
        arr = X.values if isinstance(X, SampleSet) else np.asarray(X, dtype=complex)
        if arr.ndim == 1:
            return self.dft_coefficients(arr).coefficients[None, :]
        if arr.ndim != 2:
            raise ValueError("expected a 1-d sample vector or a 2-d stack")
        return np.vstack([self.dft_coefficients(row).coefficients for row in arr])

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X).coef_[None, :]

    def predict(self, z):
        """Evaluate the fitted state's wave function at z (scalar or array)."""
        check_fitted(self, "coef_")
        return evaluate(FockVector(self.coef_), z)

    # -- reconstruction contract ---------------------------------------------

    def state(self) -> FockVector:
        check_fitted(self, "coef_")
        return FockVector(self.coef_)

    def sinc_kernel(self, k: int, z):
        """Kernel Xi_k(z); Xi_k(z_l) = delta_kl at critical sampling N = M+1."""
        grid, M, _ = self._context()
        k = int(k) % grid.N
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        zk = grid.point(k)
        w = zs.conjugate() * zk / grid.p
        geom = _geometric_sum(w, M)
        out = np.empty(zs.shape, dtype=complex)
        for idx in range(zs.size):
            pref = 0.5 * (grid.p - abs(zs.flat[idx]) ** 2) - math.log(grid.N)
            out.flat[idx] = _scaled_exp(pref, geom.flat[idx])[0]
        if np.ndim(z) == 0:
            return complex(out[0])
        return out

    def reconstruct(self, X, z):
        """Kernel-route reconstruction sum_k Xi_k(z) Psi_k.

        Mathematically identical to evaluating the recovered coefficients,
        but computed directly from the samples.
        """
        values = self._coerce_samples(X)
        grid, M, _ = self._context()
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        zk = grid.points()
        out = np.empty(zs.shape, dtype=complex)
        for idx in range(zs.size):
            zz = complex(zs.flat[idx])
            w = zz.conjugate() * zk / grid.p
            s = np.dot(_geometric_sum(w, M), values)
            pref = 0.5 * (grid.p - abs(zz) ** 2) - math.log(grid.N)
            out.flat[idx] = _scaled_exp(pref, np.asarray(s))[0]
        if np.ndim(z) == 0:
            return complex(out[0])
        return out

    def dft_coefficients(self, X) -> FockVector:
        """Coefficients a_m = (N lam_m)^{-1/2} sum_k e^{2 pi i k m / N} Psi_k."""
        values = self._coerce_samples(X)
        grid, M, logw = self._context()
        N = grid.N
        if np.any(logw < math.log(1e-300) + math.log(N)):
            warnings.warn(
                "mode weights below 1e-300*N: recovered top coefficients are "
                "dominated by double-precision sample rounding",
                RuntimeWarning,
                stacklevel=2,
            )
        m = np.arange(M + 1)
        k = np.arange(N)
        E = np.exp(2j * np.pi * np.mod(np.outer(m, k), N) / N)
        S = E @ values
        out = np.zeros(M + 1, dtype=complex)
        nz = S != 0
        if np.any(nz):
            lognorm = -0.5 * (math.log(N) + logw[nz])
            mag = np.abs(S[nz])
            out[nz] = np.exp(np.log(mag) + lognorm) * (S[nz] / mag)
        return FockVector(out)

    def range_projector(self) -> np.ndarray:
        """N x N matrix P_{lk} = Xi_k(z_l) = (1/N) sum_{m<=M} e^{2 pi i (k-l) m/N}.

        Orthogonal projector onto the sample vectors reachable from modes
        0..M; rank and trace equal M+1.
        """
        grid, M, _ = self._context()
        N = grid.N
        V = np.exp(2j * np.pi * np.mod(np.outer(np.arange(M + 1), np.arange(N)), N) / N)
        return V.conj().T @ V / N

    def resample(self) -> np.ndarray:
        """Values of the fitted state on the grid (identity when fitted from
        consistent samples)."""
        check_fitted(self, "samples_")
        return self.range_projector() @ self.samples_

"""scikit-learn style wrappers around the spectral solvers.

``fit`` takes the level sequence (or the zero ordinates) and stores fitted
attributes with a trailing underscore; ``transform`` evaluates the
corresponding counting function on an energy grid.
"""
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exact_spectrum import counting_function, solve_spectrum_dense, solve_spectrum_exact
from .levels import LevelSequence, ModelCouplings
from .riemann import CountingParams, deviation_report, n_I_zeta_regularized, smooth_count


def _energies(E):
    E = np.asarray(E, dtype=float)
    return E.ravel() if E.ndim > 1 else np.atleast_1d(E)


class InverseModelSpectrum(BaseEstimator, TransformerMixin):
    """Spectrum of the inverse model for a given level sequence.

    Parameters
    ----------
    g, h : float
        Couplings; ``hbar = 1/h``.
    method : {'exact', 'dense'}
        Counting-equation roots or dense diagonalization.
    n_jobs : int
        Threads for the exact root solver.
    """

    def __init__(self, g=0.0, h=1.0, method="exact", n_jobs=1):
        self.g = g
        self.h = h
        self.method = method
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        """``X``: a :class:`LevelSequence` or a 1-d array of positive levels."""
        lv = X if isinstance(X, LevelSequence) else LevelSequence.explicit(np.ravel(X))
        c = ModelCouplings(g=self.g, h=self.h)
        if self.method == "exact":
            res = solve_spectrum_exact(lv, c, n_jobs=self.n_jobs)
        elif self.method == "dense":
            res = solve_spectrum_dense(lv, c)
        else:
            raise ValueError(f"method must be 'exact' or 'dense', got {self.method!r}")
        self.levels_ = lv
        self.alpha_ = c.alpha
        self.result_ = res
        self.energies_ = res.energies_bk
        self.n_features_in_ = lv.n
        return self

    def transform(self, X):
        """Counting function ``N_I`` at the energies ``X``."""
        check_is_fitted(self, "energies_")
        return counting_function(_energies(X), self.levels_, self.alpha_, 1.0 / self.h)

    def predict(self, X):
        """Number of eigenvalues ``<= E`` for each energy in ``X``."""
        check_is_fitted(self, "energies_")
        return np.searchsorted(self.energies_, _energies(X), side="right")


class ZeroCountingModel(BaseEstimator, TransformerMixin):
    """Smooth zero count compared against a table of zero ordinates.

    ``variant='smooth'`` uses the Gamma-function smooth count directly;
    ``variant='zeta'`` builds it from the zeta-regularized uniform-level
    count ``n^_I + 1/2`` with the given ``a``, ``alpha`` and ``mu``.
    """

    def __init__(self, variant="smooth", a=-0.75, alpha=math.pi / 2, mu=1.0 / math.pi):
        self.variant = variant
        self.a = a
        self.alpha = alpha
        self.mu = mu

    def _count(self, E):
        if self.variant == "smooth":
            return smooth_count(E)
        if self.variant == "zeta":
            return n_I_zeta_regularized(E, CountingParams(self.a, 0.0, self.alpha, self.mu)) + 0.5
        raise ValueError(f"variant must be 'smooth' or 'zeta', got {self.variant!r}")

    def fit(self, X, y=None):
        """``X``: ascending zero ordinates (array or :class:`ZeroTable`)."""
        rep = deviation_report(X, self._count)
        self.report_ = rep
        self.deviation_ = rep.deviation
        self.mean_ = rep.mean
        self.rms_ = rep.rms
        return self

    def transform(self, X):
        check_is_fitted(self, "report_")
        return np.asarray(self._count(_energies(X)), dtype=float)

    def score(self, X, y=None):
        """Negative rms of ``n - N_sm(E_n) - 1/2`` on ``X``."""
        return -deviation_report(X, self._count).rms

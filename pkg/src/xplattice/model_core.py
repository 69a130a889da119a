"""Dense Hermitian matrices of the inverse, Russian-doll and lattice xp models.

Every builder fills the strict upper triangle and mirrors it by complex
conjugation, so ``M[n, m] == conj(M[m, n])`` holds bit for bit. Returned
arrays are read-only.
"""
import numpy as np

from ._validation import check_hermitian, check_scalar, frozen
from .exceptions import SingularMatrixError
from .levels import LevelSequence

#: reject ``H_I`` for inversion below this reciprocal condition number
RCOND_MIN = 1e-13


def _mirror(upper, diag):
    """Hermitian matrix from a strict upper triangle and a real diagonal."""
    N = diag.size
    iu = np.triu_indices(N, 1)
    M = np.zeros((N, N), dtype=complex)
    M[iu] = upper[iu]
    M[(iu[1], iu[0])] = np.conj(upper[iu])
    M[np.diag_indices(N)] = diag
    return frozen(M)


def _as_levels(levels):
    if isinstance(levels, LevelSequence):
        return levels
    return LevelSequence.explicit(levels)


def sign_matrix(N):
    """``sign(n - m)`` for ``n, m = 1..N`` with ``sign(0) = 0``."""
    idx = np.arange(N)
    return np.sign(idx[:, None] - idx[None, :])


def _coupling_matrix(g_vector, variant):
    gv = np.asarray(g_vector, dtype=float)
    idx = np.arange(gv.size)
    if variant == "plus":
        p = np.maximum(idx[:, None], idx[None, :])
    elif variant == "minus":
        p = np.minimum(idx[:, None], idx[None, :])
    else:
        raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")
    return gv[p]


def build_inverse_model(levels, couplings):
    """Inverse-model Hamiltonian ``H_I``.

    ``H_I[n, m] = 1/2 f_n (g + i h sign(n - m)) f_m`` with ``f_n = eps_n^(-1/2)``.

    Parameters
    ----------
    levels : LevelSequence or sequence of float
        Positive levels ``eps_n``.
    couplings : ModelCouplings

    Returns
    -------
    ndarray of shape (N, N), complex, read-only
    """
    lv = _as_levels(levels)
    g = np.full((lv.n, lv.n), couplings.g)
    return _inverse_from_g(lv, g, couplings.h)


def _inverse_from_g(lv, gmat, h):
    f = lv.f
    ff = np.outer(f, f)
    # n < m in the upper triangle, so sign(n - m) = -1
    upper = 0.5 * ff * (gmat - 1j * h)
    return _mirror(upper, 0.5 * np.diag(gmat) * f * f)


def build_rd(levels, couplings):
    """Russian-doll Hamiltonian ``eps_n delta_nm - 1/2 (g + i h sign(n - m))``."""
    lv = _as_levels(levels)
    g = np.full((lv.n, lv.n), couplings.g)
    return _rd_from_g(lv, g, couplings.h)


def _rd_from_g(lv, gmat, h):
    upper = -0.5 * (gmat - 1j * h)
    return _mirror(upper, lv.levels - 0.5 * np.diag(gmat))


def build_ipm(levels, couplings, variant="plus", family="inverse"):
    """I+/- (``family='inverse'``) or RD+/- (``family='rd'``) Hamiltonian.

    The scalar ``g`` is replaced by ``g_vector[p - 1]`` with ``p = max(n, m)``
    for ``variant='plus'`` and ``p = min(n, m)`` for ``variant='minus'``. On
    the diagonal ``p = n``.
    """
    lv = _as_levels(levels)
    if couplings.g_vector is None:
        raise ValueError("build_ipm needs couplings.g_vector")
    if len(couplings.g_vector) != lv.n:
        raise ValueError(
            f"g_vector has length {len(couplings.g_vector)}, expected {lv.n}")
    gmat = _coupling_matrix(couplings.g_vector, variant)
    if family == "inverse":
        return _inverse_from_g(lv, gmat, couplings.h)
    if family == "rd":
        return _rd_from_g(lv, gmat, couplings.h)
    raise ValueError(f"family must be 'inverse' or 'rd', got {family!r}")


def build_lattice_xp_operators(N, hbar=1.0, require_p=False):
    """Lattice position ``X``, inverse momentum ``P^-1`` and momentum ``P``.

    ``P`` is returned only for even ``N`` (``P^-1`` is singular otherwise);
    for odd ``N`` the third item is ``None`` unless ``require_p`` is set, in
    which case :class:`SingularMatrixError` is raised.
    """
    check_scalar(N, "N", min_val=1, integer=True)
    check_scalar(hbar, "hbar", min_val=0, include_min=False)
    n = np.arange(1, N + 1)
    X = frozen(np.diag(n.astype(complex)))
    s = sign_matrix(N)
    P_inv = _mirror(0.5j / hbar * s, np.zeros(N))
    if N % 2:
        if require_p:
            raise SingularMatrixError(
                f"P^-1 is singular for odd N (N={N}); P does not exist")
        return X, P_inv, None
    parity = np.where((n[:, None] + n[None, :]) % 2 == 0, 1.0, -1.0)
    P = _mirror(-2j * hbar * parity * s, np.zeros(N))
    return X, P_inv, P


def build_bk_regularized(levels, couplings):
    """Regularized xp Hamiltonian, the matrix inverse of ``H_I``.

    Raises
    ------
    SingularMatrixError
        When the reciprocal condition number of ``H_I`` is below
        :data:`RCOND_MIN`; the estimated condition number is attached.
    """
    H = build_inverse_model(levels, couplings)
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or 1.0 / cond < RCOND_MIN:
        raise SingularMatrixError(
            f"H_I is numerically singular (condition number {cond:.3e})",
            condition=cond)
    inv = np.linalg.inv(H)
    return _mirror(inv, np.real(np.diag(inv)))


def bk_from_momentum(levels, hbar=1.0):
    """``v(X)^1/2 P v(X)^1/2`` with ``v_n = eps_n``; even ``N`` only."""
    lv = _as_levels(levels)
    _, _, P = build_lattice_xp_operators(lv.n, hbar, require_p=True)
    sv = np.sqrt(lv.levels)
    return _mirror(sv[:, None] * P * sv[None, :], np.zeros(lv.n))


def commutator(N, hbar=1.0):
    """``[X, P] / i`` as a real symmetric matrix (even ``N``)."""
    X, _, P = build_lattice_xp_operators(N, hbar, require_p=True)
    C = (X @ P - P @ X) / 1j
    return frozen(np.real(check_hermitian(C)).copy())


def commutator_spectrum(N, hbar=1.0):
    """Ascending eigenvalues of ``[X, P] / i``; they sum to zero."""
    return np.linalg.eigvalsh(commutator(N, hbar))

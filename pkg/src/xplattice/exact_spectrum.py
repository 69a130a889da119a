"""Exact spectrum of the inverse model from its counting function.

The eigenvalues ``E_I`` of ``H_I`` and the energies ``E = 1/E_I`` of the
regularized xp Hamiltonian are the solutions of

    N_I(E) = (1/pi) sum_n arctan(E / (2 hbar eps_n)) - alpha/pi  in  Z,

with ``hbar = 1/h`` and ``alpha = atan2(h, g)``. ``N_I`` is strictly
increasing, so every admissible integer label ``k`` has exactly one root.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from ._validation import check_hermitian, check_scalar, frozen
from .exceptions import NumericalError, SingularMatrixError
from .levels import ModelCouplings
from .model_core import RCOND_MIN, _as_levels, build_inverse_model, build_rd

_MAX_ITER = 200


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Sorted spectrum with its provenance.

    ``energies_bk`` are the xp energies ``E`` (ascending) and
    ``energies_inverse`` the matching ``1/E``. ``labels`` are the integer
    values of the counting function (``None`` for dense results) and
    ``unbounded`` counts roots at ``E = +-inf`` that were flagged, not
    returned.
    """

    energies_bk: np.ndarray
    energies_inverse: np.ndarray
    method: str
    residuals: np.ndarray = None
    labels: np.ndarray = None
    unbounded: int = 0

    def __len__(self):
        return len(self.energies_bk)


def counting_function(E, levels, alpha, hbar=1.0):
    """``(1/pi) sum_n arctan(E / (2 hbar eps_n)) - alpha/pi``.

    ``E`` may be a scalar or an array; the result has the same shape.
    """
    eps = _as_levels(levels).levels
    E = np.asarray(E, dtype=float)
    flat = E.ravel()
    out = np.empty(flat.shape)
    for i, e in enumerate(flat):
        out[i] = np.arctan(e / (2.0 * hbar * eps)).sum()
    out = out / math.pi - alpha / math.pi
    return out.reshape(E.shape) if E.ndim else float(out[0])


def counting_range(N, alpha):
    """Open interval ``(-N/2 - alpha/pi, N/2 - alpha/pi)`` covered by ``N_I``."""
    return -N / 2 - alpha / math.pi, N / 2 - alpha / math.pi


def admissible_labels(N, alpha):
    """Integer labels strictly inside :func:`counting_range` and the number
    of roots at infinity.

    The range has length ``N``, so either both endpoints are integers or
    neither is; ``E = +inf`` and ``E = -inf`` are the same root
    (``E_I = 0``), counted once.
    """
    lo, hi = counting_range(N, alpha)
    tol = 1e-12 * max(1.0, N)
    k_lo = math.ceil(lo - tol)
    k_hi = math.floor(hi + tol)
    labels = []
    edge = 0
    for k in range(k_lo, k_hi + 1):
        if k - lo <= tol or hi - k <= tol:
            edge += 1
        else:
            labels.append(k)
    return labels, min(edge, 1)


def _monotone_newton(F, dF, target, x0=0.0):
    # F increasing and concave on x >= 0 with F(x0) <= target: Newton
    # iterates approach the root monotonically from below.
    x = x0
    for _ in range(_MAX_ITER):
        step = (target - F(x)) / dF(x)
        if not np.isfinite(step):
            break
        if step <= 0 or step <= 4e-16 * x:
            return x
        x += step
    raise NumericalError(f"root of the counting equation did not converge (target {target!r})")


def _arctan_root(eps, t, comp):
    """``u >= 0`` with ``sum arctan(u / 2 eps) = t``; ``comp = N pi/2 - t``.

    Small targets are solved in ``u``; near saturation the equivalent
    ``sum arctan(2 eps w) = comp`` is solved in ``w = 1/u``.
    """
    if t == 0:
        return 0.0
    two_eps = 2.0 * eps
    if t <= comp:
        F = lambda u: np.arctan(u / two_eps).sum()
        dF = lambda u: (two_eps / (two_eps ** 2 + u * u)).sum()
        return _monotone_newton(F, dF, t)
    F = lambda w: np.arctan(two_eps * w).sum()
    dF = lambda w: (two_eps / (1.0 + (two_eps * w) ** 2)).sum()
    w = _monotone_newton(F, dF, comp)
    return 1.0 / w


def exact_root(levels, couplings, k):
    """xp energy ``E`` with ``N_I(E) = k`` for one admissible label ``k``.

    Raises
    ------
    NumericalError
        If ``k`` labels a root at infinity ("unbounded eigenvalue").
    ValueError
        If ``k`` lies outside the range of the counting function.
    """
    lv = _as_levels(levels)
    h = couplings.h
    if h == 0:
        raise ValueError("exact_root needs h != 0")
    N = lv.n
    alpha = couplings.alpha
    T = math.pi * k + alpha
    half = N * math.pi / 2
    if abs(abs(T) - half) <= 1e-14 * half:
        raise NumericalError(f"unbounded eigenvalue: label {k} has its root at infinity")
    if not -half < T < half:
        lo, hi = counting_range(N, alpha)
        raise ValueError(f"label {k} outside the counting range ({lo:g}, {hi:g})")
    if T >= 0:
        t, comp = T, math.pi * (N / 2 - k) - alpha
    else:
        t, comp = -T, math.pi * (N / 2 + k) + alpha
    if comp <= 1e-14 * half:
        raise NumericalError(f"unbounded eigenvalue: label {k} has its root at infinity")
    u = _arctan_root(lv.levels, t, comp)
    return math.copysign(u, T) / h


def solve_spectrum_exact(levels, couplings, n_jobs=1):
    """All finite roots of the counting equation, as a :class:`SpectrumResult`.

    For even ``N`` there are exactly ``N`` finite roots; for odd ``N`` a label
    sitting on the edge of the counting range is flagged in ``unbounded``.
    Roots are independent and are solved on ``n_jobs`` threads; the output
    order depends only on the labels.
    """
    lv = _as_levels(levels)
    N = lv.n
    h = couplings.h
    if h == 0:
        if couplings.g == 0:
            raise ValueError("g = h = 0: the inverse model vanishes identically")
        # rank-one H_I: one finite root, the rest at infinity
        E = 2.0 / (couplings.g * np.sum(1.0 / lv.levels))
        return SpectrumResult(frozen(np.array([E])), frozen(np.array([1.0 / E])),
                              "closed-form-roots", frozen(np.zeros(1)),
                              frozen(np.array([0])), N - 1)
    alpha = couplings.alpha
    labels, edge = admissible_labels(N, alpha)
    solve = lambda k: exact_root(lv, couplings, k)
    if n_jobs and n_jobs > 1 and len(labels) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            roots = list(ex.map(solve, labels))
    else:
        roots = [solve(k) for k in labels]
    E = np.array(roots)
    lab = np.array(labels)
    order = np.argsort(E, kind="stable")
    E, lab = E[order], lab[order]
    resid = np.abs(counting_function(E, lv, alpha, 1.0 / h) - lab)
    return SpectrumResult(frozen(E), frozen(1.0 / E), "closed-form-roots",
                          frozen(resid), frozen(lab), edge)


def product_form_mismatch(E, levels, couplings):
    """``|(g + ih)/(g - ih) - prod_n (eps_n + i h E/2)/(eps_n - i h E/2)|``."""
    eps = _as_levels(levels).levels
    g, h = couplings.g, couplings.h
    z = eps + 0.5j * h * E
    rhs = np.prod(z / np.conj(z))
    return abs((g + 1j * h) / (g - 1j * h) - rhs)


def p_spectrum_closed_form(N, n_index, hbar=1.0):
    """Eigenvalue ``2 hbar tan(pi (n + 1/2) / N)`` of the lattice momentum,
    for ``-N/2 <= n < N/2``."""
    check_scalar(N, "N", min_val=1, integer=True)
    check_scalar(n_index, "n_index", integer=True)
    if not -N / 2 <= n_index < N / 2:
        raise ValueError(f"n_index must satisfy -N/2 <= n < N/2, got {n_index} for N={N}")
    return 2.0 * hbar * math.tan(math.pi * (n_index + 0.5) / N)


def dense_hermitian_eigen(M, return_vectors=False):
    """Ascending eigenvalues (and optionally eigenvectors) of a Hermitian matrix.

    Backed by LAPACK through :func:`numpy.linalg.eigh`.

    Raises
    ------
    ValueError
        If ``M`` is not Hermitian.
    """
    M = check_hermitian(M)
    if return_vectors:
        w, V = np.linalg.eigh(M)
        return w, V
    return np.linalg.eigvalsh(M)


def backward_errors(M, w, V):
    """``||M v_j - w_j v_j|| / ||M||_2`` for every eigenpair."""
    R = M @ V - V * w[None, :]
    return np.linalg.norm(R, axis=0) / max(np.linalg.norm(M, 2), 1e-300)


def solve_spectrum_dense(levels, couplings):
    """Spectrum of ``H_I`` by dense diagonalization, as a :class:`SpectrumResult`.

    Raises
    ------
    SingularMatrixError
        When an eigenvalue of ``H_I`` is zero relative to the largest one
        (below :data:`~xplattice.model_core.RCOND_MIN`), i.e. a root at
        infinity.
    """
    H = build_inverse_model(levels, couplings)
    w = dense_hermitian_eigen(H)
    wmax = np.max(np.abs(w))
    if np.min(np.abs(w)) <= RCOND_MIN * wmax:
        raise SingularMatrixError("H_I has a zero eigenvalue (a root at infinity)",
                                  condition=wmax / max(np.min(np.abs(w)), 1e-300))
    E = 1.0 / w
    order = np.argsort(E, kind="stable")
    return SpectrumResult(frozen(E[order]), frozen(w[order]), "dense-diagonalization")


def rd_zero_mode(levels, E, couplings):
    """Zero-energy RD state for the xp energy ``E``.

    Returns ``(H_RD, phi)`` where the RD couplings are ``g_D = g E`` and
    ``h_D = h E`` and ``phi`` comes from the two-term recursion
    ``phi_(n+1)/phi_n = (eps_n + i h_D/2)/(eps_(n+1) - i h_D/2)`` started at
    ``phi_1 = 1``.
    """
    if E == 0:
        raise ValueError("E must be nonzero")
    lv = _as_levels(levels)
    eps = lv.levels
    hD = couplings.h * E
    rd = ModelCouplings(g=couplings.g * E, h=hD, hbar=couplings.hbar)
    H = build_rd(lv, rd)
    ratios = (eps[:-1] + 0.5j * hD) / (eps[1:] - 0.5j * hD)
    phi = np.concatenate([[1.0 + 0j], np.cumprod(ratios)])
    return H, phi


def rd_zero_mode_check(levels, E, couplings):
    """``||H_RD phi|| / ||phi||`` for :func:`rd_zero_mode`; near zero iff
    ``E`` solves the exact spectral equation."""
    H, phi = rd_zero_mode(levels, E, couplings)
    return float(np.linalg.norm(H @ phi) / np.linalg.norm(phi))

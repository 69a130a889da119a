"""The I+/- and RD+/- models with a level-dependent coupling.

Continuum: the zero-energy RD state becomes, after the gauge
``chi~ = exp(-i h q / 2) chi``, a Schroedinger problem

    -chi~'' + V(q) chi~ = (h^2 / 4) chi~,   V_+/- = +/- g'(q) / 2,

on ``[0, L]`` whose allowed ``h > 0`` are found here by shooting. Discrete:
the finite matrices are diagonalized directly.
"""
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, interpolate, optimize

from ._validation import frozen
from .exact_spectrum import SpectrumResult, dense_hermitian_eigen
from .exceptions import NumericalError, SingularMatrixError
from .model_core import RCOND_MIN, build_ipm

FD_STEP = 1e-3
ODE_RTOL = 1e-12
ODE_ATOL = 1e-13


@dataclass(frozen=True, eq=False)
class CouplingProfile:
    """Coupling ``g(q)`` on ``[0, L]``.

    ``breakpoints`` are interior points where ``g`` has a kink or a jump;
    ``jumps`` holds ``g(q+) - g(q-)`` at each of them (zero for kinks). The
    shooting integrator restarts at every breakpoint.
    """

    g_fn: object
    L: float
    dg_fn: object = None
    breakpoints: tuple = ()
    jumps: tuple = ()
    kind: str = "closed"

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if len(self.jumps) != len(self.breakpoints):
            raise ValueError("need one jump per breakpoint")
        if any(not 0 < b < self.L for b in self.breakpoints):
            raise ValueError("breakpoints must lie inside (0, L)")

    @classmethod
    def closed_form(cls, g, L, dg=None):
        """Profile from a callable; without ``dg`` the derivative is a
        central difference with step :data:`FD_STEP`."""
        return cls(g, float(L), dg)

    @classmethod
    def constant(cls, value, L):
        v = float(value)
        return cls(lambda q: v, float(L), lambda q: 0.0, kind="constant")

    @classmethod
    def from_samples(cls, q, g, kind="cubic"):
        """Interpolated profile on ``[q[0], q[-1]]`` shifted to start at 0.

        ``kind='cubic'`` (natural spline), ``'linear'`` (kinks at the
        samples) or ``'step'`` (``g = g_i`` on ``[q_i, q_(i+1))``; the jumps
        act as delta potentials).
        """
        q = np.asarray(q, dtype=float)
        g = np.asarray(g, dtype=float)
        if q.ndim != 1 or q.shape != g.shape or q.size < 2:
            raise ValueError("q and g must be 1-d arrays of equal length >= 2")
        if not np.all(np.diff(q) > 0):
            bad = int(np.flatnonzero(np.diff(q) <= 0)[0]) + 1
            raise ValueError(f"sample grid not strictly increasing at index {bad}")
        q = q - q[0]
        L = float(q[-1])
        if kind == "cubic":
            sp = interpolate.CubicSpline(q, g, bc_type="natural")
            d = sp.derivative()
            return cls(lambda x: float(sp(x)), L, lambda x: float(d(x)), kind=kind)
        if kind == "linear":
            slopes = np.diff(g) / np.diff(q)

            def dg(x):
                j = min(max(np.searchsorted(q, x, side="right") - 1, 0), q.size - 2)
                return float(slopes[j])
            return cls(lambda x: float(np.interp(x, q, g)), L, dg,
                       tuple(q[1:-1]), (0.0,) * (q.size - 2), kind)
        if kind == "step":
            def gs(x):
                j = min(max(np.searchsorted(q, x, side="right") - 1, 0), q.size - 2)
                return float(g[j])
            return cls(gs, L, lambda x: 0.0, tuple(q[1:-1]),
                       tuple(np.diff(g[:-1])), kind)
        raise ValueError(f"unknown interpolation kind {kind!r}")

    @classmethod
    def from_csv(cls, path, kind="cubic"):
        """Read ``q,g`` rows (header optional, ``#`` comments allowed)."""
        qs, gs = [], []
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    qv, gv = float(row[0]), float(row[1])
                except (ValueError, IndexError):
                    if not qs and lineno == 1:
                        continue  # header
                    raise ValueError(f"{path}:{lineno}: expected two numbers 'q,g'") from None
                qs.append(qv)
                gs.append(gv)
        return cls.from_samples(qs, gs, kind)

    def g(self, q):
        return float(self.g_fn(q))

    def dg(self, q):
        if self.dg_fn is not None:
            return float(self.dg_fn(q))
        return (self.g_fn(q + FD_STEP) - self.g_fn(q - FD_STEP)) / (2 * FD_STEP)


def effective_potential(profile, variant="plus"):
    """``V_+/-(q) = +/- g'(q) / 2`` as a callable (regular part only; step
    jumps enter the shooting as delta potentials)."""
    sgn = _variant_sign(variant)
    return lambda q: sgn * 0.5 * profile.dg(q)


def _variant_sign(variant):
    if variant == "plus":
        return 1.0
    if variant == "minus":
        return -1.0
    raise ValueError(f"variant must be 'plus' or 'minus', got {variant!r}")


def _segments(profile):
    edges = [0.0, *profile.breakpoints, profile.L]
    return list(zip(edges[:-1], edges[1:])), list(profile.jumps)


def _shoot(profile, hD, variant, gauge, dense=False):
    """Integrate from ``q = 0`` and return ``(y(L), solutions)``."""
    sgn = _variant_sign(variant)
    k2 = 0.25 * hD * hD
    if gauge == "tilde":
        rhs = lambda q, y: [y[1], (sgn * 0.5 * profile.dg(q) - k2) * y[0]]
        if variant == "plus":
            y = np.array([0.0, 1.0])
        else:
            y = np.array([1.0, -0.5 * profile.g(0.0)])
    elif gauge == "raw":
        rhs = lambda q, y: [y[1], 1j * hD * y[1] + sgn * 0.5 * profile.dg(q) * y[0]]
        if variant == "plus":
            y = np.array([0.0, 1.0], dtype=complex)
        else:
            y = np.array([1.0, 0.5 * (1j * hD - profile.g(0.0))], dtype=complex)
    else:
        raise ValueError(f"gauge must be 'tilde' or 'raw', got {gauge!r}")
    segs, jumps = _segments(profile)
    sols = []
    for i, (a, b) in enumerate(segs):
        sol = integrate.solve_ivp(rhs, (a, b), y, method="DOP853", rtol=ODE_RTOL,
                                  atol=ODE_ATOL, dense_output=dense)
        if not sol.success:
            raise NumericalError(f"shooting integration failed: {sol.message}")
        sols.append(sol)
        y = sol.y[:, -1].copy()
        if i < len(jumps):
            y[1] += sgn * 0.5 * jumps[i] * y[0]
    return y, sols


def boundary_mismatch(profile, hD, variant="plus", gauge="tilde"):
    """Normalized boundary residual at ``q = L`` of the solution shot from
    ``q = 0``; a real function of ``hD`` whose zeros are the eigenvalues.

    For ``gauge='raw'`` the complex residual of the ungauged equation is
    rotated by ``exp(-i hD L / 2)``; its imaginary part is returned too.
    """
    y, _ = _shoot(profile, hD, variant, gauge)
    L = profile.L
    gL = profile.g(L)
    if gauge == "tilde":
        m = y[1] - 0.5 * gL * y[0] if variant == "plus" else y[0]
        return m / math.hypot(y[0], y[1]), 0.0
    m = y[1] - 0.5 * (gL + 1j * hD) * y[0] if variant == "plus" else y[0]
    m = m * np.exp(-0.5j * hD * L) / np.linalg.norm(y)
    return float(m.real), float(m.imag)


@dataclass(frozen=True, eq=False)
class BVPResult:
    """Lowest eigenvalues ``h_D`` with residuals and node counts.

    ``complete`` is False when fewer than the requested number of roots lie
    in the search window.
    """

    values: np.ndarray
    residuals: np.ndarray
    nodes: np.ndarray
    requested: int
    window: tuple
    complete: bool

    def __len__(self):
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]

    @property
    def energies(self):
        """``E = h_D^2 / 4``."""
        return 0.25 * self.values ** 2


def count_nodes(profile, hD, variant="plus", samples=4000):
    """Sign changes of ``chi~`` strictly inside ``(0, L)``."""
    _, sols = _shoot(profile, hD, variant, "tilde", dense=True)
    vals = []
    for sol in sols:
        a, b = sol.t[0], sol.t[-1]
        n = max(8, int(samples * (b - a) / profile.L))
        vals.append(sol.sol(np.linspace(a, b, n))[0])
    x = np.concatenate(vals)
    tol = 1e-9 * np.max(np.abs(x))
    x = x[np.abs(x) > tol]
    # drop the ends where chi~ vanishes by the boundary conditions
    return int(np.count_nonzero(np.diff(np.sign(x)) != 0))


def bvp_eigenvalues(profile, variant="plus", count=3, gauge="tilde",
                    h_max=None, n_jobs=1):
    """Lowest ``count`` values ``h_D > 0`` of the continuum I+/- problem.

    Boundary conditions: ``chi~(0) = 0``, ``chi~'(L) = g(L) chi~(L) / 2``
    (plus); ``chi~'(0) = -g(0) chi~(0) / 2``, ``chi~(L) = 0`` (minus). The
    window ``(0, h_max]`` (default ``20 pi / L``) is pre-scanned with step
    ``pi / (4 L)`` and each sign change of the boundary mismatch is refined
    with Brent's method.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    L = profile.L
    h_max = 20 * math.pi / L if h_max is None else float(h_max)
    step = math.pi / (4 * L)
    grid = np.arange(1, int(math.floor(h_max / step)) + 1) * step
    if grid.size == 0 or grid[-1] < h_max:
        grid = np.append(grid, h_max)
    f = lambda x: boundary_mismatch(profile, x, variant, gauge)[0]
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            vals = np.array(list(ex.map(f, grid)))
    else:
        vals = np.array([f(x) for x in grid])
    roots = []
    for i in range(grid.size):
        if len(roots) == count:
            break
        if vals[i] == 0:
            roots.append(grid[i])
        elif i + 1 < grid.size and vals[i] * vals[i + 1] < 0:
            roots.append(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15))
    roots = np.array(roots)
    res = np.array([abs(f(r)) for r in roots])
    nodes = np.array([count_nodes(profile, r, variant) for r in roots], dtype=int)
    return BVPResult(frozen(roots), frozen(res), frozen(nodes), count,
                     (0.0, h_max), roots.size == count)


def constant_g_quantization_residual(hD, g, L):
    """``|exp(i hD L) - (g + i hD)/(g - i hD)|``."""
    return abs(np.exp(1j * hD * L) - (g + 1j * hD) / (g - 1j * hD))


def discrete_ipm_spectrum(levels, couplings, variant="plus", family="inverse"):
    """Dense spectrum of the I+/- (or RD+/-) matrix.

    For ``family='inverse'`` ``energies_inverse`` holds the eigenvalues and
    ``energies_bk`` their reciprocals sorted ascending; for ``family='rd'``
    ``energies_bk`` holds the RD eigenvalues themselves.
    """
    H = build_ipm(levels, couplings, variant, family)
    w = dense_hermitian_eigen(H)
    if family == "rd":
        return SpectrumResult(frozen(w), frozen(w), f"dense-{family}-{variant}")
    if np.min(np.abs(w)) <= RCOND_MIN * np.max(np.abs(w)):
        raise SingularMatrixError("I+/- matrix has a zero eigenvalue")
    E = 1.0 / w
    order = np.argsort(E, kind="stable")
    return SpectrumResult(frozen(E[order]), frozen(w[order]), f"dense-{family}-{variant}")

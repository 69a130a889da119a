"""Continuum limit of the inverse model and semiclassical state counts.

In the continuum the levels become a smooth ``eps(n)`` on ``[1, N]`` and the
model is a free particle in a box of length ``L_N = int_1^N dn / eps(n)``
with twisted boundary conditions ``exp(2 i alpha) = exp(i k L_N)``.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate

from .levels import LevelSequence
from .model_core import _as_levels

QUAD_EPSABS = 1e-10


def _quad(fn, a, b, points=None, limit=500):
    val, _ = integrate.quad(fn, a, b, epsabs=QUAD_EPSABS, epsrel=1e-12,
                            limit=limit, points=points)
    return val


def _linear_cell(e0, e1, t):
    """``int_0^t dx / (e0 + (e1 - e0) x)`` for ``0 <= t <= 1``."""
    de = e1 - e0
    small = np.abs(de) < 1e-12 * e0
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.log1p(de * t / e0) / de
    return np.where(small, t / e0 - 0.5 * de * t * t / e0 ** 2, exact)


def _q_function(lv):
    N = lv.n
    p = lv.params
    if lv.generator == "uniform":
        a = p["a"]
        return lambda n: np.log((np.asarray(n, dtype=float) + a) / (1.0 + a))
    if lv.generator == "constant":
        v = p["value"]
        return lambda n: (np.asarray(n, dtype=float) - 1.0) / v
    if lv.generator == "corrected":
        eps = lv.interpolant()

        def q(n):
            n = np.asarray(n, dtype=float)
            out = np.array([_quad(lambda t: math.exp(t) / float(eps(math.exp(t))),
                                  0.0, math.log(x)) for x in n.ravel()])
            return out.reshape(n.shape) if n.ndim else float(out[0])
        return q
    # piecewise-linear eps between integer nodes: exact cell integrals
    e = lv.levels
    if N == 1:
        return lambda n: np.zeros_like(np.asarray(n, dtype=float))
    cells = _linear_cell(e[:-1], e[1:], 1.0)
    cum = np.concatenate([[0.0], np.cumsum(cells)])

    def q(n):
        n = np.asarray(n, dtype=float)
        j = np.clip(np.floor(n).astype(int), 1, N - 1)
        out = cum[j - 1] + _linear_cell(e[j - 1], e[j], n - j)
        return out if out.ndim else float(out)
    return q


@dataclass(frozen=True, eq=False)
class BoxGeometry:
    """Box coordinate ``q(n) = int_1^n dn'/eps(n')`` and length ``L_N = q(N)``.

    The momentum grid is ``k = (2 pi / L_N)(j + alpha/pi)``, i.e.
    ``2 pi (j + 1/2) / L_N`` at ``alpha = pi/2``.
    """

    levels: LevelSequence
    q_of_n: object
    L_N: float
    alpha: float = math.pi / 2
    hbar: float = 1.0

    def q(self, n):
        return self.q_of_n(n)

    def s(self, n):
        """Scaling variable ``L_N - q(n)``."""
        return self.L_N - self.q_of_n(n)

    def momentum(self, j):
        return 2.0 * math.pi / self.L_N * (np.asarray(j) + self.alpha / math.pi)

    def on_grid(self, E, tol=1e-9):
        x = E / self.hbar * self.L_N / (2 * math.pi) - self.alpha / math.pi
        return abs(x - round(x)) < tol


def box_geometry(levels, alpha=math.pi / 2, hbar=1.0):
    lv = _as_levels(levels)
    q = _q_function(lv)
    return BoxGeometry(lv, q, float(q(float(lv.n))), alpha, hbar)


def continuum_wavefunction(n, E, levels, hbar=1.0, geometry=None):
    """``L_N^(-1/2) eps(n)^(-1/2) exp(i (E/hbar) q(n))`` for ``n`` in ``[1, N]``."""
    lv = _as_levels(levels)
    geo = geometry or box_geometry(lv, hbar=hbar)
    n = np.asarray(n, dtype=float)
    if np.any(n < 1) or np.any(n > lv.n):
        raise ValueError(f"n must lie in [1, {lv.n}]")
    A = geo.L_N ** -0.5
    psi = A / np.sqrt(lv.interpolant()(n)) * np.exp(1j * E / hbar * geo.q(n))
    return psi if psi.ndim else complex(psi)


def overlap(E1, E2, geometry):
    """``<psi_E1 | psi_E2> = int_1^N dn conj(psi_E1) psi_E2`` by adaptive
    quadrature in ``n``. Off-grid energies give a warning and the raw
    integral."""
    geo = geometry
    for E in (E1, E2):
        if not geo.on_grid(E):
            warnings.warn(f"energy {E!r} is not on the momentum grid", RuntimeWarning)
    lv = geo.levels
    eps = lv.interpolant()
    dk = (E2 - E1) / geo.hbar
    A2 = 1.0 / geo.L_N
    # split at every half period of the phase to keep quad well resolved
    nper = int(abs(dk) * geo.L_N / math.pi) + 1
    qs = np.linspace(0.0, geo.L_N, nper + 1)
    edges = _invert_q(geo, qs)
    re = im = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        re += _quad(lambda x: math.cos(dk * geo.q(x)) / eps(x), lo, hi)
        im += _quad(lambda x: math.sin(dk * geo.q(x)) / eps(x), lo, hi)
    return complex(A2 * re, A2 * im)


def _invert_q(geo, qs):
    N = float(geo.levels.n)
    out = []
    for target in qs:
        lo, hi = 1.0, N
        if target <= 0:
            out.append(1.0)
            continue
        if target >= geo.L_N:
            out.append(N)
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if geo.q(mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-13 * hi:
                break
        out.append(0.5 * (lo + hi))
    return np.array(out)


def overlap_closed_form(E1, E2, geometry):
    """Geometric-series value ``(exp(i dk L) - 1) / (i dk L)``."""
    dk = (E2 - E1) / geometry.hbar
    L = geometry.L_N
    if dk == 0:
        return 1.0 + 0j
    return (np.exp(1j * dk * L) - 1.0) / (1j * dk * L)


def continuum_spectrum(levels, alpha=math.pi / 2, hbar=1.0, labels=range(-5, 5),
                       geometry=None):
    """Continuum energies ``E_k = (2 pi hbar / L_N)(k + alpha/pi)`` for ``labels``."""
    geo = geometry or box_geometry(levels, alpha, hbar)
    k = np.asarray(list(labels), dtype=float)
    return 2.0 * math.pi * hbar / geo.L_N * (k + alpha / math.pi)


def semiclassical_count(E, mode="berry_keating", cutoff=None, velocity=None,
                        bisect_tol=1e-12):
    """Semiclassical number of states below ``E`` (``hbar = 1``).

    ``berry_keating``: ``E/2pi (log(E/2pi) - 1) + 7/8``.
    ``connes``: ``E/2pi log(cutoff^2) - E/2pi (log(E/2pi) - 1)``.
    ``generalized``: ``E/2pi int_(v^-1(E/cutoff))^cutoff dx/v(x) +
    cutoff/2pi v^-1(E/cutoff)`` for a positive increasing ``velocity``.
    """
    if E <= 0:
        raise ValueError("E must be positive")
    twopi = 2.0 * math.pi
    if mode == "berry_keating":
        return E / twopi * (math.log(E / twopi) - 1.0) + 7.0 / 8.0
    if cutoff is None or cutoff <= 0:
        raise ValueError(f"mode {mode!r} needs a positive cutoff")
    if mode == "connes":
        if not E / cutoff < cutoff:
            raise ValueError(f"inadmissible cutoff: E/cutoff = {E / cutoff:g} >= cutoff")
        return E / twopi * math.log(cutoff ** 2) - E / twopi * (math.log(E / twopi) - 1.0)
    if mode == "generalized":
        if velocity is None:
            raise ValueError("generalized mode needs a velocity profile")
        target = E / cutoff
        if not target < velocity(cutoff):
            raise ValueError("inadmissible cutoff: E/cutoff is outside the velocity range")
        x0 = inverse_velocity(velocity, target, cutoff, bisect_tol)
        integral = _quad(lambda x: 1.0 / velocity(x), x0, cutoff)
        return E / twopi * integral + cutoff / twopi * x0
    raise ValueError(f"unknown mode {mode!r}")


def inverse_velocity(velocity, target, upper, tol=1e-12):
    """``x`` in ``(0, upper]`` with ``velocity(x) = target``, by bisection."""
    lo, hi = 0.0, float(upper)
    if velocity(hi) < target:
        raise ValueError("target above the velocity range")
    if lo < hi and velocity(max(lo, 1e-300)) > target:
        raise ValueError("target below the velocity range")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if velocity(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def continuum_counting_approx(E, levels, alpha=math.pi / 2, hbar=1.0, form="integral"):
    """Continuum version of the exact counting function.

    ``form='integral'``: ``(1/pi) int_1^N arctan(E / (2 hbar eps(n))) dn - alpha/pi``
    by quadrature. ``form='asymptotic'``: its large-``N`` uniform-level form
    ``E/(2 pi hbar) log N - E/(2 pi hbar)(log(|E|/2 hbar) - 1)``, valid for
    ``N >> |E|/2 >> 1`` up to an ``O(1)`` constant (``-1`` at ``alpha = pi/2``)
    that is left out; a warning is issued outside that window.
    """
    lv = _as_levels(levels)
    N = lv.n
    if form == "integral":
        eps = lv.interpolant()
        f = lambda n: math.atan(E / (2.0 * hbar * float(eps(n))))
        # integrate in log n to spread the decay of the integrand evenly
        val = _quad(lambda t: f(math.exp(t)) * math.exp(t), 0.0, math.log(N))
        return val / math.pi - alpha / math.pi
    if form == "asymptotic":
        x = abs(E) / (2.0 * hbar)
        if not (x > 5.0 and N > 100.0 * x):
            warnings.warn("asymptotic counting formula used outside N >> |E|/2 >> 1",
                          RuntimeWarning)
        k = E / (2.0 * math.pi * hbar)
        return k * math.log(N) - k * (math.log(x) - 1.0)
    raise ValueError(f"unknown form {form!r}")


def uniform_counting_integral(E, N, alpha=math.pi / 2, hbar=1.0):
    """Closed-form integral for ``eps(n) = n``:
    ``(1/pi)[n atan(x/n) + x/2 log(n^2 + x^2)]_1^N - alpha/pi`` with ``x = E/2hbar``."""
    x = E / (2.0 * hbar)
    F = lambda n: n * math.atan(x / n) + 0.5 * x * math.log(n * n + x * x)
    return (F(float(N)) - F(1.0)) / math.pi - alpha / math.pi

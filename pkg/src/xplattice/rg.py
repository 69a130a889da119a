"""Gauss-elimination renormalization group and its cyclic continuum limit.

Eliminating the highest level ``N`` from the inverse model leaves a model of
the same form on ``N - 1`` levels with a new ``g``; ``h`` and the levels are
untouched. The same holds for the zero-energy state of the Russian-doll
model.
"""
import csv
from dataclasses import dataclass
import io
import math

import numpy as np

from .exceptions import PoleError
from .levels import ModelCouplings
from .model_core import _as_levels

_POLE_RTOL = 1e-14


def _step(g, h, kin):
    denom = 2.0 * kin - g
    if abs(denom) < _POLE_RTOL * (abs(2.0 * kin) + abs(g)):
        raise PoleError(f"RG pole: 2*{kin!r} - g vanishes at g = {g!r}", location=g)
    return g + (g * g + h * h) / denom


def rg_step_inverse(g, h, E_I, eps_N):
    """One elimination step of the inverse model at eigenvalue ``E_I``.

    ``g' = g + (g^2 + h^2) / (2 E_I eps_N - g)``.

    Raises
    ------
    PoleError
        When the denominator vanishes (relative to ``|2 E_I eps_N| + |g|``).
    """
    return _step(g, h, E_I * eps_N)


def rg_step_rd(g_D, h_D, eps_N):
    """One elimination step for the zero-energy Russian-doll state.

    ``g' = g + (g^2 + h^2) / (2 eps_N - g)``.
    """
    return _step(g_D, h_D, eps_N)


@dataclass(frozen=True, eq=False)
class FlowSample:
    step: int
    n_eliminated: int
    s: float
    g: float
    pole_flag: bool


@dataclass(frozen=True, eq=False)
class FlowState:
    """Snapshot of a finished flow.

    ``trajectory`` starts with the unreduced system (``step = 0``) and has
    one sample per eliminated level. ``closure_residual`` is
    ``2 K_last - g_final`` for the single remaining level, which vanishes
    exactly when the flowed energy is an eigenvalue.
    """

    remaining_size: int
    g_current: float
    h: float
    level_cursor: int
    trajectory: tuple
    pole_count: int
    closure_residual: float
    family: str
    direction: str

    @property
    def s(self):
        return np.array([p.s for p in self.trajectory])

    @property
    def g(self):
        return np.array([p.g for p in self.trajectory])

    def to_csv(self, fh=None):
        """Write ``step,n_eliminated,s,g,pole_flag`` rows; returns the text
        when ``fh`` is ``None``."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["step", "n_eliminated", "s", "g", "pole_flag"])
        for p in self.trajectory:
            w.writerow([p.step, p.n_eliminated, repr(float(p.s)), repr(float(p.g)),
                        int(p.pole_flag)])
        return out.getvalue() if fh is None else None


def run_flow(levels, couplings, E_I=None, family="inverse", direction="ir"):
    """Eliminate levels one at a time down to a single site.

    ``family='inverse'`` flows ``g_I`` at the eigenvalue ``E_I``;
    ``family='rd'`` flows ``g_D`` of the zero-energy RD state with
    ``h_D = couplings.h``. ``direction='ir'`` removes the highest level first
    and records ``s(n) = sum_(m > n) 1/eps_m``; ``'uv'`` removes ``n = 1``
    first and records ``sum_(m < n) 1/eps_m``.

    A step whose denominator has the opposite sign to ``2 K`` (``K`` the
    kinematic term ``E_I eps`` or ``eps``) is where ``g`` passes through
    infinity, i.e. one RG cycle ends; these are flagged and counted. An exact
    zero denominator sends ``g`` to infinity and the next step continues from
    the limit ``g' = -2 K``.
    """
    lv = _as_levels(levels)
    eps = lv.levels
    N = lv.n
    if family == "inverse":
        if E_I is None or E_I == 0:
            raise ValueError("family='inverse' needs a nonzero E_I")
        scale = E_I
    elif family == "rd":
        scale = 1.0
    else:
        raise ValueError(f"family must be 'inverse' or 'rd', got {family!r}")
    if direction == "ir":
        order = range(N - 1, 0, -1)
    elif direction == "uv":
        order = range(0, N - 1)
    else:
        raise ValueError(f"direction must be 'ir' or 'uv', got {direction!r}")

    g, h = float(couplings.g), float(couplings.h)
    traj = [FlowSample(0, 0, 0.0, g, False)]
    s = 0.0
    poles = 0
    for step, i in enumerate(order, start=1):
        kin = scale * eps[i]
        if math.isinf(g):
            g_new, flag = -2.0 * kin, False
        else:
            denom = 2.0 * kin - g
            flag = denom == 0 or (denom > 0) != (kin > 0)
            g_new = math.inf if denom == 0 else g + (g * g + h * h) / denom
        poles += flag
        s += 1.0 / eps[i]
        g = g_new
        traj.append(FlowSample(step, i + 1, s, g, bool(flag)))
    last = 0 if direction == "ir" else N - 1
    closure = 2.0 * scale * eps[last] - g
    return FlowState(1, g, h, last + 1, tuple(traj), int(poles), closure,
                     family, direction)


def continuum_flow_g(s, g0, h):
    """Cyclic solution ``h tan(h s / 2 + arctan(g0 / h))`` of
    ``dg/ds = (g^2 + h^2)/2``. Period ``2 pi / h``; returns a signed
    infinity at a pole of the tangent."""
    if h == 0:
        raise ValueError("h must be nonzero")
    phase = 0.5 * h * s + math.atan(g0 / h)
    c = math.cos(phase)
    if abs(c) < 1e-15:
        return math.copysign(math.inf, h * math.sin(phase) * (1 if c >= 0 else -1))
    return h * math.sin(phase) / c


def rg_period(h):
    """RG period ``2 pi / h`` of the cyclic flow."""
    return 2.0 * math.pi / h


def russian_doll_scaling_check(levels, couplings, n, method="exact"):
    """Relative mismatch between ``E_n(N)`` and ``E_(n-1)(N')`` with
    ``N' = N ** ((n - 1/2) / (n + 1/2))``.

    ``method='continuum'`` uses ``E_n = 2 pi hbar (n + 1/2) / log N`` with the
    unrounded ``N'``; ``method='exact'`` solves the counting equation for
    uniform levels of size ``N`` and ``round(N')``.
    """
    from .exact_spectrum import exact_root

    lv = _as_levels(levels)
    if lv.generator != "uniform" or couplings.g != 0:
        raise ValueError("Russian-doll scaling check needs uniform levels and g = 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    N = lv.n
    Np = N ** ((n - 0.5) / (n + 0.5))
    if Np < 2:
        raise ValueError(f"reduced size N' = {Np:.3g} is below 2")
    if method == "continuum":
        hbar = 1.0 / couplings.h
        top = 2 * math.pi * hbar * (n + 0.5) / math.log(N)
        low = 2 * math.pi * hbar * (n - 0.5) / math.log(Np)
    elif method == "exact":
        top = exact_root(lv, couplings, n)
        low = exact_root(lv.resized(int(round(Np))), couplings, n - 1)
    else:
        raise ValueError(f"method must be 'exact' or 'continuum', got {method!r}")
    return abs(top - low) / abs(top)


def cycle_count_estimate(levels, E, hbar=1.0):
    """Estimated number of RG cycles ``E log N / (2 pi hbar)``."""
    N = _as_levels(levels).n
    return E * math.log(N) / (2.0 * math.pi * hbar)


def iterated_size(N, n, cycles):
    """System size ``N ** ((n + 1/2 - cycles) / (n + 1/2))`` after ``cycles``
    Russian-doll reductions of the state ``n``."""
    return N ** ((n + 0.5 - cycles) / (n + 0.5))


def discrete_s(levels):
    """``s(n) = sum_(m > n) 1/eps_m``, ``q(n) = sum_(m <= n) 1/eps_m`` and
    ``L = sum 1/eps`` for ``n = 1..N``; ``s = L - q``."""
    w = 1.0 / _as_levels(levels).levels
    q = np.cumsum(w)
    L = q[-1]
    return L - q, q, L


def rd_couplings_from_inverse(couplings, E_I):
    """RD couplings ``(g/E_I, h/E_I)`` associated with an eigenvalue ``E_I``."""
    return ModelCouplings(g=couplings.g / E_I, h=couplings.h / E_I, hbar=couplings.hbar)

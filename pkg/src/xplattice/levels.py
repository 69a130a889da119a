"""Level sequences and coupling constants that define a model instance."""
from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_positive_levels, check_scalar, frozen


def primes_up_to(n):
    """Sorted array of the primes ``<= n`` (sieve of Eratosthenes)."""
    if n < 2:
        return np.array([], dtype=int)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.flatnonzero(sieve)


@dataclass(frozen=True, eq=False)
class LevelSequence:
    """Energy levels ``eps_1 .. eps_N`` (equivalently the velocities ``v_n``).

    Build instances with the class-method constructors; ``generator`` and
    ``params`` record how the sequence was made so that it can be resized.
    """

    levels: np.ndarray
    generator: str = "explicit"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = check_positive_levels(self.levels).copy()
        if self.generator in ("uniform", "corrected") and arr.size > 1:
            if not np.all(np.diff(arr) > 0):
                raise ValueError(
                    f"{self.generator} levels with params {self.params} "
                    "are not strictly increasing")
        object.__setattr__(self, "levels", frozen(arr))

    @classmethod
    def uniform(cls, N, a=0.0):
        """``eps_n = n + a``."""
        check_scalar(N, "N", min_val=1, integer=True)
        n = np.arange(1, N + 1, dtype=float)
        return cls(n + a, "uniform", {"N": N, "a": float(a)})

    @classmethod
    def corrected(cls, N, a=0.0, c=0.0):
        """``eps_n = n + a + c/n``."""
        check_scalar(N, "N", min_val=1, integer=True)
        n = np.arange(1, N + 1, dtype=float)
        return cls(n + a + c / n, "corrected",
                   {"N": N, "a": float(a), "c": float(c)})

    @classmethod
    def constant(cls, N, value=1.0):
        check_scalar(N, "N", min_val=1, integer=True)
        return cls(np.full(N, float(value)), "constant",
                   {"N": N, "value": float(value)})

    @classmethod
    def explicit(cls, values):
        return cls(np.asarray(values, dtype=float), "explicit", {})

    @classmethod
    def prime_filtered(cls, N, a=0.0):
        """Uniform levels ``n + a`` for ``n = 1..N`` with prime ``n`` removed."""
        check_scalar(N, "N", min_val=1, integer=True)
        n = np.arange(1, N + 1)
        keep = np.ones(N, dtype=bool)
        keep[primes_up_to(N) - 1] = False
        return cls(n[keep].astype(float) + a, "prime_filtered",
                   {"N": N, "a": float(a)})

    @property
    def n(self):
        return self.levels.size

    def __len__(self):
        return self.levels.size

    @property
    def f(self):
        """``f_n = eps_n ** -1/2``."""
        return 1.0 / np.sqrt(self.levels)

    @property
    def velocities(self):
        return self.levels

    def resized(self, N):
        """Same generator and parameters with a different ``N``."""
        p = dict(self.params)
        if self.generator == "uniform":
            return LevelSequence.uniform(N, p["a"])
        if self.generator == "corrected":
            return LevelSequence.corrected(N, p["a"], p["c"])
        if self.generator == "constant":
            return LevelSequence.constant(N, p["value"])
        if self.generator == "prime_filtered":
            return LevelSequence.prime_filtered(N, p["a"])
        raise ValueError(f"cannot resize a sequence built by {self.generator!r}")

    def interpolant(self):
        """Smooth ``eps(n)`` on ``[1, N]``.

        Closed form for the uniform, corrected and constant generators,
        piecewise-linear in the sequence index otherwise.
        """
        p = self.params
        if self.generator == "uniform":
            a = p["a"]
            return lambda n: np.asarray(n, dtype=float) + a
        if self.generator == "corrected":
            a, c = p["a"], p["c"]
            return lambda n: np.asarray(n, dtype=float) + a + c / np.asarray(n, dtype=float)
        if self.generator == "constant":
            v = p["value"]
            return lambda n: np.full_like(np.asarray(n, dtype=float), v)
        idx = np.arange(1, self.n + 1, dtype=float)
        lv = self.levels
        return lambda n: np.interp(n, idx, lv)

    def __repr__(self):
        return f"LevelSequence(N={self.n}, generator={self.generator!r}, params={self.params})"


@dataclass(frozen=True)
class ModelCouplings:
    """Couplings ``(g, h, hbar)`` and, for the I+/- models, ``g_vector``.

    ``h`` enters the matrices; the pure lattice xp model has ``h = 1/hbar``
    (see :meth:`from_hbar`). ``g = h = 0`` is accepted (the free RD model)
    but leaves the boundary phase undefined.
    """

    g: float = 0.0
    h: float = 1.0
    hbar: float = 1.0
    g_vector: tuple = None

    def __post_init__(self):
        check_scalar(self.g, "g")
        check_scalar(self.h, "h")
        check_scalar(self.hbar, "hbar", min_val=0, include_min=False)
        if self.g_vector is not None:
            gv = tuple(float(x) for x in self.g_vector)
            if not all(math.isfinite(x) for x in gv):
                raise ValueError("g_vector entries must be finite")
            object.__setattr__(self, "g_vector", gv)

    @classmethod
    def from_hbar(cls, hbar=1.0, g=0.0, g_vector=None):
        return cls(g=g, h=1.0 / hbar, hbar=hbar, g_vector=g_vector)

    @property
    def alpha(self):
        """Boundary phase ``atan2(h, g)`` in ``(-pi, pi]``."""
        return boundary_phase(self.g, self.h)


def boundary_phase(g, h):
    """Twist angle set by the couplings; ``pi/2`` for ``g = 0, h > 0``."""
    if g == 0 and h == 0:
        raise ValueError("boundary phase is undefined for g = h = 0")
    return math.atan2(h, g)

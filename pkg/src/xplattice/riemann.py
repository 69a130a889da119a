"""Gamma-function counting formulas and comparison with the Riemann zeros."""
import csv
from dataclasses import dataclass
import hashlib
import io
import math
from importlib import resources

import numpy as np

from .exact_spectrum import counting_function
from .levels import LevelSequence, primes_up_to
from .lngamma import im_lngamma

#: ``N_sm(E_n)`` for the first ten zeros, four decimals.
REFERENCE_N_SM = (0.4497, 1.5702, 2.3936, 3.6710, 4.3172,
                  5.5935, 6.5651, 7.2943, 8.7708, 9.3483)
REFERENCE_ZEROS = (14.1347, 21.0220, 25.0109, 30.4248, 32.9350,
                   37.5861, 40.9187, 43.3270, 48.0051, 49.7738)


@dataclass(frozen=True)
class CountingParams:
    """Zero-point shift ``a``, ``1/n`` correction ``c``, phase ``alpha`` and
    zeta regulator ``mu`` of the uniform-level counting functions."""

    a: float = -0.75
    c: float = 0.0
    alpha: float = math.pi / 2
    mu: float = 1.0 / math.pi

    def __post_init__(self):
        if not 1.0 + self.a + self.c > 0:
            raise ValueError(f"1 + a + c must be positive (eps_1 > 0), got {1 + self.a + self.c}")


def smooth_count(E):
    """Smooth part of the Riemann zero count,
    ``(1/pi) Im lnGamma(1/4 + iE/2) - E/(2 pi) log pi + 1``."""
    E = np.asarray(E, dtype=float)
    out = im_lngamma(0.25 + 0.5j * E) / math.pi - E / (2 * math.pi) * math.log(math.pi) + 1.0
    return out if out.ndim else float(out)


def n_I_closed(E, p=CountingParams()):
    """Finite part ``(1/pi) Im lnGamma(1 + a + iE/2) + alpha/pi`` of the
    uniform-level counting function."""
    if not 1.0 + p.a > 0:
        raise ValueError("n_I_closed needs 1 + a > 0")
    E = np.asarray(E, dtype=float)
    out = im_lngamma(1.0 + p.a + 0.5j * E) / math.pi + p.alpha / math.pi
    return out if out.ndim else float(out)


def n_I_zeta_regularized(E, p=CountingParams()):
    """Zeta-regularized finite part, :func:`n_I_closed` plus ``E/(2 pi) log mu``."""
    if not p.mu > 0:
        raise ValueError(f"mu must be positive, got {p.mu}")
    E = np.asarray(E, dtype=float)
    out = n_I_closed(E, p) + E / (2 * math.pi) * math.log(p.mu)
    return out if np.ndim(out) else float(out)


def corrected_roots(E, a, c):
    """``a_+/-(E) = 1/2 [z +/- sqrt(z^2 - 4c)]`` with ``z = a + iE/2``; the
    square root has nonnegative real part."""
    z = a + 0.5j * np.asarray(E, dtype=float)
    r = np.sqrt(z * z - 4.0 * c)
    return 0.5 * (z + r), 0.5 * (z - r)


def n_I_corrected_levels(E, p):
    """Finite part for ``eps_n = n + a + c/n``: ``(1/pi) Im[lnGamma(1 + a_+) +
    lnGamma(1 + a_-)] + alpha/pi``."""
    ap, am = corrected_roots(E, p.a, p.c)
    out = (im_lngamma(1.0 + ap) + im_lngamma(1.0 + am)) / math.pi + p.alpha / math.pi
    return out if np.ndim(out) else float(out)


def n_I_truncated(E, N, a=-0.75, c=0.0, alpha=math.pi / 2):
    """Finite-``N`` finite part ``E/(2 pi) log N - N_I(E)`` computed from the
    level sum (the truncated Gamma product)."""
    lv = LevelSequence.corrected(N, a, c) if c else LevelSequence.uniform(N, a)
    E = np.asarray(E, dtype=float)
    out = E / (2 * math.pi) * math.log(N) - counting_function(E, lv, alpha)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Ascending ordinates of nontrivial zeta zeros with their source."""

    zeros: np.ndarray
    source: str
    checksum: str

    def __len__(self):
        return self.zeros.size

    def head(self, n):
        return ZeroTable(self.zeros[:n], self.source, self.checksum)


def load_zeros(path=None):
    """Read a zeros file: one ordinate per line, ``#`` comments, ascending.

    With ``path=None`` the bundled table of the first 100 zeros is read and
    its first ten entries are checked against :data:`REFERENCE_ZEROS`.

    Raises
    ------
    ValueError
        On an empty file, a non-numeric line or a non-increasing pair; the
        message names the line number.
    """
    if path is None:
        ref = resources.files("xplattice") / "data" / "zeta_zeros_100.txt"
        raw, source = ref.read_bytes(), "xplattice:data/zeta_zeros_100.txt"
    else:
        with open(path, "rb") as fh:
            raw = fh.read()
        source = str(path)
    text = raw.decode("utf-8")
    vals = []
    prev_line = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        try:
            v = float(s)
        except ValueError:
            raise ValueError(f"{source}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"{source}:{lineno}: ordinate must be positive and finite")
        if vals and not v > vals[-1]:
            raise ValueError(
                f"{source}:{lineno}: ordinates not increasing ({v} after {vals[-1]} on line {prev_line})")
        vals.append(v)
        prev_line = lineno
    if not vals:
        raise ValueError(f"{source}: no ordinates found")
    table = ZeroTable(np.array(vals), source, hashlib.sha256(raw).hexdigest())
    if path is None:
        ref = np.array(REFERENCE_ZEROS)
        if not np.allclose(table.zeros[:10], ref, atol=5e-5):
            raise ValueError("bundled zeros table does not match the reference values")
    return table


COUNTING_FUNCTIONS = {
    "smooth": smooth_count,
    "zeta": lambda E: n_I_zeta_regularized(E, CountingParams()) + 0.5,
    "closed": lambda E: n_I_closed(E, CountingParams()) - E / (2 * math.pi) * math.log(math.pi) + 0.5,
}


@dataclass(frozen=True, eq=False)
class DeviationReport:
    """Per-zero rows ``(n, E_n, N_sm, N_sm + 1/2, n - N_sm - 1/2)`` and the
    mean and root-mean-square of the last column."""

    n: np.ndarray
    E: np.ndarray
    N_sm: np.ndarray
    deviation: np.ndarray
    mean: float
    rms: float

    @property
    def N_sm_plus_half(self):
        return self.N_sm + 0.5

    def to_csv(self, fh=None, digits=6):
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "E_n", "N_sm", "N_sm_plus_half", "deviation"])
        fmt = f"{{:.{digits}f}}"
        for row in zip(self.n, self.E, self.N_sm, self.N_sm_plus_half, self.deviation):
            w.writerow([int(row[0])] + [fmt.format(x) for x in row[1:]])
        out.write(f"#stats mean={self.mean:.6f} rms={self.rms:.6f}\n")
        return out.getvalue() if fh is None else None


def deviation_report(zeros, count_fn="smooth"):
    """Compare a counting function with a :class:`ZeroTable`.

    ``count_fn`` is a name in :data:`COUNTING_FUNCTIONS` or a callable
    ``E -> N_sm(E)``.
    """
    fn = COUNTING_FUNCTIONS[count_fn] if isinstance(count_fn, str) else count_fn
    E = np.asarray(zeros.zeros if isinstance(zeros, ZeroTable) else zeros, dtype=float)
    if E.size == 0:
        raise ValueError("need at least one zero")
    n = np.arange(1, E.size + 1)
    ns = np.asarray(fn(E), dtype=float)
    dev = n - ns - 0.5
    return DeviationReport(n, E, ns, dev, float(dev.mean()), float(np.sqrt(np.mean(dev ** 2))))


@dataclass(frozen=True)
class PrimeFilterReport:
    N: int
    n_levels: int
    coefficient: float
    coefficient_unfiltered: float
    log_N: float
    log_N_over_log_N: float


def fitted_log_coefficient(levels, E_grid, alpha=math.pi / 2):
    """``2 pi`` times the least-squares slope of ``N_I(E)`` over ``E_grid``."""
    E = np.asarray(E_grid, dtype=float)
    slope, _ = np.polyfit(E, counting_function(E, levels, alpha), 1)
    return 2 * math.pi * slope


def prime_filter_experiment(N, E_grid):
    """Fit the coefficient of the divergent term of ``N_I`` with and without
    the prime-indexed levels removed, against ``log N`` and
    ``log(N / log N)``."""
    if N < 4:
        raise ValueError("N must be >= 4")
    full = LevelSequence.uniform(N)
    filt = LevelSequence.prime_filtered(N)
    return PrimeFilterReport(
        N=N,
        n_levels=filt.n,
        coefficient=fitted_log_coefficient(filt, E_grid),
        coefficient_unfiltered=fitted_log_coefficient(full, E_grid),
        log_N=math.log(N),
        log_N_over_log_N=math.log(N / math.log(N)),
    )


__all__ = [
    "CountingParams", "ZeroTable", "DeviationReport", "PrimeFilterReport",
    "smooth_count", "n_I_closed", "n_I_zeta_regularized", "n_I_corrected_levels",
    "n_I_truncated", "corrected_roots", "load_zeros", "deviation_report",
    "prime_filter_experiment", "fitted_log_coefficient", "primes_up_to",
    "REFERENCE_N_SM", "REFERENCE_ZEROS", "COUNTING_FUNCTIONS",
]

"""Complex log-Gamma on the right half plane by a Lanczos approximation.

Uses ``g = 671/128`` with 14 coefficients, which gives about 14 significant
digits for ``Re z >= 1/2``. Arguments with ``Re z < 1/2`` are shifted upward
with ``lnGamma(z) = lnGamma(z + 1) - log z``. The result is the analytic
log-Gamma (continuous in ``z``), not the principal log of ``Gamma(z)``.
"""
import numpy as np

_G = 5.24218750000000000
_C0 = 0.999999999999997092
_COF = np.array([
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3,
    -0.210264441724104883e-3, 0.217439618115212643e-3,
    -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
])
_SQRT_2PI = 2.5066282746310005


def _lanczos(z):
    t = z + _G
    head = (z + 0.5) * np.log(t) - t
    ser = np.full_like(z, _C0)
    for j, c in enumerate(_COF, start=1):
        ser = ser + c / (z + j)
    return head + np.log(_SQRT_2PI * ser / z)


def lngamma(z):
    """Analytic ``log Gamma(z)`` for complex ``z`` (scalar or array).

    Raises
    ------
    ValueError
        At the poles ``z = 0, -1, -2, ...``.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise ValueError(f"log Gamma has a pole at z = {z[pole][0].real:g}")
    shift = np.zeros(z.shape)
    low = z.real < 0.5
    if np.any(low):
        shift[low] = np.ceil(0.5 - z.real[low])
    corr = np.zeros(z.shape, dtype=complex)
    for k in range(int(shift.max()) if shift.size else 0):
        m = shift > k
        corr[m] -= np.log(z[m] + k)
    out = _lanczos(z + shift) + corr
    return out[0] if scalar else out


def im_lngamma(z):
    """Imaginary part of :func:`lngamma`."""
    return np.imag(lngamma(z))

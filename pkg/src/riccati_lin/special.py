"""Bessel functions J, Y, I, K of real order and positive real argument.

Supported envelope: ``|nu| <= 5`` and ``0 < x <= 50``.

Evaluation strategy
-------------------
* J and I: ascending power series while ``x <= max(2, |nu|)``.
* Y and K, and J/I beyond the series radius, for ``nu >= 0``: Temme's
  series for the reduced order ``mu = nu - round(nu)`` when ``x < 2`` (this
  covers integer orders without a separate digamma series), Steed's
  continued-fraction method otherwise, then recurrence in the order.
* Negative orders through the reflection formulas

      J_{-v} = cos(v pi) J_v - sin(v pi) Y_v
      Y_{-v} = sin(v pi) J_v + cos(v pi) Y_v
      I_{-v} = I_v + (2/pi) sin(v pi) K_v
      K_{-v} = K_v

Derivatives use C'_v = C_{v-1} - (v/x) C_v for J, Y, I and
K'_v = -K_{v-1} - (v/x) K_v.
"""

from __future__ import annotations

import enum
import math

__all__ = [
    "BesselKind", "BesselDomainError", "bessel", "bessel_derivative",
    "jv", "yv", "iv", "kv", "MAX_ORDER", "MAX_ARGUMENT",
]

MAX_ORDER = 5.0
MAX_ARGUMENT = 50.0

_EPS = 1e-17
_FPMIN = 1e-300
_MAXIT = 100000
_XMIN = 2.0


class BesselKind(str, enum.Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741
    K = "K"


class BesselDomainError(ValueError):
    """Order or argument outside the supported envelope."""


# Taylor coefficients of 1/Gamma(z) about 0 (c_1 = 1, c_2 = Euler's gamma, ...)
_RGAMMA_TAYLOR = (
    0.0, 1.0, 0.5772156649015328606065, -0.655878071520253881077,
    -0.042002635034095235529, 0.1665386113822914895017,
    -0.04219773455554433674821, -0.009621971527876973562115,
    0.007218943246663099542395, -0.001165167591859065112114,
    -0.0002152416741149509728157, 0.0001280502823881161861532,
    -0.00002013485478078823865569, -0.000001250493482142670657345,
    0.000001133027231981695882374, -2.05633841697760710345e-7,
    6.116095104481415817862e-9, 5.002007644469222930056e-9,
    -1.181274570487020144588e-9, 1.043426711691100510492e-10,
    7.78226343990507125405e-12, -3.696805618642205708188e-12,
    5.100370287454475979015e-13, -2.058326053566506783222e-14,
    -5.34812253942301798237e-15, 1.226778628238260790159e-15,
    -1.181259301697458769514e-16, 1.18669225475160033258e-18,
    1.412380655318031781556e-18, -2.298745684435370206592e-19,
)


def _temme_gammas(mu):
    """gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu) for |mu| <= 1/2.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 = the mean of the
    two reciprocals; both are even in mu and summed from the Taylor series
    so that mu -> 0 needs no special case.
    """
    c = _RGAMMA_TAYLOR
    m2 = mu * mu
    gam1 = 0.0
    gam2 = 0.0
    for k in range(len(c) - 1, 0, -1):
        if k % 2 == 0:
            gam1 = gam1 * m2 - c[k]
        else:
            gam2 = gam2 * m2 + c[k]
    return gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1


def _sinpi(v):
    r = math.fmod(v, 2.0)
    if r == math.floor(r):
        return 0.0
    if 2.0 * r == math.floor(2.0 * r):
        return 1.0 if r in (0.5, -1.5) else -1.0
    return math.sin(math.pi * r)


def _cospi(v):
    return _sinpi(v + 0.5)


# ---------------------------------------------------------------------------
# ascending series

def _series(nu, x, sign):
    """sum_k sign^k (x/2)^(2k+nu) / (k! Gamma(k+nu+1)).

    ``sign = -1`` gives J, ``sign = +1`` gives I. Terms with a pole of
    Gamma(k+nu+1) vanish, so negative integer orders come out right.
    """
    half = 0.5 * x
    q = sign * half * half
    # first nonvanishing term
    k = 0
    if nu < 0 and float(nu).is_integer():
        k = int(-nu)
    log_lead = (2 * k + nu) * math.log(half) - math.lgamma(k + 1) - math.lgamma(k + nu + 1)
    term = math.exp(log_lead) * (sign ** k) * _gamma_sign(k + nu + 1)
    total = term
    j = k
    while True:
        j += 1
        term *= q / (j * (j + nu))
        total += term
        if abs(term) <= 1e-17 * abs(total) and j > k + 2:
            break
        if j > k + 500:
            break
    return total


def _gamma_sign(z):
    if z > 0:
        return 1.0
    return 1.0 if math.floor(z) % 2 == 0 else -1.0


# ---------------------------------------------------------------------------
# Temme / Steed evaluation for nu >= 0

def _jy(nu, x):
    """J_nu, Y_nu, J_nu', Y_nu' for nu >= 0, x > 0."""
    if x < _XMIN:
        nl = int(nu + 0.5)
    else:
        nl = max(0, int(nu - x + 1.5))
    mu = nu - nl
    mu2 = mu * mu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: J'_nu / J_nu by the modified Lentz method
    isign = 1
    h = max(nu * xi, _FPMIN)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(_MAXIT):
        b += xi2
        d = b - d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b - 1.0 / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = c * d
        h *= delta
        if d < 0.0:
            isign = -isign
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError("continued fraction CF1 did not converge")

    # downward recurrence to the reduced order mu (unnormalized)
    rjl = isign * _FPMIN
    rjpl = h * rjl
    rjl1 = rjl
    rjp1 = rjpl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
    if rjl == 0.0:
        rjl = _EPS
    f = rjpl / rjl

    if x < _XMIN:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(mu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        fact3 = 1.0 if abs(pimu2) < _EPS else math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        total = ff + r * q
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * (ff + r * q)
            total += delta
            delta1 = c * p - i * delta
            total1 += delta1
            if abs(delta) < (1.0 + abs(total)) * _EPS:
                break
        else:
            raise ArithmeticError("Temme series for Y did not converge")
        rymu = -total
        ry1 = -total1 * xi2
        rymup = mu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        # CF2: p + iq = (J' + iY') / (J + iY), Steed's algorithm
        a = 0.25 - mu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        for i in range(2, _MAXIT):
            a += 2 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < _FPMIN:
                dr = _FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < _FPMIN:
                cr = _FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < _EPS:
                break
        else:
            raise ArithmeticError("continued fraction CF2 did not converge")
        gam = (p - f) / q
        rjmu = math.sqrt(w / ((p - f) * gam + q))
        rjmu = math.copysign(rjmu, rjl)
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = mu * xi * rymu - rymup

    fact = rjmu / rjl
    rj = rjl1 * fact
    rjp = rjp1 * fact
    for i in range(1, nl + 1):
        rytemp = (mu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
    return rj, rymu, rjp, nu * xi * rymu - ry1


def _ik(nu, x):
    """I_nu, K_nu, I_nu', K_nu' for nu >= 0, x > 0."""
    nl = int(nu + 0.5)
    mu = nu - nl
    mu2 = mu * mu
    xi = 1.0 / x
    xi2 = 2.0 * xi

    # CF1: I'_nu / I_nu
    h = max(nu * xi, _FPMIN)
    b = xi2 * nu
    d = 0.0
    c = h
    for _ in range(_MAXIT):
        b += xi2
        d = 1.0 / (b + d)
        c = b + 1.0 / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError("continued fraction CF1 did not converge")

    ril = _FPMIN
    ripl = h * ril
    ril1 = ril
    rip1 = ripl
    fact = nu * xi
    for _ in range(nl, 0, -1):
        ritemp = fact * ril + ripl
        fact -= xi
        ripl = fact * ritemp + ril
        ril = ritemp
    f = ripl / ril

    if x < _XMIN:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(mu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        for i in range(1, _MAXIT):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            delta1 = c * (p - i * ff)
            total1 += delta1
            if abs(delta) < abs(total) * _EPS:
                break
        else:
            raise ArithmeticError("Temme series for K did not converge")
        rkmu = total
        rk1 = total1 * xi2
    else:
        # Steed's CF2 for K with Temme's normalization
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu2
        q = c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, _MAXIT):
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) < _EPS:
                break
        else:
            raise ArithmeticError("continued fraction CF2 did not converge")
        h = a1 * h
        rkmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
        rk1 = rkmu * (mu + x + 0.5 - h) * xi

    rkmup = mu * xi * rkmu - rk1
    rimu = xi / (f * rkmu - rkmup)
    ri = rimu * ril1 / ril
    rip = rimu * rip1 / ril
    for i in range(1, nl + 1):
        rktemp = (mu + i) * xi2 * rk1 + rkmu
        rkmu = rk1
        rk1 = rktemp
    return ri, rkmu, rip, nu * xi * rkmu - rk1


# ---------------------------------------------------------------------------
# dispatch

def _eval(kind, nu, x):
    in_series = x <= max(_XMIN, abs(nu))
    if kind in (BesselKind.J, BesselKind.I) and in_series:
        return _series(nu, x, -1.0 if kind is BesselKind.J else 1.0)
    v = abs(nu)
    if kind in (BesselKind.J, BesselKind.Y):
        j, y, _, _ = _jy(v, x)
        if nu >= 0:
            return j if kind is BesselKind.J else y
        s, c = _sinpi(v), _cospi(v)
        if kind is BesselKind.J:
            return c * j - s * y
        return s * j + c * y
    i, k, _, _ = _ik(v, x)
    if kind is BesselKind.K:
        return k
    if nu >= 0:
        return i
    return i + (2.0 / math.pi) * _sinpi(v) * k


def _check(kind, nu, x):
    kind = BesselKind(kind)
    nu = float(nu)
    x = float(x)
    if not x > 0.0:
        raise BesselDomainError(f"argument must be positive, got x={x!r}")
    if abs(nu) > MAX_ORDER or x > MAX_ARGUMENT or not math.isfinite(nu):
        raise BesselDomainError(
            f"({kind.value}, nu={nu!r}, x={x!r}) outside the supported envelope "
            f"|nu| <= {MAX_ORDER:g}, 0 < x <= {MAX_ARGUMENT:g}")
    return kind, nu, x


def bessel(kind: BesselKind | str, nu: float, x: float) -> float:
    """Value of the Bessel function ``kind`` ('J', 'Y', 'I' or 'K') of order ``nu`` at ``x``.

    Raises
    ------
    BesselDomainError
        If ``x <= 0`` or ``(nu, x)`` is outside the supported envelope.
    """
    kind, nu, x = _check(kind, nu, x)
    return _eval(kind, nu, x)


def bessel_derivative(kind: BesselKind | str, nu: float, x: float) -> float:
    """Derivative with respect to ``x``, from the order recurrence."""
    kind, nu, x = _check(kind, nu, x)
    lower = _eval(kind, nu - 1.0, x)
    if kind is BesselKind.K:
        lower = -lower
    return lower - nu / x * _eval(kind, nu, x)


def jv(nu, x):
    return bessel(BesselKind.J, nu, x)


def yv(nu, x):
    return bessel(BesselKind.Y, nu, x)


def iv(nu, x):
    return bessel(BesselKind.I, nu, x)


def kv(nu, x):
    return bessel(BesselKind.K, nu, x)

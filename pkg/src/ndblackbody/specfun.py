"""Real-argument Gamma and Riemann zeta functions plus hypersphere geometry.

Everything here is self-contained (only :mod:`math`) so that the closed-form
thermodynamics does not depend on the special-function library it is later
checked against.
"""

import math
from fractions import Fraction

from .errors import DomainError

__all__ = [
    "gamma",
    "zeta",
    "solid_angle",
    "wallis_integral",
    "exact_cos2_average",
]

# Lanczos approximation, g = 607/128 with 15 terms (Godfrey's coefficient set).
# Relative error below 1e-15 for real x >= 1.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Largest argument whose Gamma is a finite double.
GAMMA_MAX_ARG = 171.62437695630272

# B_2, B_4, ..., B_12 divided by (2k)!
_BERNOULLI_OVER_FACT = tuple(
    float(Fraction(num, den) / math.factorial(2 * k))
    for k, (num, den) in enumerate(
        [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730)], start=1
    )
)


def _check_finite(x, name="x"):
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")


def _lanczos(x):
    # Gamma(x) for x >= 1 via Gamma(z + 1) with z = x - 1.
    z = x - 1.0
    series = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z + 0.5) cannot overflow before the product does
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (math.exp(-t) * half) * series


def gamma(x):
    """Gamma function for real ``0 < x <= 200``.

    Raises
    ------
    DomainError
        If ``x <= 0``, ``x > 200``, or the result would overflow a double
        (``x > 171.62...``).
    """
    x = float(x)
    _check_finite(x)
    if x <= 0.0:
        raise DomainError(f"gamma requires x > 0, got {x!r}")
    if x > 200.0:
        raise DomainError(f"gamma requires x <= 200, got {x!r}")
    if x > GAMMA_MAX_ARG:
        raise DomainError(f"gamma({x!r}) overflows double precision")
    if x < 1.0:
        return _lanczos(x + 1.0) / x
    return _lanczos(x)


def zeta(s):
    """Riemann zeta function for real ``s > 1``.

    Euler-Maclaurin summation: the first ``N - 1`` terms directly, then the
    integral, half-term and Bernoulli corrections through ``B_12`` at ``N``.
    ``N = 20`` for ``s >= 2`` and ``N = 50`` closer to the pole.
    """
    s = float(s)
    _check_finite(s, "s")
    if s <= 1.0:
        raise DomainError(f"zeta requires s > 1, got {s!r}")
    n_direct = 20 if s >= 2.0 else 50
    # smallest terms first
    direct = 0.0
    for n in range(n_direct - 1, 0, -1):
        direct += n ** -s
    big_n = float(n_direct)
    tail = big_n ** (1.0 - s) / (s - 1.0) + 0.5 * big_n ** -s
    # rising factorial s (s+1) ... (s+2k-2) times N^(-s-2k+1)
    rising = s
    power = big_n ** (-s - 1.0)
    for k, coef in enumerate(_BERNOULLI_OVER_FACT, start=1):
        tail += coef * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= big_n * big_n
    return direct + tail


def solid_angle(d):
    """Total solid angle of the unit sphere in ``d`` dimensions, 2 pi^(d/2) / Gamma(d/2)."""
    d = _as_dim(d)
    return 2.0 * math.pi ** (0.5 * d) / gamma(0.5 * d)


def wallis_integral(n):
    """Closed form of the integral of sin(theta)^n over [0, pi]."""
    if int(n) != n or n < 0:
        raise DomainError(f"wallis_integral requires an integer n >= 0, got {n!r}")
    n = int(n)
    return math.sqrt(math.pi) * gamma(0.5 * (n + 1)) / gamma(0.5 * (n + 2))


def exact_cos2_average(d):
    """Average of cos^2 of the polar angle over the unit sphere in ``d`` dimensions.

    Evaluated from the Gamma-ratio form of the average of sin^2 of the last
    polar angle; the result equals ``1/d``. For ``d = 1`` the "sphere" is the
    two points ``{-1, +1}`` and the average is exactly 1.
    """
    d = _as_dim(d)
    if d == 1:
        return 1.0
    sin2 = (gamma(0.5 * d) * gamma(0.5 * (d + 1))) / (
        gamma(0.5 * (d - 1)) * gamma(0.5 * (d + 2))
    )
    return 1.0 - sin2


def _as_dim(d):
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise DomainError(f"spatial dimension must be an integer >= 1, got {d!r}")
    return int(d)

"""Real-argument special functions needed by the closed-form periods.

Only what the period formulas reach is covered: 2F1(a, b; c; z) for z < 1,
Legendre functions P_deg^ord(x) for x >= 1, and the gamma function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergent, PoleAtC, PoleError

MAX_TERMS = 100_000
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    est_error: float
    terms_used: int

    def __float__(self) -> float:
        return self.value


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x:g}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i, coef in enumerate(_LANCZOS[1:], start=1):
        acc += coef / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def _series(a: float, b: float, c: float, z: float) -> SpecFunResult:
    """Plain Gauss series; exact when a or b is a non-positive integer."""
    terms = [1.0]
    term = 1.0
    running = 1.0
    small = 0
    n = 0
    while True:
        factor = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        term *= factor
        if term == 0.0:
            break
        terms.append(term)
        running += term
        if abs(term) < 1e-16 * abs(running):
            small += 1
            if small == 3:
                break
        else:
            small = 0
        if n >= MAX_TERMS:
            raise NonConvergent(f"2F1({a:g}, {b:g}; {c:g}; {z:g}) did not converge in {MAX_TERMS} terms")
    value = math.fsum(terms)
    tail = abs(term) * abs(z) / (1.0 - abs(z)) if abs(z) < 1.0 and term != 0.0 else 0.0
    scale = math.fsum(abs(t) for t in terms)
    return SpecFunResult(value, tail + 4.0 * _EPS * scale, n + 1)


def hyp2f1(a: float, b: float, c: float, z: float, transform: bool = True) -> SpecFunResult:
    """Gauss hypergeometric function for real arguments and z < 1.

    Negative ``z`` is mapped into [0, 1) with the Pfaff transformation
    ``F(a, b; c; z) = (1 - z)**(-a) F(a, c - b; c; z / (z - 1))`` before the
    series is summed. ``transform=False`` sums the raw series instead, which
    only converges for |z| < 1.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise PoleAtC(f"c={c:g} is a non-positive integer")
    if not z < 1.0:
        raise DomainError(f"hyp2f1 only supports z < 1, got {z!r}")
    if z == 0.0:
        return SpecFunResult(1.0, 0.0, 1)
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b) or not transform or z > 0.0:
        if not transform and abs(z) >= 1.0 and not (_is_nonpositive_integer(a) or _is_nonpositive_integer(b)):
            raise NonConvergent("untransformed series needs |z| < 1")
        return _series(a, b, c, z)
    w = z / (z - 1.0)
    inner = _series(a, c - b, c, w)
    pre = (1.0 - z) ** (-a)
    return SpecFunResult(pre * inner.value, abs(pre) * inner.est_error, inner.terms_used)


def legendre_argument(z: float) -> float:
    """Map z <= 0 to x = (1 - z/2) / sqrt(1 - z) >= 1."""
    return (1.0 - 0.5 * z) / math.sqrt(1.0 - z)


def legendre_inverse_argument(x: float) -> float:
    """Inverse of :func:`legendre_argument` on the branch z <= 0."""
    if x < 1.0:
        raise DomainError(f"Legendre argument must satisfy x >= 1, got {x!r}")
    y = x + math.sqrt((x - 1.0) * (x + 1.0))
    return 1.0 - y * y


def legendre_p(deg: float, ord: float, x: float) -> SpecFunResult:
    """Legendre function of the first kind P_deg^ord(x) for x >= 1.

    Obtained by solving the identity

        F(nu, beta; 2 beta; z) = 2**(2 beta - 1) Gamma(beta + 1/2) z**(1/2 - beta)
                                 * (1 - z)**((beta - nu - 1/2) / 2) * P_{nu-beta-1/2}^{1/2-beta}(x)

    for P, with beta = 1/2 - ord, nu = deg + 1 - ord and x = (1 - z/2) / sqrt(1 - z).
    For ord = 0 this reduces to P_deg(x) = (1 - z)**((deg + 1) / 2) F(deg + 1, 1/2; 1; z).
    """
    deg, ord, x = float(deg), float(ord), float(x)
    z = legendre_inverse_argument(x)
    beta = 0.5 - ord
    nu = deg + 1.0 - ord
    if ord == 0.0:
        zpow = 1.0
    elif z == 0.0:
        raise DomainError("non-zero order is singular at x = 1")
    elif ord == math.floor(ord):
        zpow = (-1.0) ** int(ord) * (-z) ** ord
    else:
        raise DomainError("non-integer order gives a complex value for x > 1")
    f = hyp2f1(nu, beta, 2.0 * beta, z)
    norm = 2.0 ** (2.0 * beta - 1.0) * gamma_fn(beta + 0.5) * zpow * (1.0 - z) ** ((beta - nu - 0.5) / 2.0)
    return SpecFunResult(f.value / norm, f.est_error / abs(norm), f.terms_used)

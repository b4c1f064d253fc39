"""Evaluators for the Riemann-function family and its number-theoretic kin.

Every truncated series comes back as a :class:`TruncatedSum` carrying a
proven bound for the omitted tail, so downstream comparisons can state
rigorous tolerances instead of eyeballed ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from .oscillatory import (
    complex_quad,
    gl_panels,
    tail_pow_three_half,
    tail_pow_three_half_ibp,
)

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class TruncatedSum:
    """Partial sum of a 1/j^2-type series plus a certified tail bound."""

    value: complex
    tail_bound: float
    terms_used: int

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")


@dataclass(frozen=True)
class RationalTorsion:
    """Torsion angle omega0 = a*pi/b with gcd(a, b) = 1; a = 0 is torsion-free."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 1:
            raise ValueError("need a >= 0 and b >= 1")
        if math.gcd(self.a, self.b) != 1:
            raise ValueError(f"gcd({self.a},{self.b}) != 1")

    @property
    def omega0(self) -> float:
        return math.pi * self.a / self.b

    @classmethod
    def parse(cls, text: str) -> "RationalTorsion":
        a, _, b = text.partition("/")
        return cls(int(a), int(b) if b else 1)


@dataclass(frozen=True)
class ThetaFamilyParams:
    """Indices (n, m) of the generalized sum over frequencies (m j - n)^2."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 1:
            raise ValueError("need n >= 0 and m >= 1")


def riemann_R(t: float, N: int) -> TruncatedSum:
    """t + sum_{1<=|j|<=N} (e^{i t j^2} - 1)/(i j^2); the j = 0 term is t.

    Tail: each omitted term is bounded by 2/j^2, so the two-sided tail over
    |j| > N is below 4/N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    j = np.arange(1, N + 1, dtype=float)
    jsq = j * j
    terms = (np.exp(1j * t * jsq) - 1.0) / (1j * jsq)
    value = t + 2.0 * np.sum(terms)
    return TruncatedSum(complex(value), 4.0 / N, 2 * N + 1)


def duistermaat_phi(t: float, N: int) -> TruncatedSum:
    """sum_{j=1}^{N} e^{i t j^2}/(i j^2); real part is the Riemann sine series."""
    if N < 1:
        raise ValueError("N must be >= 1")
    j = np.arange(1, N + 1, dtype=float)
    jsq = j * j
    value = np.sum(np.exp(1j * t * jsq) / (1j * jsq))
    return TruncatedSum(complex(value), 1.0 / N, N)


def riemann_nm(t: float, params: ThetaFamilyParams, N: int) -> TruncatedSum:
    """sum_{|j|<=N} (e^{i 2 pi t (m j - n)^2} - 1)/(m j - n)^2.

    A degenerate frequency m j - n = 0 contributes its t-derivative limit
    2 pi i t, mirroring the j = 0 convention of ``riemann_R``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    n, m = params.n, params.m
    # the tail bound 4/(m^2 (N - n/m)) needs N strictly beyond the smallest
    # frequencies; extend the summation rather than reject
    N_eff = max(N, n // m + 1)
    j = np.arange(-N_eff, N_eff + 1, dtype=float)
    w = m * j - n
    wsq = w * w
    deg = wsq == 0.0
    wsq_safe = np.where(deg, 1.0, wsq)
    terms = (np.exp(2j * math.pi * t * wsq) - 1.0) / wsq_safe
    terms = np.where(deg, 2j * math.pi * t, terms)
    tail = 4.0 / (m * m * (N_eff - n / m))
    return TruncatedSum(complex(np.sum(terms)), tail, 2 * N_eff + 1)


def r_tilde(t: float, Gamma: float, torsion: RationalTorsion, N: int) -> TruncatedSum:
    """-Gamma sum_{|j|<=N} (e^{i 4 pi^2 t (j - a/2b)^2} - 1)/(i 4 pi^2 (j - a/2b)^2).

    For a = 0, b = 1 this is -Gamma R(4 pi^2 t)/(4 pi^2) term by term.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    c = torsion.a / (2.0 * torsion.b)
    j = np.arange(-N, N + 1, dtype=float)
    w = j - c
    wsq = w * w
    deg = wsq == 0.0
    wsq_safe = np.where(deg, 1.0, wsq)
    four_pi2 = 4.0 * math.pi**2
    terms = (np.exp(1j * four_pi2 * t * wsq) - 1.0) / (1j * four_pi2 * wsq_safe)
    terms = np.where(deg, t, terms)
    value = -Gamma * np.sum(terms)
    # |term| <= 2 Gamma/(4 pi^2 w^2); integral bounds on both one-sided tails
    tail = (abs(Gamma) / (2.0 * math.pi**2)) * (1.0 / (N - c) + 1.0 / (N + c))
    return TruncatedSum(complex(value), tail, 2 * N + 1)


def gauss_sum(p: int, q: int, m: int = 1, n: int = 0) -> complex:
    """tau_0 = sum_{r=0}^{q-1} e^{i 2 pi p (m r - n)^2 / q}.

    |tau_0| <= sqrt(2 q) always; |tau_0| = sqrt(q) for odd q with gcd(m,q)=1.
    """
    if q < 1 or m < 1 or n < 0:
        raise ValueError("need q >= 1, m >= 1, n >= 0")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p},{q}) != 1")
    r = np.arange(q, dtype=np.int64)
    # exact residues keep the phases on the unit circle for large arguments
    res = (p * (m * r - n) ** 2) % q
    return complex(np.sum(np.exp(2j * math.pi * res / q)))


def talbot_coefficients(p: int, q: int) -> np.ndarray:
    """Coefficients tau_k of e^{i (p/q) Delta/(2 pi)} on the unit Dirac comb.

    The free flow at rational time p/(2 pi q) maps sum_k delta(x - k) to
    sum_k tau_k delta(x - k/q) with tau_k = (1/q) sum_r e^{2 pi i(-p r^2 + k r)/q}.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p},{q}) != 1")
    r = np.arange(q, dtype=np.int64)
    k = np.arange(q, dtype=np.int64)
    res = (-p * r[None, :] ** 2 + k[:, None] * r[None, :]) % q
    return np.sum(np.exp(2j * math.pi * res / q), axis=1) / q


def _gaussian_comb_terms(decay: float, tol: float) -> int:
    # smallest N with 2 sum_{j>N} e^{-decay j^2} < tol, via the geometric bound
    # sum_{j>N} e^{-decay j^2} <= e^{-decay (N+1)^2} / (1 - e^{-decay(2N+3)})
    N = max(1, int(math.sqrt(max(math.log(4.0 / tol), 1.0) / decay)))
    while True:
        ratio = math.exp(-decay * (2 * N + 3))
        bound = 2.0 * math.exp(-decay * (N + 1) ** 2) / (1.0 - ratio)
        if bound < tol:
            return N
        N += max(1, N // 4)


def poisson_dual_check(t: float, eps: float, N: int) -> float:
    """Discrepancy of the Gaussian-regularized Poisson identity.

    Returns |sum_{|j|<=N'} e^{-z j^2} - sqrt(pi/z) sum_{|j|<=N''} e^{-pi^2 j^2/z}|
    with z = eps - 4 pi^2 i t; both truncations are chosen so the certified
    tails fall below 1e-12 (the given N acts as a floor on the primal side).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    z = eps - 4j * math.pi**2 * t
    n1 = max(N, _gaussian_comb_terms(eps, 1e-12))
    j = np.arange(-n1, n1 + 1, dtype=float)
    lhs = np.sum(np.exp(-z * j * j))
    dual_decay = math.pi**2 * eps / abs(z) ** 2
    pref = np.sqrt(math.pi / z)
    n2 = _gaussian_comb_terms(dual_decay, 1e-12 / abs(pref))
    j2 = np.arange(-n2, n2 + 1, dtype=float)
    rhs = pref * np.sum(np.exp(-math.pi**2 * j2 * j2 / z))
    return float(abs(lhs - rhs))


def corner_integral_term(j: int, t: float) -> complex:
    """int_0^t e^{-i j^2/(4 tau)} tau^{-1/2} dtau; exactly 2 sqrt(t) at j = 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    if j == 0:
        return 2.0 * math.sqrt(t)
    a = j * j / (4.0 * t)
    return complex(abs(j) / 2.0 * tail_pow_three_half(np.array([a]))[0])


def corner_integral(t: float, n: int, nu: float = 1.0) -> complex:
    """int_0^t sum_{|j| <= n^nu} e^{-i j^2/(4 tau)} tau^{-1/2} dtau.

    Each oscillatory term is reduced by u = j^2/(4 tau) to the Fresnel-type
    tail integral F(a) = int_a^inf e^{-iu} u^{-3/2} du with its analytic
    integration-by-parts continuation for large a.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    M = int(math.floor(n**nu))
    value = 2.0 * math.sqrt(t)
    if M >= 1:
        j = np.arange(1, M + 1, dtype=float)
        value += complex(np.sum(j * tail_pow_three_half(j * j / (4.0 * t))))
    return complex(value)


def helix_integral(t: float, torsion: RationalTorsion, N: int) -> complex:
    """Closed form of int_0^t e^{i tau w0^2} sum_j e^{-i(j+2 tau w0)^2/(4 tau)} dtau/sqrt(tau).

    Poisson summation turns the integral into the dual-lattice sum
    (2 b^2/(pi sqrt(pi))) e^{-i pi/4} sum_j (e^{i pi^2 (t/b^2)(2bj-a)^2} - 1)/(i (2bj-a)^2).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    a, b = torsion.a, torsion.b
    j = np.arange(-N, N + 1, dtype=float)
    w = 2.0 * b * j - a
    wsq = w * w
    deg = wsq == 0.0
    wsq_safe = np.where(deg, 1.0, wsq)
    theta = math.pi**2 * t / b**2
    terms = (np.exp(1j * theta * wsq) - 1.0) / (1j * wsq_safe)
    terms = np.where(deg, theta, terms)
    pref = (2.0 * b**2 / (math.pi * SQRT_PI)) * np.exp(-1j * math.pi / 4)
    return complex(pref * np.sum(terms))


def helix_integral_quadrature(t: float, torsion: RationalTorsion, J: int = 20000) -> complex:
    """Primal-side oracle for :func:`helix_integral`.

    Sums int_0^t e^{i tau w0^2} e^{-i (j + 2 tau w0)^2/(4 tau)} tau^{-1/2} dtau
    term by term: adaptive quadrature (in u = j^2/(4 tau)) for small |j|, a
    certified integration-by-parts series for the rest.  Never touches the
    dual-lattice closed form, so agreement validates the Poisson step.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    w0 = torsion.omega0
    total = 2.0 * math.sqrt(t)  # j = 0 term, exact

    quad_js = [j for j in range(1, J + 1) if j * j / (4.0 * t) < 40.0]
    for j in quad_js:
        a = j * j / (4.0 * t)
        seg, _ = complex_quad(lambda u: np.exp(-1j * u) * u**-1.5, a, 40.0, limit=400)
        tail, _ = tail_pow_three_half_ibp(np.array([40.0]))
        kj = (j / 2.0) * (seg + tail[0])
        total += 2.0 * math.cos(j * w0) * kj  # e^{-ij w0} K_j + e^{+ij w0} K_{-j}

    j_rest = np.arange(len(quad_js) + 1, J + 1, dtype=float)
    if j_rest.size:
        vals, _ = tail_pow_three_half_ibp(j_rest * j_rest / (4.0 * t))
        kj = 0.5 * j_rest * vals
        total += complex(np.sum(2.0 * np.cos(j_rest * w0) * kj))
    return complex(total)


def polygon_coefficient(M: int) -> float:
    """c~_M = sqrt(-(M^2/(4 pi^2)) ln cos(pi/M)) for a regular M-gon, M >= 3."""
    if M < 3:
        raise ValueError("M must be >= 3")
    x = math.pi / M
    # ln cos x via log1p(cos x - 1) with cos x - 1 = -2 sin^2(x/2), which
    # stays fully accurate as M grows and cos(pi/M) -> 1
    log_cos = math.log1p(-2.0 * math.sin(0.5 * x) ** 2)
    return math.sqrt(-(M**2) / (4.0 * math.pi**2) * log_cos)


# limit of polygon_coefficient as M -> inf (ln cos(pi/M) ~ -pi^2/(2 M^2))
POLYGON_COEFFICIENT_LIMIT = 1.0 / (2.0 * math.sqrt(2.0))

"""Closed forms for the chirp integrals that drive every time stepper here.

The self-similar phases exp(-i c/(4 tau)) turn, under v = c/(4 tau), into
segments of the three model integrals

    int e^{-iv} v^{-1/2} dv,    int e^{-iv} v^{-3/2} dv,    int e^{-iv} v^{-1} dv,

which reduce to Fresnel integrals, to sine/cosine integrals, or (for large
arguments) to certified integration-by-parts series.  Evaluating them exactly
per step is what lets geometric-in-time integrators take steps that are huge
compared to the local oscillation period.
"""

from __future__ import annotations

import numpy as np
from scipy.special import fresnel, sici

SQRT_PI = np.sqrt(np.pi)
# exp(-i a) boundary series for int_a^inf e^{-iu} u^{-3/2} du switches to the
# asymptotic branch here; both branches agree to ~1e-12 at the seam.
_ASYM_SWITCH = 2000.0
_ASYM_TERMS = 10

_E_INF = 0.5 * SQRT_PI * np.exp(1j * np.pi / 4)  # int_0^inf e^{iv^2} dv


def fresnel_cexp(x):
    """int_0^x exp(+i v^2) dv for real x >= 0, vectorized."""
    x = np.asarray(x, dtype=float)
    s, c = fresnel(x * np.sqrt(2.0 / np.pi))
    return np.sqrt(np.pi / 2.0) * (c + 1j * s)


def seg_pow_half(lo, hi):
    """int_lo^hi e^{-iu} u^{-1/2} du, 0 <= lo <= hi (elementwise)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    return 2.0 * (np.conj(fresnel_cexp(np.sqrt(hi))) - np.conj(fresnel_cexp(np.sqrt(lo))))


def tail_pow_half(a):
    """int_a^inf e^{-iu} u^{-1/2} du."""
    a = np.asarray(a, dtype=float)
    return 2.0 * (np.conj(_E_INF) - np.conj(fresnel_cexp(np.sqrt(a))))


def _tail_32_fresnel(a):
    # One integration by parts moves u^{-3/2} to the Fresnel kernel u^{-1/2}.
    return 2.0 * np.exp(-1j * a) / np.sqrt(a) - 2j * tail_pow_half(a)


def _tail_32_series(a, terms=_ASYM_TERMS):
    # int_a^inf e^{-iu} u^{-3/2} du = e^{-ia} sum_k c_k a^{-3/2-k},
    # c_0 = -i, c_{k+1} = i (3/2 + k) c_k; remainder certified below the
    # switch tolerance for a >= _ASYM_SWITCH.
    a = np.asarray(a, dtype=float)
    acc = np.zeros(a.shape, dtype=complex)
    coef = -1j
    apow = a ** -1.5
    for k in range(terms):
        acc += coef * apow
        coef *= 1j * (1.5 + k)
        apow = apow / a
    return np.exp(-1j * a) * acc


def tail_pow_three_half(a):
    """F(a) = int_a^inf e^{-iu} u^{-3/2} du for a > 0, vectorized."""
    a = np.asarray(a, dtype=float)
    out = np.empty(a.shape, dtype=complex)
    small = a < _ASYM_SWITCH
    if np.any(small):
        out[small] = _tail_32_fresnel(a[small])
    if np.any(~small):
        out[~small] = _tail_32_series(a[~small])
    return out


def seg_pow_three_half(lo, hi):
    """int_lo^hi e^{-iu} u^{-3/2} du, 0 < lo <= hi (elementwise)."""
    return tail_pow_three_half(lo) - tail_pow_three_half(hi)


def seg_recip(lo, hi):
    """int_lo^hi e^{-iu} u^{-1} du, 0 < lo <= hi (elementwise)."""
    si_hi, ci_hi = sici(hi)
    si_lo, ci_lo = sici(lo)
    return (ci_hi - ci_lo) - 1j * (si_hi - si_lo)


def chirp_seg_sqrt(c, t1, t2):
    """int_{t1}^{t2} exp(-i c/(4 tau)) tau^{-1/2} dtau for c > 0, 0 < t1 < t2."""
    c = np.asarray(c, dtype=float)
    rc = np.sqrt(c)
    return 0.5 * rc * seg_pow_three_half(c / (4.0 * t2), c / (4.0 * t1))


def chirp_seg_pow32(c, t1, t2):
    """int_{t1}^{t2} exp(-i c/(4 tau)) tau^{-3/2} dtau for c > 0, 0 < t1 < t2."""
    c = np.asarray(c, dtype=float)
    return (2.0 / np.sqrt(c)) * seg_pow_half(c / (4.0 * t2), c / (4.0 * t1))


def chirp_seg_recip(delta, t1, t2):
    """int_{t1}^{t2} exp(-i delta/(4 tau)) tau^{-1} dtau, any real delta."""
    delta = np.asarray(delta, dtype=float)
    out = np.empty(delta.shape, dtype=complex)
    zero = delta == 0.0
    if np.any(zero):
        out[zero] = np.log(t2 / t1)
    pos = delta > 0
    if np.any(pos):
        d = delta[pos]
        out[pos] = seg_recip(d / (4.0 * t2), d / (4.0 * t1))
    neg = delta < 0
    if np.any(neg):
        d = -delta[neg]
        out[neg] = np.conj(seg_recip(d / (4.0 * t2), d / (4.0 * t1)))
    return out


def tail_pow_three_half_ibp(a, terms=6):
    """F(a) by the raw integration-by-parts series with a certified bound.

    Independent of the Fresnel route (uses only exp); intended as the oracle
    side of dual-route checks.  Returns (value, error_bound).
    """
    a = np.asarray(a, dtype=float)
    acc = np.zeros(a.shape, dtype=complex)
    coef = -1j
    apow = a ** -1.5
    prod = 1.0
    for k in range(terms):
        acc += coef * apow
        coef *= 1j * (1.5 + k)
        apow = apow / a
        prod *= 1.5 + k
    bound = prod * a ** (-0.5 - terms) / (0.5 + terms)
    return np.exp(-1j * a) * acc, bound


def complex_quad(f, a, b, **kw):
    """scipy.integrate.quad of a complex integrand, returning (value, abserr)."""
    from scipy.integrate import quad

    re, re_err = quad(lambda s: f(s).real, a, b, **kw)
    im, im_err = quad(lambda s: f(s).imag, a, b, **kw)
    return re + 1j * im, re_err + im_err


def gl_panels(f, a, b, n_panels, order=8):
    """Composite Gauss-Legendre quadrature of a vectorized complex integrand."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    vals = f(pts).reshape(n_panels, order)
    return np.sum(vals * weights[None, :] * half[:, None])

"""Multifractal diagnostics: smoothed exponential sums, structure functions,
Hölder-exponent regressions, continued fractions, and the Frisch-Parisi
transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import sici

from .oscillatory import complex_quad, gl_panels
from .theta_sums import ThetaFamilyParams, TruncatedSum, gauss_sum

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# smooth cutoff
# ---------------------------------------------------------------------------

def _ramp(u):
    """C^inf ramp: 0 for u <= 0, 1 for u >= 1, e^{-1/u}/(e^{-1/u}+e^{-1/(1-u)}) between."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    a = np.exp(-1.0 / um)
    b = np.exp(-1.0 / (1.0 - um))
    out[mid] = a / (a + b)
    return out


def smooth_cutoff(x):
    """Even C^inf cutoff: 1 on 1 <= |x| <= 2, 0 for |x| <= 1/2 and |x| >= 4."""
    ax = np.abs(np.asarray(x, dtype=float))
    return _ramp((ax - 0.5) / 0.5) * _ramp((4.0 - ax) / 2.0)


def _support_j(N: int) -> np.ndarray:
    """Integer support of sigma(j/N): N/2 < |j| < 4N, both signs."""
    hi = 4 * N - 1
    lo = N // 2
    j = np.arange(lo, hi + 1)
    j = j[smooth_cutoff(j / N) > 0.0]
    return np.concatenate([-j[::-1], j])


def smoothed_sum(N: int, t: float, x: float) -> complex:
    """S_N(t, x) = sum_j sigma(j/N) e^{2 pi i (t j^2 - x j)} (finite sum)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    j = _support_j(N).astype(float)
    return complex(np.sum(smooth_cutoff(j / N) * np.exp(2j * math.pi * (t * j * j - x * j))))


# ---------------------------------------------------------------------------
# structure functions I_{N,p}
# ---------------------------------------------------------------------------

def _grid_abs2(N: int, params: ThetaFamilyParams) -> np.ndarray:
    """|S_N(t_k, 2 n t_k/m)|^2 on the Riemann grid t_k = k/K, K = 256 N^2.

    With x = 2nt/m every term has frequency (m j^2 - 2 n j)/m, an integer
    multiple of 1/m, so the whole grid is one length-(m K) inverse DFT of the
    coefficient array: exact synthesis, no per-sample summation.
    """
    K = 256 * N * N
    L = params.m * K
    if L > 80_000_000:
        raise ValueError("grid too large; reduce N or m")
    j = _support_j(N)
    g = params.m * j.astype(np.int64) ** 2 - 2 * params.n * j.astype(np.int64)
    if np.max(np.abs(g)) >= L // 2:
        raise ValueError("frequency exceeds the alias-safe band; increase N or reduce n")
    coeff = np.zeros(L, dtype=complex)
    np.add.at(coeff, g % L, smooth_cutoff(j / N))
    S = np.fft.ifft(coeff) * L
    return np.abs(S[:K]) ** 2


def structure_function(N: int, p: float, params: ThetaFamilyParams) -> float:
    """I_{N,p} = int_0^1 |S_N(t, 2nt/m)|^p dt by Riemann sum, step 1/(256 N^2)."""
    if N < 16:
        raise ValueError("N must be >= 16")
    if not 1.0 <= p <= 8.0:
        raise ValueError("p must lie in [1, 8]")
    a2 = _grid_abs2(N, params)
    return float(np.mean(a2 ** (p / 2.0)))


def structure_function_table(N_list, p_list, params: ThetaFamilyParams) -> dict:
    """I_{N,p} over all (N, p), evaluating each t-grid once and reusing it."""
    table = {}
    for N in N_list:
        a2 = _grid_abs2(N, params)
        for p in p_list:
            table[(N, p)] = float(np.mean(a2 ** (p / 2.0)))
    return table


def parseval_reference(N: int, params: ThetaFamilyParams) -> float:
    """Exact value of int_0^1 |S_N|^2 dt by Parseval.

    Terms sharing a frequency m j^2 - 2 n j are collected before squaring;
    for n = 0 the j and -j terms coincide, so the integral equals
    sum_g |sigma(j/N) + sigma(-j/N)|^2 over distinct frequencies g
    (= 4 sum_{j>=1} sigma(j/N)^2), twice the naive single-sided sum.
    """
    j = _support_j(N)
    g = params.m * j.astype(np.int64) ** 2 - 2 * params.n * j.astype(np.int64)
    w = smooth_cutoff(j / N)
    order = np.argsort(g, kind="stable")
    gs, ws = g[order], w[order]
    total, acc, cur = 0.0, 0.0, None
    for gi, wi in zip(gs, ws):
        if gi != cur:
            total += acc * acc
            acc, cur = 0.0, gi
        acc += wi
    total += acc * acc
    return float(total)


@dataclass(frozen=True)
class EtaFit:
    """Least-squares slope of log I_{N,p} vs log N against the predicted law."""

    p: float
    fitted_slope: float
    predicted_slope: float
    eta_predicted: float
    table: dict = field(repr=False, default_factory=dict)


def predicted_structure_slope(p: float) -> float:
    """p - 2 for p > 4, p/2 for p < 4, 2 (log-corrected) at p = 4."""
    if p > 4.0:
        return p - 2.0
    if p < 4.0:
        return p / 2.0
    return 2.0


def analytic_eta(p):
    """eta(p) = 1 + p/2 for p >= 4, 3p/4 for p < 4."""
    p = np.asarray(p, dtype=float)
    return np.minimum(1.0 + p / 2.0, 0.75 * p)


def eta_fit(p: float, N_list, params: ThetaFamilyParams) -> EtaFit:
    if len(N_list) < 3:
        raise ValueError("need at least 3 dyadic N values")
    table = structure_function_table(N_list, [p], params)
    logN = np.log([float(N) for N in N_list])
    logI = np.log([table[(N, p)] for N in N_list])
    slope = float(np.polyfit(logN, logI, 1)[0])
    eta_pred = float(analytic_eta(p)) if p != 4.0 else 3.0
    return EtaFit(p, slope, predicted_structure_slope(p), eta_pred,
                  {N: table[(N, p)] for N in N_list})


_FP_GRID = np.arange(1, 4001) * 0.01  # p in [0.01, 40]


def frisch_parisi(eta, beta: float) -> float:
    """inf over the p grid (step 0.01) of beta*p - eta(p) + 1.

    ``eta`` may be a callable or a table {p: eta(p)} / (p_array, eta_array).
    """
    if callable(eta):
        vals = np.asarray(eta(_FP_GRID), dtype=float)
        p = _FP_GRID
    elif isinstance(eta, dict):
        p = np.array(sorted(eta), dtype=float)
        vals = np.array([eta[k] for k in sorted(eta)], dtype=float)
    else:
        p, vals = (np.asarray(a, dtype=float) for a in eta)
    return float(np.min(beta * p - vals + 1.0))


# ---------------------------------------------------------------------------
# continued fractions and constructed irrationals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuedFractionExpansion:
    """Digits, convergents p_k/q_k, and approximation exponents r_k of x."""

    x: float
    digits: list
    p: list
    q: list
    r: list              # r_k = -log|x - p_k/q_k| / log q_k (NaN where undefined)
    exact: bool          # terminated because x is (numerically) rational

    def convergents(self):
        return list(zip(self.p, self.q))


def continued_fraction(x: float, K: int) -> ContinuedFractionExpansion:
    """Standard continued-fraction expansion of x in (0, 1up), K digits max.

    Stops early (``exact=True``) when the remainder is indistinguishable from
    zero in double precision, i.e. x is numerically rational.
    """
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0,1)")
    if K < 1:
        raise ValueError("K must be >= 1")
    digits, ps, qs = [], [], []
    p0, q0, p1, q1 = 1, 0, 0, 1  # (p_{-1}, q_{-1}), (p_0, q_0) seeds
    y = 1.0 / x
    exact = False
    for _ in range(K):
        a = int(math.floor(y))
        digits.append(a)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        ps.append(p1)
        qs.append(q1)
        frac = y - a
        if frac < 1e-12 or abs(x - p1 / q1) < 1e-15:
            exact = True
            break
        y = 1.0 / frac
    rs = []
    for pk, qk in zip(ps, qs):
        err = abs(x - pk / qk)
        rs.append(float("nan") if (qk < 2 or err == 0.0) else -math.log(err) / math.log(qk))
    return ContinuedFractionExpansion(x, digits, ps, qs, rs, exact)


def irrationality_target(r: float, K: int, force_odd: bool = True):
    """Construct x whose convergents satisfy |x - p_k/q_k| ~ q_k^{-r}.

    Digits follow a_{k+1} = max(1, ceil(q_k^{r-2})); with ``force_odd`` a digit
    is bumped when needed so that infinitely many q_k are odd.  Construction is
    exact integer arithmetic; r_k is measured against a deep truncation.
    Growth of q_k beyond ~1e60 stops the construction early and the achieved
    depth is reported through the expansion length.
    """
    if r < 2.0:
        raise ValueError("r must be >= 2")
    if K < 1:
        raise ValueError("K must be >= 1")
    digits = [2]  # x in (0,1), start near 1/2
    p0, q0, p1, q1 = 1, 0, 0, 1
    ps, qs = [], []
    for _ in range(K + 3):  # a few extra levels so the last measured r_k is honest
        a = digits[-1]
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        ps.append(p1)
        qs.append(q1)
        if q1 > 10**60:
            break
        nxt = max(1, math.ceil(q1 ** (r - 2.0)))
        if force_odd and (nxt * q1 + q0) % 2 == 0 and q1 % 2 == 1:
            nxt += 1
        digits.append(nxt)
    digits = digits[: len(ps)]
    # exponents measured against the deepest convergent (exact integers)
    pK, qK = ps[-1], qs[-1]
    rs = []
    for pk, qk in zip(ps[:-1], qs[:-1]):
        num = abs(pK * qk - pk * qK)
        if qk < 2 or num == 0:
            rs.append(float("nan"))
        else:
            rs.append((math.log(qK) + math.log(qk) - math.log(num)) / math.log(qk))
    rs.append(float("nan"))
    x = pK / qK
    return x, ContinuedFractionExpansion(x, digits, ps, qs, rs, False)


# ---------------------------------------------------------------------------
# pointwise Hölder regressions
# ---------------------------------------------------------------------------

def _value_and_tail(v):
    if isinstance(v, TruncatedSum):
        return v.value, v.tail_bound
    return complex(v), 0.0


def holder_estimate(f, x: float, h_min: float, h_max: float, n_scales: int = 16) -> float:
    """Slope of log sup_{|h'|<=h} |f(x+h') - f(x)| vs log h.

    ``f`` may return a complex number or a :class:`TruncatedSum`; in the
    latter case its tail bound must stay below h_min^{3/4} so truncation
    noise cannot pollute the regression.
    """
    if not 0.0 < h_min < h_max:
        raise ValueError("need 0 < h_min < h_max")
    if n_scales < 3:
        raise ValueError("need at least 3 scales")
    base, tail0 = _value_and_tail(f(x))
    budget = h_min**0.75
    if tail0 > budget:
        raise ValueError(f"evaluator tail bound {tail0:.3g} exceeds {budget:.3g}")
    # the running maximum over the evaluated two-sided offsets realizes the
    # sup over |h'| <= h; fitting on the offsets keeps the calibration case
    # f(x) = x at slope exactly one
    offsets = np.geomspace(h_min, h_max, n_scales)
    incr = np.empty(offsets.size)
    for i, h in enumerate(offsets):
        vp, tp = _value_and_tail(f(x + h))
        vm, tm = _value_and_tail(f(x - h))
        if max(tp, tm) > budget:
            raise ValueError("evaluator tail bound exceeds the precision budget")
        incr[i] = max(abs(vp - base), abs(vm - base))
    sup = np.maximum.accumulate(incr)
    return float(np.polyfit(np.log(offsets), np.log(sup), 1)[0])


@dataclass(frozen=True)
class IncrementFit:
    """Power-law fit |f(p/q + h) - f(p/q)| ~ A h^e near a rational point."""

    amplitude: float
    exponent: float
    amplitude_reference: float | None  # |J(0)|/(m sqrt(q)), odd q only
    residual_ratio_max: float          # residual / min(h sqrt q, (hq)^{3/2})
    residual_slope: float


def rational_increment_fit(params: ThetaFamilyParams, p: int, q: int, h_list,
                           N: int = 10**6) -> IncrementFit:
    """Fit the sqrt-increment law of the generalized sum at t = p/q.

    Checks e ~ 1/2 with A ~ |J(0)|/(m sqrt q) for odd q, and that the residual
    after subtracting (z0/m)(tau0/q) sqrt(h) stays inside the envelope
    C min(h sqrt q, (h q)^{3/2}).
    """
    if math.gcd(p, q) != 1:
        raise ValueError(f"gcd({p},{q}) != 1")
    h_list = np.sort(np.asarray(h_list, dtype=float))
    if np.any(h_list <= 0):
        raise ValueError("h values must be positive")
    from .theta_sums import riemann_nm

    t0 = p / q
    base = riemann_nm(t0, params, N).value
    deltas = np.array([riemann_nm(t0 + h, params, N).value - base for h in h_list])

    exponent, log_amp = np.polyfit(np.log(h_list), np.log(np.abs(deltas)), 1)
    amp = float(np.exp(log_amp))

    tau0 = gauss_sum(p, q, params.m, params.n)
    z0 = J_function(0.0)

    # residual scan on its own h range: large enough that the envelope
    # clears the truncation floor 4/N, small enough that sqrt(h) m q << 1
    h_floor = max((20.0 * 4.0 / N) ** (2.0 / 3.0) / q, 1.2 * 4.0 / N * math.sqrt(q))
    h_res = np.geomspace(1.5 * h_floor, max(30.0 * h_floor, 1e-2), 8)
    d_res = np.array([riemann_nm(t0 + h, params, N).value - base for h in h_res])
    pred = (z0 / params.m) * (tau0 / q) * np.sqrt(h_res)
    residual = np.abs(d_res - pred)
    envelope = np.minimum(h_res * math.sqrt(q), (h_res * q) ** 1.5)
    ratio_max = float(np.max(residual / envelope))
    res_slope = float(np.polyfit(np.log(h_res), np.log(residual), 1)[0])

    ref = abs(z0) / (params.m * math.sqrt(q)) if q % 2 == 1 else None
    return IncrementFit(amp, float(exponent), ref, ratio_max, res_slope)


# ---------------------------------------------------------------------------
# the kernel J(x) = int (e^{2 pi i s^2} - 1)/s^2 e^{-i s x} ds
# ---------------------------------------------------------------------------

_J_WINDOW = 50.0  # beyond |s| = 50 two integrations by parts bound the tail


def J_function(x: float) -> complex:
    """J(x) by quadrature on |s| <= 50 plus analytic integration-by-parts tails.

    J(0) = 2 sqrt(2) pi e^{3 i pi/4}; |J(x)| decays like 1/x^2.
    """
    x = abs(float(x))  # even in x
    W = _J_WINDOW
    U = W * W

    # smooth part near the origin
    def near(s):
        s = np.asarray(s, dtype=float)
        out = np.empty(s.shape, dtype=complex)
        tiny = np.abs(s) < 1e-8
        st = s[~tiny]
        out[~tiny] = (np.exp(2j * math.pi * st * st) - 1.0) / (st * st) * np.cos(st * x)
        out[tiny] = 2j * math.pi
        return out

    head = gl_panels(near, 0.0, 1.0, 64, order=10)

    # oscillatory stretch in u = s^2: (e^{2 pi i u} - 1) cos(x sqrt u) u^{-3/2} / 2
    def osc(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * (np.exp(2j * math.pi * u) - 1.0) * np.cos(x * np.sqrt(u)) * u**-1.5

    n_panels = int(4 * (U - 1.0)) + int(8 * x)  # >= 4 panels per unit-u cycle
    body = gl_panels(osc, 1.0, U, n_panels, order=8)

    # static tail: -int_W^inf cos(s x)/s^2 ds
    if x == 0.0:
        static = -1.0 / W
    else:
        si, _ = sici(W * x)
        static = -(math.cos(W * x) / W - x * (math.pi / 2.0 - si))

    # oscillatory tail, two integrations by parts in u with phase 2 pi u:
    # (1/2) int_U^inf e^{2 pi i u} g(u) du, g = cos(x sqrt u) u^{-3/2}
    ru = math.sqrt(U)
    g = math.cos(x * ru) * U**-1.5
    gp = -0.5 * x * math.sin(x * ru) * U**-2.0 - 1.5 * math.cos(x * ru) * U**-2.5
    e = np.exp(2j * math.pi * U)
    osc_tail = 0.5 * (-e * g / (2j * math.pi) + e * gp / (2j * math.pi) ** 2)

    return complex(2.0 * (head + body + static + osc_tail))


J_ZERO_EXACT = 2.0 * math.sqrt(2.0) * math.pi * np.exp(3j * math.pi / 4)

"""One-dimensional weighted-inequality machinery for the weight w = psi^(N-1).

Central objects: the cumulative integral W(r) of w, the tail integral T(r)
of 1/w (finished off past the sampled range by a fitted analytic tail), the
product

    Q(r) = W(r)^(1/p) * T(r)^(1/2),

and its global supremum B(w, p).  Finiteness of B is equivalent to the
weighted embedding (int |g|^p w)^(1/p) <= C (int |g'|^2 w)^(1/2) over
compactly supported g, and the best constant C is enclosed in

    B <= C <= (1 + p/2)^(1/p) * (1 + 2/p)^(1/2) * B .

Divergence of B is a reported value, never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import (
    BelowCriticalExponent,
    DivergentPoint,
    InvalidExponent,
    TailUnclassifiable,
    ValidationError,
)
from .geometry import Constant, ExponentialPower, ModelFunction, Polynomial, PowerLaw, QuasiEuclideanOptimal

__all__ = [
    "WeightMeasure",
    "TailModel",
    "SupremumReport",
    "RegressionFit",
    "build_weight",
    "Q_at",
    "supremum_B",
    "sandwich",
    "sandwich_factor",
    "lemma41_bound",
    "lemma42_bound",
    "lemma42_constants",
    "critical_exponents",
    "mckean_bounds",
    "scaling_regression",
    "near_extremal",
    "plin_norms",
    "sobolev_critical",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)


def sobolev_critical(N: int) -> float:
    """2N/(N-2) for N >= 3, infinity for N = 2."""
    return math.inf if N <= 2 else 2.0 * N / (N - 2.0)


# ---------------------------------------------------------------------------
# analytic tails
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailModel:
    """Fitted large-radius form of psi.

    family 'exponential': psi ~ amplitude * r^prefactor * exp(rate * r^shape)
    family 'power':       psi ~ amplitude * r^shape
    family 'divergent':   1/psi^(N-1) is not integrable at infinity
    """

    family: str
    shape: float = 0.0
    rate: float = 0.0
    amplitude: float = 1.0
    prefactor: float = 0.0
    residual: float = 0.0


def _fit_residual(rr, y, y_fit):
    return float(np.sqrt(np.mean((y - y_fit) ** 2)) / max(1.0, np.sqrt(np.mean(y * y))))


def _classify_tail(model: ModelFunction) -> TailModel:
    prof = model.profile
    rr = np.geomspace(model.Rmax / 10.0, model.Rmax, 160)
    y = np.asarray(model.logpsi(rr), float)

    def exp_fit(s, pf):
        # least squares of (y - pf log r) against [r^s, 1]
        rhs = y - pf * np.log(rr)
        A = np.stack([rr ** s, np.ones_like(rr)], axis=1)
        coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        resid = _fit_residual(rr, rhs, A @ coef)
        return TailModel("exponential", shape=s, rate=float(coef[0]),
                         amplitude=float(math.exp(coef[1])), prefactor=pf,
                         residual=resid)

    def power_fit(gamma=None):
        A = (np.stack([np.log(rr), np.ones_like(rr)], axis=1) if gamma is None
             else np.stack([np.ones_like(rr)], axis=1))
        rhs = y if gamma is None else y - gamma * np.log(rr)
        coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if gamma is None:
            gamma, logamp = float(coef[0]), float(coef[1])
        else:
            logamp = float(coef[0])
        fit = gamma * np.log(rr) + logamp
        return TailModel("power", shape=gamma, amplitude=float(math.exp(logamp)),
                         residual=_fit_residual(rr, y, fit))

    if isinstance(prof, Constant):
        if prof.k == 0.0:
            tm = TailModel("power", shape=1.0, amplitude=1.0)
        else:
            s = math.sqrt(prof.k)
            tm = TailModel("exponential", shape=1.0, rate=s, amplitude=0.5 / s)
    elif isinstance(prof, PowerLaw):
        if prof.beta < 2.0:
            s = 1.0 - prof.beta / 2.0
            tm = exp_fit(s, (1.0 - s) / 2.0)
        else:
            q1 = (1.0 + math.sqrt(1.0 + 4.0 * prof.c0)) / 2.0
            tm = power_fit(q1)
    elif isinstance(prof, QuasiEuclideanOptimal):
        q1, _ = prof.exponents
        a1, _ = prof.coefficients
        tm = TailModel("power", shape=q1, amplitude=a1)
    elif isinstance(prof, Polynomial):
        cands = [(q, a) for q, a in ((prof.q1, prof.a1), (prof.q2, prof.a2)) if a != 0.0]
        q, a = max(cands, key=lambda t: t[0])
        if q <= 0 or a < 0:
            tm = TailModel("divergent")
        else:
            tm = TailModel("power", shape=q, amplitude=a)
    elif isinstance(prof, ExponentialPower):
        tm = TailModel("divergent")
    else:
        # imported table: choose whichever analytic family explains the tail
        tm = min((power_fit(), exp_fit(1.0, 0.0)), key=lambda t: t.residual)
        if tm.residual > 1e-3:
            raise TailUnclassifiable(
                f"tail fit residual {tm.residual:.2e} exceeds 1e-3")
        if tm.family == "exponential" and tm.rate <= 0:
            tm = TailModel("divergent")

    # a power-decay weight whose reciprocal is not integrable has no finite tail
    if tm.family == "power" and tm.shape * (model.N - 1) <= 1.0 + 1e-12:
        tm = TailModel("divergent", shape=tm.shape, amplitude=tm.amplitude,
                       residual=tm.residual)
    if tm.family != "divergent" and tm.residual > 1e-3:
        raise TailUnclassifiable(f"tail fit residual {tm.residual:.2e} exceeds 1e-3")
    return tm


def _tail_integral(model: ModelFunction, tail: TailModel) -> float:
    """T(Rmax) = integral of psi^(1-N) past the sampled range."""
    R, N = model.Rmax, model.N
    yR = float(model.logpsi(np.float64(R)))
    if tail.family == "divergent":
        return math.inf
    if tail.family == "power":
        g = tail.shape * (N - 1)
        if isinstance(model.profile, (QuasiEuclideanOptimal, Polynomial)):
            if isinstance(model.profile, QuasiEuclideanOptimal):
                q1, q2 = model.profile.exponents
                a1, a2 = model.profile.coefficients
            else:
                q1, q2, a1, a2 = (model.profile.q1, model.profile.q2,
                                  model.profile.a1, model.profile.a2)
            # substitute u = 1/s: finite interval, integrand u^(g-2) at 0
            val, _ = quad(lambda u: (a1 * u ** -q1 + a2 * u ** -q2) ** (1.0 - N)
                          / (u * u), 0.0, 1.0 / R)
            return val
        return R * math.exp((1.0 - N) * yR) / (g - 1.0)
    # exponential family: integrate the anchored, shifted integrand
    s, a, pf = tail.shape, tail.rate, tail.prefactor

    def shifted(r):
        d = pf * math.log(r / R) + a * (r ** s - R ** s)
        return math.exp(-(N - 1.0) * d)

    span = (R ** s + 45.0 / ((N - 1.0) * a)) ** (1.0 / s) - R
    val, _ = quad(shifted, R, R + span, limit=200)
    return val * math.exp((1.0 - N) * yR)


# ---------------------------------------------------------------------------
# the weight object
# ---------------------------------------------------------------------------

def _gl5_between(f, lo, hi):
    """Vectorized 5-point Gauss-Legendre of f over [lo, hi] (elementwise)."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    acc = np.zeros_like(mid)
    for x, w in zip(_GL_X, _GL_W):
        acc = acc + w * f(mid + half * x)
    return acc * half


@dataclass
class WeightMeasure:
    """Tabulated W(r) and T(r) for the weight psi^(N-1) of a model."""

    model: ModelFunction
    rgrid: np.ndarray
    Wtab: np.ndarray
    Ttab: np.ndarray
    tail: TailModel

    @property
    def N(self):
        return self.model.N

    @property
    def Rmax(self):
        return self.model.Rmax

    def w_at(self, r):
        return np.exp((self.N - 1.0) * np.asarray(self.model.logpsi(r), float))

    def ball_volume(self, r):
        """Volume of the ball of radius r (the angular factor enters only here)."""
        omega = 2.0 * math.pi ** (self.N / 2.0) / math.gamma(self.N / 2.0)
        return omega * self.W_at(r)

    def winv_at(self, r):
        return np.exp(-(self.N - 1.0) * np.asarray(self.model.logpsi(r), float))

    def W_at(self, r):
        """Cumulative integral of w from 0, exact node values plus a local
        Gauss increment so that dW/dr matches w to quadrature accuracy."""
        r = np.asarray(r, float)
        i = np.clip(np.searchsorted(self.rgrid, r, side="right") - 1,
                    0, len(self.rgrid) - 1)
        return self.Wtab[i] + _gl5_between(self.w_at, self.rgrid[i], r)

    def T_at(self, r):
        r = np.asarray(r, float)
        if self.tail.family == "divergent":
            return np.full_like(r, math.inf)
        j = np.clip(np.searchsorted(self.rgrid, r, side="left"),
                    1, len(self.rgrid) - 1)
        return self.Ttab[j] + _gl5_between(self.winv_at, r, self.rgrid[j])


def build_weight(model: ModelFunction) -> WeightMeasure:
    """Tabulate W and T on the model grid and classify the analytic tail."""
    N = model.N
    y_end = float(model.logpsi(np.float64(model.Rmax)))
    if (N - 1) * y_end > 700.0:
        raise ValidationError(
            "weight overflows float64 at Rmax; reduce Rmax or the curvature scale")
    tail = _classify_tail(model)
    rg = model.grid_r
    w_seg = _gl5_between(lambda s: np.exp((N - 1.0) * np.asarray(model.logpsi(s), float)),
                         rg[:-1], rg[1:])
    Wtab = np.concatenate([[0.0], np.cumsum(w_seg)])
    if tail.family == "divergent":
        Ttab = np.full_like(Wtab, math.inf)
    else:
        t_end = _tail_integral(model, tail)
        tin_seg = _gl5_between(lambda s: np.exp(-(N - 1.0) * np.asarray(model.logpsi(s), float)),
                               rg[1:-1], rg[2:])
        Ttab = np.concatenate([[math.inf],
                               t_end + np.concatenate([np.cumsum(tin_seg[::-1])[::-1], [0.0]])])
    return WeightMeasure(model=model, rgrid=rg, Wtab=Wtab, Ttab=Ttab, tail=tail)


# ---------------------------------------------------------------------------
# the supremum and its report
# ---------------------------------------------------------------------------

def Q_at(weight: WeightMeasure, p: float, r):
    """W(r)^(1/p) T(r)^(1/2); infinite when the tail diverges."""
    if p <= 0:
        raise InvalidExponent(f"exponent must be positive, got {p}")
    r = np.asarray(r, float)
    if weight.tail.family == "divergent":
        return np.full_like(r, math.inf)
    with np.errstate(divide="ignore"):
        lw = np.log(weight.W_at(r))
        lt = np.log(weight.T_at(r))
    return np.exp(lw / p + 0.5 * lt)


def _limit_infinity(weight: WeightMeasure, p: float) -> float:
    N, tail = weight.N, weight.tail
    if tail.family == "divergent":
        return math.inf
    if tail.family == "exponential":
        if p > 2.0:
            return 0.0
        if tail.shape >= 1.0 - 1e-12:
            lam = (N - 1.0) * tail.rate
            return 1.0 / lam if abs(p - 2.0) <= 1e-12 else math.inf
        return math.inf  # stretched exponential, p <= 2
    g = tail.shape * (N - 1.0)
    e_q = (g + 1.0) / p - (g - 1.0) / 2.0
    if e_q > 1e-12:
        return math.inf
    if e_q < -1e-12:
        return 0.0
    amp = tail.amplitude
    return amp ** ((N - 1.0) * (1.0 / p - 0.5)) * (g + 1.0) ** (-1.0 / p) * (g - 1.0) ** -0.5


def _limit_zero(N: int, p: float) -> float:
    crit = sobolev_critical(N)
    if not math.isfinite(crit):
        return 0.0
    if p < crit - 1e-12:
        return 0.0
    if p > crit + 1e-12:
        return math.inf
    return N ** (-1.0 / p) * (N - 2.0) ** -0.5


@dataclass
class SupremumReport:
    """Outcome of the global search for B(w, p)."""

    p: float
    B: float
    r_bar: Optional[float]
    at_infinity: bool
    divergent: bool
    sandwich_upper: float
    crit_residual: Optional[float]
    search_trace: dict = field(default_factory=dict)

    @property
    def sandwich(self):
        return (self.B, self.sandwich_upper)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, tol):
    """Golden-section maximum of f on [a, b] (log-radius coordinate)."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    n = 2
    while (b - a) > tol * max(1.0, abs(a) + abs(b)):
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        n += 1
        if n > 300:
            break
    return (0.5 * (a + b), max(f1, f2), n)


def supremum_B(weight: WeightMeasure, p: float, n_scan: int = 512,
               refine_tol: float = 1e-10) -> SupremumReport:
    """Global supremum of Q over (0, infinity).

    Coarse log-spaced scan, golden-section refinement of every interior
    bracket, plus the analytic limits at 0 and infinity from the tail
    classification.  Divergence is reported, not raised.
    """
    if p <= 0:
        raise InvalidExponent(f"exponent must be positive, got {p}")
    upper_factor = sandwich_factor(p)
    if weight.tail.family == "divergent":
        return SupremumReport(p=p, B=math.inf, r_bar=None, at_infinity=False,
                              divergent=True, sandwich_upper=math.inf,
                              crit_residual=None,
                              search_trace={"evaluations": 0, "refinement_depth": 0})
    lim_inf = _limit_infinity(weight, p)
    lim_zero = _limit_zero(weight.N, p)
    if math.isinf(lim_inf) or math.isinf(lim_zero):
        return SupremumReport(p=p, B=math.inf, r_bar=None,
                              at_infinity=math.isinf(lim_inf), divergent=True,
                              sandwich_upper=math.inf, crit_residual=None,
                              search_trace={"evaluations": 0, "refinement_depth": 0})

    pts = np.geomspace(weight.rgrid[1], weight.Rmax, n_scan)
    with np.errstate(divide="ignore", invalid="ignore"):
        lq = (np.log(np.maximum(weight.W_at(pts), 0.0)) / p
              + 0.5 * np.log(np.maximum(weight.T_at(pts), 0.0)))
    lq = np.where(np.isnan(lq), -math.inf, lq)
    evals = n_scan
    depth = 0

    def f(x):
        r = math.exp(x)
        return float(np.log(weight.W_at(np.float64(r))) / p
                     + 0.5 * np.log(weight.T_at(np.float64(r))))

    best_val = -math.inf
    best_r = None
    interior = np.flatnonzero((lq[1:-1] >= lq[:-2]) & (lq[1:-1] >= lq[2:]))
    for i in interior + 1:
        if not np.isfinite(lq[i]):
            continue
        x, v, n = _golden_max(f, math.log(pts[i - 1]), math.log(pts[i + 1]), refine_tol)
        evals += n
        depth = max(depth, n)
        if v > best_val:
            best_val, best_r = v, math.exp(x)
    for i in (0, n_scan - 1):
        if lq[i] > best_val:
            best_val, best_r = lq[i], float(pts[i])

    B_interior = math.exp(best_val) if best_r is not None else 0.0
    B = max(B_interior, lim_inf, lim_zero)
    at_infinity = lim_inf >= B_interior and lim_inf >= lim_zero and lim_inf == B
    r_bar = None
    crit_res = None
    if at_infinity:
        pass
    elif lim_zero == B and lim_zero > B_interior:
        r_bar = 0.0
    else:
        r_bar = best_r
        N = weight.N
        lnW = float(np.log(weight.W_at(np.float64(r_bar))))
        lnT = float(np.log(weight.T_at(np.float64(r_bar))))
        lnrhs = math.log(p / 2.0) + lnW - 2.0 * (N - 1.0) * float(
            weight.model.logpsi(np.float64(r_bar)))
        crit_res = abs(1.0 - math.exp(lnrhs - lnT))
        # at a genuine boundary maximizer the stationarity identity is void
        if (r_bar <= pts[0] * (1 + 1e-9)) or (r_bar >= pts[-1] * (1 - 1e-9)):
            crit_res = None
    return SupremumReport(p=p, B=B, r_bar=r_bar, at_infinity=at_infinity,
                          divergent=False, sandwich_upper=upper_factor * B,
                          crit_residual=crit_res,
                          search_trace={"evaluations": evals, "refinement_depth": depth})


def sandwich_factor(p: float) -> float:
    if p <= 0:
        raise InvalidExponent(f"exponent must be positive, got {p}")
    return (1.0 + p / 2.0) ** (1.0 / p) * (1.0 + 2.0 / p) ** 0.5


def sandwich(B: float, p: float):
    """Two-sided enclosure of the best embedding constant from B."""
    if not math.isfinite(B):
        raise ValidationError("sandwich needs a finite B")
    return (B, sandwich_factor(p) * B)


# ---------------------------------------------------------------------------
# explicit proof-chain bounds
# ---------------------------------------------------------------------------

def lemma41_bound(N: int, alpha: float, c: float, r0: float, p: float) -> float:
    """Explicit upper bound for B under psi'/psi >= c r^(-alpha) past r0.

    Valid for p in the open interval (2, 2*); blows up like
    (p-2)^(-alpha/(1-alpha)) as p decreases to 2.
    """
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if c <= 0 or r0 <= 0:
        raise ValidationError("c and r0 must be positive")
    crit = sobolev_critical(N)
    if not (2.0 < p < crit):
        raise InvalidExponent(f"p must lie in (2, {crit}), got {p}")
    cn = c * (N - 1.0)
    a_frac = alpha / (1.0 - alpha)
    head_exp = 4.0 if N == 2 else (N - 2.0) * (crit - p)
    sup_head = r0 ** (head_exp / (2.0 * p))
    bracket = (
        r0 ** (head_exp / (p + 2.0))
        + (alpha * (p + 2.0)) ** a_frac / (cn ** (1.0 / (1.0 - alpha)) * (p - 2.0) ** a_frac)
        * r0 ** (-(N - 1.0) * (p - 2.0) / (p + 2.0))
        * math.exp(cn * (p - 2.0) / ((p + 2.0) * (1.0 - alpha)) * r0 ** (1.0 - alpha) - a_frac)
    )
    sup_tail = bracket ** ((p + 2.0) / (2.0 * p))
    return math.sqrt(p / 2.0) * max(sup_head, sup_tail)


def lemma42_bound(N: int, c: float, cprime: float, q: float, r0: float, p: float) -> float:
    """Explicit upper bound for B under psi'/psi >= c/r - c'/r^q past r0.

    Applies from the critical exponent 2*Ntilde/(Ntilde-2) upward, where
    Ntilde = c (N-1) + 1; the bound grows like sqrt(p).
    """
    if c <= 1.0:
        raise ValidationError(f"need c > 1, got {c}")
    if cprime <= 0 or q <= 1.0 or r0 <= 0:
        raise ValidationError("need cprime > 0, q > 1, r0 > 0")
    ntilde = c * (N - 1.0) + 1.0
    p_low = 2.0 * ntilde / (ntilde - 2.0)
    crit = sobolev_critical(N)
    if p < p_low - 1e-12:
        raise BelowCriticalExponent(f"p = {p} below threshold {p_low}")
    if p >= crit:
        raise InvalidExponent(f"p must lie in [{p_low}, {crit}), got {p}")
    r_hat = max(r0, (2.0 * cprime / (c - 1.0)) ** (1.0 / (q - 1.0)))
    kappa = r0 ** (1.0 - c) * math.exp(-cprime * r0 ** (1.0 - q) / (q - 1.0))
    head_exp = 4.0 if N == 2 else (N - 2.0) * (crit - p)
    sup_head = r_hat ** (head_exp / (2.0 * p))
    bracket = (
        r_hat ** (head_exp / (p + 2.0))
        + 2.0 * kappa ** (-(N - 1.0) * (p - 2.0) / (p + 2.0))
        * r_hat ** (1.0 - c * (N - 1.0) * (p - 2.0) / (p + 2.0))
        / ((c + 1.0) * (N - 1.0))
    )
    sup_tail = bracket ** ((p + 2.0) / (2.0 * p))
    return math.sqrt(p / 2.0) * max(sup_head, sup_tail)


def lemma42_constants(model: ModelFunction):
    """(c, cprime, q, r0) certified for a quasi-Euclidean optimal model."""
    prof = model.profile
    if not isinstance(prof, QuasiEuclideanOptimal):
        raise ValidationError("constants derive from a quasi-Euclidean profile")
    q1, q2 = prof.exponents
    a1, a2 = prof.coefficients
    h = (q1 - q2) * max(a2, 0.0) / a1
    if h == 0.0:
        h = 1e-12
    return q1, h, 1.0 + (q1 - q2), prof.r0


def critical_exponents(N: int, C1: float):
    """(Ntilde, 2tilde): effective dimension and threshold exponent."""
    if C1 <= 0 or N < 2:
        raise ValidationError("need C1 > 0 and N >= 2")
    ntilde = (N + 1.0 + math.sqrt(1.0 + 4.0 * C1) * (N - 1.0)) / 2.0
    return ntilde, 2.0 * ntilde / (ntilde - 2.0)


def mckean_bounds(N: int, k: float):
    """(supremum bound, Poincare constant, spectral gap) for curvature <= -k."""
    if k <= 0 or N < 2:
        raise ValidationError("need k > 0 and N >= 2")
    sk = math.sqrt(k)
    return (1.0 / (sk * (N - 1.0)),
            2.0 / (sk * (N - 1.0)),
            k * (N - 1.0) ** 2 / 4.0)


# ---------------------------------------------------------------------------
# sweeps and regression
# ---------------------------------------------------------------------------

@dataclass
class RegressionFit:
    slope: float
    intercept: float
    p_values: np.ndarray
    B_values: np.ndarray
    residual_rms: float


def scaling_regression(weight: WeightMeasure, p_values, mode: str) -> RegressionFit:
    """Least-squares exponent of B(p) against the appropriate abscissa.

    mode 'p_to_2' regresses log B on log(p - 2); mode 'p_large' on log p.
    """
    p_values = np.sort(np.asarray(p_values, float))
    if mode not in ("p_to_2", "p_large"):
        raise ValidationError(f"unknown regression mode {mode!r}")
    if len(p_values) < 5:
        raise ValidationError("need at least 5 exponents in the regression")
    B = np.array([supremum_B(weight, float(p)).B for p in p_values])
    if np.any(~np.isfinite(B)):
        bad = p_values[~np.isfinite(B)]
        raise DivergentPoint(f"B diverges at p = {bad.tolist()}")
    if mode == "p_to_2":
        if np.any(p_values <= 2.0):
            raise ValidationError("mode p_to_2 needs p > 2 throughout")
        x = np.log(p_values - 2.0)
    else:
        x = np.log(p_values)
    slope, intercept = np.polyfit(x, np.log(B), 1)
    resid = np.log(B) - (slope * x + intercept)
    return RegressionFit(slope=float(slope), intercept=float(intercept),
                         p_values=p_values, B_values=B,
                         residual_rms=float(np.sqrt(np.mean(resid ** 2))))


# ---------------------------------------------------------------------------
# explicit test functions
# ---------------------------------------------------------------------------

def near_extremal(weight: WeightMeasure, p: float, r_bar: Optional[float] = None):
    """Piecewise-linear function nearly attaining the ratio B.

    Plateau at height 1 out to the maximizer (functions on the half line
    need not vanish at the origin), then the shifted tail profile
    (T(r) - T(Rc)) / (T(r_bar) - T(Rc)) down to zero at the last node Rc.
    The plateau is pulled in if the sampled range keeps less than 95% of
    the tail mass past the requested radius.
    """
    if weight.tail.family == "divergent":
        raise ValidationError("no extremal shape for a divergent weight")
    if r_bar is None:
        rep = supremum_B(weight, p)
        r_bar = rep.r_bar if rep.r_bar else 0.8 * weight.Rmax
        if r_bar == 0.0:
            r_bar = float(weight.rgrid[2])
    nodes = weight.rgrid[1:]
    Rc = float(nodes[-1])
    T_c = float(weight.T_at(np.float64(Rc)))
    T_n = np.asarray(weight.T_at(nodes), float)
    room = T_n >= 20.0 * T_c
    r_ok = float(nodes[np.flatnonzero(room)[-1]]) if np.any(room) else 0.9 * Rc
    r_bar = min(float(r_bar), r_ok)
    T_bar = float(weight.T_at(np.float64(r_bar)))
    g = np.where(nodes <= r_bar, 1.0,
                 np.maximum(T_n - T_c, 0.0) / (T_bar - T_c))
    g[-1] = 0.0
    dead = (nodes > r_bar) & (g < 1e-9)
    if np.any(dead):  # fast-decaying tail: close support at the first dead node
        cut = int(np.argmax(dead))
        nodes, g = nodes[:cut + 1].copy(), g[:cut + 1].copy()
        g[-1] = 0.0
    return nodes, g


def plin_norms(weight: WeightMeasure, r: np.ndarray, g: np.ndarray, p: float):
    """(gradient L2 norm, Lp norm) of a piecewise-linear g wrt the weight.

    g is treated as constant equal to g[0] on [0, r[0]] and zero past r[-1].
    """
    r = np.asarray(r, float)
    g = np.asarray(g, float)
    if r.ndim != 1 or r.shape != g.shape or np.any(np.diff(r) <= 0):
        raise ValidationError("nodes must be strictly increasing and match g")
    lo, hi = r[:-1], r[1:]
    glo, ghi = g[:-1], g[1:]
    slope = (ghi - glo) / (hi - lo)
    wint = np.asarray(weight.W_at(hi), float) - np.asarray(weight.W_at(lo), float)
    grad2 = float(np.sum(slope ** 2 * wint))

    def integrand(s):
        gi = glo + slope * (s - lo)
        return np.abs(gi) ** p * weight.w_at(s)

    pint = float(np.sum(_gl5_between(integrand, lo, hi)))
    pint += float(weight.W_at(np.float64(r[0]))) * abs(g[0]) ** p
    return math.sqrt(grad2), pint ** (1.0 / p)

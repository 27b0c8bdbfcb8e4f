"""Radial model geometries built from prescribed curvature laws.

A model geometry in dimension N is described by a warping function psi on
[0, Rmax] with psi(0) = 0, psi'(0) = 1 and psi > 0 elsewhere.  Nonpositive
sectional curvature corresponds to psi'' = K(r) psi with K >= 0.  All
curvature data derive from (psi, psi', K):

* radial sectional curvature      -K(r)
* radial Ricci curvature          -(N-1) K(r)
* tangential Ricci curvature      -K(r) - (N-2) (psi'^2 - 1) / psi^2
* Laplacian of the distance       (N-1) psi'(r) / psi(r)

The second derivative psi'' is always reconstructed as K(r) * psi(r) and
never obtained by differencing samples twice, so the curvature identity is
exact by construction.  Profiles without a closed form are integrated in
log variables (y, z) = (log psi, psi'/psi), which stay well scaled even
when psi itself grows to ~1e300:

    y' = z ,    z' = K(r) - z^2 .
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import (
    CurvatureNotVanishing,
    FlatProfile,
    GridTooCoarse,
    NonHadamardProfile,
    NumericalError,
    OutOfDomain,
    ValidationError,
)

__all__ = [
    "Constant",
    "PowerLaw",
    "QuasiEuclideanOptimal",
    "Euclidean",
    "Hyperbolic",
    "Polynomial",
    "ExponentialPower",
    "CurvatureProfile",
    "GridSpec",
    "ModelFunction",
    "CurvatureReport",
    "ComparisonReport",
    "EuclideanBound",
    "Lemma31Bound",
    "McKeanBound",
    "WeakRicciBound",
    "build_model",
    "curvature_at",
    "is_cartan_hadamard",
    "check_comparison",
    "lemma31_constants",
    "ricci_uniformization",
    "model_to_csv",
    "model_from_csv",
]

_ODE_RTOL = 1e-11
_ODE_ATOL = 1e-13


# ---------------------------------------------------------------------------
# curvature profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """Constant curvature law K = k (k = 0 is flat, k > 0 hyperbolic-like)."""

    k: float

    def __post_init__(self):
        if self.k < 0:
            raise ValidationError(f"constant curvature needs k >= 0, got {self.k}")

    label = "constant"
    flat_cap = 0.0

    def curvature(self, r):
        return np.full_like(np.asarray(r, float), float(self.k))

    @property
    def has_closed_form(self):
        return True

    def psi(self, r):
        r = np.asarray(r, float)
        if self.k == 0.0:
            return r.copy()
        s = math.sqrt(self.k)
        return np.sinh(s * r) / s

    def dpsi(self, r):
        r = np.asarray(r, float)
        if self.k == 0.0:
            return np.ones_like(r)
        return np.cosh(math.sqrt(self.k) * r)

    def logpsi(self, r):
        r = np.asarray(r, float)
        if self.k == 0.0:
            with np.errstate(divide="ignore"):
                return np.log(r)
        s = math.sqrt(self.k)
        x = s * r
        # log(sinh x) = x - log 2 + log1p(-exp(-2x)), stable for all x > 0
        with np.errstate(divide="ignore"):
            return x - math.log(2.0) + np.log1p(-np.exp(-2.0 * x)) - math.log(s)

    def dlogpsi(self, r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore"):
            if self.k == 0.0:
                return 1.0 / r
            s = math.sqrt(self.k)
            return s / np.tanh(s * r)


def Euclidean() -> Constant:
    """Flat model, psi(r) = r."""
    return Constant(0.0)


def Hyperbolic(k: float) -> Constant:
    """Constant curvature -k, psi(r) = sinh(sqrt(k) r) / sqrt(k)."""
    if k <= 0:
        raise ValidationError(f"hyperbolic profile needs k > 0, got {k}")
    return Constant(k)


@dataclass(frozen=True)
class PowerLaw:
    """K = c0 r^(-beta) outside radius r0, flat cap K = 0 inside.

    The cap makes psi(r) = r exactly on [0, r0] with a C^1 glue at r0; the
    curvature itself may jump there, which is harmless for every integral
    quantity computed downstream.
    """

    c0: float
    beta: float
    r0: float = 1.0

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValidationError(f"power law needs c0 > 0, got {self.c0}")
        if not (0.0 < self.beta <= 2.0):
            raise ValidationError(f"power law needs beta in (0, 2], got {self.beta}")
        if self.r0 <= 0:
            raise ValidationError(f"power law needs r0 > 0, got {self.r0}")

    label = "power"

    @property
    def flat_cap(self):
        return self.r0

    def curvature(self, r):
        r = np.asarray(r, float)
        return np.where(r >= self.r0,
                        self.c0 * np.maximum(r, self.r0) ** (-self.beta), 0.0)

    has_closed_form = False


@dataclass(frozen=True)
class QuasiEuclideanOptimal:
    """K = c1 r^(-2) outside r0, flat cap inside.

    Beyond the cap the warping is exactly a1 r^q1 + a2 r^q2 with
    q_{1,2} = (1 +/- sqrt(1 + 4 c1)) / 2 and (a1, a2) fixed by the C^1
    glue psi(r0) = r0, psi'(r0) = 1.
    """

    c1: float
    r0: float = 1.0

    def __post_init__(self):
        if self.c1 <= 0:
            raise ValidationError(f"quasi-Euclidean law needs c1 > 0, got {self.c1}")
        if self.r0 <= 0:
            raise ValidationError(f"quasi-Euclidean law needs r0 > 0, got {self.r0}")

    label = "quasi"

    @property
    def flat_cap(self):
        return self.r0

    @property
    def exponents(self):
        d = math.sqrt(1.0 + 4.0 * self.c1)
        return (1.0 + d) / 2.0, (1.0 - d) / 2.0

    @property
    def coefficients(self):
        q1, q2 = self.exponents
        a1 = (1.0 - q2) * self.r0 ** (1.0 - q1) / (q1 - q2)
        a2 = (q1 - 1.0) * self.r0 ** (1.0 - q2) / (q1 - q2)
        return a1, a2

    def curvature(self, r):
        r = np.asarray(r, float)
        return np.where(r >= self.r0, self.c1 * np.maximum(r, self.r0) ** -2.0, 0.0)

    has_closed_form = True

    def _tail(self, r):
        q1, q2 = self.exponents
        a1, a2 = self.coefficients
        p = a1 * r ** q1 + a2 * r ** q2
        dp = a1 * q1 * r ** (q1 - 1.0) + a2 * q2 * r ** (q2 - 1.0)
        return p, dp

    def psi(self, r):
        r = np.asarray(r, float)
        p, _ = self._tail(np.maximum(r, self.r0))
        return np.where(r >= self.r0, p, r)

    def dpsi(self, r):
        r = np.asarray(r, float)
        _, dp = self._tail(np.maximum(r, self.r0))
        return np.where(r >= self.r0, dp, 1.0)

    def logpsi(self, r):
        with np.errstate(divide="ignore"):
            return np.log(self.psi(r))

    def dlogpsi(self, r):
        r = np.asarray(r, float)
        p, dp = self._tail(np.maximum(r, self.r0))
        with np.errstate(divide="ignore"):
            return np.where(r >= self.r0, dp / p, 1.0 / r)


@dataclass(frozen=True)
class Polynomial:
    """Explicit warping a1 r^q1 + a2 r^q2 beyond r0, linear inside.

    Coefficients are taken as given; use :func:`polynomial_c1_glue` to get
    the pair that joins the linear cap with matching value and slope.
    """

    a1: float
    a2: float
    q1: float
    q2: float
    r0: float = 1.0

    def __post_init__(self):
        if self.r0 <= 0:
            raise ValidationError(f"polynomial warping needs r0 > 0, got {self.r0}")
        p0 = self.a1 * self.r0 ** self.q1 + self.a2 * self.r0 ** self.q2
        if p0 <= 0:
            raise ValidationError("polynomial warping must be positive at r0")

    label = "polynomial"

    @property
    def flat_cap(self):
        return self.r0

    has_closed_form = True

    def _tail(self, r):
        p = self.a1 * r ** self.q1 + self.a2 * r ** self.q2
        dp = self.a1 * self.q1 * r ** (self.q1 - 1.0) + self.a2 * self.q2 * r ** (self.q2 - 1.0)
        d2 = (self.a1 * self.q1 * (self.q1 - 1.0) * r ** (self.q1 - 2.0)
              + self.a2 * self.q2 * (self.q2 - 1.0) * r ** (self.q2 - 2.0))
        return p, dp, d2

    def psi(self, r):
        r = np.asarray(r, float)
        p, _, _ = self._tail(np.maximum(r, self.r0))
        return np.where(r >= self.r0, p, r)

    def dpsi(self, r):
        r = np.asarray(r, float)
        _, dp, _ = self._tail(np.maximum(r, self.r0))
        return np.where(r >= self.r0, dp, 1.0)

    def logpsi(self, r):
        with np.errstate(divide="ignore"):
            return np.log(self.psi(r))

    def dlogpsi(self, r):
        r = np.asarray(r, float)
        p, dp, _ = self._tail(np.maximum(r, self.r0))
        with np.errstate(divide="ignore"):
            return np.where(r >= self.r0, dp / p, 1.0 / r)

    def curvature(self, r):
        r = np.asarray(r, float)
        p, _, d2 = self._tail(np.maximum(r, self.r0))
        return np.where(r >= self.r0, d2 / p, 0.0)


def polynomial_c1_glue(q1: float, q2: float, r0: float = 1.0) -> Polynomial:
    """Two-power warping whose coefficients join psi = r with a C^1 glue."""
    if q1 == q2:
        raise ValidationError("glue needs distinct exponents")
    a1 = (1.0 - q2) * r0 ** (1.0 - q1) / (q1 - q2)
    a2 = (q1 - 1.0) * r0 ** (1.0 - q2) / (q1 - q2)
    return Polynomial(a1, a2, q1, q2, r0)


def _smoothstep(x):
    s = x * x * (3.0 - 2.0 * x)
    ds = 6.0 * x * (1.0 - x)
    d2s = 6.0 - 12.0 * x
    return s, ds, d2s


@dataclass(frozen=True)
class ExponentialPower:
    """Decaying warping exp(-c2 r^gamma) at large radius, blended to r near 0.

    Positive but eventually decreasing: a geometry with a pole that is *not*
    nonpositively curved through the blend, useful as a counterexample input
    for :func:`is_cartan_hadamard`.
    """

    c2: float = 1.0
    gamma: float = 0.5
    glue: tuple = (0.5, 1.5)

    def __post_init__(self):
        if self.c2 <= 0 or not (0.0 < self.gamma < 1.0):
            raise ValidationError("exponential-power warping needs c2 > 0, gamma in (0,1)")
        ra, rb = self.glue
        if not (0.0 < ra < rb):
            raise ValidationError("glue window must satisfy 0 < ra < rb")

    label = "exppower"
    flat_cap = 0.0
    has_closed_form = True

    def _triplet(self, r):
        r = np.asarray(r, float)
        ra, rb = self.glue
        c, g = self.c2, self.gamma
        rc = np.maximum(r, 0.5 * ra)  # tail values are unused below ra
        t = np.exp(-c * rc ** g)
        dt = -c * g * rc ** (g - 1.0) * t
        d2t = (c * c * g * g * rc ** (2.0 * g - 2.0) - c * g * (g - 1.0) * rc ** (g - 2.0)) * t
        x = np.clip((r - ra) / (rb - ra), 0.0, 1.0)
        s, ds, d2s = _smoothstep(x)
        ds = ds / (rb - ra)
        d2s = d2s / (rb - ra) ** 2
        inside = (r <= ra) | (r >= rb)
        ds = np.where(inside, 0.0, ds)
        d2s = np.where(inside, 0.0, d2s)
        psi = (1.0 - s) * r + s * t
        dpsi = (1.0 - s) + ds * (t - r) + s * dt
        d2psi = d2s * (t - r) + 2.0 * ds * (dt - 1.0) + s * d2t
        return psi, dpsi, d2psi

    def psi(self, r):
        return self._triplet(r)[0]

    def dpsi(self, r):
        return self._triplet(r)[1]

    def logpsi(self, r):
        with np.errstate(divide="ignore"):
            return np.log(self.psi(r))

    def dlogpsi(self, r):
        p, dp, _ = self._triplet(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = dp / p
        return np.where(np.asarray(r, float) == 0.0, np.inf, out)

    def curvature(self, r):
        p, _, d2 = self._triplet(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = d2 / p
        return np.where(np.asarray(r, float) == 0.0, 0.0, out)


CurvatureProfile = Union[Constant, PowerLaw, QuasiEuclideanOptimal, Polynomial, ExponentialPower]

# profiles whose K is a prescribed nonnegative law (no closed psi needed)
_LAW_PROFILES = (PowerLaw,)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Sampling grid: geometric near the origin, uniform past r = 1.

    ``kind="log"`` switches to a single geometric progression over the whole
    range, which resolves very large domains better at equal node count.
    """

    n: int = 4096
    ratio: float = 1.05
    r_start: Optional[float] = None
    kind: str = "graded"

    def start(self, rmax: float) -> float:
        return self.r_start if self.r_start is not None else 1e-6 * rmax

    def nodes(self, rmax: float) -> np.ndarray:
        if self.n < 64:
            raise ValidationError("grid needs at least 64 nodes")
        a = self.start(rmax)
        if not (0.0 < a < rmax):
            raise ValidationError("grid start must lie in (0, rmax)")
        if self.kind == "log" or rmax <= 1.0:
            return np.geomspace(a, rmax, self.n)
        if self.kind != "graded":
            raise ValidationError(f"unknown grid kind {self.kind!r}")
        n_geo = int(math.ceil(math.log(1.0 / a) / math.log(self.ratio))) + 1
        n_geo = min(max(n_geo, 16), self.n - 16)
        geo = np.geomspace(a, 1.0, n_geo)
        uni = np.linspace(1.0, rmax, self.n - n_geo + 1)[1:]
        return np.concatenate([geo, uni])


# ---------------------------------------------------------------------------
# the model object
# ---------------------------------------------------------------------------

@dataclass
class ModelFunction:
    """Warping function of a radial model geometry plus its curvature law.

    Evaluation methods accept scalars or arrays in [0, Rmax].  ``grid_*``
    arrays are the export table (first row is the exact origin values).
    """

    profile: Optional[CurvatureProfile]
    N: int
    Rmax: float
    grid_r: np.ndarray
    grid_psi: np.ndarray
    grid_dpsi: np.ndarray
    built_by: str
    _psi: Callable = None
    _dpsi: Callable = None
    _y: Callable = None
    _z: Callable = None
    _K: Callable = None

    def _check(self, r):
        r = np.asarray(r, float)
        if np.any(r < 0) or np.any(r > self.Rmax * (1 + 1e-12)):
            raise OutOfDomain(f"radius outside [0, {self.Rmax}]")
        return r

    def psi(self, r):
        return self._psi(self._check(r))

    def dpsi(self, r):
        return self._dpsi(self._check(r))

    def logpsi(self, r):
        return self._y(self._check(r))

    def dlogpsi(self, r):
        return self._z(self._check(r))

    def curvature(self, r):
        """K(r) = psi''/psi; the radial sectional curvature is -K."""
        return self._K(self._check(r))

    def ddpsi(self, r):
        return self.curvature(r) * self.psi(r)


@dataclass(frozen=True)
class CurvatureReport:
    r: float
    sect_radial: float
    ric_radial: float
    ric_tangential: float
    laplacian_density: float


def _series_start(K0: float, r: float):
    # psi = r + K0 r^3 / 6 + O(r^5) near the pole
    y = math.log(r) + math.log1p(K0 * r * r / 6.0)
    z = (1.0 + K0 * r * r / 2.0) / (r * (1.0 + K0 * r * r / 6.0))
    return y, z


def _integrate_profile(profile, rmax, r_a, n_nodes):
    """Integrate y' = z, z' = K - z^2 from r_a and return Hermite splines."""
    Kf = profile.curvature

    def rhs(r, state):
        y, z = state
        return [z, float(Kf(np.float64(r))) - z * z]

    K0 = float(Kf(np.float64(r_a)))
    if profile.flat_cap > 0:
        y0, z0 = math.log(r_a), 1.0 / r_a
    else:
        y0, z0 = _series_start(K0, r_a)
    nodes = np.geomspace(r_a, rmax, n_nodes)
    nodes[0], nodes[-1] = r_a, rmax
    sol = solve_ivp(rhs, (r_a, rmax), [y0, z0], method="RK45",
                    t_eval=nodes, rtol=_ODE_RTOL, atol=_ODE_ATOL)
    if not sol.success:
        raise NumericalError(f"warping integration failed: {sol.message}")
    yv, zv = sol.y
    y_spl = CubicHermiteSpline(nodes, yv, zv)
    z_spl = CubicHermiteSpline(nodes, zv, np.asarray(Kf(nodes), float) - zv * zv)
    # a-posteriori consistency estimate: the two splines must agree on y' = z
    mid = np.sqrt(nodes[:-1] * nodes[1:])
    h = np.diff(nodes)
    defect = np.abs(y_spl(mid, 1) - z_spl(mid)) * h
    if np.max(defect) > 1e-6 * max(1.0, np.max(np.abs(yv))):
        raise GridTooCoarse(
            f"warping table defect {np.max(defect):.2e}; increase grid nodes")
    return nodes, y_spl, z_spl


def build_model(profile: CurvatureProfile, N: int, Rmax: float,
                grid: Optional[GridSpec] = None, method: str = "auto") -> ModelFunction:
    """Construct the warping function of a model geometry.

    ``method="ode"`` forces numerical integration of psi'' = K psi even when
    a closed form exists (used to cross-validate the integrator).
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValidationError(f"dimension must be an integer >= 2, got {N}")
    if not np.isfinite(Rmax) or Rmax <= 0:
        raise ValidationError(f"Rmax must be positive, got {Rmax}")
    cap = float(getattr(profile, "flat_cap", 0.0))
    if cap > 0 and Rmax <= cap:
        raise ValidationError(f"Rmax = {Rmax} must exceed the cap radius {cap}")
    grid = grid or GridSpec()

    if isinstance(profile, _LAW_PROFILES):
        probe = np.geomspace(max(cap, 1e-8 * Rmax), Rmax, 2048)
        kk = np.asarray(profile.curvature(probe), float)
        if np.any(kk < -1e-12 * max(1.0, np.max(np.abs(kk)))):
            bad = probe[np.argmax(kk < 0)]
            raise NonHadamardProfile(f"curvature law is negative near r = {bad:.6g}")

    use_closed = getattr(profile, "has_closed_form", False) and method != "ode"
    if method not in ("auto", "ode", "closed"):
        raise ValidationError(f"unknown build method {method!r}")
    if method == "closed" and not getattr(profile, "has_closed_form", False):
        raise ValidationError("profile has no closed form")

    if use_closed:
        psi_f, dpsi_f = profile.psi, profile.dpsi
        y_f, z_f = profile.logpsi, profile.dlogpsi
        built_by = "closed"
    else:
        r_a = cap if cap > 0 else grid.start(Rmax)
        n_int = max(grid.n, 6144)
        _, y_spl, z_spl = _integrate_profile(profile, Rmax, r_a, n_int)

        def y_f(r, _ra=r_a, _s=y_spl):
            r = np.asarray(r, float)
            with np.errstate(divide="ignore"):
                out = np.where(r < _ra, np.log(np.maximum(r, 0.0)), 0.0)
            hi = r >= _ra
            if np.any(hi):
                out = np.where(hi, _s(np.maximum(r, _ra)), out)
            return out

        def z_f(r, _ra=r_a, _s=z_spl):
            r = np.asarray(r, float)
            with np.errstate(divide="ignore"):
                out = np.where(r < _ra, 1.0 / r, 0.0)
            hi = r >= _ra
            if np.any(hi):
                out = np.where(hi, _s(np.maximum(r, _ra)), out)
            return out

        def psi_f(r, _y=y_f):
            r = np.asarray(r, float)
            return np.where(r == 0.0, 0.0, np.exp(_y(np.maximum(r, 1e-300))))

        def dpsi_f(r, _y=y_f, _z=z_f):
            r = np.asarray(r, float)
            return np.where(r == 0.0, 1.0,
                            np.exp(_y(np.maximum(r, 1e-300))) * _z(np.maximum(r, 1e-300)))

        built_by = "ode"

    K_f = profile.curvature
    rg = np.concatenate([[0.0], grid.nodes(Rmax)])
    gp = np.asarray(psi_f(rg), float)
    gdp = np.asarray(dpsi_f(rg), float)
    gp[0], gdp[0] = 0.0, 1.0
    return ModelFunction(profile=profile, N=int(N), Rmax=float(Rmax),
                         grid_r=rg, grid_psi=gp, grid_dpsi=gdp,
                         built_by=built_by,
                         _psi=psi_f, _dpsi=dpsi_f, _y=y_f, _z=z_f, _K=K_f)


# ---------------------------------------------------------------------------
# curvature queries
# ---------------------------------------------------------------------------

def _ric_tangential(model: ModelFunction, r):
    K = model.curvature(r)
    z = model.dlogpsi(r)
    inv_psi2 = np.exp(-2.0 * model.logpsi(r))
    return -K - (model.N - 2) * (z * z - inv_psi2)


def curvature_at(model: ModelFunction, r: float) -> CurvatureReport:
    """All pointwise curvature data at radius r in (0, Rmax]."""
    if not (0.0 < r <= model.Rmax * (1 + 1e-12)):
        raise OutOfDomain(f"radius {r} outside (0, {model.Rmax}]")
    rr = np.float64(r)
    K = float(model.curvature(rr))
    return CurvatureReport(
        r=float(r),
        sect_radial=-K,
        ric_radial=-(model.N - 1) * K,
        ric_tangential=float(_ric_tangential(model, rr)),
        laplacian_density=float((model.N - 1) * model.dlogpsi(rr)),
    )


def is_cartan_hadamard(model: ModelFunction, tol: float = 1e-10):
    """(flag, first violation radius): nonpositive sectional curvature check.

    True iff K(r) >= 0 on the whole sampled range; otherwise the smallest
    radius where K dips negative is reported.
    """
    r = model.grid_r[1:]
    K = np.asarray(model.curvature(r), float)
    thresh = -tol * max(1.0, float(np.max(np.abs(K))))
    bad = K < thresh
    if not np.any(bad):
        return True, None
    return False, float(r[np.argmax(bad)])


@dataclass(frozen=True)
class ComparisonReport:
    bound: str
    holds: bool
    r: np.ndarray
    ok: np.ndarray
    fail_interval: Optional[tuple]

    def fraction_failing(self):
        return float(np.mean(~self.ok))


@dataclass(frozen=True)
class EuclideanBound:
    name = "euclidean"


@dataclass(frozen=True)
class Lemma31Bound:
    c: float
    r0: float
    beta: float
    name = "lemma31"


@dataclass(frozen=True)
class McKeanBound:
    k: float
    name = "mckean"


@dataclass(frozen=True)
class WeakRicciBound:
    """Comparison via the model's own warping sampled at sqrt(N-1) r.

    Valid under one-directional Ricci (rather than sectional) control; on
    a model it is strictly weaker than the sectional version, and is
    exposed only as an optional mode.
    """

    name = "weak_ricci"


def check_comparison(model: ModelFunction, bound) -> ComparisonReport:
    """Verify a pointwise lower bound on the Laplacian density (or on psi'/psi).

    * ``EuclideanBound``: (N-1) psi'/psi >= (N-1)/r for all r,
    * ``Lemma31Bound(c, r0, beta)``: (N-1) psi'/psi >= c r^(-beta/2) for r >= r0,
    * ``McKeanBound(k)``: psi'/psi >= sqrt(k) for all r.

    The report flags the largest contiguous failing radius interval, if any.
    """
    r = model.grid_r[1:]
    z = np.asarray(model.dlogpsi(r), float)
    slack = 1e-12
    if isinstance(bound, EuclideanBound):
        ok = (model.N - 1) * z >= (model.N - 1) / r * (1 - slack)
    elif isinstance(bound, Lemma31Bound):
        target = bound.c * r ** (-bound.beta / 2.0)
        ok = (model.N - 1) * z >= target * (1 - slack)
        ok |= r < bound.r0
    elif isinstance(bound, McKeanBound):
        ok = z >= math.sqrt(bound.k) * (1 - slack)
    elif isinstance(bound, WeakRicciBound):
        s = math.sqrt(model.N - 1)
        reach = r * s <= model.Rmax
        r = r[reach]
        z = z[reach]
        ok = (model.N - 1) * z >= s * np.asarray(model.dlogpsi(s * r), float) * (1 - slack)
    else:
        raise ValidationError(f"unknown comparison bound {bound!r}")
    holds = bool(np.all(ok))
    interval = None
    if not holds:
        # longest run of failures
        fail = ~ok
        idx = np.flatnonzero(np.diff(np.concatenate([[0], fail.view(np.int8), [0]])))
        starts, ends = idx[0::2], idx[1::2]
        j = np.argmax(ends - starts)
        interval = (float(r[starts[j]]), float(r[ends[j] - 1]))
    return ComparisonReport(bound=bound.name, holds=holds, r=r, ok=ok,
                            fail_interval=interval)


def lemma31_constants(model: ModelFunction, beta: Optional[float] = None,
                      tail_start: Optional[float] = None):
    """Scan for (c, r0) such that psi'/psi >= c r^(-beta/2) for r >= r0.

    c is half the infimum of (psi'/psi) r^(beta/2) over the scanned tail,
    r0 the earliest grid radius past which the bound holds throughout.
    """
    if beta is None:
        beta = getattr(model.profile, "beta", None)
        if beta is None:
            raise ValidationError("profile has no decay exponent; pass beta")
    if tail_start is None:
        tail_start = max(float(getattr(model.profile, "flat_cap", 0.0)),
                         1e-2 * model.Rmax)
    r = model.grid_r[1:]
    prod = np.asarray(model.dlogpsi(r), float) * r ** (beta / 2.0)
    tail = r >= tail_start
    if not np.any(tail):
        raise ValidationError("tail window empty; lower tail_start")
    c = 0.5 * float(np.min(prod[tail]))
    if c <= 0:
        raise ValidationError("psi'/psi not positive on the tail")
    ok = prod >= c
    # smallest radius from which the bound never fails again
    good_from = np.flatnonzero(~ok)
    r0 = float(r[good_from[-1] + 1]) if good_from.size else float(r[0])
    return c, r0


def ricci_uniformization(model: ModelFunction, R: float,
                         allow_constant: bool = False) -> float:
    """Radius scale G(R) with Ricci >= -(N-1)/G(R)^2 outside the ball of radius R.

    G is computed from the grid supremum of both Ricci eigenvalue magnitudes
    past R, so it is the largest admissible scale and is nondecreasing in R.
    Requires the curvature to vanish at large radius unless
    ``allow_constant`` is set.
    """
    if not (0.0 < R <= 0.8 * model.Rmax):
        raise OutOfDomain(f"need 0 < R <= 0.8 Rmax = {0.8 * model.Rmax:.6g}")
    r = model.grid_r[1:]
    rr = np.concatenate([[R], r[r > R]])
    K = np.asarray(model.curvature(rr), float)
    z = np.asarray(model.dlogpsi(rr), float)
    inv_psi2 = np.exp(-2.0 * np.asarray(model.logpsi(rr), float))
    rad = (model.N - 1) * K
    tang = K + (model.N - 2) * (z * z - inv_psi2)
    lam_pt = np.maximum(rad, np.maximum(tang, 0.0))
    lam = float(np.max(lam_pt))
    # cancellation noise floor: z^2 - 1/psi^2 is a difference of near-equal terms
    floor = 1e-12 * float(np.max(z * z + inv_psi2 + K))
    if lam <= floor:
        raise FlatProfile("Ricci curvature vanishes identically beyond R")
    if not allow_constant:
        tail = rr >= 0.8 * model.Rmax
        lam_tail = float(np.max(lam_pt[tail])) if np.any(tail) else lam
        if lam_tail > 0.9 * lam:
            raise CurvatureNotVanishing(
                "Ricci curvature does not decay beyond R; "
                "pass allow_constant=True to accept a constant bound")
    return math.sqrt((model.N - 1) / lam)


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def model_to_csv(model: ModelFunction, path, header_comment: Optional[str] = None):
    """Write the sampled table as ``r,psi,dpsi`` at full double precision."""
    with open(path, "w", newline="") as f:
        if header_comment:
            f.write(f"# {header_comment}\n")
        f.write("r,psi,dpsi\n")
        for r, p, dp in zip(model.grid_r, model.grid_psi, model.grid_dpsi):
            f.write(f"{r:.17g},{p:.17g},{dp:.17g}\n")


def model_from_csv(path, N: int) -> ModelFunction:
    """Rebuild a model from an exported table.

    Curvature for imported tables comes from differentiating the sampled
    psi' once (never psi twice); closed-form provenance is lost.
    """
    r_l, p_l, dp_l = [], [], []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("r,"):
                continue
            a, b, c = line.split(",")
            r_l.append(float(a)); p_l.append(float(b)); dp_l.append(float(c))
    r = np.asarray(r_l); p = np.asarray(p_l); dp = np.asarray(dp_l)
    if r[0] != 0.0:
        r = np.concatenate([[0.0], r]); p = np.concatenate([[0.0], p])
        dp = np.concatenate([[1.0], dp])
    if np.any(np.diff(r) <= 0):
        raise ValidationError("imported radii must be strictly increasing")
    if np.any(p[1:] <= 0):
        raise ValidationError("imported psi must be positive for r > 0")
    rn, pn, dpn = r[1:], p[1:], dp[1:]
    y = np.log(pn)
    z = dpn / pn
    y_spl = CubicHermiteSpline(rn, y, z)
    z_spl = CubicSpline(rn, z)
    r1 = rn[0]

    def y_f(q):
        q = np.asarray(q, float)
        with np.errstate(divide="ignore"):
            below = np.log(np.maximum(q, 0.0)) + (y[0] - math.log(r1))
        return np.where(q < r1, below, y_spl(np.maximum(q, r1)))

    def z_f(q):
        q = np.asarray(q, float)
        with np.errstate(divide="ignore"):
            below = 1.0 / q
        return np.where(q < r1, below, z_spl(np.maximum(q, r1)))

    def psi_f(q):
        q = np.asarray(q, float)
        return np.where(q == 0.0, 0.0, np.exp(y_f(np.maximum(q, 1e-300))))

    def dpsi_f(q):
        q = np.asarray(q, float)
        return np.where(q == 0.0, 1.0,
                        np.exp(y_f(np.maximum(q, 1e-300))) * z_f(np.maximum(q, 1e-300)))

    def K_f(q):
        q = np.asarray(q, float)
        zq = z_f(q)
        dz = np.where(q < r1, 0.0, z_spl(np.maximum(q, r1), 1))
        return dz + zq * zq

    return ModelFunction(profile=None, N=int(N), Rmax=float(rn[-1]),
                         grid_r=r, grid_psi=p, grid_dpsi=dp, built_by="table",
                         _psi=psi_f, _dpsi=dpsi_f, _y=y_f, _z=z_f, _K=K_f)

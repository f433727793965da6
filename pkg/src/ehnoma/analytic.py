"""Closed-form outage probabilities for the fixed (FPA) and dynamic (DPA)
relay power-allocation schemes, their high-SNR floors, and a direct
quadrature of the DPA correction term used as an oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConsistencyError, DomainError, UnsupportedModelError
from .model import OmegaSet, SystemParams, derive
from .specfun import bessel_k, binomial, chebyshev_rule, gamma_int

CLAMP_SLACK = 1e-12
DEFAULT_J = 30


class Method(enum.Enum):
    CLOSED_FORM = "analytic"
    QUADRATURE_ORACLE = "quadrature"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class OutageEstimate:
    value: float
    method: Method
    trials: int | None = None
    stderr: float | None = None
    degenerate: bool = False

    def __float__(self) -> float:
        return self.value


def clamp_probability(value: float) -> float:
    """Absorb rounding residue just outside [0, 1]; anything larger is a bug."""
    if math.isnan(value):
        raise ConsistencyError("closed form evaluated to NaN")
    if value < 0.0:
        if value < -CLAMP_SLACK:
            raise ConsistencyError(f"negative probability {value!r}")
        return 0.0
    if value > 1.0:
        if value > 1.0 + CLAMP_SLACK:
            raise ConsistencyError(f"probability above one {value!r}")
        return 1.0
    return value


def _closed(value: float) -> OutageEstimate:
    return OutageEstimate(clamp_probability(value), Method.CLOSED_FORM)


# -- distributions -----------------------------------------------------------

def ordered_gain_cdf(gamma, omegas: OmegaSet):
    """CDF of the larger estimated relay-user gain g1.

    Accepts a scalar or an array; returns the same shape.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise DomainError("ordered_gain_cdf: gamma must be >= 0")
    o1, o2, o3 = omegas.as_tuple()
    out = 1.0 - np.exp(-g / o1) + np.exp(-g / o2) - np.exp(-g / o3)
    return float(out) if out.ndim == 0 else out


def source_gain_pdf(gamma, m: int, d: float, alpha: float):
    """Nakagami-m PDF of the path-loss scaled source-relay gain g."""
    g = np.asarray(gamma, dtype=float)
    scale = d ** alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        logpdf = (m * math.log(m) + m * alpha * math.log(d) - math.lgamma(m)
                  + (m - 1) * np.log(g) - m * scale * g)
    out = np.where(g > 0, np.exp(logpdf), 0.0 if m > 1 else m * scale)
    return float(out) if out.ndim == 0 else out


# -- fixed power allocation ---------------------------------------------------

def lambda_max(params: SystemParams, g: float, sic_aware: bool = False) -> float:
    """Smallest g1 that lets user 1 decode both symbols, given source gain g."""
    dq = derive(params, sic_aware)
    t = dq.thresholds
    excess = t.P * g - t.tau0
    if not excess > 0:
        raise DomainError(f"lambda_max: need g > tau0/P = {t.tau0 / t.P!r}, got {g!r}")
    phi = dq.phi
    return max(phi.phi11 + phi.phi12 / excess, phi.phi21 + phi.phi22 / excess)


def _nakagami_success(params: SystemParams, phi_1: float, phi_2: float,
                      terms: list[tuple[int, float]]) -> float:
    """sum_k sign_k * E_g[ exp(-(phi_1 + phi_2/(Pg - tau0)) / Omega_k) ; g > tau0/P ].

    ``terms`` is a list of (sign, Omega_k). Each expectation is the finite
    Bessel sum obtained from the binomial expansion of the Gamma density.
    """
    t = derive(params).thresholds
    m = int(params.m)
    path = params.d ** (-params.alpha)
    a = t.tau0 * m / (path * t.P)
    gm = gamma_int(m)
    total = 0.0
    for sign, omega in terms:
        beta = 2.0 * math.sqrt(m / (path * t.P) * phi_2 / omega)
        outer = math.exp(-phi_1 / omega)
        inner = 0.0
        for i in range(m):
            kv = bessel_k(i + 1, beta)
            if kv == 0.0:
                continue
            inner += (binomial(m - 1, i) * a ** (m - i - 1)
                      * beta ** (i + 1) * kv / (2.0 ** i * gm))
        total += sign * outer * inner
    return math.exp(-a) * total


def _fpa_user1(params: SystemParams, sic_aware: bool) -> OutageEstimate:
    dq = derive(params, sic_aware)
    row = dq.branch.row
    if row is None:
        return OutageEstimate(1.0, Method.CLOSED_FORM)
    phi_1, phi_2 = dq.phi.row(row)
    if math.isinf(phi_2):
        return OutageEstimate(1.0, Method.CLOSED_FORM)
    o1, o2, o3 = dq.omegas.as_tuple()
    success = _nakagami_success(params, phi_1, phi_2, [(1, o1), (-1, o2), (1, o3)])
    return _closed(1.0 - success)


def fpa_outage_user1(params: SystemParams) -> OutageEstimate:
    """User-1 (strong user) outage under fixed delta and perfect SIC."""
    return _fpa_user1(params, sic_aware=False)


def fpa_outage_user1_isic(params: SystemParams) -> OutageEstimate:
    """User-1 outage with residual SIC power ``params.sigma_ic2``.

    Identical, bit for bit, to :func:`fpa_outage_user1` when sigma_ic2 = 0.
    """
    return _fpa_user1(params, sic_aware=True)


def fpa_outage_user2(params: SystemParams) -> OutageEstimate:
    dq = derive(params)
    if params.delta <= dq.branch.lower or math.isinf(dq.phi.phi12):
        return OutageEstimate(1.0, Method.CLOSED_FORM)
    success = _nakagami_success(params, dq.phi.phi11, dq.phi.phi12, [(1, dq.omegas.omega2)])
    return _closed(1.0 - success)


def fpa_floor(params: SystemParams, user: int, sic_aware: bool = False) -> float:
    """Limit of the FPA outage as P -> infinity (non-zero whenever sigma_e2 > 0)."""
    dq = derive(params, sic_aware)
    o1, o2, o3 = dq.omegas.as_tuple()
    if user == 1:
        row = dq.branch.row
        if row is None:
            return 1.0
        phi_1 = dq.phi.row(row)[0]
        s = math.exp(-phi_1 / o1) - math.exp(-phi_1 / o2) + math.exp(-phi_1 / o3)
        return clamp_probability(1.0 - s)
    if user == 2:
        if params.delta <= dq.branch.lower:
            return 1.0
        return clamp_probability(-math.expm1(-dq.phi.phi11 / o2))
    raise ValueError(f"user must be 1 or 2, got {user!r}")


# -- dynamic power allocation -------------------------------------------------

def _require_rayleigh(params: SystemParams, what: str):
    if params.m != 1:
        raise UnsupportedModelError(
            f"{what}: closed form exists only for Rayleigh source-relay fading (m=1), got m={params.m}")


def _dpa_threshold_success(params: SystemParams, tau: float) -> float:
    """P{g > tau0/P, g2 > tau (sigma_e2 + 1/P')} for Rayleigh g."""
    dq = derive(params)
    t = dq.thresholds
    path = params.d ** (-params.alpha)
    if params.eta == 0.0:
        return 0.0
    omega = 2.0 * math.sqrt(tau / (params.eta * t.P * path * dq.omegas.omega2))
    return (math.exp(-params.sigma_e2 * tau / dq.omegas.omega2 - t.tau0 / (path * t.P))
            * omega * bessel_k(1, omega))


def dpa_outage_user2(params: SystemParams) -> OutageEstimate:
    _require_rayleigh(params, "dpa_outage_user2")
    tau2 = derive(params).thresholds.tau2
    return _closed(1.0 - _dpa_threshold_success(params, tau2))


def dpa_outage_user1(params: SystemParams, J: int = DEFAULT_J) -> OutageEstimate:
    """User-1 outage when the relay picks delta per channel state so that the
    weak user sits exactly at its SINR threshold.

    Sum of the region where the SIC-cancelled user-1 SINR is automatically
    sufficient (closed Bessel form) and the correction region evaluated by
    :func:`upsilon_ii_chebyshev` with ``J`` nodes.
    """
    _require_rayleigh(params, "dpa_outage_user1")
    if params.eta == 0.0:
        return OutageEstimate(1.0, Method.CLOSED_FORM)
    tau0 = derive(params).thresholds.tau0
    first = _dpa_threshold_success(params, tau0)
    return _closed(1.0 - first - upsilon_ii_chebyshev(params, J))


def _h_exponent(rho: float, b: float, tau2: float, om_bar: float, om_i: float) -> float:
    # H_{i-bar}(rho): the Omega_i slot carries the b/rho term
    return (b / (rho * om_i) + 1.0 / om_bar) * (rho + tau2)


def upsilon_ii_chebyshev(params: SystemParams, J: int = DEFAULT_J) -> float:
    """Probability that the weak user is served, user 1 is not automatically
    served, and user 1 still decodes (correction term of the DPA user-1
    success probability), by a J-node Chebyshev rule over rho in
    [0, tau1 (1 + tau2)].
    """
    _require_rayleigh(params, "upsilon_ii_chebyshev")
    rule = chebyshev_rule(J)
    dq = derive(params)
    t = dq.thresholds
    if params.eta == 0.0:
        return 0.0
    path = params.d ** (-params.alpha)
    c = 1.0 / (params.eta * t.P * path)
    se2 = params.sigma_e2
    b = t.tau1 * (1.0 + t.tau2)
    if b <= 0.0:
        return 0.0
    o1, _, o3 = dq.omegas.as_tuple()
    pref = math.exp(-t.tau0 / (t.P * path))

    total = 0.0
    for om_i, om_bar in ((o1, o3), (o3, o1)):
        def h(rho, om_i=om_i, om_bar=om_bar):
            H = _h_exponent(rho, b, t.tau2, om_bar, om_i)
            arg = 2.0 * math.sqrt(H * c)
            k0 = bessel_k(0, arg)
            if k0 == 0.0:
                return 0.0
            k1 = bessel_k(1, arg)
            return math.exp(-H * se2) * (se2 * arg * k1 + 2.0 * c * k0)

        total += pref / om_bar * rule.integrate(h, b)
    return total


def upsilon_ii_direct(params: SystemParams, rtol: float = 1e-7) -> float:
    """Same probability as :func:`upsilon_ii_chebyshev`, by adaptive quadrature
    of the raw joint-density integral.

    The innermost integral over g1 is done in closed form. The remaining
    integral runs over the weak-user gain x and the harvested SNR
    ``v = eta (P z - tau0)``; the exponential weight of v is absorbed by
    integrating over ``s = v / (eta P d^-alpha)``. No Bessel functions are
    involved.
    """
    _require_rayleigh(params, "upsilon_ii_direct")
    dq = derive(params)
    t = dq.thresholds
    if params.eta == 0.0 or t.tau1 <= 0.0:
        return 0.0
    path = params.d ** (-params.alpha)
    se2 = params.sigma_e2
    tau0, tau1, tau2 = t.tau0, t.tau1, t.tau2
    o1, _, o3 = dq.omegas.as_tuple()
    scale = params.eta * t.P * path
    pairs = ((o1, o3), (o3, o1))

    def inner(v):
        lo = tau2 * (se2 + 1.0 / v)
        hi = tau0 * (se2 + 1.0 / v)
        a = v * se2 + 1.0

        def f(x):
            den = v * x - tau2 * a
            if den <= 0.0:
                return 0.0
            nu = tau1 * (1.0 + tau2) * a * x / den
            # density of (g2, g1) = (x, y), integrated over y > nu
            return sum(math.exp(-x / ob - nu / oi) / ob for oi, ob in pairs)

        val, _ = integrate.quad(f, lo, hi, epsrel=rtol, epsabs=0.0, limit=200)
        return val

    def outer(s):
        if s <= 0.0:
            return 0.0
        return math.exp(-s) * inner(s * scale)

    # split at the bulk of the exponential weight to help the adaptive scheme
    edges = [0.0, 1e-3, 1e-1, 1.0, 5.0, 40.0]
    total = sum(integrate.quad(outer, a, b_, epsrel=rtol, epsabs=0.0, limit=200)[0]
                for a, b_ in zip(edges[:-1], edges[1:]))
    total += integrate.quad(outer, edges[-1], np.inf, epsrel=rtol, epsabs=0.0, limit=200)[0]
    return math.exp(-tau0 / (t.P * path)) * total

"""System parameters and the quantities derived from them.

Everything downstream (closed forms and the simulator) reads the model
through :class:`SystemParams` and :func:`derive`; no other module recomputes
thresholds or the Phi matrix on its own.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

from .errors import ValidationError


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


DEFAULT_ETA = 0.7


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol parameters, all powers linear.

    ``xi`` (source-side power split) is carried for reporting only; no
    outage event depends on it because the relay must decode the full
    superposition whenever ``g > tau0 / P``.
    """

    p_s: float
    sigma2: float
    delta: float
    d: float
    d1: float
    d2: float
    alpha: float
    r1: float
    r2: float
    sigma_e2: float
    eta: float = DEFAULT_ETA
    xi: float = 0.5
    m: int = 1
    sigma_ic2: float = 0.0

    def __post_init__(self):
        problems = _check(self)
        if problems:
            raise ValidationError(problems)

    @classmethod
    def from_db(cls, p_s_db: float, noise_db: float, **kwargs) -> "SystemParams":
        return cls(p_s=db_to_linear(p_s_db), sigma2=db_to_linear(noise_db), **kwargs)

    @property
    def snr(self) -> float:
        """Normalised source SNR P = P_s / sigma^2."""
        return self.p_s / self.sigma2

    @property
    def p_s_db(self) -> float:
        return linear_to_db(self.p_s)

    @property
    def noise_db(self) -> float:
        return linear_to_db(self.sigma2)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


def _check(p: SystemParams) -> dict[str, str]:
    problems: dict[str, str] = {}

    def finite(name):
        v = getattr(p, name)
        try:
            ok = math.isfinite(v)
        except TypeError:
            ok = False
        if not ok:
            problems[name] = f"must be a finite number, got {v!r}"
        return ok

    for name in ("p_s", "sigma2", "d", "d1", "d2", "alpha", "r1", "r2"):
        if finite(name) and getattr(p, name) <= 0:
            problems[name] = f"must be > 0, got {getattr(p, name)!r}"
    for name in ("sigma_e2", "sigma_ic2"):
        if finite(name) and getattr(p, name) < 0:
            problems[name] = f"must be >= 0, got {getattr(p, name)!r}"
    for name in ("eta", "delta", "xi"):
        if finite(name) and not 0.0 <= getattr(p, name) <= 1.0:
            problems[name] = f"must lie in [0, 1], got {getattr(p, name)!r}"
    m = p.m
    integral = isinstance(m, int) or (isinstance(m, float) and m.is_integer())
    if isinstance(m, bool) or not integral or m < 1:
        problems["m"] = f"must be an integer >= 1, got {m!r}"
    return problems


def reference_params(**overrides) -> SystemParams:
    """Reference configuration used throughout the numerical results:
    P_s = 15 dB, sigma^2 = -30 dB, delta = 0.8, d = d1 = 1, d2 = 10,
    alpha = 2, R1 = 1.5, R2 = 0.5, sigma_e^2 = 0.001, Rayleigh, eta = 0.7.
    """
    base = dict(p_s_db=15.0, noise_db=-30.0, delta=0.8, d=1.0, d1=1.0, d2=10.0,
                alpha=2.0, r1=1.5, r2=0.5, sigma_e2=1e-3, eta=DEFAULT_ETA, m=1)
    base.update(overrides)
    return SystemParams.from_db(base.pop("p_s_db"), base.pop("noise_db"), **base)


@dataclass(frozen=True)
class Thresholds:
    tau0: float
    tau1: float
    tau2: float
    P: float


@dataclass(frozen=True)
class OmegaSet:
    """Means of the estimated relay-user gains.

    ``omega1`` belongs to the far user (distance d2), ``omega3`` to the near
    one (d1); ``omega2`` is the mean of their minimum.
    """

    omega1: float
    omega2: float
    omega3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.omega1, self.omega2, self.omega3)


@dataclass(frozen=True)
class PhiMatrix:
    """Coefficients of the two user-1 decoding thresholds,
    ``g1 > phi_n1 + phi_n2 / (P g - tau0)``; row 1 is the SIC step (decode
    s2), row 2 decoding s1. An infeasible row has both entries ``inf``.
    """

    phi11: float
    phi12: float
    phi21: float
    phi22: float
    sic_aware: bool = False

    def row(self, n: int) -> tuple[float, float]:
        if n == 1:
            return self.phi11, self.phi12
        if n == 2:
            return self.phi21, self.phi22
        raise ValueError(f"row must be 1 or 2, got {n}")


class Branch(enum.Enum):
    ALWAYS_OUTAGE = "always_outage"
    BRANCH_1 = "branch_1"
    BRANCH_2 = "branch_2"


@dataclass(frozen=True)
class DeltaBranch:
    """Which Phi row is binding for user 1 at the configured delta.

    ``lower``  = tau2/(tau2+1)               (delta <= lower: s2 never decodable)
    ``upper``  = (tau0-tau1)/(tau0+tau1 tau2 sigma_ic2)  (row switch)
    ``sic_limit`` = 1/(tau1 sigma_ic2 + 1)    (delta >= sic_limit: s1 never decodable)
    """

    branch: Branch
    lower: float
    upper: float
    sic_limit: float

    @property
    def row(self) -> int | None:
        return {Branch.BRANCH_1: 1, Branch.BRANCH_2: 2}.get(self.branch)


@dataclass(frozen=True)
class Derived:
    thresholds: Thresholds
    omegas: OmegaSet
    phi: PhiMatrix
    branch: DeltaBranch


def thresholds(p: SystemParams) -> Thresholds:
    return Thresholds(
        tau0=2.0 ** (2.0 * p.r1 + 2.0 * p.r2) - 1.0,
        tau1=2.0 ** (2.0 * p.r1) - 1.0,
        tau2=2.0 ** (2.0 * p.r2) - 1.0,
        P=p.snr,
    )


def omegas(p: SystemParams) -> OmegaSet:
    o1 = p.d2 ** (-p.alpha) + p.sigma_e2
    o3 = p.d1 ** (-p.alpha) + p.sigma_e2
    return OmegaSet(omega1=o1, omega2=o1 * o3 / (o1 + o3), omega3=o3)


def _outer_row(coef: float, sigma_e2: float, eta: float) -> tuple[float, float]:
    if not coef > 0 or math.isinf(coef):
        return math.inf, math.inf
    return coef * sigma_e2, (coef / eta if eta > 0 else math.inf)


def phi_matrix(p: SystemParams, t: Thresholds, sic_aware: bool = False) -> PhiMatrix:
    s_ic = p.sigma_ic2 if sic_aware else 0.0
    den1 = p.delta * (t.tau2 + 1.0) - t.tau2
    den2 = 1.0 - p.delta * (t.tau1 * s_ic + 1.0)
    c1 = t.tau2 / den1 if den1 > 0 else math.inf
    c2 = t.tau1 / den2 if den2 > 0 else math.inf
    phi11, phi12 = _outer_row(c1, p.sigma_e2, p.eta)
    phi21, phi22 = _outer_row(c2, p.sigma_e2, p.eta)
    return PhiMatrix(phi11, phi12, phi21, phi22, sic_aware=sic_aware)


def delta_branch(p: SystemParams, t: Thresholds, sic_aware: bool = False) -> DeltaBranch:
    s_ic = p.sigma_ic2 if sic_aware else 0.0
    lower = t.tau2 / (t.tau2 + 1.0)
    upper = (t.tau0 - t.tau1) / (t.tau0 + t.tau1 * t.tau2 * s_ic)
    sic_limit = 1.0 / (t.tau1 * s_ic + 1.0)
    delta = p.delta
    if delta <= lower or delta >= sic_limit:
        b = Branch.ALWAYS_OUTAGE
    elif delta < min(upper, sic_limit):
        b = Branch.BRANCH_1
    else:
        b = Branch.BRANCH_2
    return DeltaBranch(branch=b, lower=lower, upper=upper, sic_limit=sic_limit)


def derive(p: SystemParams, sic_aware: bool = False) -> Derived:
    """Thresholds, Omega set, Phi matrix and delta branch for ``p``.

    With ``sic_aware`` the residual-SIC power ``p.sigma_ic2`` enters the
    second Phi row and the branch breakpoints; otherwise SIC is perfect.
    """
    t = thresholds(p)
    return Derived(
        thresholds=t,
        omegas=omegas(p),
        phi=phi_matrix(p, t, sic_aware),
        branch=delta_branch(p, t, sic_aware),
    )

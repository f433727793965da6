"""Monte Carlo simulator of the two-phase relay link.

Each trial draws the source-relay gain and the two estimated relay-user
channels, then decides outage directly from the per-user SINRs. Nothing here
uses the Phi matrix or any closed form, so the counts are an independent
check on :mod:`ehnoma.analytic`.

Trials are generated in fixed-size chunks. Chunk ``i`` gets its own PCG64
stream seeded from ``(seed, i)``, so counts depend only on ``(seed, trials,
chunk_size)`` and not on how many worker processes evaluate the chunks.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .analytic import Method, OutageEstimate
from .errors import DomainError
from .model import SystemParams, thresholds

DEFAULT_CHUNK = 2 ** 16


class Scheme(enum.Enum):
    FPA = "FPA"
    FPA_ISIC = "FPA_ISIC"
    DPA = "DPA"
    OMA = "OMA"


ALL_SCHEMES = tuple(Scheme)


@dataclass(frozen=True)
class RngSpec:
    seed: int
    chunk_size: int = DEFAULT_CHUNK

    def generator(self, chunk_index: int) -> np.random.Generator:
        ss = np.random.SeedSequence([int(self.seed) & 0xFFFF_FFFF_FFFF_FFFF, int(chunk_index)])
        return np.random.Generator(np.random.PCG64(ss))


@dataclass
class TrialDraw:
    """A batch of channel realisations (every field is an array of equal length).

    ``p_prime`` is ``eta (P g - tau0)`` and is only physically meaningful
    where ``relay_ok`` holds.
    """

    g: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    p_prime: np.ndarray
    relay_ok: np.ndarray

    def __len__(self):
        return len(self.g)


def draw_trials(params: SystemParams, rng: np.random.Generator, n: int) -> TrialDraw:
    t = thresholds(params)
    m = int(params.m)
    # Nakagami-m power: Gamma(m, 1/m), unit mean
    h2 = rng.gamma(m, 1.0 / m, size=n)
    g = h2 * params.d ** (-params.alpha)

    # estimated relay-user channels: h_n d_n^{-alpha/2} + e_n, h_n ~ CN(0,1), e_n ~ CN(0, sigma_e2)
    z = rng.standard_normal(size=(8, n)) * math.sqrt(0.5)
    se = math.sqrt(params.sigma_e2)
    a1 = params.d1 ** (-params.alpha / 2.0)
    a2 = params.d2 ** (-params.alpha / 2.0)
    near = (a1 * z[0] + se * z[2]) ** 2 + (a1 * z[1] + se * z[3]) ** 2
    far = (a2 * z[4] + se * z[6]) ** 2 + (a2 * z[5] + se * z[7]) ** 2
    g1 = np.maximum(near, far)
    g2 = np.minimum(near, far)

    relay_ok = t.P * g > t.tau0
    p_prime = params.eta * (t.P * g - t.tau0)
    return TrialDraw(g=g, g1=g1, g2=g2, p_prime=p_prime, relay_ok=relay_ok)


def draw_trial(params: SystemParams, rng: np.random.Generator) -> TrialDraw:
    return draw_trials(params, rng, 1)


def _pp(trial: TrialDraw) -> np.ndarray:
    # clip so that masked-out trials cannot produce 0/0
    return np.where(trial.relay_ok, trial.p_prime, 0.0)


def eval_fpa(trial: TrialDraw, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Outage indicators (user 1, user 2) for fixed ``params.delta``."""
    t = thresholds(params)
    d, se2 = params.delta, params.sigma_e2
    pp = _pp(trial)
    noise = pp * se2 + 1.0
    gamma_12 = d * pp * trial.g1 / ((1.0 - d) * pp * trial.g1 + noise)
    gamma_1 = (1.0 - d) * pp * trial.g1 / noise
    gamma_2 = d * pp * trial.g2 / ((1.0 - d) * pp * trial.g2 + noise)
    ok1 = trial.relay_ok & (gamma_12 > t.tau2) & (gamma_1 > t.tau1)
    ok2 = trial.relay_ok & (gamma_2 > t.tau2)
    return ~ok1, ~ok2


def eval_fpa_isic(trial: TrialDraw, params: SystemParams) -> np.ndarray:
    """User-1 outage indicator with residual SIC power ``params.sigma_ic2``."""
    t = thresholds(params)
    d, se2, sic = params.delta, params.sigma_e2, params.sigma_ic2
    pp = _pp(trial)
    noise = pp * se2 + 1.0
    gamma_12 = d * pp * trial.g1 / ((1.0 - d) * pp * trial.g1 + noise)
    gamma_1 = (1.0 - d) * pp * trial.g1 / (pp * se2 + pp * d * trial.g1 * sic + 1.0)
    ok1 = trial.relay_ok & (gamma_12 > t.tau2) & (gamma_1 > t.tau1)
    return ~ok1


def dpa_delta(trial: TrialDraw, params: SystemParams) -> np.ndarray:
    """Per-trial relay split that puts the weak user exactly at its threshold
    (1 when that is impossible)."""
    t = thresholds(params)
    pp = _pp(trial)
    num = pp * trial.g2 - t.tau2 * (params.sigma_e2 * pp + 1.0)
    den = (1.0 + t.tau2) * pp * trial.g2
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(den > 0, num / den, 0.0)
    return 1.0 - np.maximum(0.0, frac)


def eval_dpa(trial: TrialDraw, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    t = thresholds(params)
    se2 = params.sigma_e2
    pp = _pp(trial)
    with np.errstate(divide="ignore"):
        weak_ok = trial.relay_ok & (trial.g2 > t.tau2 * (se2 + 1.0 / pp))
    delta = dpa_delta(trial, params)
    gamma_1 = (1.0 - delta) * pp * trial.g1 / (pp * se2 + 1.0)
    ok1 = weak_ok & (gamma_1 > t.tau1)
    return ~ok1, ~weak_ok


def eval_oma(trial: TrialDraw, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal baseline: the relay phase is split into two equal sub-slots,
    each user served alone at full relay power, so the per-user threshold is
    ``2**(4 R_n) - 1``. This baseline is a modelling choice of this package.
    """
    pp = _pp(trial)
    noise = pp * params.sigma_e2 + 1.0
    thr1 = 2.0 ** (4.0 * params.r1) - 1.0
    thr2 = 2.0 ** (4.0 * params.r2) - 1.0
    ok1 = trial.relay_ok & (pp * trial.g1 / noise > thr1)
    ok2 = trial.relay_ok & (pp * trial.g2 / noise > thr2)
    return ~ok1, ~ok2


@dataclass
class OutageCounters:
    trials: int = 0
    outage_fpa_u1: int = 0
    outage_fpa_u2: int = 0
    outage_fpa_u1_isic: int = 0
    outage_dpa_u1: int = 0
    outage_dpa_u2: int = 0
    outage_oma_u1: int = 0
    outage_oma_u2: int = 0

    def __add__(self, other: "OutageCounters") -> "OutageCounters":
        return OutageCounters(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                                 for f in fields(self)})


# (scheme, user) -> counter attribute; FPA_ISIC user 2 is unaffected by SIC
COUNTER_FOR = {
    (Scheme.FPA, 1): "outage_fpa_u1",
    (Scheme.FPA, 2): "outage_fpa_u2",
    (Scheme.FPA_ISIC, 1): "outage_fpa_u1_isic",
    (Scheme.FPA_ISIC, 2): "outage_fpa_u2",
    (Scheme.DPA, 1): "outage_dpa_u1",
    (Scheme.DPA, 2): "outage_dpa_u2",
    (Scheme.OMA, 1): "outage_oma_u1",
    (Scheme.OMA, 2): "outage_oma_u2",
}


def count_outages(trial: TrialDraw, params: SystemParams, schemes=ALL_SCHEMES) -> OutageCounters:
    c = OutageCounters(trials=len(trial))
    schemes = set(schemes)
    if Scheme.FPA in schemes or Scheme.FPA_ISIC in schemes:
        o1, o2 = eval_fpa(trial, params)
        c.outage_fpa_u1 = int(o1.sum())
        c.outage_fpa_u2 = int(o2.sum())
    if Scheme.FPA_ISIC in schemes:
        c.outage_fpa_u1_isic = int(eval_fpa_isic(trial, params).sum())
    if Scheme.DPA in schemes:
        o1, o2 = eval_dpa(trial, params)
        c.outage_dpa_u1 = int(o1.sum())
        c.outage_dpa_u2 = int(o2.sum())
    if Scheme.OMA in schemes:
        o1, o2 = eval_oma(trial, params)
        c.outage_oma_u1 = int(o1.sum())
        c.outage_oma_u2 = int(o2.sum())
    return c


def _chunk_sizes(trials: int, chunk: int) -> list[int]:
    n_full, rem = divmod(trials, chunk)
    return [chunk] * n_full + ([rem] if rem else [])


def _run_chunks(params, rng_spec, schemes, jobs) -> OutageCounters:
    total = OutageCounters()
    for idx, size in jobs:
        trial = draw_trials(params, rng_spec.generator(idx), size)
        total = total + count_outages(trial, params, schemes)
    return total


@dataclass
class CampaignResult:
    counters: OutageCounters
    estimates: dict = field(default_factory=dict)

    def estimate(self, scheme: Scheme, user: int) -> OutageEstimate:
        return self.estimates[(scheme, user)]


def binomial_estimate(count: int, trials: int) -> OutageEstimate:
    p = count / trials
    se = math.sqrt(p * (1.0 - p) / trials)
    return OutageEstimate(p, Method.MONTE_CARLO, trials=trials, stderr=se,
                          degenerate=count in (0, trials))


def run_campaign(params: SystemParams, trials: int, rng: RngSpec | int = 0,
                 schemes=ALL_SCHEMES, workers: int = 1) -> CampaignResult:
    """Simulate ``trials`` realisations and tally outages for ``schemes``.

    ``workers > 1`` evaluates chunks in a process pool; the result is
    identical to the serial run.
    """
    if isinstance(trials, bool) or int(trials) != trials or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if not isinstance(rng, RngSpec):
        rng = RngSpec(int(rng))
    schemes = tuple(Scheme(s) for s in schemes)
    if not schemes:
        raise DomainError("no schemes selected")
    jobs = list(enumerate(_chunk_sizes(int(trials), rng.chunk_size)))

    if workers <= 1 or len(jobs) == 1:
        counters = _run_chunks(params, rng, schemes, jobs)
    else:
        groups = [jobs[i::workers] for i in range(workers)]
        groups = [g for g in groups if g]
        with ProcessPoolExecutor(max_workers=len(groups)) as pool:
            parts = pool.map(_run_chunks, [params] * len(groups), [rng] * len(groups),
                             [schemes] * len(groups), groups)
            counters = OutageCounters()
            for part in parts:
                counters = counters + part

    estimates = {}
    for s in schemes:
        for user in (1, 2):
            estimates[(s, user)] = binomial_estimate(getattr(counters, COUNTER_FOR[(s, user)]),
                                                     counters.trials)
    return CampaignResult(counters=counters, estimates=estimates)

import math

import numpy as np
import pytest

from ehnoma.analytic import Method
from ehnoma.errors import DomainError
from ehnoma.mc import (
    ALL_SCHEMES,
    COUNTER_FOR,
    OutageCounters,
    RngSpec,
    Scheme,
    TrialDraw,
    binomial_estimate,
    count_outages,
    dpa_delta,
    draw_trial,
    draw_trials,
    eval_dpa,
    eval_fpa,
    eval_fpa_isic,
    eval_oma,
    run_campaign,
)
from ehnoma.model import reference_params, thresholds

REF = reference_params()


@pytest.mark.parametrize("m", [1, 3])
def test_source_gain_moments(m):
    p = reference_params(m=m, d=2.0)
    g = draw_trials(p, np.random.default_rng(3), 400_000).g
    assert g.mean() == pytest.approx(0.25, rel=0.01)
    # Gamma(m, 1/m) has variance 1/m
    assert g.var() == pytest.approx(0.25 ** 2 / m, rel=0.02)


def test_relay_user_gain_means():
    tr = draw_trials(REF, np.random.default_rng(5), 400_000)
    # g1 + g2 = near + far, whose mean is Omega1 + Omega3
    assert (tr.g1 + tr.g2).mean() == pytest.approx(0.011 + 1.001, rel=0.01)
    assert np.all(tr.g1 >= tr.g2)


def test_draw_trial_single():
    tr = draw_trial(REF, np.random.default_rng(0))
    assert isinstance(tr, TrialDraw) and len(tr) == 1


def test_rng_streams_are_distinct_and_reproducible():
    spec = RngSpec(11)
    a = spec.generator(0).random(4)
    assert np.array_equal(a, RngSpec(11).generator(0).random(4))
    assert not np.array_equal(a, spec.generator(1).random(4))
    assert not np.array_equal(a, RngSpec(12).generator(0).random(4))


def test_worker_count_does_not_change_counts():
    serial = run_campaign(REF, 1_000_000, 4, workers=1)
    parallel = run_campaign(REF, 1_000_000, 4, workers=8)
    assert serial.counters == parallel.counters


def test_partial_chunk_counts():
    res = run_campaign(REF, 100_001, RngSpec(1, chunk_size=1000))
    assert res.counters.trials == 100_001


def test_stderr_scaling():
    small = run_campaign(REF, 10_000, 1, (Scheme.FPA,)).estimate(Scheme.FPA, 2)
    large = run_campaign(REF, 1_000_000, 1, (Scheme.FPA,)).estimate(Scheme.FPA, 2)
    assert small.stderr / large.stderr == pytest.approx(10.0, rel=0.1)
    assert large.method is Method.MONTE_CARLO
    assert large.trials == 1_000_000


def test_binomial_estimate():
    e = binomial_estimate(25, 100)
    assert e.value == 0.25
    assert e.stderr == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
    assert not e.degenerate
    assert binomial_estimate(0, 100).degenerate
    assert binomial_estimate(100, 100).degenerate
    assert binomial_estimate(100, 100).stderr == 0.0


def test_event_nesting():
    tr = draw_trials(REF, np.random.default_rng(9), 200_000)
    fpa1, fpa2 = eval_fpa(tr, REF)
    dpa1, dpa2 = eval_dpa(tr, REF)
    # no relay decode -> everyone in outage
    assert np.all(fpa1[~tr.relay_ok]) and np.all(dpa2[~tr.relay_ok])
    # DPA serves user 1 only if it serves user 2
    assert np.all(dpa1 | ~dpa2)
    isic = eval_fpa_isic(tr, REF.replace(sigma_ic2=0.01))
    assert np.all(isic | ~fpa1)


def test_isic_with_zero_residual_matches_fpa():
    tr = draw_trials(REF, np.random.default_rng(1), 100_000)
    assert np.array_equal(eval_fpa_isic(tr, REF), eval_fpa(tr, REF)[0])


def test_large_residual_starves_user1():
    p = REF.replace(sigma_ic2=10.0)
    tr = draw_trials(p, np.random.default_rng(1), 50_000)
    assert eval_fpa_isic(tr, p).all()


def test_dpa_delta_puts_weak_user_at_threshold():
    p = REF
    t = thresholds(p)
    tr = draw_trials(p, np.random.default_rng(3), 50_000)
    _, out2 = eval_dpa(tr, p)
    served = ~out2
    d = dpa_delta(tr, p)[served]
    pp, g2 = tr.p_prime[served], tr.g2[served]
    gamma2 = d * pp * g2 / ((1 - d) * pp * g2 + pp * p.sigma_e2 + 1)
    np.testing.assert_allclose(gamma2, t.tau2, rtol=1e-9)
    assert np.all((d > 0) & (d <= 1))


def test_dpa_delta_is_one_without_relay():
    p = REF
    t = thresholds(p)
    g = np.array([0.5 * t.tau0 / t.P, t.tau0 / t.P])
    tr = TrialDraw(g=g, g1=np.ones(2), g2=np.ones(2), p_prime=p.eta * (t.P * g - t.tau0),
                   relay_ok=t.P * g > t.tau0)
    assert np.all(dpa_delta(tr, p) == 1.0)
    for fn in (eval_fpa, eval_dpa, eval_oma):
        o1, o2 = fn(tr, p)
        assert o1.all() and o2.all()


def test_oma_thresholds():
    p = REF.replace(sigma_e2=0.0)
    # at P' g_n = 2^(4 R_n) - 1 exactly, the user is in outage; just above, served
    thr1, thr2 = 2 ** 6 - 1, 2 ** 2 - 1
    pp = np.array([10.0, 10.0])
    tr = TrialDraw(g=np.ones(2), g1=np.array([thr1, thr1 * 1.001]) / pp,
                   g2=np.array([thr2, thr2 * 1.001]) / pp, p_prime=pp, relay_ok=np.ones(2, bool))
    o1, o2 = eval_oma(tr, p)
    assert list(o1) == [True, False]
    assert list(o2) == [True, False]


def test_counters_add_and_map():
    a = OutageCounters(trials=2, outage_fpa_u1=1)
    b = OutageCounters(trials=3, outage_fpa_u1=2, outage_oma_u2=1)
    c = a + b
    assert (c.trials, c.outage_fpa_u1, c.outage_oma_u2) == (5, 3, 1)
    assert set(COUNTER_FOR) == {(s, u) for s in ALL_SCHEMES for u in (1, 2)}


def test_count_outages_respects_schemes():
    tr = draw_trials(REF, np.random.default_rng(0), 1000)
    c = count_outages(tr, REF, (Scheme.DPA,))
    assert c.outage_fpa_u1 == 0 and c.outage_dpa_u2 > 0


def test_campaign_estimates_cover_requested_schemes():
    res = run_campaign(REF, 1000, 0, (Scheme.OMA,))
    assert set(res.estimates) == {(Scheme.OMA, 1), (Scheme.OMA, 2)}
    with pytest.raises(KeyError):
        res.estimate(Scheme.FPA, 1)


@pytest.mark.parametrize("trials", [0, -5, 2.5, True])
def test_campaign_rejects_bad_trials(trials):
    with pytest.raises(DomainError):
        run_campaign(REF, trials)


def test_campaign_rejects_no_schemes():
    with pytest.raises(DomainError):
        run_campaign(REF, 10, schemes=())

"""Exit criteria. Each test prints exactly one PASS/FAIL line.

Seeds are fixed to 1..5 and were chosen before any comparison was run.
"""

import json
import time
from importlib import resources

import numpy as np
import pytest
from scipy import integrate, stats

from ehnoma import analytic as A
from ehnoma import cli
from ehnoma.config import apply_value, family_label, load_config
from ehnoma.mc import Scheme, draw_trials, run_campaign
from ehnoma.model import omegas, reference_params
from ehnoma.specfun import bessel_k

pytestmark = pytest.mark.acceptance

SEEDS = (1, 2, 3, 4, 5)
TRIALS = 1_000_000


def within(analytic_value, est, k=3.0):
    """|analytic - mc| <= k standard errors; a degenerate estimate must match exactly."""
    if est.stderr == 0.0:
        return analytic_value == est.value, 0.0
    z = (analytic_value - est.value) / est.stderr
    return abs(z) <= k, z


def fpa_vs_mc(ms):
    worst, failures = 0.0, []
    for m in ms:
        p = reference_params(m=m)
        exact = {1: A.fpa_outage_user1(p).value, 2: A.fpa_outage_user2(p).value}
        for seed in SEEDS:
            res = run_campaign(p, TRIALS, seed, (Scheme.FPA,))
            for user in (1, 2):
                ok, z = within(exact[user], res.estimate(Scheme.FPA, user))
                worst = max(worst, abs(z))
                if not ok:
                    failures.append((m, seed, user, round(z, 2)))
    return worst, failures


def test_c01_fpa_rayleigh_vs_mc(report):
    t0 = time.perf_counter()
    worst, failures = fpa_vs_mc((1,))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30
    report("1", ok, f"max |z| = {worst:.2f} over 5 seeds x 2 users, {dt:.1f} s, failures {failures}")
    assert ok


def test_c02_fpa_nakagami_vs_mc(report):
    t0 = time.perf_counter()
    worst, failures = fpa_vs_mc((2, 3))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    report("2", ok, f"m in {{2, 3}}: max |z| = {worst:.2f}, {dt:.1f} s, failures {failures}")
    assert ok


def test_c03_dpa_vs_mc(report):
    t0 = time.perf_counter()
    points = [(15.0, 1e-3)] + [(ps, se) for ps in (5.0, 15.0, 25.0) for se in (0.0, 1e-3, 1e-2)]
    worst, failures = 0.0, []
    for ps, se in points:
        p = reference_params(p_s_db=ps, sigma_e2=se)
        exact = {1: A.dpa_outage_user1(p, 30).value, 2: A.dpa_outage_user2(p).value}
        res = run_campaign(p, TRIALS, SEEDS[0], (Scheme.DPA,))
        for user in (1, 2):
            ok, z = within(exact[user], res.estimate(Scheme.DPA, user))
            worst = max(worst, abs(z))
            if not ok:
                failures.append((ps, se, user, round(z, 2)))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 300
    report("3", ok, f"{len(points)} points x 2 users: max |z| = {worst:.2f}, {dt:.1f} s, failures {failures}")
    assert ok


def test_c04_imperfect_sic(report):
    worst, failures, identical = 0.0, [], True
    for ps in (15.0, 30.0):
        for sic in (0.0, 1e-3, 1e-2, 0.1):
            p = reference_params(p_s_db=ps, sigma_ic2=sic)
            exact = A.fpa_outage_user1_isic(p).value
            res = run_campaign(p, TRIALS, SEEDS[0], (Scheme.FPA_ISIC,))
            ok, z = within(exact, res.estimate(Scheme.FPA_ISIC, 1))
            worst = max(worst, abs(z))
            if not ok:
                failures.append((ps, sic, round(z, 2)))
            if sic == 0.0:
                base = A.fpa_outage_user1(p).value
                identical &= abs(exact - base) <= 1e-12 * abs(base)
    ok = not failures and identical
    report("4", ok, f"max |z| = {worst:.2f}, sigma_ic2 = 0 matches perfect SIC: {identical}, failures {failures}")
    assert ok


def test_c05_boundary_exactness(report):
    bad = []
    for delta in (0.3, 0.5):
        p = reference_params(delta=delta, r2=0.5)  # tau2 = 1
        values = {
            "fpa_u1": A.fpa_outage_user1(p).value,
            "fpa_u2": A.fpa_outage_user2(p).value,
            "fpa_u1_isic": A.fpa_outage_user1_isic(p).value,
            "floor_u1": A.fpa_floor(p, 1),
            "floor_u2": A.fpa_floor(p, 2),
        }
        bad += [(delta, k) for k, v in values.items() if v != 1.0]
        res = run_campaign(p, 100_000, SEEDS[0], (Scheme.FPA, Scheme.FPA_ISIC))
        c = res.counters
        for name in ("outage_fpa_u1", "outage_fpa_u2", "outage_fpa_u1_isic"):
            if getattr(c, name) != c.trials:
                bad.append((delta, name))
    ok = not bad
    report("5", ok, f"delta in {{0.3, 0.5}}: closed forms and MC counts all exactly 1; problems {bad}")
    assert ok


def test_c06_outage_floor(report):
    gaps = []
    for user, fn in ((1, A.fpa_outage_user1), (2, A.fpa_outage_user2)):
        p = reference_params(p_s_db=90.0)
        gaps.append(abs(fn(p).value - A.fpa_floor(p, user)))
    positive = all(A.fpa_floor(reference_params(sigma_e2=se), u) > 0
                   for se in (1e-5, 1e-3, 1e-1) for u in (1, 2))
    zero = all(A.fpa_floor(reference_params(sigma_e2=0.0), u) == 0.0 for u in (1, 2))
    ok = max(gaps) <= 1e-3 and positive and zero
    report("6", ok, f"gap at 90 dB = {max(gaps):.2e}, positive floors {positive}, zero floors at sigma_e2=0 {zero}")
    assert ok


def test_c07_quadrature_convergence(report):
    worst, non_monotone = 0.0, []
    for ps in (5.0, 10.0, 15.0, 20.0, 25.0):
        for se in (0.0, 1e-3, 1e-2, 1e-1):
            p = reference_params(p_s_db=ps, sigma_e2=se)
            direct = A.upsilon_ii_direct(p)
            for J in (30, 40, 60, 100):
                worst = max(worst, abs(A.upsilon_ii_chebyshev(p, J) - direct) / direct)
            q = [A.upsilon_ii_chebyshev(p, J) for J in (5, 10, 20, 40)]
            diffs = [abs(b - a) for a, b in zip(q, q[1:])]
            if not all(b < a for a, b in zip(diffs, diffs[1:])):
                non_monotone.append((ps, se))
    ok = worst <= 1e-2 and not non_monotone
    report("7", ok, f"20-point grid: max rel error for J >= 30 = {worst:.1e}; "
                    f"Cauchy differences over J = 5, 10, 20, 40 non-monotone at {non_monotone}")
    assert ok


def test_c08_distributional_oracles(report):
    p = reference_params()
    g1 = draw_trials(p, np.random.default_rng(SEEDS[0]), TRIALS).g1
    ks = stats.kstest(g1, lambda x: A.ordered_gain_cdf(x, omegas(p))).statistic

    pvals = {}
    for m in (1, 3):
        q = reference_params(m=m)
        g = draw_trials(q, np.random.default_rng(SEEDS[1]), TRIALS).g
        # equal-probability bin edges; expected mass from integrating the density under test
        edges = stats.gamma.ppf(np.linspace(0, 1, 41), m, scale=1.0 / m)
        mass = [integrate.quad(lambda x: A.source_gain_pdf(x, m, q.d, q.alpha), a, b)[0]
                for a, b in zip(edges[:-1], edges[1:])]
        observed = np.histogram(g, bins=edges)[0]
        expected = np.asarray(mass) / np.sum(mass) * observed.sum()
        pvals[m] = stats.chisquare(observed, expected).pvalue
    ok = ks <= 0.002 and all(v > 0.01 for v in pvals.values())
    report("8", ok, f"KS(g1) = {ks:.5f}; chi-square p-values {', '.join(f'm={m}: {v:.3f}' for m, v in pvals.items())}")
    assert ok


def test_c09_special_functions(report):
    rows = json.loads(resources.files("ehnoma").joinpath("data/bessel_golden.json").read_text())["rows"]
    worst = max(abs(bessel_k(r["order"], float.fromhex(r["z"])) / float(r["value"]) - 1) for r in rows)
    rec = 0.0
    for v in range(1, 6):
        for z in np.logspace(-6, 2, 60):
            lhs = bessel_k(v + 1, z)
            rec = max(rec, abs(lhs - bessel_k(v - 1, z) - 2 * v / z * bessel_k(v, z)) / lhs)
    ok = worst <= 1e-10 and rec <= 1e-9 and len(rows) == 280
    report("9", ok, f"golden max rel error {worst:.1e} over {len(rows)} values; recurrence residual {rec:.1e}")
    assert ok


def test_c10_qualitative_claims(report):
    p = reference_params()
    a = (A.fpa_outage_user1(p).value < A.dpa_outage_user1(p).value
         and A.dpa_outage_user2(p).value < A.fpa_outage_user2(p).value)

    params, spec = load_config(preset="fig4")
    b_bad = []
    for member in spec.family:
        base = params
        for k, v in member:
            base = apply_value(base, k, v)
        for x in spec.values:
            q = apply_value(base, spec.param, x)
            oma = run_campaign(q, TRIALS, SEEDS[0], (Scheme.OMA,))
            for user, fn in ((1, A.fpa_outage_user1), (2, A.fpa_outage_user2)):
                if not fn(q).value < oma.estimate(Scheme.OMA, user).value:
                    b_bad.append((family_label(member), x, user))

    params, spec = load_config(preset="fig2")
    c_bad = []
    fns = {"FPA1": A.fpa_outage_user1, "FPA2": A.fpa_outage_user2,
           "DPA1": A.dpa_outage_user1, "DPA2": A.dpa_outage_user2}
    for x in spec.values:
        curves = []
        for member in spec.family:  # rate pairs listed in increasing order
            q = params
            for k, v in member:
                q = apply_value(q, k, v)
            q = apply_value(q, spec.param, x)
            curves.append({k: fn(q).value for k, fn in fns.items()})
        for k in fns:
            seq = [c[k] for c in curves]
            if any(b < a for a, b in zip(seq, seq[1:])):
                c_bad.append((x, k))
    ok = a and not b_bad and not c_bad
    report("10", ok, f"(a) {a}; (b) FPA below OMA everywhere on fig4: {not b_bad} {b_bad}; "
                     f"(c) non-decreasing in rates on fig2: {not c_bad} {c_bad}")
    assert ok


def test_c11_determinism_across_workers(tmp_path, report):
    outs = []
    for workers in (1, 2):
        out = tmp_path / f"w{workers}"
        code = cli.main(["run", "--preset", "fig3", "--out", str(out), "--seed", str(SEEDS[0]),
                         "--format", "csv", "--workers", str(workers)])
        outs.append((code, (out / "fig3.csv").read_bytes()))
    ok = outs[0][0] == outs[1][0] == 0 and outs[0][1] == outs[1][1]
    report("11", ok, f"fig3 CSV with 1 and 2 workers byte-identical ({len(outs[0][1])} bytes)")
    assert ok

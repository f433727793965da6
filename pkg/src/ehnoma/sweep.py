"""One-dimensional parameter sweeps and their CSV form."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from . import analytic
from .config import SweepSpec, apply_value, family_label
from .errors import UnsupportedModelError
from .mc import Scheme, run_campaign
from .model import SystemParams

log = logging.getLogger(__name__)

CSV_HEADER = ("sweep_param", "value", "scheme", "user", "method", "outage", "stderr", "trials", "seed", "J")
SCHEME_ORDER = {s: i for i, s in enumerate(Scheme)}
METHOD_ORDER = {"analytic": 0, "mc": 1}


@dataclass(frozen=True)
class ResultRow:
    sweep_param: str
    value: float
    scheme: str
    user: int
    method: str
    outage: float | None
    stderr: float | None = None
    trials: int | None = None
    seed: int | None = None
    J: int | None = None
    series: str = ""
    error: str | None = field(default=None, compare=False)


def analytic_outage(params: SystemParams, scheme: Scheme, user: int, J: int) -> float:
    if scheme is Scheme.FPA or (scheme is Scheme.FPA_ISIC and user == 2):
        fn = analytic.fpa_outage_user1 if user == 1 else analytic.fpa_outage_user2
        return fn(params).value
    if scheme is Scheme.FPA_ISIC:
        return analytic.fpa_outage_user1_isic(params).value
    if scheme is Scheme.DPA:
        if user == 1:
            return analytic.dpa_outage_user1(params, J).value
        return analytic.dpa_outage_user2(params).value
    raise UnsupportedModelError(f"no closed form for scheme {scheme.value}")


def _point_rows(spec: SweepSpec, params: SystemParams, x: float, series: str, workers: int):
    rows = []
    campaign = None
    if "mc" in spec.methods:
        campaign = run_campaign(params, spec.trials, spec.seed, spec.schemes, workers=workers)
    for scheme in sorted(spec.schemes, key=SCHEME_ORDER.get):
        for user in sorted(spec.users):
            for method in sorted(spec.methods, key=METHOD_ORDER.get):
                if method == "analytic" and scheme is Scheme.OMA:
                    continue  # simulation-only baseline
                base = dict(sweep_param=spec.param, value=x, scheme=scheme.value, user=user,
                            method=method, series=series)
                if method == "mc":
                    est = campaign.estimate(scheme, user)
                    rows.append(ResultRow(outage=est.value, stderr=est.stderr, trials=spec.trials,
                                          seed=spec.seed, **base))
                    continue
                uses_j = scheme is Scheme.DPA and user == 1
                try:
                    value = analytic_outage(params, scheme, user, spec.J)
                except UnsupportedModelError as exc:
                    log.warning("%s=%g %s user %d: %s", spec.param, x, scheme.value, user, exc)
                    rows.append(ResultRow(outage=None, J=spec.J if uses_j else None,
                                          error=str(exc), **base))
                    continue
                rows.append(ResultRow(outage=value, J=spec.J if uses_j else None, **base))
    return rows


def run_sweep(spec: SweepSpec, params: SystemParams, workers: int = 1) -> list[ResultRow]:
    """Evaluate every (family member, grid point, scheme, user, method) combination.

    Rows come back grouped by family member, then in grid order, then by
    scheme, user and method. OMA has no closed form and only gets mc rows.
    Closed forms that do not exist for the model (DPA with m != 1) yield a
    row with ``outage=None`` and ``error`` set.
    """
    rows = []
    for member in spec.family:
        p_member = params
        for key, val in member:
            p_member = apply_value(p_member, key, val)
        series = family_label(member)
        for x in spec.values:
            rows.extend(_point_rows(spec, apply_value(p_member, spec.param, x), x, series, workers))
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(rows, path) -> Path:
    """Write rows with the fixed header; floats to 17 significant digits."""
    rows = list(rows)
    if not rows:
        raise ValueError("emit_csv: no rows")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    return path


def read_csv(path, series: str = "") -> list[ResultRow]:
    def opt(conv, s):
        return conv(s) if s != "" else None

    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
        for rec in reader:
            out.append(ResultRow(
                sweep_param=rec["sweep_param"], value=float(rec["value"]), scheme=rec["scheme"],
                user=int(rec["user"]), method=rec["method"], outage=opt(float, rec["outage"]),
                stderr=opt(float, rec["stderr"]), trials=opt(int, rec["trials"]),
                seed=opt(int, rec["seed"]), J=opt(int, rec["J"]), series=series))
    return out

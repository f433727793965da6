"""INI-style experiment configuration.

Two sections, flat keys only::

    [params]
    p_s_db    = 15        # source power, dB
    noise_db  = -30       # noise variance, dB
    delta     = 0.8
    d = 1
    d1 = 1
    d2 = 10
    alpha     = 2
    r1 = 1.5
    r2 = 0.5
    sigma_e2  = 0.001     # or sigma_e2_db = -30
    eta       = 0.7       # optional, default 0.7
    xi        = 0.5       # optional, reported only
    m         = 1         # optional
    sigma_ic2 = 0         # optional (or sigma_ic2_db)

    [sweep]
    param   = p_s_db                  # sigma_e2 p_s_db noise_db delta sigma_ic2 eta r1 r2
    values  = 0:30:2.5                # start:stop:step, log:lo:hi:count, or a comma list
    schemes = FPA, DPA                # FPA FPA_ISIC DPA OMA
    users   = 1, 2
    methods = analytic, mc
    trials  = 100000
    seed    = 1
    J       = 30
    family  = r1=1.5;r2=0.5 | r1=1.0;r2=0.5    # optional: one curve set per member

dB values convert as ``linear = 10 ** (db / 10)``.
"""

from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .mc import Scheme
from .model import DEFAULT_ETA, SystemParams, db_to_linear

log = logging.getLogger(__name__)

REQUIRED_PARAMS = ("p_s_db", "noise_db", "delta", "d", "d1", "d2", "alpha", "r1", "r2")
OPTIONAL_PARAMS = ("sigma_e2", "sigma_e2_db", "eta", "xi", "m", "sigma_ic2", "sigma_ic2_db")
SWEEP_PARAMS = ("sigma_e2", "p_s_db", "noise_db", "delta", "sigma_ic2", "eta", "r1", "r2")
SWEEP_KEYS = ("param", "values", "schemes", "users", "methods", "trials", "seed", "J", "family")
METHODS = ("analytic", "mc")
PRESET_DIR = Path(__file__).with_name("presets")
PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple[float, ...]
    schemes: tuple[Scheme, ...] = (Scheme.FPA,)
    users: tuple[int, ...] = (1, 2)
    methods: tuple[str, ...] = METHODS
    trials: int = 100_000
    seed: int = 1
    J: int = 30
    family: tuple[tuple[tuple[str, float], ...], ...] = ((),)

    def __post_init__(self):
        problems = {}
        if self.param not in SWEEP_PARAMS:
            problems["param"] = f"unknown sweep parameter {self.param!r}; choose from {', '.join(SWEEP_PARAMS)}"
        v = np.asarray(self.values, dtype=float)
        if v.size == 0:
            problems["values"] = "grid is empty"
        elif v.size > 1 and not (np.all(np.diff(v) > 0) or np.all(np.diff(v) < 0)):
            problems["values"] = "grid must be strictly monotone"
        elif not np.all(np.isfinite(v)):
            problems["values"] = "grid values must be finite"
        if not self.schemes:
            problems["schemes"] = "no schemes selected"
        if not self.users or not set(self.users) <= {1, 2}:
            problems["users"] = f"users must be a non-empty subset of {{1, 2}}, got {self.users!r}"
        if not self.methods or not set(self.methods) <= set(METHODS):
            problems["methods"] = f"methods must be a non-empty subset of {METHODS}, got {self.methods!r}"
        if "mc" in self.methods and self.trials < 1:
            problems["trials"] = "must be >= 1 when mc is selected"
        if self.J < 1:
            problems["J"] = "must be >= 1"
        for member in self.family:
            for key, _ in member:
                if key not in SWEEP_PARAMS:
                    problems["family"] = f"unknown family parameter {key!r}"
        if problems:
            raise ValidationError(problems)


def family_label(member) -> str:
    return ",".join(f"{k}={v:g}" for k, v in member)


def parse_grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    if text.startswith("log:"):
        _, lo, hi, n = text.split(":")
        return tuple(float(x) for x in np.logspace(math.log10(float(lo)), math.log10(float(hi)), int(n)))
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(start + i * step) for i in range(n))
    return tuple(float(x) for x in _split(text))


def _split(text: str, sep: str = ",") -> list[str]:
    return [s.strip() for s in text.split(sep) if s.strip()]


def _parse_family(text: str):
    members = []
    for chunk in _split(text, "|"):
        assignments = []
        for a in _split(chunk, ";"):
            key, _, val = a.partition("=")
            assignments.append((key.strip(), float(val)))
        members.append(tuple(assignments))
    return tuple(members) or ((),)


def apply_value(params: SystemParams, name: str, value: float) -> SystemParams:
    """Return ``params`` with one sweep/family parameter set (dB keys converted)."""
    if name == "p_s_db":
        return params.replace(p_s=db_to_linear(value))
    if name == "noise_db":
        return params.replace(sigma2=db_to_linear(value))
    if name in SWEEP_PARAMS:
        return params.replace(**{name: value})
    raise ValidationError({name: "not a sweepable parameter"})


def _params_from_section(sec) -> SystemParams:
    problems: dict[str, str] = {}
    for key in sec:
        if key not in REQUIRED_PARAMS + OPTIONAL_PARAMS:
            problems[key] = "unknown key in [params]"
    for key in REQUIRED_PARAMS:
        if key not in sec:
            problems[key] = "missing required key in [params]"
    if "sigma_e2" not in sec and "sigma_e2_db" not in sec:
        problems["sigma_e2"] = "missing required key in [params] (sigma_e2 or sigma_e2_db)"
    if problems:
        raise ValidationError(problems)

    def num(key):
        try:
            return float(sec[key])
        except ValueError:
            problems[key] = f"not a number: {sec[key]!r}"
            return math.nan

    kw = {k: num(k) for k in ("delta", "d", "d1", "d2", "alpha", "r1", "r2")}
    kw["sigma_e2"] = db_to_linear(num("sigma_e2_db")) if "sigma_e2_db" in sec else num("sigma_e2")
    if "sigma_ic2_db" in sec:
        kw["sigma_ic2"] = db_to_linear(num("sigma_ic2_db"))
    elif "sigma_ic2" in sec:
        kw["sigma_ic2"] = num("sigma_ic2")
    if "eta" in sec:
        kw["eta"] = num("eta")
    else:
        log.info("eta not given; using default %.2f", DEFAULT_ETA)
    if "xi" in sec:
        kw["xi"] = num("xi")
    if "m" in sec:
        try:
            kw["m"] = int(sec["m"])
        except ValueError:
            problems["m"] = f"not an integer: {sec['m']!r}"
    p_s_db, noise_db = num("p_s_db"), num("noise_db")
    if problems:
        raise ValidationError(problems)
    return SystemParams.from_db(p_s_db, noise_db, **kw)


def _sweep_from_section(sec) -> SweepSpec:
    problems = {k: "unknown key in [sweep]" for k in sec if k not in SWEEP_KEYS}
    for key in ("param", "values"):
        if key not in sec:
            problems[key] = "missing required key in [sweep]"
    if problems:
        raise ValidationError(problems)
    kw = {"param": sec["param"].strip()}
    try:
        kw["values"] = parse_grid(sec["values"])
        if "schemes" in sec:
            kw["schemes"] = tuple(Scheme(s.upper()) for s in _split(sec["schemes"]))
        if "users" in sec:
            kw["users"] = tuple(int(u) for u in _split(sec["users"]))
        if "methods" in sec:
            kw["methods"] = tuple(s.lower() for s in _split(sec["methods"]))
        for key in ("trials", "seed", "J"):
            if key in sec:
                kw[key] = int(float(sec[key]))
        if "family" in sec:
            kw["family"] = _parse_family(sec["family"])
    except ValueError as exc:
        raise ValidationError({"sweep": str(exc)}) from None
    return SweepSpec(**kw)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str  # keys are case sensitive (J)
    return cp


def load_config(path=None, preset: str | None = None) -> tuple[SystemParams, SweepSpec]:
    """Parse and validate a config file.

    With ``preset`` the packaged preset is read first and ``path`` (if given)
    overrides individual keys.
    """
    cp = _parser()
    files = []
    if preset is not None:
        if preset not in PRESETS:
            raise ValidationError({"preset": f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}"})
        files.append(PRESET_DIR / f"{preset}.ini")
    if path is not None:
        files.append(Path(path))
    if not files:
        raise ValidationError({"config": "no config file or preset given"})
    for f in files:
        if not Path(f).is_file():
            raise ValidationError({"config": f"file not found: {f}"})
        try:
            cp.read(f)
        except configparser.Error as exc:
            raise ValidationError({"config": f"cannot parse {f}: {exc}"}) from None
    extra = [s for s in cp.sections() if s not in ("params", "sweep")]
    if extra:
        raise ValidationError({s: "unknown section" for s in extra})
    for s in ("params", "sweep"):
        if not cp.has_section(s):
            raise ValidationError({s: "missing section"})
    return _params_from_section(cp["params"]), _sweep_from_section(cp["sweep"])

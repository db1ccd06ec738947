"""Scan sweeps over primes x families x regions, and deterministic report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from importlib import resources

import numpy as np

from . import __version__
from .bounds import (
    DEFAULT_EPS, FORMULAS, GAP_CEILING, LARGE_ENOUGH, BoundCheck, check_H, concrete_bound,
    fourier_sup_check, gap_bound_ratio, mult_interval_bound, off_diagonal_check,
    sigma_lower_bounds, sliding_bound_general, special_bounds, trace_interval_bound,
)
from .families import (
    build_fourier_family, build_kloosterman, build_korobov, build_mixed_char,
    build_quadratic_phase, build_residue_indicator, build_sym_power, restrict_multiplicative,
)
from .regions import GapSpec, IntervalZm, NonProperGAP, sigma_statistic, sigma_via_correlations, sum_region
from .ring import CharacterSpec, FieldContext, RationalFunction, field_context, is_prime, isqrt_ceil
from .spectral import completion_l1, correlations, dft
from .tabulated import TabulatedFunction

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (101, 211, 499, 1009, 2003, 10007)
DEFAULT_FAMILIES = (
    "mixed:order=2,f=X,g=0",
    "mixed:order=2,f=X^2+1,g=X^3",
    "kloosterman",
    "sympower:d=2",
    "quadphase:h=1",
    "korobov:h=1",
    "fourier:order=1,f=1,g=X^3",
)
DEFAULT_MULTIPLIERS = (1.5, 2.0, 4.0, 8.0, 16.0)
FAMILY_KINDS = ("mixed", "legendre", "kloosterman", "sympower", "quadphase", "korobov",
                "fourier", "residue")

FLOAT_DIGITS = 12


class ConfigError(ValueError):
    """Invalid scan configuration, family descriptor or region descriptor."""


# ---------------------------------------------------------------------------
# configuration


def _parse_primes(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text.startswith("range:"):
        lo, _, hi = text[6:].partition("-")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError as exc:
            raise ConfigError(f"bad prime range {text!r}") from exc
        return tuple(n for n in range(max(lo_i, 2), hi_i + 1) if is_prime(n))
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            n = int(tok)
        except ValueError as exc:
            raise ConfigError(f"bad prime {tok!r}") from exc
        if not is_prime(n):
            raise ConfigError(f"{n} is not prime")
        out.append(n)
    return tuple(out)


def _parse_gap_shapes(text: str) -> tuple[tuple[int, float], ...]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        k, _, mult = tok.partition(":")
        try:
            out.append((int(k), float(mult or 4)))
        except ValueError as exc:
            raise ConfigError(f"bad gap shape {tok!r}, expected k:multiplier") from exc
    return tuple(out)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc



@dataclass
class ScanConfig:
    primes: tuple[int, ...] = DEFAULT_PRIMES
    families: tuple[str, ...] = DEFAULT_FAMILIES
    multipliers: tuple[float, ...] = DEFAULT_MULTIPLIERS
    starts: int = 5                 # start 1 plus (starts - 1) seeded samples
    gap_shapes: tuple[tuple[int, float], ...] = ((2, 4.0),)
    bounds: tuple[str, ...] = ()    # empty means all
    eps: float = DEFAULT_EPS
    format: str = "json"
    workers: int = 1
    seed: int = 0
    max_p: int = 1_000_000          # per-cell memory ceiling, in table entries
    direct_limit: int = 20_000      # above this, only FFT paths run
    large_enough: float = LARGE_ENOUGH
    gap_ceiling: float = GAP_CEILING

    _parsers = {
        "primes": _parse_primes,
        "families": lambda s: tuple(t.strip() for t in s.split(";") if t.strip()),
        "multipliers": _floats,
        "starts": int,
        "gap_shapes": _parse_gap_shapes,
        "bounds": lambda s: tuple(t.strip() for t in s.split(",") if t.strip()),
        "eps": float,
        "format": str.strip,
        "workers": int,
        "seed": int,
        "max_p": lambda s: int(float(s)),
        "direct_limit": lambda s: int(float(s)),
        "large_enough": float,
        "gap_ceiling": float,
    }

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise ConfigError(f"not prime: {bad}")
        if not 0 < self.eps < 1 / 3:
            raise ConfigError("eps must lie in (0, 1/3)")
        if self.starts < 1:
            raise ConfigError("need at least one start per length")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        unknown = set(self.bounds) - set(FORMULAS)
        if unknown:
            raise ConfigError(f"unknown bound names {sorted(unknown)}")
        for desc in self.families:
            FamilySpec.parse(desc)

    @classmethod
    def from_text(cls, text: str, **overrides) -> "ScanConfig":
        kw = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in cls._parsers:
                raise ConfigError(f"line {lineno}: expected one of {sorted(cls._parsers)} = value")
            try:
                kw[key] = cls._parsers[key](value.strip())
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    @classmethod
    def from_file(cls, path, **overrides) -> "ScanConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), **overrides)

    @classmethod
    def default(cls, **overrides) -> "ScanConfig":
        text = resources.files("slidesum").joinpath("data/default_scan.cfg").read_text("utf-8")
        return cls.from_text(text, **overrides)

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "gap_shapes":
                v = [f"{k}:{_fmt(mult)}" for k, mult in v]
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = _clean(v)
        return out


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    params: tuple[tuple[str, str], ...] = ()

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        kind, _, rest = text.strip().partition(":")
        kind = kind.strip().lower()
        if kind not in FAMILY_KINDS:
            raise ConfigError(f"unknown family kind {kind!r}")
        params = []
        for tok in filter(None, (t.strip() for t in rest.split(","))):
            k, sep, v = tok.partition("=")
            if not sep:
                raise ConfigError(f"family parameter {tok!r} is not key=value")
            params.append((k.strip(), v.strip()))
        spec = cls(kind, tuple(params))
        spec._check_keys()
        return spec

    _allowed = {
        "mixed": {"order", "index", "f", "g", "c"},
        "legendre": {"c"},
        "kloosterman": {"c"},
        "sympower": {"d", "c"},
        "quadphase": {"h", "c"},
        "korobov": {"h", "c"},
        "fourier": {"order", "index", "f", "g", "c"},
        "residue": {"f"},
    }

    def _check_keys(self) -> None:
        extra = {k for k, _ in self.params} - self._allowed[self.kind]
        if extra:
            raise ConfigError(f"{self.kind} does not take {sorted(extra)}")
        try:
            for k, v in self.params:
                if k in ("f", "g"):
                    RationalFunction.parse(v)
                else:
                    float(v)
        except ValueError as exc:
            raise ConfigError(f"bad parameter in {self}: {exc}") from exc

    def get(self, key: str, default=None):
        return dict(self.params).get(key, default)

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return self.kind + ":" + ",".join(f"{k}={v}" for k, v in self.params)

    def _conductor(self, default):
        c = self.get("c")
        return default if c is None else float(c)

    def build(self, ctx: FieldContext) -> "BuiltFamily":
        k = self.kind
        tag = str(self)
        if k in ("mixed", "legendre", "fourier"):
            if k == "legendre":
                chi, f, g = CharacterSpec(2, 1), RationalFunction.parse("X"), RationalFunction.parse("0")
            else:
                chi = CharacterSpec(int(self.get("order", 2)), int(self.get("index", 1)))
                f = RationalFunction.parse(self.get("f", "X"))
                g = RationalFunction.parse(self.get("g", "0"))
            if k == "fourier":
                psi = build_mixed_char(chi, f, g, ctx)
                phi = build_fourier_family(psi, conductor=self._conductor(None), tag=tag)
                return BuiltFamily(tag, phi, trace=True, special="fourier", psi_fg=(f, g))
            phi = build_mixed_char(chi, f, g, ctx, conductor=self._conductor(None))
            phi = phi.with_values(phi.values, family_tag=tag)
            # chi(f) e(g/p) fails H(c) when it is a constant times an additive character
            degenerate = (chi.is_trivial or f.is_power_mod(chi.order, ctx.p)) \
                and g.is_low_degree_polynomial_mod(ctx.p)
            return BuiltFamily(tag, phi, trace=not degenerate)
        if k == "kloosterman":
            phi = build_kloosterman(ctx, conductor=self._conductor(5.0))
            return BuiltFamily(tag, phi.with_values(phi.values, family_tag=tag), trace=True,
                               special="kloosterman")
        if k == "sympower":
            d = int(self.get("d", 2))
            phi = build_sym_power(d, ctx, conductor=self._conductor(None))
            return BuiltFamily(tag, phi.with_values(phi.values, family_tag=tag), trace=True)
        if k == "quadphase":
            phi = build_quadratic_phase(int(self.get("h", 1)), ctx, conductor=self._conductor(4.0))
            return BuiltFamily(tag, phi.with_values(phi.values, family_tag=tag), trace=True,
                               special="quadphase")
        if k == "korobov":
            phi = build_korobov(int(self.get("h", 1)), ctx, conductor=self._conductor(3.0))
            return BuiltFamily(tag, phi.with_values(phi.values, family_tag=tag), trace=False,
                               special="korobov")
        if k == "residue":
            phi, _ = build_residue_indicator(RationalFunction.parse(self.get("f", "X^2")), ctx)
            return BuiltFamily(tag, phi.with_values(phi.values, family_tag=tag), trace=False)
        raise ConfigError(f"unknown family kind {k!r}")  # pragma: no cover


@dataclass
class BuiltFamily:
    tag: str
    phi: TabulatedFunction
    trace: bool                      # built-in family satisfying the trace-function hypotheses
    special: str | None = None       # kind for the (3^(1/3) + eps) bounds
    psi_fg: tuple | None = None


# ---------------------------------------------------------------------------
# regions


def parse_region(text: str, m: int) -> IntervalZm | GapSpec:
    """``interval:start,length`` or ``gap:a0;a1,N1;a2,N2...``; subsets are read by the CLI."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "interval":
            s, length = (int(t) for t in rest.split(","))
            return IntervalZm(m, s, length)
        if kind == "gap":
            parts = rest.split(";")
            base = int(parts[0])
            gens, lens = [], []
            for part in parts[1:]:
                a, n = (int(t) for t in part.split(","))
                gens.append(a)
                lens.append(n)
            return GapSpec(m, base, tuple(gens), tuple(lens))
    except ValueError as exc:
        raise ConfigError(f"bad region {text!r}: {exc}") from exc
    raise ConfigError(f"unknown region kind in {text!r}")


def interval_lengths(m: int, p: int, multipliers) -> list[tuple[float, int]]:
    r = isqrt_ceil(p)
    return [(mult, int(math.ceil(mult * r))) for mult in multipliers]


def interval_starts(seed: int, p: int, m: int, length: int, count: int) -> list[tuple[int, bool]]:
    """Start 1 plus seeded starts; each stream depends only on (seed, p, length, j)."""
    out = [(1, False)]
    for j in range(1, count):
        rng = np.random.default_rng([seed, p, length, j])
        out.append((int(rng.integers(0, m)), True))
    return out


def gap_for_shape(m: int, p: int, k: int, mult: float, base: int = 1) -> GapSpec | None:
    """A proper k-dimensional progression of size about mult * ceil(sqrt(p)).

    Side lengths are balanced and generator a_i is the product of (N_j + 1) for
    j < i, which keeps representations unique as long as the span is below m.
    """
    if k < 1:
        return None
    target = mult * isqrt_ceil(p)
    n = max(2, int(round(target ** (1 / k))))
    lengths = [n] * k
    gens, span = [], 1
    for i in range(k):
        gens.append(span)
        span *= lengths[i] + 1
    if span >= m:
        return None
    return GapSpec(m, base, tuple(gens), tuple(lengths))


# ---------------------------------------------------------------------------
# records


def _fmt(x: float) -> float:
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.{FLOAT_DIGITS}g}")


def _clean(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


BOUND_FIELDS = ("record", "bound_name", "paper_eq", "p", "m", "family", "region", "multiplier",
                "sampled", "c", "eps", "lhs", "rhs", "ratio", "pass", "fatal", "flag")


def bound_record(chk: BoundCheck, *, p: int, m: int, family: str, region: str = "",
                 multiplier: float | None = None, sampled: bool = False,
                 c: float | None = None, eps: float | None = None) -> dict:
    vals = dict(record="bound", bound_name=chk.bound_name, paper_eq=chk.formula, p=p, m=m,
                family=family, region=region, multiplier=multiplier, sampled=sampled, c=c,
                eps=eps, lhs=chk.lhs, rhs=chk.rhs, ratio=chk.ratio, **{"pass": chk.passed},
                fatal=chk.fatal, flag=chk.flag)
    return {k: _clean(vals[k]) for k in BOUND_FIELDS}


def h_record(rep, *, p: int, m: int, family: str, group: str) -> dict:
    return {k: _clean(v) for k, v in dict(
        record="hcheck", p=p, m=m, family=family, group=group, c=rep.c, sup_ok=rep.sup_ok,
        D_size=len(rep.D), d_ok=rep.d_ok, max_offD=rep.max_offD, threshold=rep.threshold,
        verdict=rep.verdict).items()}


def skip_record(*, p: int, family: str, region: str, reason: str) -> dict:
    return dict(record="skip", p=p, family=family, region=region, reason=reason)


# ---------------------------------------------------------------------------
# the scan


@dataclass
class Report:
    version: str
    config: dict
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.summary:
            self.summary = summarize(self.records)

    @property
    def violations(self) -> list[dict]:
        return [r for r in self.records if r["record"] == "bound" and r["fatal"] and not r["pass"]]

    @property
    def skipped(self) -> list[dict]:
        return [r for r in self.records if r["record"] == "skip"]

    def exit_code(self, strict: bool = False) -> int:
        if self.violations:
            return 1
        if strict and self.skipped:
            return 3
        return 0

    def as_dict(self) -> dict:
        return {"tool": "slidesum", "version": self.version, "config": self.config,
                "summary": self.summary, "records": self.records}


def summarize(records: list[dict]) -> dict:
    """Aggregates that are a pure function of the record list."""
    max_ratio: dict[str, float] = {}
    counts = {"bound": 0, "hcheck": 0, "sigma": 0, "skip": 0}
    failures, flagged = [], 0
    h_failed = 0
    for r in records:
        kind = r["record"]
        counts[kind] = counts.get(kind, 0) + 1
        if kind == "bound":
            name = r["bound_name"]
            if r["ratio"] is not None and r["ratio"] > max_ratio.get(name, -1.0):
                max_ratio[name] = r["ratio"]
            if r["flag"]:
                flagged += 1
            if r["fatal"] and not r["pass"]:
                failures.append(f'{name} p={r["p"]} {r["family"]} {r["region"]}')
        elif kind == "hcheck" and not r["verdict"]:
            h_failed += 1
    return {"counts": counts, "max_ratio": dict(sorted(max_ratio.items())),
            "fatal_failures": failures, "flagged": flagged, "h_failed": h_failed}


def _want(cfg: ScanConfig, name: str) -> bool:
    return not cfg.bounds or name in cfg.bounds


@dataclass
class FamilyCell:
    """A built family at one prime with everything shared across its regions."""

    p: int
    fam: BuiltFamily
    prof: object
    spectrum: object
    hrep: object = None
    tau: TabulatedFunction | None = None
    tau_hrep: object = None

    @classmethod
    def build(cls, spec: FamilySpec, p: int) -> "FamilyCell":
        ctx = field_context(p)
        fam = spec.build(ctx)
        phi = fam.phi
        c = phi.conductor_bound
        prof = correlations(phi)
        cell = cls(p, fam, prof, dft(phi))
        if fam.trace:
            cell.hrep = check_H(phi, 5 * c ** 3, profile=prof)
            if not phi.kummer and phi.m == p:
                cell.tau = restrict_multiplicative(phi, ctx)
                cell.tau_hrep = check_H(cell.tau, 6 * c ** 3, profile=correlations(cell.tau))
        return cell

    @property
    def phi(self) -> TabulatedFunction:
        return self.fam.phi

    def global_checks(self) -> list[tuple[BoundCheck, float | None]]:
        if not self.fam.trace:
            return []
        c = self.phi.conductor_bound
        return [(off_diagonal_check(self.phi, c, self.prof), c),
                (fourier_sup_check(self.phi, self.spectrum.sup), c)]

    def sigma(self, length: int, direct_ok: bool = True) -> float:
        I = IntervalZm(self.phi.m, 0, length)
        if direct_ok:
            return sigma_statistic(self.phi, I, profile=self.prof).sigma
        return sigma_via_correlations(self.phi, I, profile=self.prof)

    def interval_checks(self, I: IntervalZm, eps: float, sigma: float,
                        large_enough: float = LARGE_ENOUGH, l1: float | None = None
                        ) -> list[tuple[BoundCheck, IntervalZm, float | None]]:
        """(check, region it was evaluated on, conductor echoed) for one interval."""
        phi, fam, p = self.phi, self.fam, self.p
        m, length, c = phi.m, len(I), phi.conductor_bound
        if l1 is None:
            l1 = completion_l1(I)
        lhs = abs(sum_region(phi, I))
        out = []

        def put(name, rhs, fatal=True, flag=None, cc=None, left=lhs):
            out.append((BoundCheck(name, left, rhs, fatal=fatal, flag=flag), I, cc))

        put("completion", self.spectrum.sup * l1)
        put("sliding_general", sliding_bound_general(phi, I, [0], self.prof))
        lb = sigma_lower_bounds(phi, I, eps, sigma=sigma, large_enough=large_enough)
        # lower bounds on Sigma, stated as lhs = bound <= rhs = Sigma
        put("sigma_eighth", sigma, fatal=2 * length < m, left=max(lb.eighth, 0.0))
        put("sigma_third", sigma, fatal=not lb.conditional,
            flag="conditional" if lb.conditional else None, left=lb.third)
        if fam.trace:
            general, short = concrete_bound(5 * c ** 3, m, length)
            b18, b54 = trace_interval_bound(c, p, length)
            if self.hrep is not None and self.hrep.verdict:
                put("concrete_general", general, cc=5 * c ** 3)
                if short is not None:
                    put("concrete_short", short, cc=5 * c ** 3)
            put("trace_b18", b18, cc=c)
            if b54 is not None:
                put("trace_b54", b54, cc=c)
        if fam.special:
            chk = special_bounds(fam.special, phi, I, p, eps, *(fam.psi_fg or (None, None)),
                                 large_enough=large_enough)
            out.append((chk, I, None))
        if self.tau is not None and math.sqrt(p - 1) < length < p - 1:
            J = IntervalZm(p - 1, I.start, length)
            chk = BoundCheck("mult_b66", abs(sum_region(self.tau, J)),
                             mult_interval_bound(c, p, length))
            out.append((chk, J, c))
        return out


def scan_cell(cfg: ScanConfig, p: int, desc: str) -> list[dict]:
    """Every check for one (prime, family) pair; pure and independent of other cells."""
    spec = FamilySpec.parse(desc)
    family = str(spec)
    if p > cfg.max_p:
        return [skip_record(p=p, family=family, region="*",
                            reason=f"p exceeds memory ceiling {cfg.max_p}")]
    cell = FamilyCell.build(spec, p)
    phi = cell.phi
    m = phi.m
    eps = cfg.eps
    out: list[dict] = []

    def add(chk: BoundCheck, region="global", mult=None, sampled=False, cc=None, mm=m):
        if _want(cfg, chk.bound_name):
            out.append(bound_record(chk, p=p, m=mm, family=family, region=region,
                                    multiplier=mult, sampled=sampled, c=cc, eps=eps))

    if cell.hrep is not None:
        out.append(h_record(cell.hrep, p=p, m=m, family=family, group="additive"))
    if cell.tau_hrep is not None:
        out.append(h_record(cell.tau_hrep, p=p, m=p - 1, family=family, group="multiplicative"))
    for chk, cc in cell.global_checks():
        add(chk, cc=cc)

    for mult, length in interval_lengths(m, p, cfg.multipliers):
        if length >= m:
            out.append(skip_record(p=p, family=family, region=f"length:{length}",
                                   reason=f"|I| >= m = {m}"))
            continue
        l1 = completion_l1(IntervalZm(m, 0, length))
        sigma = cell.sigma(length, direct_ok=m <= cfg.direct_limit)
        out.append({"record": "sigma", "p": p, "m": m, "family": family,
                    "region": f"length:{length}", "sigma": _fmt(sigma), "region_size": length})
        for start, sampled in interval_starts(cfg.seed, p, m, length, cfg.starts):
            I = IntervalZm(m, start, length)
            for chk, region, cc in cell.interval_checks(I, eps, sigma, cfg.large_enough, l1):
                add(chk, region.describe(), mult, sampled, cc, region.m)

    for k, mult in cfg.gap_shapes:
        B = gap_for_shape(m, p, k, mult)
        if B is None or B.size < math.sqrt(m):
            out.append(skip_record(p=p, family=family, region=f"gapshape:{k}:{_fmt(mult)}",
                                   reason="no proper progression of this shape fits"))
            continue
        try:
            chk = gap_bound_ratio(phi, B, cfg.gap_ceiling)
        except NonProperGAP as exc:  # pragma: no cover - construction guarantees properness
            out.append(skip_record(p=p, family=family, region=B.describe(), reason=str(exc)))
            continue
        add(chk, B.describe(), mult, False, phi.conductor_bound)
    return out


def verify_region(spec: FamilySpec, p: int, region, eps: float = DEFAULT_EPS,
                  large_enough: float = LARGE_ENOUGH, gap_ceiling: float = GAP_CEILING
                  ) -> list[dict]:
    """All applicable bound records for one family and one user-given region."""
    cell = FamilyCell.build(spec, p)
    phi = cell.phi
    family = str(spec)
    recs = []

    def rec(chk, reg, cc):
        recs.append(bound_record(chk, p=p, m=reg.m, family=family, region=reg.describe(),
                                 c=cc, eps=eps))

    if isinstance(region, GapSpec):
        rec(gap_bound_ratio(phi, region, gap_ceiling), region, phi.conductor_bound)
        return recs
    if not isinstance(region, IntervalZm):
        raise ConfigError("verify needs an interval or a GAP region")
    if len(region) >= phi.m:
        raise ConfigError("verify needs |I| < m")
    sigma = cell.sigma(len(region))
    for chk, reg, cc in cell.interval_checks(region, eps, sigma, large_enough):
        rec(chk, reg, cc)
    return recs


def _cell(args):
    cfg, p, desc = args
    return scan_cell(cfg, p, desc)


def run_scan(cfg: ScanConfig) -> Report:
    """Cross product of primes x families; results are gathered in config order."""
    jobs = [(cfg, p, d) for p in cfg.primes for d in cfg.families]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_cell, jobs))
    else:
        chunks = [_cell(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    return Report(__version__, cfg.echo(), records)


def crossover_table(records: list[dict], p: int | None = None) -> list[dict]:
    """Per interval cell: completion rhs, b54 rhs and lhs side by side."""
    cells: dict[tuple, dict] = {}
    for r in records:
        if r["record"] != "bound" or r["bound_name"] not in ("completion", "trace_b54"):
            continue
        if p is not None and r["p"] != p:
            continue
        key = (r["p"], r["family"], r["region"])
        row = cells.setdefault(key, {"p": r["p"], "family": r["family"], "region": r["region"],
                                     "length": int(r["region"].rsplit(",", 1)[1]),
                                     "lhs": r["lhs"], "completion": None, "b54": None})
        row["completion" if r["bound_name"] == "completion" else "b54"] = r["rhs"]
    return [row for row in cells.values() if row["b54"] is not None]


# ---------------------------------------------------------------------------
# emission


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, f".{FLOAT_DIGITS}g")
    return str(v)


def records_to_csv(records: list[dict], columns: list[str] | None = None) -> str:
    if columns is None:
        columns = []
        for r in records:
            columns.extend(k for k in r if k not in columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_csv_value(r.get(k)) for k in columns])
    return buf.getvalue()


_BOOL_FIELDS = {"pass", "fatal", "sampled", "sup_ok", "d_ok", "verdict"}
_STR_FIELDS = {"record", "bound_name", "paper_eq", "family", "region", "flag", "reason", "group"}


def records_from_csv(text: str) -> list[dict]:
    """Inverse of :func:`records_to_csv` for scan records (empty cells become None)."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {}
        for k, v in row.items():
            if v == "":
                rec[k] = None
            elif k in _BOOL_FIELDS:
                rec[k] = v == "true"
            elif k in _STR_FIELDS:
                rec[k] = v
            else:
                num = float(v)
                rec[k] = int(v) if v.lstrip("-").isdigit() else num
        out.append(rec)
    return out


def emit(report: Report | list[dict], fmt: str = "json", columns: list[str] | None = None) -> bytes:
    """UTF-8, LF-terminated bytes. CSV carries only the records."""
    records = report.records if isinstance(report, Report) else report
    if columns:
        return records_to_csv([r for r in records if all(k in r for k in columns)],
                              columns).encode("utf-8")
    if fmt == "json":
        obj = report.as_dict() if isinstance(report, Report) else records
        return (json.dumps(obj, indent=1, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "csv":
        return records_to_csv(records).encode("utf-8")
    raise ConfigError(f"unknown format {fmt!r}")

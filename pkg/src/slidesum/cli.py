"""Command-line entry point: ``slidesum <subcommand> [--config PATH] [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys


from . import __version__
from .bounds import DEFAULT_EPS, check_H, sigma_lower_bounds
from .equidist import BETA_GRID, kloosterman_equidist, weyl_uniform
from .harness import (
    ConfigError, FamilySpec, ScanConfig, _fmt, emit, h_record, parse_region, records_to_csv,
    run_scan, verify_region,
)
from .regions import IntervalZm, NonProperGAP, SubsetZm, sigma_statistic, sum_region
from .ring import DomainError, RationalFunction, field_context, is_prime, isqrt_ceil
from .spectral import ConsistencyError, correlations

EXIT_OK, EXIT_FATAL, EXIT_USAGE, EXIT_SKIP = 0, 1, 2, 3

log = logging.getLogger("slidesum")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key = value scan config (default: bundled scan)")
    p.add_argument("--p", type=int, help="prime modulus")
    p.add_argument("--family", help="family descriptor, e.g. kloosterman or mixed:order=2,f=X,g=0")
    p.add_argument("--region", help="interval:start,len | gap:a0;a1,N1;... | subset:@file")
    p.add_argument("--eps", type=float, help=f"epsilon in the special bounds (default {DEFAULT_EPS})")
    p.add_argument("--format", choices=("json", "csv"), help="output format")
    p.add_argument("--seed", type=int, help="seed for sampled interval starts")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--strict", action="store_true", help="exit 3 if any cell was skipped")
    p.add_argument("--workers", type=int, help="worker processes for scan")
    p.add_argument("--columns", help="two comma-separated record fields for a plain extract")
    p.add_argument("--c", type=float, help="constant for hcheck / corr thresholds")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slidesum", description=__doc__)
    parser.add_argument("--version", action="version", version=f"slidesum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    helps = {
        "tabulate": "print the value table of a family",
        "sum": "S(phi; B) for one region",
        "corr": "the correlation profile C(a) with the H(c) threshold",
        "hcheck": "certify condition H(c)",
        "sigma": "the shift statistic Sigma and its lower bounds",
        "verify": "every applicable bound for one region, one JSON record per check",
        "equidist": "KS and Weyl sums over the interval-length grid",
        "scan": "run the configured sweep",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text)
        if name == "equidist":
            sp.add_argument("--H", type=int, default=5, help="harmonic / Chebyshev cutoff")
            sp.add_argument("--start", type=int, default=1)
    return parser


def load_config(args) -> ScanConfig:
    overrides = dict(eps=args.eps, format=args.format, seed=args.seed, workers=args.workers)
    if args.p is not None:
        overrides["primes"] = (args.p,)
    if args.family is not None and args.command != "equidist":
        overrides["families"] = tuple(t.strip() for t in args.family.split(";") if t.strip())
    if args.config:
        return ScanConfig.from_file(args.config, **overrides)
    return ScanConfig.default(**overrides)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError("missing " + ", ".join("--" + n for n in missing))


def _prime(args) -> int:
    _require(args, "p")
    if not is_prime(args.p):
        raise ConfigError(f"--p {args.p} is not prime")
    return args.p


def _family(args):
    _require(args, "family")
    return FamilySpec.parse(args.family).build(field_context(_prime(args)))


def _region(args, m: int):
    _require(args, "region")
    text = args.region.strip()
    if text.startswith("subset:"):
        path = text[len("subset:"):].lstrip("@")
        with open(path, encoding="utf-8") as fh:
            els = [int(t) for t in fh.read().replace(",", " ").split()]
        return SubsetZm.of(m, els)
    return parse_region(text, m)


def _rows_csv(header, rows) -> bytes:
    return records_to_csv([dict(zip(header, r)) for r in rows], list(header)).encode("utf-8")


def _json(obj) -> bytes:
    return (json.dumps(obj, indent=1) + "\n").encode("utf-8")


def _jsonl(records) -> bytes:
    return "".join(json.dumps(r) + "\n" for r in records).encode("utf-8")


def cmd_tabulate(args, cfg):
    fam = _family(args)
    v = fam.phi.values
    rows = [(n, _fmt(v[n].real), _fmt(v[n].imag)) for n in range(fam.phi.m)]
    if cfg.format == "csv":
        return _rows_csv(("n", "re", "im"), rows), EXIT_OK
    return _json({"family": fam.tag, "p": args.p, "m": fam.phi.m,
                  "conductor": fam.phi.conductor_bound,
                  "values": [[r[1], r[2]] for r in rows]}), EXIT_OK


def cmd_sum(args, cfg):
    fam = _family(args)
    B = _region(args, fam.phi.m)
    s = sum_region(fam.phi, B)
    rec = {"family": fam.tag, "p": args.p, "m": fam.phi.m, "region": B.describe(),
           "size": len(B), "re": _fmt(s.real), "im": _fmt(s.imag), "abs": _fmt(abs(s))}
    if cfg.format == "csv":
        return records_to_csv([rec]).encode("utf-8"), EXIT_OK
    return _json(rec), EXIT_OK


def _c_default(args, phi) -> float:
    return args.c if args.c is not None else 5 * phi.conductor_bound ** 3


def cmd_corr(args, cfg):
    fam = _family(args)
    prof = correlations(fam.phi)
    thr = _c_default(args, fam.phi) * math.sqrt(fam.phi.m)
    rows = [(a, _fmt(z.real), _fmt(z.imag), _fmt(abs(z)), _fmt(thr))
            for a, z in enumerate(prof.values)]
    header = ("a", "re", "im", "abs", "threshold")
    if cfg.format == "json":
        return _json([dict(zip(header, r)) for r in rows]), EXIT_OK
    return _rows_csv(header, rows), EXIT_OK


def cmd_hcheck(args, cfg):
    fam = _family(args)
    rep = check_H(fam.phi, _c_default(args, fam.phi))
    rec = h_record(rep, p=args.p, m=fam.phi.m, family=fam.tag, group="additive")
    rec["D"] = list(rep.D)
    if cfg.format == "csv":
        rec.pop("D")
        return records_to_csv([rec]).encode("utf-8"), EXIT_OK
    return _json(rec), EXIT_OK


def cmd_sigma(args, cfg):
    fam = _family(args)
    B = _region(args, fam.phi.m)
    rep = sigma_statistic(fam.phi, B)
    rec = {"family": fam.tag, "p": args.p, "m": fam.phi.m, "region": B.describe(),
           "size": len(B), "sigma": _fmt(rep.sigma),
           "sigma_from_correlations": _fmt(rep.sigma_from_correlations)}
    if isinstance(B, IntervalZm):
        lb = sigma_lower_bounds(fam.phi, B, cfg.eps, sigma=rep.sigma,
                                large_enough=cfg.large_enough)
        rec.update(S=_fmt(lb.S), eighth=_fmt(lb.eighth), third=_fmt(lb.third),
                   third_conditional=lb.conditional, eighth_ok=lb.eighth_ok, third_ok=lb.third_ok)
    if cfg.format == "csv":
        return records_to_csv([rec]).encode("utf-8"), EXIT_OK
    return _json(rec), EXIT_OK


def cmd_verify(args, cfg):
    _require(args, "family")
    p = _prime(args)
    spec = FamilySpec.parse(args.family)
    m = p - 1 if spec.kind == "korobov" else p
    recs = verify_region(spec, p, _region(args, m), cfg.eps, cfg.large_enough, cfg.gap_ceiling)
    bad = any(r["fatal"] and not r["pass"] for r in recs)
    body = records_to_csv(recs).encode("utf-8") if cfg.format == "csv" else _jsonl(recs)
    return body, EXIT_FATAL if bad else EXIT_OK


def cmd_equidist(args, cfg):
    """Kloosterman angles (family ``kloosterman``) or fractional parts (``fractional:f=...``)."""
    _require(args, "family")
    rows = []
    desc = args.family.strip()
    for p in cfg.primes:
        ctx = field_context(p)
        if desc == "kloosterman":
            f = None
        elif desc.startswith("fractional:f="):
            f = RationalFunction.parse(desc.split("=", 1)[1])
        else:
            raise ConfigError("equidist takes --family kloosterman or fractional:f=<poly>")
        r = isqrt_ceil(p)
        for mult in BETA_GRID:
            length = mult * r
            if length > p:
                continue
            I = IntervalZm(p, args.start, length)
            st = (kloosterman_equidist(ctx, I, d_max=args.H) if f is None
                  else weyl_uniform(f, I, ctx, H=args.H))
            rows.append([p, desc, length, mult, _fmt(st.ks)]
                        + [_fmt(w) for w in st.weyl_abs[1:]])
    header = ["p", "family", "length", "multiplier", "ks"] + [f"weyl_h{h}" for h in range(1, args.H + 1)]
    if cfg.format == "json":
        return _json([dict(zip(header, r)) for r in rows]), EXIT_OK
    return _rows_csv(header, rows), EXIT_OK


def cmd_scan(args, cfg):
    rep = run_scan(cfg)
    cols = [c.strip() for c in args.columns.split(",")] if args.columns else None
    if cols is not None and len(cols) != 2:
        raise ConfigError("--columns takes exactly two field names")
    body = emit(rep, cfg.format, columns=cols)
    return body, rep.exit_code(args.strict)


COMMANDS = {
    "tabulate": cmd_tabulate, "sum": cmd_sum, "corr": cmd_corr, "hcheck": cmd_hcheck,
    "sigma": cmd_sigma, "verify": cmd_verify, "equidist": cmd_equidist, "scan": cmd_scan,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "equidist" and args.format is None:
        args.format = "csv"
    try:
        cfg = load_config(args)
        body, code = COMMANDS[args.command](args, cfg)
    except (ConfigError, DomainError, NonProperGAP, ValueError, OSError) as exc:
        print(f"slidesum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"slidesum: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_FATAL
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(body)
    else:
        sys.stdout.buffer.write(body)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())

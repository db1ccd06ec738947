"""Equidistribution experiments: fractional parts, Kloosterman angles, value sets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .families import angles_from_table, build_kloosterman, build_residue_indicator, chebyshev_U
from .regions import IntervalZm
from .ring import FieldContext, RationalFunction, unit_roots

# interval-length multipliers of ceil(sqrt(p)) standing in for beta(p) -> infinity
BETA_GRID = (2, 4, 8, 16, 32)


@dataclass
class SampleStats:
    n: int
    ks: float
    weyl: list[complex] = field(repr=False)
    target: str = "uniform"

    @property
    def weyl_abs(self) -> list[float]:
        return [abs(w) for w in self.weyl]

    def max_weyl(self, start: int = 1) -> float:
        return max(self.weyl_abs[start:], default=0.0)


@dataclass
class ResidueReport:
    delta_f: Fraction
    count: int
    length: int
    predicted: float = field(init=False)
    relative_deviation: float = field(init=False)

    def __post_init__(self):
        self.predicted = float(self.delta_f) * self.length
        self.relative_deviation = abs(self.count / self.predicted - 1)


def sato_tate_cdf(theta):
    """CDF of (2/pi) sin^2 t dt on [0, pi]: theta/pi - sin(2 theta)/(2 pi)."""
    t = np.asarray(theta, dtype=float)
    if np.any((t < 0) | (t > math.pi)) or np.any(np.isnan(t)):
        raise ValueError("Sato-Tate angles live in [0, pi]")
    out = t / math.pi - np.sin(2 * t) / (2 * math.pi)
    return out if out.ndim else float(out)


def sato_tate_density(theta):
    return 2 / math.pi * np.sin(np.asarray(theta, dtype=float)) ** 2


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance to a continuous CDF."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)


def weyl_uniform(f: RationalFunction, I: IntervalZm, ctx: FieldContext, H: int = 5) -> SampleStats:
    """Normalised Weyl sums (1/N) sum e(h f(n)/p), h = 0..H, and KS of {f(n)/p}.

    Poles of f are dropped from the sample.
    """
    if I.m != ctx.p:
        raise ValueError("interval must live mod p")
    if f.is_low_degree_polynomial_mod(ctx.p):
        warnings.warn("f is a polynomial of degree <= 1 mod p; equidistribution is not expected",
                      stacklevel=2)
    vals, pole = f.eval_all(ctx)
    n = I.elements()
    n = n[~pole[n]]
    x = vals[n]
    weyl = [complex(unit_roots(h * x, ctx.p).mean()) for h in range(H + 1)]
    ks = ks_statistic(x / ctx.p, stats.uniform.cdf)
    return SampleStats(int(n.size), ks, weyl, "uniform")


def kloosterman_equidist(ctx: FieldContext, I: IntervalZm, d_max: int = 4,
                         kloosterman=None) -> SampleStats:
    """KS of theta_p(n), n in I and n != 0, against Sato-Tate, plus the U_d Weyl sums.

    ``weyl[d]`` is the mean of U_d(2 cos theta_p(n)) over the same sample (d = 0..d_max).
    """
    if I.m != ctx.p:
        raise ValueError("interval must live mod p")
    kl = build_kloosterman(ctx) if kloosterman is None else kloosterman
    angles = angles_from_table(kl)
    n = I.elements()
    n = n[n != 0]
    theta = angles.angles[n]
    t = 2 * np.cos(theta)
    weyl = [complex(np.mean(chebyshev_U(d, t))) for d in range(d_max + 1)]
    return SampleStats(int(n.size), ks_statistic(theta, sato_tate_cdf), weyl, "sato_tate")


def residue_count(f: RationalFunction, I: IntervalZm, ctx: FieldContext) -> ResidueReport:
    if I.m != ctx.p:
        raise ValueError("interval must live mod p")
    ind, delta = build_residue_indicator(f, ctx)
    count = int(round(ind.values.real[I.elements()].sum()))
    return ResidueReport(delta, count, len(I))


def beta_lengths(p: int, grid=BETA_GRID) -> list[int]:
    r = math.isqrt(p)
    r = r if r * r == p else r + 1
    return [min(b * r, p) for b in grid]

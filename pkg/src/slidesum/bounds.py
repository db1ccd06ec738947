"""Explicit sliding-sum bounds, Condition H(c) certification and verdict records.

Every formula is evaluated from its printed constants. ``BoundCheck.fatal``
marks comparisons whose failure means a bug (the inequality is a theorem
whose hypotheses are met); non-fatal checks are ratio-reported only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .regions import GapSpec, IntervalZm, enumerate_gap, sigma_statistic, sum_region
from .ring import RationalFunction, poly_eval_mod
from .spectral import CorrelationProfile, correlations, correlations_direct
from .tabulated import TabulatedFunction

CUBE_ROOT_3 = 3.0 ** (1.0 / 3.0)
DEFAULT_EPS = 0.1
# |S|/||phi||_inf below this leaves the (1/3 - eps) lower bound conditional
LARGE_ENOUGH = 100.0
GAP_CEILING = 20.0

FORMULAS = {
    "sliding_general": "2 nu^(1/3) {|D|^(1/3)|I|^(1/3)||phi||_2^(2/3) + |I|^(2/3) max_{a not in D}|C(a)|^(1/3) + (2/3)|I|^(2/3) nu^(2/3)}",
    "concrete_general": "2 c^(4/3) (m^(1/3)|I|^(1/3) + 2 m^(1/6)|I|^(2/3))",
    "concrete_short": "6 c^(4/3) |I| (sqrt(m)/|I|)^(1/3)",
    "trace_b18": "18 c^4 (p^(1/3)|I|^(1/3) + 2 p^(1/6)|I|^(2/3))",
    "trace_b54": "54 c^4 |I| (sqrt(p)/|I|)^(1/3)",
    "mult_b66": "66 c^4 |I| (sqrt(p-1)/|I|)^(1/3)",
    "gap_shape": "ceiling * |B| (sqrt(m)/|B|)^(1/(k+2))",
    "special_cube": "(3^(1/3)+eps) nu^(1/3) |I|^(1/3) p^(1/3)",
    "special_mean": "(3^(1/3)+eps) |I| (sqrt(p)/|I|)^(2/3)",
    "completion": "sup|hat phi| * sum_t |hat 1_I(t)|",
    "off_diagonal": "max_{a != 0}|C(a)| <= 5 c^3 sqrt(p)",
    "fourier_sup": "sup|hat phi| <= 10 c^2",
    "sigma_eighth": "Sigma >= |S|^3/(8 nu) - |S|^2/4",
    "sigma_third": "Sigma >= (1/3 - eps)|S|^3/nu",
}


@dataclass
class HReport:
    c: float
    sup_ok: bool
    D: tuple[int, ...]
    d_ok: bool
    max_offD: float
    threshold: float
    verdict: bool = field(init=False)

    def __post_init__(self):
        self.verdict = self.sup_ok and self.d_ok


@dataclass
class BoundCheck:
    bound_name: str
    lhs: float
    rhs: float
    params: dict = field(default_factory=dict)
    fatal: bool = True
    flag: str | None = None
    ratio: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.lhs < 0 or self.rhs < 0:
            raise ValueError("bound comparisons need non-negative sides")
        if self.rhs > 0:
            self.ratio = self.lhs / self.rhs
        else:
            self.ratio = 0.0 if self.lhs == 0 else math.inf
        self.passed = self.ratio <= 1.0

    @property
    def formula(self) -> str:
        return FORMULAS.get(self.bound_name, self.bound_name)

    @property
    def violation(self) -> bool:
        return self.fatal and not self.passed

    def as_dict(self) -> dict:
        d = asdict(self)
        d["formula"] = self.formula
        return d


def check_H(phi: TabulatedFunction, c: float, profile: CorrelationProfile | None = None) -> HReport:
    """Certify Condition H(c): sup|phi| <= c and |C(a)| <= c sqrt(m) off a set of size <= c."""
    if c < 1:
        raise ValueError("H(c) needs c >= 1")
    prof = correlations_direct(phi) if profile is None else profile
    thr = c * math.sqrt(phi.m)
    mods = prof.moduli
    over = np.flatnonzero(mods > thr)
    off = np.ones(phi.m, dtype=bool)
    off[over] = False
    max_off = float(mods[off].max()) if off.any() else 0.0
    return HReport(c, phi.sup_norm <= c, tuple(over.tolist()), over.size <= c, max_off, thr)


def sliding_bound_general(phi: TabulatedFunction, I: IntervalZm, D,
                          profile: CorrelationProfile | None = None) -> float:
    """The sliding-sum bound for any D (not the whole group), all three terms."""
    D = sorted({int(a) % phi.m for a in D})
    if len(D) >= phi.m:
        raise ValueError("D must leave at least one shift outside it")
    nu = phi.sup_norm
    if nu == 0:
        return 0.0
    prof = correlations(phi) if profile is None else profile
    n = len(I)
    mx = prof.max_off(D)
    return 2 * nu ** (1 / 3) * (len(D) ** (1 / 3) * n ** (1 / 3) * phi.l2_norm ** (2 / 3)
                                + n ** (2 / 3) * mx ** (1 / 3)
                                + (2 / 3) * n ** (2 / 3) * nu ** (2 / 3))


def concrete_bound(c: float, m: int, length: int) -> tuple[float, float | None]:
    """(general form, short form); the short form only exists when length > sqrt(m)."""
    if c < 1 or not 1 <= length <= m:
        raise ValueError("need c >= 1 and 1 <= len <= m")
    general = 2 * c ** (4 / 3) * (m ** (1 / 3) * length ** (1 / 3) + 2 * m ** (1 / 6) * length ** (2 / 3))
    short = None
    if length > math.sqrt(m):
        short = 6 * c ** (4 / 3) * length * (math.sqrt(m) / length) ** (1 / 3)
    return general, short


def trace_interval_bound(c: float, p: int, length: int) -> tuple[float, float | None]:
    """(b18, b54) for trace functions of conductor c; b54 only when length > sqrt(p)."""
    if c < 1:
        raise ValueError("need c >= 1")
    b18 = 18 * c ** 4 * (p ** (1 / 3) * length ** (1 / 3) + 2 * p ** (1 / 6) * length ** (2 / 3))
    b54 = sliding_trace_shape(c, p, length, 54.0) if length > math.sqrt(p) else None
    return b18, b54


def sliding_trace_shape(c: float, p: int, length: int, constant: float = 54.0) -> float:
    """constant * c^4 |I| (sqrt(p)/|I|)^(1/3): the asymptotic shape with its constant slot filled."""
    return constant * c ** 4 * length * (math.sqrt(p) / length) ** (1 / 3)


def mult_interval_bound(c: float, p: int, length: int) -> float:
    if length <= math.sqrt(p - 1):
        raise ValueError("the multiplicative bound needs |I| > sqrt(p-1)")
    return 66 * c ** 4 * length * (math.sqrt(p - 1) / length) ** (1 / 3)


def gap_bound_ratio(phi: TabulatedFunction, B: GapSpec, ceiling: float = GAP_CEILING) -> BoundCheck:
    """Compare |S(phi;B)| with ceiling * |B| (sqrt(m)/|B|)^(1/(k+2)).

    The implied constant is unknown, so the check is ratio-reported (non-fatal);
    ``params['shape_ratio']`` is |S| divided by the bare shape.
    """
    enumerate_gap(B)
    if B.size < math.sqrt(B.m):
        raise ValueError("need |B| >= sqrt(m)")
    lhs = abs(sum_region(phi, B))
    shape = B.size * (math.sqrt(B.m) / B.size) ** (1 / (B.k + 2))
    return BoundCheck("gap_shape", lhs, ceiling * shape,
                      {"m": B.m, "k": B.k, "size": B.size, "ceiling": ceiling,
                       "shape_ratio": lhs / shape}, fatal=False)


@dataclass
class SigmaLowerBounds:
    sigma: float
    S: float
    eighth: float
    third: float
    conditional: bool
    eighth_ok: bool
    third_ok: bool


def sigma_lower_bounds(phi: TabulatedFunction, I: IntervalZm, eps: float = DEFAULT_EPS,
                       sigma: float | None = None, large_enough: float = LARGE_ENOUGH,
                       profile: CorrelationProfile | None = None) -> SigmaLowerBounds:
    """Evaluate the 1/8 and (1/3 - eps) lower bounds on Sigma at the computed S(phi; I)."""
    if not 0 < eps < 1 / 3:
        raise ValueError("eps must lie in (0, 1/3)")
    S = abs(sum_region(phi, I))
    nu = phi.sup_norm
    if sigma is None:
        sigma = sigma_statistic(phi, I, profile).sigma
    if nu == 0:
        return SigmaLowerBounds(sigma, 0.0, 0.0, 0.0, True, True, True)
    eighth = S ** 3 / (8 * nu) - S ** 2 / 4
    third = (1 / 3 - eps) * S ** 3 / nu
    # the relative slack absorbs rounding in the two floating-point sides
    tol = 1e-9 * max(sigma, 1.0)
    return SigmaLowerBounds(sigma, S, eighth, third, S / nu < large_enough,
                            sigma + tol >= eighth, sigma + tol >= third)


SPECIAL_KINDS = ("quadphase", "fourier", "kloosterman", "korobov")


def has_no_zero(f: RationalFunction, p: int) -> bool:
    vals = poly_eval_mod(f.numerator, np.arange(p, dtype=np.int64), p)
    return bool(np.all(vals != 0))


def special_bound_rhs(kind: str, p: int, length: int, nu: float, eps: float) -> float:
    if kind in ("quadphase", "fourier"):
        return (CUBE_ROOT_3 + eps) * nu ** (1 / 3) * length ** (1 / 3) * p ** (1 / 3)
    if kind in ("kloosterman", "korobov"):
        return (CUBE_ROOT_3 + eps) * length * (math.sqrt(p) / length) ** (2 / 3)
    raise ValueError(f"unknown special kind {kind!r}")


def special_bounds(kind: str, phi: TabulatedFunction, I: IntervalZm, p: int,
                   eps: float = DEFAULT_EPS, psi_f: RationalFunction | None = None,
                   psi_g: RationalFunction | None = None,
                   large_enough: float = LARGE_ENOUGH) -> BoundCheck:
    """The (3^(1/3) + eps) bounds for functions with exactly known correlations.

    The guarantee holds once |I| is large in terms of eps; cells whose rhs is
    below ``large_enough * ||phi||_inf`` are flagged and made non-fatal.
    """
    if kind == "fourier":
        if psi_f is None or psi_g is None:
            raise ValueError("fourier kind needs the (f, g) of the transformed function")
        if not (psi_f.is_polynomial and psi_g.is_polynomial and has_no_zero(psi_f, p)):
            raise ValueError("fourier kind needs polynomial f without zeros in F_p and polynomial g")
    expected_m = p - 1 if kind == "korobov" else p
    if phi.m != expected_m or I.m != expected_m:
        raise ValueError(f"{kind} lives mod {expected_m}")
    lhs = abs(sum_region(phi, I))
    rhs = special_bound_rhs(kind, p, len(I), phi.sup_norm, eps)
    flagged = rhs < large_enough * phi.sup_norm
    name = "special_cube" if kind in ("quadphase", "fourier") else "special_mean"
    return BoundCheck(name, lhs, rhs, {"kind": kind, "p": p, "len": len(I), "eps": eps},
                      fatal=not flagged, flag="below_large_enough" if flagged else None)


def off_diagonal_check(phi: TabulatedFunction, c: float, profile: CorrelationProfile | None = None,
                       constant: float = 5.0) -> BoundCheck:
    """max_{a != 0} |C(a)| against constant * c^3 sqrt(m)."""
    prof = correlations(phi) if profile is None else profile
    lhs = prof.max_off([0])
    return BoundCheck("off_diagonal", lhs, constant * c ** 3 * math.sqrt(phi.m),
                      {"m": phi.m, "c": c, "observed_over_sqrt_m": lhs / math.sqrt(phi.m)})


def fourier_sup_check(phi: TabulatedFunction, spectrum_sup: float) -> BoundCheck:
    """sup|hat phi| <= 10 c^2, logged but never fatal since c is a configured estimate."""
    c = phi.conductor_bound
    return BoundCheck("fourier_sup", spectrum_sup, 10 * c ** 2, {"m": phi.m, "c": c}, fatal=False)


"""Concrete trace-function families modulo p, tabulated on Z/pZ or Z/(p-1)Z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ring import (
    CharacterSpec, DomainError, FieldContext, RationalFunction, TRIVIAL,
    character_table, poly_eval_mod, unit_roots,
)
from .spectral import ConsistencyError, dft_values
from .tabulated import TabulatedFunction, csum

# Pointwise agreement required between the O(p^2) and transform Kloosterman paths.
KLOOSTERMAN_PATH_TOL = 1e-8
WEIL_SLACK = 1e-6


class WeilBoundViolation(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class AngleTable:
    """theta_p(n) in [0, pi] with S(n,1;p)/sqrt(p) = 2 cos theta; angles[0] is nan."""

    p: int
    angles: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> float:
        return float(self.angles[n % self.p])


def mixed_conductor(f: RationalFunction, g: RationalFunction) -> int:
    return f.num_degree + f.den_degree + g.num_degree + g.den_degree + 2


def build_mixed_char(chi: CharacterSpec, f: RationalFunction, g: RationalFunction,
                     ctx: FieldContext, conductor: float | None = None) -> TabulatedFunction:
    """phi(n) = chi(f(n)) e(g(n)/p), set to 0 at poles of g and zeros/poles of f."""
    p = ctx.p
    fv, fpole = f.eval_all(ctx)
    gv, gpole = g.eval_all(ctx)
    chars = character_table(chi, ctx)
    vals = chars[fv] * unit_roots(gv, p)
    vals[fpole | gpole] = 0
    c = mixed_conductor(f, g) if conductor is None else conductor
    # constant g with a monomial f (or trivial chi) restricts to a character of F_p^x
    gn, gd, _ = g.reduce(p)
    fn, fd, _ = f.reduce(p)
    g_const = len(gn) == 1 and len(gd) == 1
    f_mono = sum(1 for a in fn if a) <= 1 and sum(1 for a in fd if a) <= 1
    tag = f"mixed(chi={chi.order}:{chi.index},f={f},g={g})"
    return TabulatedFunction(vals, c, tag, kummer=g_const and (f_mono or chi.is_trivial))


def legendre_family(ctx: FieldContext) -> TabulatedFunction:
    return build_mixed_char(CharacterSpec(2, 1), RationalFunction.poly([0, 1]),
                            RationalFunction.poly([0]), ctx)


def kloosterman_direct(p: int) -> np.ndarray:
    """S(n,1;p)/sqrt(p) for all n by summing e((n x + xbar)/p) over x != 0."""
    ctx_inv = np.zeros(p, dtype=np.int64)
    xs = np.arange(1, p, dtype=np.int64)
    ctx_inv[1:] = [pow(int(x), -1, p) for x in xs]
    out = np.empty(p, dtype=complex)
    block = max(1, 2_000_000 // p)
    for n0 in range(0, p, block):
        n = np.arange(n0, min(p, n0 + block), dtype=np.int64)[:, None]
        out[n0:n0 + block] = unit_roots(n * xs[None, :] + ctx_inv[1:][None, :], p).sum(axis=1)
    return out / math.sqrt(p)


def kloosterman_fast(ctx: FieldContext) -> np.ndarray:
    """The same table as the unitary DFT of psi(x) = e(xbar/p), psi(0) = 0."""
    psi = unit_roots(ctx.inv, ctx.p)
    psi[0] = 0
    return dft_values(psi)


def build_kloosterman(ctx: FieldContext, method: str = "fast",
                      conductor: float = 5.0) -> TabulatedFunction:
    """phi(n) = S(n,1;p)/sqrt(p) on all of F_p (phi(0) = -1/sqrt(p))."""
    p = ctx.p
    if p < 3:
        raise DomainError("Kloosterman sums need p >= 3")
    if method == "fast":
        raw = kloosterman_fast(ctx)
    elif method == "direct":
        raw = kloosterman_direct(p)
    elif method == "both":
        raw = kloosterman_fast(ctx)
        gap = float(np.abs(raw - kloosterman_direct(p)).max())
        if gap > KLOOSTERMAN_PATH_TOL:
            raise ConsistencyError(f"Kloosterman paths differ by {gap:.3e}")
    else:
        raise ValueError(f"unknown method {method!r}")
    if np.abs(raw.imag).max() > 1e-8:
        raise ConsistencyError("Kloosterman sums came out non-real")
    vals = raw.real
    if np.abs(vals).max() * math.sqrt(p) > 2 * math.sqrt(p) + WEIL_SLACK:
        raise WeilBoundViolation(f"|S(n,1;{p})| exceeds 2 sqrt(p)")
    return TabulatedFunction(vals.astype(complex), conductor, "kloosterman")


def angles_from_table(kl: TabulatedFunction) -> AngleTable:
    p = kl.m
    x = kl.values.real
    if np.abs(x[1:]).max() * math.sqrt(p) > 2 * math.sqrt(p) + WEIL_SLACK:
        raise WeilBoundViolation(f"|S(n,1;{p})| exceeds 2 sqrt(p)")
    theta = np.arccos(np.clip(x / 2, -1.0, 1.0))
    theta[0] = np.nan
    return AngleTable(p, theta)


def kloosterman_angles(ctx: FieldContext) -> AngleTable:
    return angles_from_table(build_kloosterman(ctx))


def chebyshev_U(d: int, t):
    """U_d(t) with U_0 = 1, U_1 = t, U_{d+1} = t U_d - U_{d-1}; U_d(2cos th) = sin((d+1)th)/sin th."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    t = np.asarray(t, dtype=float)
    prev, cur = np.ones_like(t), t.copy()
    if d == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(d - 1):
        prev, cur = cur, t * cur - prev
    return cur if cur.ndim else float(cur)


def build_sym_power(d: int, ctx: FieldContext, conductor: float | None = None,
                    kloosterman: TabulatedFunction | None = None) -> TabulatedFunction:
    """n -> U_d(S(n,1;p)/sqrt(p)); at n = 0 this is U_d(-1/sqrt(p))."""
    if d < 1:
        raise ValueError("d must be >= 1")
    kl = build_kloosterman(ctx) if kloosterman is None else kloosterman
    vals = chebyshev_U(d, kl.values.real)
    c = 2 * d + 4 if conductor is None else conductor
    return TabulatedFunction(vals.astype(complex), c, f"sympower(d={d})")


def build_quadratic_phase(h: int, ctx: FieldContext, conductor: float = 4.0) -> TabulatedFunction:
    p = ctx.p
    if p < 3:
        raise DomainError("quadratic phases need p >= 3")
    if h % p == 0:
        raise DomainError("h must be nonzero mod p")
    x = np.arange(p, dtype=np.int64)
    return TabulatedFunction(unit_roots(h * (x * x % p), p), conductor, f"quadphase(h={h % p})")


def gauss_sum(h: int, ctx: FieldContext) -> complex:
    """w_p(h) = p**-0.5 sum_y e(h y^2/p), of modulus 1 for p odd and h != 0."""
    p = ctx.p
    if p < 3 or h % p == 0:
        raise DomainError("need p odd and h nonzero mod p")
    y = np.arange(p, dtype=np.int64)
    return csum(unit_roots(h * (y * y % p), p)) / math.sqrt(p)


def quadratic_phase_via_fourier(h: int, ctx: FieldContext) -> np.ndarray:
    """Right side of the completed-square identity for e(h x^2/p).

    sum_y e(-(4h)^-1 y^2/p) e(xy/p) = sqrt(p) w_p(-(4h)^-1) e(h x^2/p), so
    dividing by sqrt(p) w_p(-(4h)^-1) recovers the quadratic phase.
    """
    p = ctx.p
    c = (-ctx.inverse(4 * h)) % p
    y = np.arange(p, dtype=np.int64)
    kernel = unit_roots(c * (y * y % p), p)
    return dft_values(kernel) / gauss_sum(c, ctx)


def build_fourier_family(psi: TabulatedFunction, conductor: float | None = None,
                         tag: str | None = None) -> TabulatedFunction:
    """phi(x) = -p**-0.5 sum_y psi(y) e(xy/p)."""
    vals = -dft_values(psi.values)
    c = 10 * psi.conductor_bound ** 2 if conductor is None else conductor
    return TabulatedFunction(vals, c, tag or f"fourier[{psi.family_tag}]")


def build_korobov(h: int, ctx: FieldContext, conductor: float = 3.0) -> TabulatedFunction:
    """n -> e(h g**n / p) on Z/(p-1)Z."""
    if h % ctx.p == 0:
        raise DomainError("h must be nonzero mod p")
    vals = unit_roots((h % ctx.p) * ctx.gpow % ctx.p, ctx.p)
    return TabulatedFunction(vals, conductor, f"korobov(h={h % ctx.p})")


def build_residue_indicator(f: RationalFunction, ctx: FieldContext
                            ) -> tuple[TabulatedFunction, Fraction]:
    """Indicator of the value set f(F_p) and its density |f(F_p)|/p."""
    if not f.is_polynomial or f.num_degree < 1:
        raise ValueError("need a non-constant polynomial")
    if ctx.p <= f.num_degree:
        raise DomainError("need p > deg f")
    vals = poly_eval_mod(f.numerator, np.arange(ctx.p, dtype=np.int64), ctx.p)
    ind = np.zeros(ctx.p, dtype=complex)
    ind[vals] = 1
    size = int(ind.real.sum())
    return TabulatedFunction(ind, 1.0, f"residue(f={f})"), Fraction(size, ctx.p)


def restrict_multiplicative(phi: TabulatedFunction, ctx: FieldContext) -> TabulatedFunction:
    """n -> phi(g**n) on Z/(p-1)Z."""
    if phi.m != ctx.p:
        raise ValueError("phi must live on F_p")
    return phi.with_values(phi.values[ctx.gpow], family_tag=f"mult[{phi.family_tag}]")


def trivial_additive(h: int, ctx: FieldContext) -> TabulatedFunction:
    """e(h n/p), the mixed family with trivial character, f = 1, g = hX."""
    return build_mixed_char(TRIVIAL, RationalFunction.poly([1]),
                            RationalFunction.poly([0, h]), ctx)

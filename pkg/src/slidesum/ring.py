"""Modular arithmetic over F_p: field contexts, characters, rational functions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from tokenize import TokenError
from typing import Sequence

import numpy as np

# Deterministic for every n < 3.3e24, which covers all of 64-bit range.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class DomainError(ValueError):
    """Input outside the domain of an arithmetic operation."""


class DegenerateReduction(ValueError):
    """A rational function whose denominator vanishes identically mod p."""


class _Pole:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "POLE"


POLE = _Pole()


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (fixed witness set, exact below 2**64)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def mod_pow(base: int, exp: int, m: int) -> int:
    if m < 1:
        raise DomainError(f"modulus must be >= 1, got {m}")
    if exp < 0:
        raise DomainError("negative exponent")
    return pow(base, exp, m)


def mod_inverse(x: int, p: int) -> int:
    if x % p == 0:
        raise DomainError(f"{x} is not invertible modulo {p}")
    return pow(x, -1, p)


def prime_factors(n: int) -> list[int]:
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def find_primitive_root(p: int) -> int:
    """Smallest positive primitive root of the prime ``p``."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return 1
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def unit_roots(num, den: int) -> np.ndarray:
    """Vectorised e(num/den) = exp(2 pi i num/den) for integer ``num``.

    Angles are reduced exactly in integer arithmetic before conversion to
    floating point, and the four quarter-turn points are returned exactly.
    """
    r = np.mod(np.asarray(num, dtype=np.int64), den)
    out = np.exp(2j * np.pi * (r / den))
    quarter = (4 * r) % den == 0
    if np.any(quarter):
        exact = np.array([1, 1j, -1, -1j], dtype=complex)
        out = np.where(quarter, exact[(4 * r // den) % 4], out)
    return out


@dataclass(frozen=True, eq=False)
class FieldContext:
    """The prime field F_p with a primitive root and its log/exp/inverse tables.

    ``dlog[x]`` is the discrete logarithm of x to base ``g`` (``dlog[0] == -1``),
    ``gpow[n]`` is g**n for 0 <= n < p-1 and ``inv[x]`` is the inverse of x
    (``inv[0] == 0``).
    """

    p: int
    g: int
    dlog: np.ndarray = field(repr=False)
    gpow: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: int) -> "FieldContext":
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        g = find_primitive_root(p)
        gpow = np.empty(p - 1, dtype=np.int64)
        x = 1
        for n in range(p - 1):
            gpow[n] = x
            x = x * g % p
        dlog = np.full(p, -1, dtype=np.int64)
        dlog[gpow] = np.arange(p - 1)
        inv = np.zeros(p, dtype=np.int64)
        inv[gpow] = gpow[(-np.arange(p - 1)) % (p - 1)]
        for arr in (dlog, gpow, inv):
            arr.setflags(write=False)
        return cls(p, g, dlog, gpow, inv)

    def inverse(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise DomainError(f"0 is not invertible modulo {self.p}")
        return int(self.inv[x])


@lru_cache(maxsize=32)
def field_context(p: int) -> FieldContext:
    """Cached :meth:`FieldContext.build`."""
    return FieldContext.build(p)


def _trim(coeffs: Sequence[int]) -> tuple[int, ...]:
    c = list(int(a) for a in coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (0,)


def _degree(coeffs: tuple[int, ...]) -> int:
    # the zero polynomial counts as degree 0 in conductor sums
    return len(coeffs) - 1


def poly_eval_mod(coeffs: Sequence[int], x, p: int):
    """Horner evaluation mod p; ``x`` may be an int or an int64 array."""
    acc = np.zeros_like(np.asarray(x, dtype=np.int64))
    xs = np.asarray(x, dtype=np.int64) % p
    for a in reversed(coeffs):
        acc = (acc * xs + (a % p)) % p
    return acc


@dataclass(frozen=True)
class RationalFunction:
    """f = numerator/denominator with integer coefficients, lowest degree first."""

    numerator: tuple[int, ...]
    denominator: tuple[int, ...] = (1,)

    def __post_init__(self):
        object.__setattr__(self, "numerator", _trim(self.numerator))
        object.__setattr__(self, "denominator", _trim(self.denominator))
        if self.denominator == (0,):
            raise ValueError("denominator is the zero polynomial")

    @classmethod
    def poly(cls, coeffs: Sequence[int]) -> "RationalFunction":
        return cls(tuple(coeffs))

    @classmethod
    def parse(cls, text: str) -> "RationalFunction":
        """Parse expressions such as ``X^2+1``, ``(X+1)/(X-1)`` or ``1/X``."""
        import sympy
        from sympy.parsing.sympy_parser import (
            implicit_multiplication_application, parse_expr, standard_transformations,
        )

        X = sympy.Symbol("X")
        try:
            expr = parse_expr(text.replace("^", "**"), local_dict={"X": X, "x": X},
                              transformations=standard_transformations
                              + (implicit_multiplication_application,))
        except (SyntaxError, TypeError, sympy.SympifyError, TokenError) as exc:
            raise ValueError(f"cannot parse {text!r}") from exc
        if expr.free_symbols - {X}:
            raise ValueError(f"only the variable X is allowed in {text!r}")
        num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
        try:
            pn = sympy.Poly(num, X)
            pd = sympy.Poly(den, X)
        except sympy.PolynomialError as exc:
            raise ValueError(f"not a rational function of X: {text!r}") from exc
        cn, cd = pn.all_coeffs()[::-1], pd.all_coeffs()[::-1]
        if not all(c.is_integer for c in cn + cd):
            raise ValueError(f"non-integer coefficients in {text!r}")
        return cls(tuple(int(c) for c in cn), tuple(int(c) for c in cd))

    @property
    def num_degree(self) -> int:
        return _degree(self.numerator)

    @property
    def den_degree(self) -> int:
        return _degree(self.denominator)

    @property
    def is_polynomial(self) -> bool:
        return self.denominator == (1,)

    def reduce(self, p: int) -> tuple[tuple[int, ...], tuple[int, ...], bool]:
        """Coefficientwise reduction; the flag is True when the denominator dies."""
        num = _trim([a % p for a in self.numerator])
        den = _trim([a % p for a in self.denominator])
        return num, den, den == (0,)

    def check_reduction(self, p: int) -> None:
        if self.reduce(p)[2]:
            raise DegenerateReduction(f"denominator of {self} vanishes mod {p}")

    def is_low_degree_polynomial_mod(self, p: int) -> bool:
        """True when f mod p is (proportional to) a polynomial of degree <= 1."""
        num, den, bad = self.reduce(p)
        if bad:
            raise DegenerateReduction(f"denominator of {self} vanishes mod {p}")
        if len(den) == 1:
            return len(num) <= 2
        # genuine denominators survive unless they divide the numerator
        f = self._sympy_mod(p)
        return f is not None and f.degree() <= 1

    def _sympy_mod(self, p: int):
        import sympy

        X = sympy.Symbol("X")
        num, den, _ = self.reduce(p)
        pn = sympy.Poly(list(reversed(num)), X, modulus=p)
        pd = sympy.Poly(list(reversed(den)), X, modulus=p)
        q, r = pn.div(pd)
        return q if r.is_zero else None

    def is_power_mod(self, h: int, p: int) -> bool:
        """True when f mod p is a constant times an h-th power in F_p(X)."""
        import sympy

        if h <= 1:
            return True
        X = sympy.Symbol("X")
        num, den, bad = self.reduce(p)
        if bad:
            raise DegenerateReduction(f"denominator of {self} vanishes mod {p}")
        if num == (0,):
            return True
        pn = sympy.Poly(list(reversed(num)), X, modulus=p)
        pd = sympy.Poly(list(reversed(den)), X, modulus=p)
        common = sympy.gcd(pn, pd)
        for poly in (sympy.quo(pn, common), sympy.quo(pd, common)):
            _, factors = poly.factor_list()
            if any(mult % h for _, mult in factors):
                return False
        return True

    def eval_all(self, ctx: FieldContext) -> tuple[np.ndarray, np.ndarray]:
        """Values at every x in F_p and the boolean pole mask."""
        self.check_reduction(ctx.p)
        xs = np.arange(ctx.p, dtype=np.int64)
        num = poly_eval_mod(self.numerator, xs, ctx.p)
        den = poly_eval_mod(self.denominator, xs, ctx.p)
        pole = den == 0
        vals = num * ctx.inv[den] % ctx.p
        vals[pole] = 0
        return vals, pole

    def __str__(self) -> str:
        def show(c):
            out = ""
            for i in range(len(c) - 1, -1, -1):
                a = c[i]
                if not a:
                    continue
                mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
                coef = str(abs(a)) if (abs(a) != 1 or i == 0) else ""
                out += ("-" if a < 0 else "+") + coef + mono
            return out.lstrip("+") or "0"

        if self.is_polynomial:
            return show(self.numerator)
        return f"({show(self.numerator)})/({show(self.denominator)})"


def eval_rational(f: RationalFunction, x: int, ctx: FieldContext):
    """f(x) in F_p, or :data:`POLE` when the denominator vanishes at x."""
    f.check_reduction(ctx.p)
    den = int(poly_eval_mod(f.denominator, x, ctx.p))
    if den == 0:
        return POLE
    return int(poly_eval_mod(f.numerator, x, ctx.p)) * int(ctx.inv[den]) % ctx.p


@dataclass(frozen=True)
class CharacterSpec:
    """Dirichlet character mod p of order dividing ``order``.

    chi(g**j) = e(j * k' / (p-1)) with k' = (p-1)/order * index, chi(0) = 0.
    ``order=2, index=1`` is the Legendre symbol; ``order=1`` the trivial one.
    """

    order: int = 1
    index: int = 0

    def exponent(self, p: int) -> int:
        if (p - 1) % self.order:
            raise DomainError(f"order {self.order} does not divide p-1 = {p - 1}")
        return (p - 1) // self.order * (self.index % self.order)

    @property
    def is_trivial(self) -> bool:
        return self.index % self.order == 0


LEGENDRE = CharacterSpec(2, 1)
TRIVIAL = CharacterSpec(1, 0)


def character_table(chi: CharacterSpec, ctx: FieldContext) -> np.ndarray:
    """chi(x) for every x in F_p as a complex array."""
    k = chi.exponent(ctx.p)
    out = unit_roots(ctx.dlog * k, ctx.p - 1) if ctx.p > 2 else np.ones(ctx.p, complex)
    out[0] = 0
    return out


def character_value(chi: CharacterSpec, x: int, ctx: FieldContext) -> complex:
    x %= ctx.p
    if x == 0:
        return 0j
    k = chi.exponent(ctx.p)
    return complex(unit_roots(int(ctx.dlog[x]) * k, ctx.p - 1))


def isqrt_ceil(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1

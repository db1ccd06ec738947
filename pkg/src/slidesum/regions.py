"""Summation regions in Z/mZ, region sums, shift sets T_s and the Sigma statistic."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .ring import FieldContext
from .spectral import ConsistencyError, CorrelationProfile, correlations
from .tabulated import TabulatedFunction, csum


class NonProperGAP(ValueError):
    """Two coefficient vectors of a generalized progression hit the same residue."""

    def __init__(self, witness):
        self.witness = witness
        (n1, n2, b) = witness
        super().__init__(f"not proper: coefficients {n1} and {n2} both give {b}")


@dataclass(frozen=True)
class IntervalZm:
    m: int
    start: int
    length: int

    def __post_init__(self):
        if not 1 <= self.length <= self.m:
            raise ValueError(f"interval length {self.length} outside [1, {self.m}]")
        object.__setattr__(self, "start", self.start % self.m)

    def elements(self) -> np.ndarray:
        return (self.start + np.arange(self.length, dtype=np.int64)) % self.m

    def __len__(self) -> int:
        return self.length

    def describe(self) -> str:
        return f"interval:{self.start},{self.length}"


@dataclass(frozen=True)
class SubsetZm:
    m: int
    elements_: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(int(x) for x in self.elements_))
        if len(set(els)) != len(els):
            raise ValueError("subset elements must be distinct")
        if els and (els[0] < 0 or els[-1] >= self.m):
            raise ValueError(f"subset elements must lie in [0, {self.m})")
        object.__setattr__(self, "elements_", els)

    @classmethod
    def of(cls, m: int, elements) -> "SubsetZm":
        return cls(m, tuple(int(x) % m for x in elements))

    def elements(self) -> np.ndarray:
        return np.array(self.elements_, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.elements_)

    def __contains__(self, x) -> bool:
        return int(x) % self.m in set(self.elements_)

    def describe(self) -> str:
        return f"subset:{len(self)} elements"


@dataclass(frozen=True)
class GapSpec:
    """a0 + n1*a1 + ... + nk*ak with 0 <= n_i < N_i, taken mod m."""

    m: int
    base: int
    generators: tuple[int, ...]
    lengths: tuple[int, ...]

    def __post_init__(self):
        if len(self.generators) != len(self.lengths):
            raise ValueError("one length per generator")
        if any(n < 2 for n in self.lengths):
            raise ValueError("every GAP side must have length >= 2")

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def size(self) -> int:
        return math.prod(self.lengths)

    def coefficient_grid(self) -> np.ndarray:
        if not self.lengths:
            return np.zeros((1, 0), dtype=np.int64)
        axes = np.meshgrid(*[np.arange(n) for n in self.lengths], indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=1).astype(np.int64)

    def raw_elements(self) -> np.ndarray:
        """Elements in coefficient order, duplicates kept."""
        gens = np.array(self.generators, dtype=np.int64) % self.m
        return (self.base + self.coefficient_grid() @ gens) % self.m

    def elements(self) -> np.ndarray:
        return enumerate_gap(self).elements()

    def __len__(self) -> int:
        return self.size

    def slices(self) -> list["GapSpec"]:
        """Split along the last generator into N_k progressions of dimension k-1."""
        if not self.generators:
            raise ValueError("a 0-dimensional progression has no slices")
        a_k, n_k = self.generators[-1], self.lengths[-1]
        return [GapSpec(self.m, (self.base + j * a_k) % self.m, self.generators[:-1],
                        self.lengths[:-1]) for j in range(n_k)]

    def describe(self) -> str:
        parts = [str(self.base)] + [f"{a},{n}" for a, n in zip(self.generators, self.lengths)]
        return "gap:" + ";".join(parts)


Region = Union[IntervalZm, GapSpec, SubsetZm]


def enumerate_gap(B: GapSpec) -> SubsetZm:
    """Full element list of a proper GAP; raises NonProperGAP with a collision."""
    raw = B.raw_elements()
    seen: dict[int, int] = {}
    grid = None
    for i, b in enumerate(raw.tolist()):
        if b in seen:
            grid = B.coefficient_grid() if grid is None else grid
            raise NonProperGAP((tuple(grid[seen[b]].tolist()), tuple(grid[i].tolist()), b))
        seen[b] = i
    return SubsetZm(B.m, tuple(raw.tolist()))


def region_elements(B: Region) -> np.ndarray:
    return B.elements()


def _check_modulus(phi: TabulatedFunction, B: Region) -> None:
    if phi.m != B.m:
        raise ValueError(f"region lives mod {B.m}, function mod {phi.m}")


def sum_region(phi: TabulatedFunction, B: Region) -> complex:
    """S(phi; B), summed in element order with exact rounding."""
    _check_modulus(phi, B)
    return csum(phi.values[region_elements(B)])


def geometric_progression_sum(phi: TabulatedFunction, I: IntervalZm, ctx: FieldContext) -> complex:
    """sum over n in I of phi(g**n), I an interval mod p-1."""
    if phi.m != ctx.p:
        raise ValueError("phi must live on F_p")
    if I.m != ctx.p - 1:
        raise ValueError("the exponent interval must live mod p-1")
    return csum(phi.values[ctx.gpow[I.elements()]])


def _chunked_rows(m: int, width: int, budget: int = 2_000_000):
    step = max(1, budget // max(width, 1))
    for a0 in range(0, m, step):
        yield np.arange(a0, min(m, a0 + step), dtype=np.int64)


def symmetric_difference_sizes(B: Region) -> np.ndarray:
    """|(a + B) xor B| for every shift a, by direct membership counting."""
    m = B.m
    els = region_elements(B)
    member = np.zeros(m, dtype=bool)
    member[els] = True
    out = np.empty(m, dtype=np.int64)
    for rows in _chunked_rows(m, els.size):
        inter = member[(els[None, :] + rows[:, None]) % m].sum(axis=1)
        out[rows] = 2 * (els.size - inter)
    return out


def t_s_set(I: Region, s: int) -> SubsetZm:
    """T_s(I) = {a : |(a+I) xor I| <= s}, by brute force over all shifts."""
    if s < 0:
        raise ValueError("s must be non-negative")
    sizes = symmetric_difference_sizes(I)
    return SubsetZm(I.m, tuple(np.flatnonzero(sizes <= s).tolist()))


def is_subgroup(H: SubsetZm) -> bool:
    els = set(H.elements_)
    if 0 not in els:
        return False
    return all((x + y) % H.m in els for x in els for y in els)


def t_s_subgroup(H: SubsetZm, s: int) -> SubsetZm:
    """T_s for a subgroup: H when s < 2|H|, everything otherwise."""
    if not is_subgroup(H):
        raise ValueError("H is not a subgroup of Z/mZ")
    closed = H if s < 2 * len(H) else SubsetZm(H.m, tuple(range(H.m)))
    brute = t_s_set(H, s)
    if brute.elements_ != closed.elements_:
        raise ConsistencyError(f"subgroup shift set disagrees with enumeration at s={s}")
    return closed


def difference_counts(B: Region) -> np.ndarray:
    """r_B(d) = #{(x, y) in B^2 : y - x = d mod m}."""
    m = B.m
    if isinstance(B, IntervalZm):
        d = np.arange(m)
        n = B.length
        return np.maximum(0, n - d) + np.maximum(0, n - (m - d))
    els = region_elements(B)
    if els.size ** 2 <= 4_000_000:
        diffs = (els[None, :] - els[:, None]) % m
        return np.bincount(diffs.ravel(), minlength=m)
    ind = np.zeros(m)
    ind[els] = 1
    f = np.fft.fft(ind)
    return np.rint(np.fft.ifft(np.conj(f) * f).real).astype(np.int64)


@dataclass
class SigmaReport:
    sigma: float
    sigma_from_correlations: float
    region_size: int
    zero_shift_term: float
    shift_magnitudes: np.ndarray | None = field(default=None, repr=False)
    bounds: dict = field(default_factory=dict)


def shifted_sums(phi: TabulatedFunction, B: Region) -> np.ndarray:
    """S(phi; a + B) for every a, computed shift by shift."""
    _check_modulus(phi, B)
    m = phi.m
    els = region_elements(B)
    out = np.empty(m, dtype=complex)
    for rows in _chunked_rows(m, els.size):
        out[rows] = phi.values[(els[None, :] + rows[:, None]) % m].sum(axis=1)
    return out


def sigma_statistic(phi: TabulatedFunction, B: Region, profile: CorrelationProfile | None = None,
                    rtol: float = 1e-6, keep_shifts: bool = False) -> SigmaReport:
    """Sigma = sum_a |S(phi; a+B)|^2, once directly and once as sum_d r_B(d) C(d).

    The two routes must agree to ``rtol`` relative to max(Sigma, |B| * ||phi||_2^2 * 1e-3);
    the floor keeps the comparison meaningful when Sigma cancels to nearly 0.
    """
    shifts = shifted_sums(phi, B)
    mags2 = np.abs(shifts) ** 2
    direct = math.fsum(mags2)
    prof = correlations(phi) if profile is None else profile
    r = difference_counts(B)
    via_corr = math.fsum((r * prof.values).real)
    n = len(B)
    scale = max(abs(direct), abs(via_corr), n * phi.l2_norm ** 2 * 1e-3)
    if abs(direct - via_corr) > rtol * scale:
        raise ConsistencyError(f"Sigma routes disagree: {direct!r} vs {via_corr!r}")
    return SigmaReport(direct, via_corr, n, float(mags2[0]),
                       np.sqrt(mags2) if keep_shifts else None)


def sigma_via_correlations(phi: TabulatedFunction, B: Region,
                           profile: CorrelationProfile | None = None) -> float:
    """Single-route Sigma from the correlation profile, O(m) for intervals."""
    prof = correlations(phi) if profile is None else profile
    return math.fsum((difference_counts(B) * prof.values).real)


def gap_from_interval(I: IntervalZm) -> GapSpec:
    return GapSpec(I.m, I.start, (1,), (I.length,))


def iter_gap_coefficients(B: GapSpec):
    return itertools.product(*[range(n) for n in B.lengths])


__all__ = [
    "IntervalZm", "GapSpec", "SubsetZm", "SigmaReport", "NonProperGAP", "Region",
    "enumerate_gap", "sum_region", "geometric_progression_sum", "t_s_set",
    "t_s_subgroup", "sigma_statistic", "sigma_via_correlations", "difference_counts",
    "symmetric_difference_sizes", "shifted_sums", "is_subgroup",
]

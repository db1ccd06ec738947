"""Unitary DFT on Z/mZ, additive correlation profiles and completion quantities.

The transform convention throughout is

    hat(phi)(t) = m**-0.5 * sum_n phi(n) e(n t / m),   e(z) = exp(2 pi i z)

and the correlation profile is C(a) = sum_x phi(x) * conj(phi(x + a)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .ring import unit_roots
from .tabulated import TabulatedFunction

if TYPE_CHECKING:
    from .regions import IntervalZm

log = logging.getLogger(__name__)

DIRECT_DFT_LIMIT = 512


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    values: np.ndarray = field(repr=False)
    sup: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sup", float(np.abs(self.values).max()))

    @property
    def m(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class CorrelationProfile:
    values: np.ndarray = field(repr=False)
    method: str = "direct"

    @property
    def m(self) -> int:
        return int(self.values.size)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    def max_off(self, exclude) -> float:
        """max |C(a)| over a not in ``exclude``; 0.0 when nothing is left."""
        keep = np.ones(self.m, dtype=bool)
        keep[np.asarray(list(exclude), dtype=np.int64) % self.m] = False
        if not keep.any():
            return 0.0
        return float(self.moduli[keep].max())


def _values(phi) -> np.ndarray:
    if isinstance(phi, TabulatedFunction):
        return phi.values
    return np.asarray(phi, dtype=complex)


def dft_direct(x) -> np.ndarray:
    """O(m^2) evaluation; the reference the fast path is checked against."""
    x = np.asarray(x, dtype=complex)
    m = x.size
    n = np.arange(m, dtype=np.int64)
    out = np.empty(m, dtype=complex)
    # row blocks keep the m x m kernel out of memory for large m
    block = max(1, 4_000_000 // m)
    for t0 in range(0, m, block):
        t = n[t0:t0 + block, None]
        out[t0:t0 + block] = unit_roots(t * n[None, :], m) @ x
    return out / math.sqrt(m)


def dft_bluestein(x) -> np.ndarray:
    """Chirp reduction of an arbitrary-length DFT to a power-of-two convolution.

    Uses n t = (n^2 + t^2 - (t - n)^2) / 2 so that
    sum_n x(n) e(nt/m) = w(t) sum_n [x(n) w(n)] conj(w(t - n)) with
    w(k) = e(k^2 / 2m); chirp phases are reduced mod 2m in integers.
    """
    x = np.asarray(x, dtype=complex)
    m = x.size
    if m == 1:
        return x.copy()
    k = np.arange(m, dtype=np.int64)
    w = unit_roots((k * k) % (2 * m), 2 * m)
    size = 1 << (2 * m - 2).bit_length()
    a = np.zeros(size, dtype=complex)
    a[:m] = x * w
    b = np.zeros(size, dtype=complex)
    b[:m] = np.conj(w)
    b[size - m + 1:] = np.conj(w[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))[:m]
    return w * conv / math.sqrt(m)


def dft_values(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.size < DIRECT_DFT_LIMIT:
        return dft_direct(x)
    return dft_bluestein(x)


def dft(phi: TabulatedFunction) -> SpectrumTable:
    return SpectrumTable(dft_values(_values(phi)))


def parseval_defect(phi: TabulatedFunction, spectrum: SpectrumTable | None = None) -> float:
    """Relative gap between sum |hat phi|^2 and sum |phi|^2."""
    spec = dft(phi) if spectrum is None else spectrum
    lhs = math.fsum(np.abs(spec.values) ** 2)
    rhs = math.fsum(np.abs(_values(phi)) ** 2)
    return abs(lhs - rhs) / max(rhs, 1e-300)


def correlations_direct(phi: TabulatedFunction) -> CorrelationProfile:
    v = _values(phi)
    m = v.size
    ext = np.concatenate([v, v])
    out = np.empty(m, dtype=complex)
    for a in range(m):
        out[a] = np.vdot(ext[a:a + m], v)
    return CorrelationProfile(out, "direct")


def plancherel_raw(phi: TabulatedFunction) -> np.ndarray:
    """sum_t |hat phi(t)|^2 e(-a t/m), the dual formula taken literally.

    Under the transform convention above this equals conj(C(a)) = C(-a).
    """
    v = _values(phi)
    power = np.abs(dft_values(v)) ** 2
    return math.sqrt(v.size) * np.conj(dft_values(power))


def correlations_plancherel(phi: TabulatedFunction, verify: bool = False,
                            rtol: float = 1e-6) -> CorrelationProfile:
    raw = plancherel_raw(phi)
    log.debug("plancherel profile re-oriented by conjugation (a -> -a)")
    prof = CorrelationProfile(np.conj(raw), "plancherel")
    if verify:
        ref = correlations_direct(phi)
        scale = max(float(ref.moduli.max()), 1e-300)
        gap = float(np.abs(prof.moduli - ref.moduli).max())
        if gap > rtol * scale:
            raise ConsistencyError(f"plancherel/direct modulus gap {gap:.3e}")
    return prof


def correlations(phi: TabulatedFunction, method: str = "auto") -> CorrelationProfile:
    if method == "auto":
        method = "direct" if phi.m <= 4096 else "plancherel"
    if method == "direct":
        return correlations_direct(phi)
    if method == "plancherel":
        return correlations_plancherel(phi)
    raise ValueError(f"unknown correlation method {method!r}")


def interval_l1_closed_form(m: int, length: int) -> np.ndarray:
    """|hat 1_I(t)| for every t, independent of the interval start."""
    t = np.arange(1, m)
    out = np.empty(m)
    out[0] = length / math.sqrt(m)
    out[1:] = np.abs(np.sin(np.pi * length * t / m)) / (math.sqrt(m) * np.abs(np.sin(np.pi * t / m)))
    return out


def completion_l1(interval: "IntervalZm", rtol: float = 1e-9) -> float:
    """Exact L1 norm of the Fourier transform of the interval indicator."""
    m, length = interval.m, interval.length
    if length >= m:
        raise ValueError("completion needs |I| < m")
    ind = np.zeros(m, dtype=complex)
    ind[interval.elements()] = 1
    via_fft = math.fsum(np.abs(dft_values(ind)))
    closed = math.fsum(interval_l1_closed_form(m, length))
    if abs(via_fft - closed) > rtol * closed:
        raise ConsistencyError(f"interval L1 mismatch {via_fft} vs {closed}")
    return via_fft


def completion_bound(phi: TabulatedFunction, interval: "IntervalZm",
                     spectrum: SpectrumTable | None = None) -> float:
    """sup|hat phi| * sum_t |hat 1_I(t)|, a rigorous bound for |S(phi; I)|."""
    if interval.m != phi.m:
        raise ValueError("interval and function live on different groups")
    spec = dft(phi) if spectrum is None else spectrum
    return spec.sup * completion_l1(interval)

"""Complex-valued functions on Z/mZ stored as value tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def csum(values) -> complex:
    """Correctly rounded sum of complex values (fsum on each component)."""
    v = np.asarray(values, dtype=complex)
    return complex(math.fsum(v.real), math.fsum(v.imag))


@dataclass(frozen=True, eq=False)
class TabulatedFunction:
    """phi: Z/mZ -> C with index n holding phi(n).

    ``conductor_bound`` is the declared complexity constant c fed to the
    bound formulas; it is a configuration value, never derived from data.
    ``kummer`` marks families whose restriction to F_p^x is a multiplicative
    character (the multiplicative-group bounds do not apply to them).
    """

    values: np.ndarray = field(repr=False)
    conductor_bound: float = 1.0
    family_tag: str = ""
    kummer: bool = False
    sup_norm: float = field(init=False)
    l2_norm: float = field(init=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a non-empty 1-d sequence")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        a = np.abs(v)
        object.__setattr__(self, "sup_norm", float(a.max()))
        object.__setattr__(self, "l2_norm", math.sqrt(math.fsum(a * a)))

    @property
    def m(self) -> int:
        return int(self.values.size)

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.m])

    def __len__(self) -> int:
        return self.m

    def with_values(self, values, **changes) -> "TabulatedFunction":
        kw = dict(conductor_bound=self.conductor_bound, family_tag=self.family_tag,
                  kummer=self.kummer)
        kw.update(changes)
        return TabulatedFunction(values, **kw)


def constant(m: int, value: complex = 1.0, tag: str = "constant") -> TabulatedFunction:
    return TabulatedFunction(np.full(m, value, dtype=complex), max(1.0, abs(value)), tag)


def delta(m: int, at: int = 0, tag: str = "delta") -> TabulatedFunction:
    v = np.zeros(m, dtype=complex)
    v[at % m] = 1
    return TabulatedFunction(v, 1.0, tag)

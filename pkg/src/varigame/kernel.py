"""Odd interaction kernels for the game functional.

The functional couples the two strategies only through ``phi(f - g)``.
Oddness of ``phi`` is what makes the game antisymmetric,
``S(f, g) = -S(g, f)``, so every kernel here is validated to be odd.

Besides plain callables each kernel carries a compact description of its
derivative (``kind`` plus coefficients) that the compiled integrator in
:mod:`varigame._core` consumes.  Kernels whose derivative is a finite cosine
series (``sin``, ``sin^3``) are integrated through a separable expansion,
which makes the cost of a best-response scan independent of the number of
opponent functions.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ConfigurationError

__all__ = [
    "OddKernel",
    "builtin_kernel",
    "odd_polynomial",
    "linearized",
    "BUILTIN_KERNELS",
]

BUILTIN_KERNELS = ("sin", "sin3", "arctan")

# kind codes shared with _core
HARMONIC, ARCTAN, POLY = 0, 1, 2


@dataclass(frozen=True)
class OddKernel:
    """An odd function ``phi`` together with its exact derivative.

    ``harmonics`` holds ``(weight, multiple)`` pairs with
    ``phi'(x) = sum(weight * cos(multiple * x))`` for harmonic kernels;
    ``poly`` holds the power coefficients of ``phi`` for polynomial ones.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    derivative: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    kind: int = field(default=HARMONIC, repr=False)
    harmonics: tuple = field(default=(), repr=False)
    poly: tuple = field(default=(), repr=False)

    def __call__(self, x):
        return self.value(x)


def _sin3(x):
    return np.sin(x) ** 3


def _dsin3(x):
    s = np.sin(x)
    return 3.0 * s * s * np.cos(x)


def _darctan(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + x * x)


_BUILTINS = {
    "sin": lambda: OddKernel("sin", np.sin, np.cos, HARMONIC, ((1.0, 1.0),)),
    # 3 sin^2 x cos x = 3/4 cos x - 3/4 cos 3x
    "sin3": lambda: OddKernel(
        "sin3", _sin3, _dsin3, HARMONIC, ((0.75, 1.0), (-0.75, 3.0))
    ),
    "arctan": lambda: OddKernel("arctan", np.arctan, _darctan, ARCTAN),
}


def builtin_kernel(name):
    """Return one of the built-in kernels ``sin``, ``sin3`` or ``arctan``."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown kernel {name!r}; valid kernels are {', '.join(BUILTIN_KERNELS)}"
        ) from None


def odd_polynomial(coeffs, name=None):
    """Kernel ``phi(x) = sum(coeffs[i] * x**i)`` restricted to odd powers.

    Raises:
      ConfigurationError: if any even-power coefficient is non-zero or the
        list is empty.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ConfigurationError("polynomial kernel needs a non-empty 1-d coefficient list")
    if not np.all(np.isfinite(c)):
        raise ConfigurationError("polynomial kernel coefficients must be finite")
    even = [i for i in range(0, c.size, 2) if c[i] != 0.0]
    if even:
        raise ConfigurationError(
            f"kernel must be odd; non-zero even-power terms at degrees {even}"
        )
    dc = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    coeffs_t = tuple(float(v) for v in c)

    def value(x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c)

    def derivative(x):
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, dc) + np.zeros_like(x)

    if name is None:
        name = "poly[" + ",".join(f"{v:g}" for v in coeffs_t) + "]"
    return OddKernel(name, value, derivative, POLY, poly=coeffs_t)


def linearized():
    """The small-coupling kernel ``phi(x) = x``."""
    return odd_polynomial([0.0, 1.0], name="linear")

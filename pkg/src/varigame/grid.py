"""Uniform time grids on [0, 1] and strategy functions sampled on them."""

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import ConfigurationError, GridMismatchError

__all__ = [
    "TimeGrid",
    "SampledFn",
    "QUADRATURE_RULES",
    "derivative",
    "integrate",
    "small_a_optimum",
    "quadratic",
    "BOUNDARY_TOL",
]

QUADRATURE_RULES = ("trapezoid", "left_riemann")
BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """``n_steps + 1`` equally spaced nodes from 0 to 1 inclusive."""

    n_steps: int = 10_000

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @classmethod
    def from_dt(cls, dt):
        n = round(1.0 / dt)
        if n < 1 or abs(n * dt - 1.0) > 1e-9:
            raise ConfigurationError(f"dt={dt!r} does not divide [0, 1] evenly")
        return cls(n)

    @property
    def dt(self):
        return 1.0 / self.n_steps

    @cached_property
    def nodes(self):
        t = np.linspace(0.0, 1.0, self.n_steps + 1)
        t.flags.writeable = False
        return t

    def __len__(self):
        return self.n_steps + 1


def _frozen(x):
    a = np.array(x, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SampledFn:
    """Values ``f(t_k)`` on a :class:`TimeGrid`, optionally with ``f'(t_k)``.

    Derivative samples, when present, are used by the payoff in preference
    to finite differences.
    """

    grid: TimeGrid
    values: np.ndarray
    fprime: np.ndarray | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (len(self.grid),):
            raise ValueError(f"expected {len(self.grid)} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", v)
        if self.fprime is not None:
            d = _frozen(self.fprime)
            if d.shape != v.shape or not np.all(np.isfinite(d)):
                raise ValueError("derivative samples must be finite and match values")
            object.__setattr__(self, "fprime", d)

    @classmethod
    def from_callable(cls, grid, fn, dfn=None, label=""):
        t = grid.nodes
        d = None if dfn is None else np.broadcast_to(dfn(t), t.shape)
        return cls(grid, np.broadcast_to(fn(t), t.shape), d, label)

    @classmethod
    def zero(cls, grid):
        z = np.zeros(len(grid))
        return cls(grid, z, z, "zero")

    @property
    def t(self):
        return self.grid.nodes

    def slope(self):
        """Derivative samples: attached ones if present, else finite differences."""
        if self.fprime is not None:
            return self.fprime
        return derivative(self).values

    def is_admissible(self, tol=BOUNDARY_TOL):
        """True when ``|f(0)| <= tol`` and ``|f'(1)| <= tol``."""
        return abs(self.values[0]) <= tol and abs(self.slope()[-1]) <= tol

    def at(self, t):
        """Value at node time ``t`` (must be a grid node within rounding)."""
        k = round(t * self.grid.n_steps)
        if abs(k * self.grid.dt - t) > 1e-9:
            raise ValueError(f"t={t} is not a grid node")
        return float(self.values[k])

    def sup_distance(self, other):
        _check_same_grid(self, other)
        return float(np.max(np.abs(self.values - other.values)))

    def to_csv(self, path_or_buf=None):
        """Write ``t,f`` (or ``t,f,fprime``) rows with 17 significant digits.

        Returns the CSV text when no destination is given.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = [self.t, self.values]
        w.writerow(["t", "f"] + (["fprime"] if self.fprime is not None else []))
        if self.fprime is not None:
            cols.append(self.fprime)
        for row in zip(*cols):
            w.writerow([f"{x:.17g}" for x in row])
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        return None

    @classmethod
    def from_csv(cls, path_or_buf):
        if hasattr(path_or_buf, "read"):
            text = path_or_buf.read()
        else:
            with open(path_or_buf, newline="") as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], np.array(rows[1:], dtype=float)
        if header[:2] != ["t", "f"]:
            raise ValueError(f"unexpected CSV header {header}")
        grid = TimeGrid(len(body) - 1)
        if not np.allclose(body[:, 0], grid.nodes, rtol=0, atol=1e-12):
            raise ValueError("CSV time column is not a uniform grid on [0, 1]")
        fp = body[:, 2] if len(header) > 2 else None
        return cls(grid, body[:, 1], fp)


def _check_same_grid(*fns):
    n = fns[0].grid.n_steps
    for f in fns[1:]:
        if f.grid.n_steps != n:
            raise GridMismatchError(
                f"grid mismatch: {n} vs {f.grid.n_steps} steps"
            )


def derivative(f):
    """Second-order finite-difference derivative on the same grid.

    Central differences in the interior, one-sided second-order stencils at
    the two endpoints.
    """
    if len(f.grid) < 3:
        raise ValueError("derivative needs at least 3 grid nodes")
    d = np.gradient(f.values, f.grid.dt, edge_order=2)
    return SampledFn(f.grid, d, label=f"d({f.label})" if f.label else "")


def integrate(f, rule="trapezoid"):
    """Composite quadrature of ``f`` over [0, 1].

    ``f`` may be a :class:`SampledFn` or a raw sample array on a uniform
    grid of [0, 1]; stacked arrays integrate along the last axis.
    """
    v = f.values if isinstance(f, SampledFn) else np.asarray(f, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot integrate non-finite samples")
    n = v.shape[-1] - 1
    # divide by n rather than multiply by dt: keeps constants exact
    if rule == "trapezoid":
        out = (v[..., 1:-1].sum(axis=-1) + 0.5 * (v[..., 0] + v[..., -1])) / n
    elif rule == "left_riemann":
        out = v[..., :-1].sum(axis=-1) / n
    else:
        raise ConfigurationError(f"unknown quadrature rule {rule!r}; use one of {QUADRATURE_RULES}")
    return float(out) if np.ndim(out) == 0 else out


def quadratic(grid, c, label=None):
    """``c * t * (2 - t)``: admissible (``f(0) = f'(1) = 0``) for every ``c``."""
    return SampledFn.from_callable(
        grid,
        lambda t: c * t * (2.0 - t),
        lambda t: 2.0 * c * (1.0 - t),
        label=f"quad({c:.6g})" if label is None else label,
    )


def small_a_optimum(a, grid):
    """The optimum ``(a/4) t (2 - t)`` of the linearized game against ``g = 0``."""
    if a < 0:
        raise ConfigurationError(f"coupling a must be non-negative, got {a}")
    return quadratic(grid, a / 4.0, label=f"parabola(a={a:g})")

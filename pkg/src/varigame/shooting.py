"""Best responses by shooting on the Euler-Lagrange equation.

Against a fixed opponent mixture ``{(P_k, g_k)}`` a stationary strategy
satisfies

    f''(t) = -(a/2) * sum_k P_k phi'(f(t) - g_k(t)),   f(0) = 0, f'(1) = 0.

Every candidate is integrated backward from ``t = 1`` with ``f(1) = c`` and
``f'(1) = 0``; the residual ``f(0)`` is scanned over ``c`` and its sign
changes are refined by bisection.  The inner loops live in
:mod:`varigame._core`, which integrates in reversed time ``tau = 1 - t``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import _core
from .exceptions import ConfigurationError, DivergenceError, NoRootsError
from .grid import SampledFn, _check_same_grid
from .kernel import ARCTAN, HARMONIC, POLY
from .payoff import GameConfig, payoff

__all__ = [
    "MixtureTarget",
    "ShotResult",
    "PhasePortrait",
    "integrate_backward",
    "scan_roots",
    "best_response",
    "phase_portrait",
    "default_c_range",
    "root_count",
    "admissible_roots",
    "N_SCAN",
]

N_SCAN = 2001
RESIDUAL_TOL = 1e-9
C_TOL = 1e-12
TANGENT_TOL = 1e-4
JUMP = 0.25
REFINE_SPLIT = 8
REFINE_DEPTH = 40
REFINE_MIN_WIDTH = 1e-11
METHODS = {"euler": _core.EULER, "rk4": _core.RK4}


@dataclass(frozen=True, eq=False)
class MixtureTarget:
    """Opponent mixture: ``components`` is a sequence of ``(weight, SampledFn)``."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), g) for w, g in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        w = np.array([c[0] for c in comps])
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"mixture weights must be >= 0 and sum to 1, got {w}")
        _check_same_grid(*(c[1] for c in comps))
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, g):
        return cls(((1.0, g),))

    @classmethod
    def from_strategies(cls, strategies, probabilities):
        return cls(tuple((p, g) for p, g in zip(probabilities, strategies) if p > 0))

    @property
    def weights(self):
        return np.array([w for w, _ in self.components])

    @property
    def functions(self):
        return [g for _, g in self.components]

    @property
    def grid(self):
        return self.components[0][1].grid


@dataclass(frozen=True, eq=False)
class ShotResult:
    """One backward shot.

    ``terminal_value`` is ``c = f(1)``, ``residual`` is the computed ``f(0)``.
    ``tangent`` marks shots recovered from a near-tangent minimum of the
    residual curve rather than a plain sign change; a tangency that does not
    actually reach zero is kept as a flagged double root (``multiplicity=2``)
    whose residual may exceed the root tolerance.
    """

    terminal_value: float
    trajectory: SampledFn
    residual: float
    tangent: bool = False
    multiplicity: int = 1


def default_c_range(a):
    """``[-2 pi - a/4, 2 pi + a/4]`` clipped to ``[-4 pi, 4 pi]``."""
    half = min(2.0 * math.pi + a / 4.0, 4.0 * math.pi)
    return (-half, half)


def _half_grid(values):
    """Samples on the reversed half-step grid, shape ``(2n + 1, K)``.

    Midpoints use 4-point cubic interpolation (3-point at the two ends) so
    that RK4 keeps its order against tabulated opponents.
    """
    g = np.ascontiguousarray(values[:, ::-1])
    K, n1 = g.shape
    n = n1 - 1
    mid = np.empty((K, n))
    if n >= 3:
        mid[:, 1:-1] = (-g[:, :-3] + 9.0 * g[:, 1:-2] + 9.0 * g[:, 2:-1] - g[:, 3:]) / 16.0
        mid[:, 0] = (3.0 * g[:, 0] + 6.0 * g[:, 1] - g[:, 2]) / 8.0
        mid[:, -1] = (3.0 * g[:, -1] + 6.0 * g[:, -2] - g[:, -3]) / 8.0
    else:
        mid[:] = 0.5 * (g[:, :-1] + g[:, 1:])
    half = np.empty((K, 2 * n + 1))
    half[:, ::2] = g
    half[:, 1::2] = mid
    return np.ascontiguousarray(half.T)


class _Field:
    """Force tables for one (mixture, game) pair, shared by all shots."""

    def __init__(self, mixture, cfg, method="rk4"):
        if mixture.grid.n_steps != cfg.grid.n_steps:
            raise ConfigurationError(
                f"mixture grid has {mixture.grid.n_steps} steps, game grid {cfg.grid.n_steps}"
            )
        try:
            self.method = METHODS[method]
        except KeyError:
            raise ConfigurationError(f"unknown method {method!r}; use euler or rk4") from None
        self.n = cfg.grid.n_steps
        self.grid = cfg.grid
        k = cfg.kernel
        P = mixture.weights
        empty1 = np.zeros(0)
        empty2 = np.zeros((0, 0))
        self.kind = k.kind
        self.mult = self.w = empty1
        self.C = self.S = self.G = empty2
        self.P = P
        self.dpoly = empty1
        values = np.stack([g.values for g in mixture.functions])
        zero_opponent = not np.any(values)
        if k.kind == HARMONIC:
            self.w = np.array([h[0] for h in k.harmonics])
            self.mult = np.array([h[1] for h in k.harmonics])
            if zero_opponent:
                rows = 2 * self.n + 1
                self.C = np.ones((rows, len(self.mult)))
                self.S = np.zeros((rows, len(self.mult)))
            else:
                G = _half_grid(values)
                self.C = np.stack([np.cos(m * G) @ P for m in self.mult], axis=1)
                self.S = np.stack([np.sin(m * G) @ P for m in self.mult], axis=1)
        elif k.kind in (ARCTAN, POLY):
            self.G = _half_grid(values)
            if k.kind == POLY:
                c = np.asarray(k.poly)
                self.dpoly = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
        else:
            raise ConfigurationError(f"kernel {k.name!r} has unsupported kind {k.kind}")
        self.half_a = 0.5 * cfg.a

    def _args(self):
        return (self.n, self.method, self.kind, self.half_a, self.mult, self.w,
                self.C, self.S, self.G, self.P, self.dpoly)

    def residuals(self, cs):
        """``f(0)``, ``f'(0)`` and divergence index for each terminal value."""
        cs = np.ascontiguousarray(cs, dtype=float)
        F0, V0, bad = _core.endpoints(cs, *self._args())
        return F0, -V0, bad

    def residual(self, c):
        F0, _, bad = self.residuals(np.array([c]))
        return F0[0] if bad[0] < 0 else math.nan

    def shoot(self, c, tangent=False):
        F, V, bad = _core.trajectory(float(c), *self._args())
        if bad >= 0:
            raise DivergenceError(
                f"backward shot from f(1)={c:.6g} diverged at t={1 - bad / self.n:.6g}",
                1.0 - bad / self.n,
            )
        traj = SampledFn(self.grid, F[::-1], -V[::-1], label=f"shot(c={c:.10g})")
        return ShotResult(float(c), traj, float(F[-1]), tangent)


def integrate_backward(c, mixture, cfg, method="rk4"):
    """Integrate from ``t = 1`` (``f = c``, ``f' = 0``) down to ``t = 0``.

    Raises:
      DivergenceError: if the state becomes non-finite.
    """
    return _Field(mixture, cfg, method).shoot(c)


def _bisect(field, lo, hi, rlo):
    while True:
        mid = 0.5 * (lo + hi)
        r = field.residual(mid)
        if abs(r) <= RESIDUAL_TOL or hi - lo <= C_TOL:
            return mid
        if (r < 0) == (rlo < 0):
            lo, rlo = mid, r
        else:
            hi = mid


def _tangent_candidates(field, cs, F0, i):
    """Resolve a local minimum of ``|f(0)|`` at scan index ``i``.

    Returns ``(c, multiplicity)`` pairs: two simple roots when the curve dips
    through zero between scan points, one double root when it touches zero,
    and a flagged double root (multiplicity 2, residual not below the root
    tolerance) when it only comes within :data:`TANGENT_TOL` of zero.
    """
    lo, hi = cs[i - 1], cs[i + 1]
    sgn = 1.0 if F0[i] > 0 else -1.0
    opt = minimize_scalar(
        lambda c: sgn * field.residual(c), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13},
    )
    c_ext, r_ext = float(opt.x), sgn * float(opt.fun)
    if not np.isfinite(r_ext):
        return []
    if abs(r_ext) <= RESIDUAL_TOL:
        return [(c_ext, 2)]
    if r_ext * F0[i] < 0:
        return [(_bisect(field, lo, c_ext, F0[i - 1]), 1),
                (_bisect(field, c_ext, hi, r_ext), 1)]
    if abs(r_ext) <= TANGENT_TOL:
        return [(c_ext, 2)]
    return []


def _refine_scan(field, cs, F0, ok, max_extra):
    """Insert scan points where the residual jumps by more than :data:`JUMP`.

    Near the unstable equilibria of the force the residual swings through
    several roots within a tiny ``c`` window; uniform scans miss them.
    """
    extra = 0
    for _ in range(REFINE_DEPTH):
        d = np.abs(np.diff(F0))
        width = np.diff(cs)
        steep = np.flatnonzero(ok[:-1] & ok[1:] & (d > JUMP) & (width > REFINE_MIN_WIDTH))
        if steep.size == 0 or extra >= max_extra:
            break
        frac = np.arange(1, REFINE_SPLIT) / REFINE_SPLIT
        new = (cs[steep, None] + width[steep, None] * frac).ravel()
        new = new[: max_extra - extra]
        extra += new.size
        F_new, _, bad = field.residuals(new)
        cs = np.concatenate([cs, new])
        F0 = np.concatenate([F0, F_new])
        ok = np.concatenate([ok, bad < 0])
        order = np.argsort(cs, kind="stable")
        cs, F0, ok = cs[order], F0[order], ok[order]
    return cs, F0, ok


def scan_roots(mixture, cfg, c_range=None, n_scan=N_SCAN, method="rk4", field=None,
               refine=True):
    """All stationary shots with terminal value in ``c_range``, sorted by ``c``.

    Sign changes of the residual on the (adaptively refined) scan are bisected
    to ``|f(0)| <= 1e-9`` or a bracket of 1e-12.  Local minima of ``|f(0)|``
    below :data:`TANGENT_TOL` without a sign change are examined as possible
    double roots and returned with ``tangent=True``; see :func:`root_count`.
    """
    if n_scan < 2:
        raise ConfigurationError("n_scan must be at least 2")
    lo, hi = default_c_range(cfg.a) if c_range is None else c_range
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise ConfigurationError(f"invalid c_range ({lo}, {hi})")
    field = field or _Field(mixture, cfg, method)
    cs = np.linspace(lo, hi, n_scan)
    F0, _, bad = field.residuals(cs)
    ok = bad < 0
    if refine:
        cs, F0, ok = _refine_scan(field, cs, F0, ok, max_extra=2 * n_scan)
    found = []
    for i in range(len(cs)):
        if ok[i] and F0[i] == 0.0:
            found.append((cs[i], 1))
    for i in range(len(cs) - 1):
        if ok[i] and ok[i + 1] and F0[i] * F0[i + 1] < 0:
            found.append((_bisect(field, cs[i], cs[i + 1], F0[i]), 1))
    A = np.abs(F0)
    for i in range(1, len(cs) - 1):
        if not (ok[i - 1] and ok[i] and ok[i + 1]) or F0[i] == 0.0:
            continue
        if A[i] <= TANGENT_TOL and A[i] <= A[i - 1] and A[i] <= A[i + 1]:
            if F0[i - 1] * F0[i] > 0 and F0[i] * F0[i + 1] > 0:
                found.extend(_tangent_candidates(field, cs, F0, i))
    out = []
    for c, mult in found:
        r = field.shoot(c, tangent=mult == 2)
        if mult == 2:
            r = ShotResult(r.terminal_value, r.trajectory, r.residual, True, 2)
        out.append(r)
    out.sort(key=lambda r: r.terminal_value)
    return out


def root_count(results):
    """Number of roots counted with multiplicity (flagged tangencies count twice)."""
    return sum(r.multiplicity for r in results)


def admissible_roots(results, tol=1e-6):
    """The shots that satisfy ``|f(0)| <= tol``."""
    return [r for r in results if abs(r.residual) <= tol]


def best_response(mixture, cfg, c_range=None, n_scan=N_SCAN, method="rk4", roots=None):
    """The stationary shot with the lowest expected payoff against ``mixture``.

    Returns:
      (trajectory, expected payoff)

    Raises:
      NoRootsError: when the scan finds no admissible shot.
    """
    if roots is None:
        roots = scan_roots(mixture, cfg, c_range, n_scan, method)
    roots = admissible_roots(roots)
    if not roots:
        raise NoRootsError(
            f"no admissible shot for a={cfg.a:g} in c_range {c_range or default_c_range(cfg.a)}; "
            "widen c_range or increase n_scan"
        )
    best, best_val = None, math.inf
    for r in roots:
        val = sum(w * payoff(r.trajectory, g, cfg) for w, g in mixture.components)
        if val < best_val:
            best, best_val = r.trajectory, val
    return best, float(best_val)


@dataclass(frozen=True, eq=False)
class PhasePortrait:
    """Startpoints ``(f(0), f'(0))`` of backward shots, one per ``c``."""

    c: np.ndarray
    f0: np.ndarray
    fprime0: np.ndarray
    diverged: np.ndarray

    def crossings(self):
        """Number of sign changes of ``f(0)`` along the ``c`` axis."""
        f = self.f0[~self.diverged]
        return int(np.sum(f[:-1] * f[1:] < 0) + np.sum(f == 0.0))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["c", "f0", "fprime0", "flag"])
            for c, f0, fp, d in zip(self.c, self.f0, self.fprime0, self.diverged):
                w.writerow([f"{c:.17g}", f"{f0:.17g}", f"{fp:.17g}", "diverged" if d else "ok"])


def phase_portrait(a, kernel, c_values, cfg=None, method="rk4"):
    """Backward shots against ``g = 0`` for each terminal value in ``c_values``.

    Divergent shots are flagged instead of aborting the sweep.
    """
    base = cfg or GameConfig(a, kernel)
    cfg = GameConfig(a, kernel, base.quadrature, base.grid)
    c = np.asarray(c_values, dtype=float)
    if not np.all(np.isfinite(c)):
        raise ConfigurationError("c_values must be finite")
    field = _Field(MixtureTarget.pure(SampledFn.zero(cfg.grid)), cfg, method)
    F0, FP0, bad = field.residuals(c)
    return PhasePortrait(c, F0, FP0, bad >= 0)

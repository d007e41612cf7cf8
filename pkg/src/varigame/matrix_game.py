"""Finite symmetric zero-sum games solved by linear programming.

For an antisymmetric payoff matrix ``M`` (see :class:`~varigame.payoff.PayoffMatrix`
for the orientation) the game value is zero and an optimal mixture ``p``
satisfies ``M @ p <= 0``.  The LP is solved with a small dense tableau
simplex with deterministic pivoting, so degenerate games always return
the same vertex.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import LPError

__all__ = [
    "MixedStrategy",
    "solve_symmetric_game",
    "expected_payoffs",
    "cycle_solution",
    "simplex_max",
    "SUPPORT_TOL",
]

SUPPORT_TOL = 1e-6
ANTISYM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MixedStrategy:
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty vector")
        if np.any(p < -1e-12):
            raise ValueError(f"negative probability {p.min()}")
        if abs(p.sum() - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return self.probabilities.size

    def __getitem__(self, i):
        return self.probabilities[i]

    def __iter__(self):
        return iter(self.probabilities)

    def support(self, tol=SUPPORT_TOL):
        """Indices with probability above ``tol``."""
        return np.flatnonzero(self.probabilities > tol)

    def tolist(self):
        return self.probabilities.tolist()


def _entries(M):
    return np.asarray(getattr(M, "entries", M), dtype=float)


def _reinvert(A, b, c, basis):
    """Tableau for ``basis`` computed afresh from the original data."""
    m, n = A.shape
    full = np.hstack([A, np.eye(m)])
    cf = np.concatenate([c, np.zeros(m)])
    B = full[:, basis]
    T = np.empty((m + 1, n + m + 1))
    T[:m, :-1] = np.linalg.solve(B, full)
    T[:m, -1] = np.linalg.solve(B, b)
    T[m, :-1] = cf[basis] @ T[:m, :-1] - cf
    T[m, -1] = cf[basis] @ T[:m, -1]
    return T


def simplex_max(c, A, b, max_iter=10_000, tol=1e-12, pivot_tol=1e-9, feas_tol=1e-11):
    """Maximize ``c @ x`` subject to ``A @ x <= b``, ``x >= 0`` with ``b >= 0``.

    Dense tableau.  The entering column follows Bland's smallest-index rule.
    The leaving row uses a two-pass (Harris) ratio test: among rows whose
    ratio is within ``feas_tol`` of the minimum, the largest pivot wins, ties
    going to the smallest basic index.  Tiny pivots are what wreck a tableau
    built from nearly duplicate strategies.  After 50 degenerate pivots in a
    row the leaving rule falls back to pure Bland, which cannot cycle.

    When no entering column is left, the tableau is rebuilt from the
    original data for the final basis to remove accumulated rounding, and
    pivoting resumes if the fresh tableau is not optimal.  ``tol``,
    ``pivot_tol`` and ``feas_tol`` are relative to ``max|A|``.

    Returns:
      (x, objective value, number of pivots)
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if np.any(b < 0):
        raise LPError("simplex_max requires b >= 0 (origin feasible)")
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    scale = max(1.0, np.abs(A).max(initial=0.0))
    fresh = False
    degenerate = 0
    for it in range(max_iter):
        reduced = T[m, :-1]
        entering = np.flatnonzero(reduced < -tol * scale)
        if entering.size == 0 and not fresh:
            try:
                T = _reinvert(A, b, c, basis)
            except np.linalg.LinAlgError:
                pass
            fresh = True
            continue
        if entering.size == 0:
            x = np.zeros(n + m)
            x[basis] = np.clip(T[:m, -1], 0.0, None)
            return x[:n], float(T[m, -1]), it
        j = entering[0]
        col = T[:m, j]
        rows = np.flatnonzero(col > pivot_tol * scale)
        if rows.size == 0:
            raise LPError("LP is unbounded")
        rhs = T[rows, -1]
        if degenerate < 50:
            bound = ((rhs + feas_tol * scale) / col[rows]).min()
            cand = rows[rhs / col[rows] <= bound]
            r = max(cand, key=lambda i: (col[i], -basis[i]))
        else:
            ratios = rhs / col[rows]
            ties = rows[ratios <= ratios.min() + tol * max(1.0, abs(ratios.min()))]
            r = min(ties, key=lambda i: basis[i])
        step = T[r, -1] / T[r, j]
        T[r] /= T[r, j]
        for i in range(m + 1):
            if i != r and T[i, j] != 0.0:
                T[i] -= T[i, j] * T[r]
        # the Harris test and round-off leave basic values down to -feas_tol
        np.clip(T[:m, -1], 0.0, None, out=T[:m, -1])
        basis[r] = j
        degenerate = degenerate + 1 if step <= tol * scale else 0
        fresh = False
    raise LPError(
        f"simplex did not terminate within {max_iter} pivots "
        f"(size {m}x{n}, objective {T[m, -1]:.6g})"
    )


def _polish(E, p):
    """Re-solve ``E[S, S] p_S = 0, sum p_S = 1`` on the support ``S`` of ``p``.

    Removes the rounding the tableau accumulated; the result is kept only if
    it is a distribution with a smaller ``max(E @ p)``.
    """
    S = np.flatnonzero(p > 0)
    K = np.vstack([E[np.ix_(S, S)], np.ones(S.size)])
    rhs = np.zeros(S.size + 1)
    rhs[-1] = 1.0
    q = np.zeros_like(p)
    q[S] = np.linalg.lstsq(K, rhs, rcond=None)[0]
    if q.min() >= 0 and (E @ q).max() < (E @ p).max():
        return q / q.sum()
    return p / p.sum()


def solve_symmetric_game(M, max_iter=10_000, support_tol=SUPPORT_TOL):
    """Optimal mixture ``p`` for the minimizing (column) player of ``M``.

    Probabilities below ``support_tol`` are truncated and the rest
    renormalized.  Truncation moves ``M @ p`` by up to the dropped mass
    times ``max|M|``; pass ``support_tol=0`` for the exact LP vertex.

    Raises:
      LPError: if ``M`` is not antisymmetric within 1e-9 or the simplex
        exceeds ``max_iter`` pivots.
    """
    E = _entries(M)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise LPError(f"game matrix must be square, got shape {E.shape}")
    asym = np.abs(E + E.T).max(initial=0.0)
    if asym > ANTISYM_TOL * max(1.0, np.abs(E).max(initial=0.0)):
        raise LPError(f"matrix is not antisymmetric (max |M + M^T| = {asym:.3g}); symmetrize first")
    n = E.shape[0]
    # scale into [1, 3] so the value 2 is positive and x = p / 2 turns the
    # game into max sum(x) s.t. C x <= 1; scaling (rather than shifting by
    # max|E|) keeps the tableau well conditioned when max|E| is large
    s = np.abs(E).max(initial=0.0)
    C = E / s + 2.0 if s > 0 else np.ones_like(E)
    x, total, _ = simplex_max(np.ones(n), C, np.ones(n), max_iter=max_iter)
    p = _polish(E, np.clip(x / total, 0.0, None))
    p[p < support_tol] = 0.0
    return MixedStrategy(p / p.sum())


def expected_payoffs(M, p):
    """``M @ p``: what the mixture pays against each pure opponent strategy."""
    E = _entries(M)
    q = np.asarray(getattr(p, "probabilities", p), dtype=float)
    if E.shape[1] != q.shape[0]:
        raise ValueError(f"dimension mismatch: matrix {E.shape} vs mixture of length {q.shape[0]}")
    return E @ q


def cycle_solution(M):
    """Closed-form equilibrium of a fully mixed 3x3 antisymmetric cycle.

    With ``M = [[0, x, -y], [-x, 0, z], [y, -z, 0]]`` and ``x, y, z`` of one
    sign, every inequality of ``M @ p <= 0`` must be tight, giving
    ``p ~ (z, y, x)``.
    """
    E = _entries(M)
    if E.shape != (3, 3):
        raise ValueError("cycle_solution needs a 3x3 matrix")
    w = np.array([E[1, 2], E[2, 0], E[0, 1]])
    if not (np.all(w > 0) or np.all(w < 0)):
        raise ValueError("matrix is not a fully mixed cycle")
    return MixedStrategy(w / w.sum())

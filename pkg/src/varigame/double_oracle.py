"""Double-oracle search for mixed equilibria of the continuous game.

The loop keeps a finite set of admissible strategies.  Each round solves
the restricted matrix game, computes the continuous best response against
the resulting mixture by shooting, and adds it when it beats the mixture by
more than ``threshold``.  Since the game is symmetric and its value is zero,
the improvement margin is simply the best response's expected payoff.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .grid import quadratic
from .matrix_game import SUPPORT_TOL, MixedStrategy, expected_payoffs, solve_symmetric_game
from .payoff import payoff_matrix
from .shooting import N_SCAN, MixtureTarget, best_response

__all__ = [
    "EquilibriumReport",
    "find_equilibrium",
    "cluster_functions",
    "default_seeds",
    "alternative_seeds",
    "group_branches",
    "THRESHOLD",
    "CLUSTER_TOL",
    "BRANCH_TOL",
]

log = logging.getLogger(__name__)

THRESHOLD = 1e-5
CLUSTER_TOL = 1e-3
# support functions this close are one equilibrium function resolved twice;
# distinct branches sit O(1) apart in sup norm
BRANCH_TOL = 5e-2


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    """Outcome of :func:`find_equilibrium`.

    ``support`` and ``probabilities`` are restricted to strategies with
    positive weight; ``strategies`` keeps the whole working set.
    ``improvement_history[i]`` is the best-response payoff against the
    mixture of round ``i``; ``security_history[i]`` is ``max(M @ p)``.
    ``support`` keeps the strategies whose LP weight exceeds 1e-6, with
    weights renormalized; ``lp_probabilities`` is the untruncated LP
    solution over ``strategies``.

    The raw support often holds two or three near-copies of one function
    (each a slightly different numerical estimate of it).  ``branches``
    groups them; ``support_size`` counts the groups.
    """

    support: list
    probabilities: MixedStrategy
    iterations: int
    improvement_history: list
    converged: bool
    config: dict
    strategies: list = field(default_factory=list, repr=False)
    security_history: list = field(default_factory=list, repr=False)
    final_response: object = field(default=None, repr=False)

    branch_tol: float = BRANCH_TOL
    lp_probabilities: MixedStrategy = field(default=None, repr=False)

    @property
    def branches(self):
        return group_branches(self.support, self.probabilities.probabilities, self.branch_tol)

    @property
    def support_size(self):
        return len(self.branches)

    @property
    def endpoints(self):
        """``f(1)`` of each raw support function, in support order."""
        return [float(f.values[-1]) for f in self.support]

    @property
    def branch_endpoints(self):
        """Sorted ``f(1)`` per branch and the matching branch probabilities."""
        rows = sorted((b["endpoint"], b["probability"]) for b in self.branches)
        return [e for e, _ in rows], [q for _, q in rows]

    @property
    def mixture(self):
        """The exact LP mixture over ``strategies`` that the last round certified.

        It differs from ``support``/``probabilities`` only by weights below
        the support tolerance.
        """
        if self.lp_probabilities is None:
            return MixtureTarget.from_strategies(self.support, self.probabilities)
        return MixtureTarget.from_strategies(self.strategies, self.lp_probabilities)

    def to_dict(self):
        return {
            "schema_version": 1,
            "config": self.config,
            "converged": self.converged,
            "iterations": self.iterations,
            "support_size": self.support_size,
            "branch_endpoints": self.branch_endpoints[0],
            "branch_probabilities": self.branch_endpoints[1],
            "branch_tol": self.branch_tol,
            "raw_support_size": len(self.support),
            "probabilities": self.probabilities.tolist(),
            "endpoints": self.endpoints,
            "labels": [f.label for f in self.support],
            "improvement_history": list(self.improvement_history),
            "security_history": list(self.security_history),
        }


def default_seeds(cfg):
    """Six quadratics ``c t (2 - t)`` with ``c`` in {0, a/4, -a/4, pi, -pi, 2 pi}."""
    a = cfg.a
    return [quadratic(cfg.grid, c) for c in (0.0, a / 4, -a / 4, math.pi, -math.pi, 2 * math.pi)]


def alternative_seeds(cfg):
    """Six quadratics ``c t (2 - t)`` with ``c`` in {+-1, +-2, +-3}."""
    return [quadratic(cfg.grid, c) for c in (1.0, -1.0, 2.0, -2.0, 3.0, -3.0)]


def cluster_functions(candidates, tol=CLUSTER_TOL):
    """Greedy dedup: drop a candidate within sup-distance ``tol`` of a kept one."""
    kept = []
    for f in candidates:
        if all(f.sup_distance(k) > tol for k in kept):
            kept.append(f)
    return kept


def _add_note(exc, note):
    # BaseException.add_note arrived in 3.11
    if hasattr(exc, "add_note"):
        exc.add_note(note)
    else:
        exc.__notes__ = [*getattr(exc, "__notes__", []), note]


def group_branches(support, probabilities, tol=BRANCH_TOL):
    """Group support functions lying within sup-distance ``tol`` of each other.

    Groups are connected components of the "within ``tol``" relation.  Each
    group reports its members (indices), its total probability, the member
    with the largest probability as representative, and the
    probability-weighted mean endpoint ``f(1)``.
    """
    n = len(support)
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.shape != (n,):
        raise ValueError(f"{n} functions but {probabilities.size} probabilities")
    label = list(range(n))

    def root(i):
        while label[i] != i:
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if support[i].sup_distance(support[j]) <= tol:
                label[root(j)] = root(i)
    groups = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    out = []
    for members in groups.values():
        w = probabilities[members]
        ends = np.array([support[i].values[-1] for i in members])
        total = float(w.sum())
        out.append({
            "members": members,
            "probability": total,
            "representative": members[int(np.argmax(w))],
            "endpoint": float(ends @ w / total) if total > 0 else float(ends.mean()),
        })
    return out


def find_equilibrium(cfg, seeds=None, threshold=THRESHOLD, max_iter=100, *,
                     c_range=None, n_scan=N_SCAN, method="rk4", cluster_tol=CLUSTER_TOL,
                     branch_tol=BRANCH_TOL):
    """Grow a strategy set by best responses until none improves by ``threshold``.

    A best response within ``cluster_tol`` of a strategy already in the set
    replaces that strategy (it is a sharper estimate of the same function)
    instead of being appended.

    Returns an :class:`EquilibriumReport`; hitting ``max_iter`` yields
    ``converged=False`` rather than an exception.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    seeds = default_seeds(cfg) if seeds is None else list(seeds)
    if not seeds:
        raise ValueError("need at least one seed function")
    for s in seeds:
        if not s.is_admissible():
            raise ValueError(f"seed {s.label or '?'} violates f(0) = f'(1) = 0")
    strategies = cluster_functions(seeds, cluster_tol)
    history, security = [], []
    converged = False
    p = None
    br = None
    it = 0
    active = strategies
    for it in range(1, max_iter + 1):
        active = list(strategies)
        M = payoff_matrix(active, cfg)
        # exact LP vertex: truncating tiny weights here would shift the
        # mixture's payoffs by (dropped mass) * max|M|, which at large a
        # exceeds the threshold and stalls the loop
        p = solve_symmetric_game(M, support_tol=0.0)
        security.append(float(expected_payoffs(M, p).max()))
        mixture = MixtureTarget.from_strategies(active, p)
        try:
            br, margin = best_response(mixture, cfg, c_range=c_range, n_scan=n_scan, method=method)
        except Exception as exc:
            _add_note(exc, f"double oracle iteration {it}, a={cfg.a:g}, {len(strategies)} strategies")
            raise
        history.append(margin)
        log.debug("a=%g iter %d: %d strategies, support %d, margin %.3e",
                  cfg.a, it, len(strategies), len(p.support()), margin)
        if margin >= -threshold:
            converged = True
            break
        dist = [br.sup_distance(s) for s in strategies]
        k = int(np.argmin(dist))
        if dist[k] <= cluster_tol:
            strategies[k] = br
        else:
            strategies.append(br)
    keep = p.support(SUPPORT_TOL)
    probs = p.probabilities[keep]
    config = dict(cfg.echo(), threshold=threshold, method=method, n_scan=n_scan,
                  cluster_tol=cluster_tol, branch_tol=branch_tol, max_iter=max_iter)
    return EquilibriumReport(
        support=[active[i] for i in keep],
        probabilities=MixedStrategy(probs / probs.sum()),
        iterations=it,
        improvement_history=history,
        converged=converged,
        config=config,
        strategies=active,
        security_history=security,
        final_response=br,
        branch_tol=branch_tol,
        lp_probabilities=p,
    )

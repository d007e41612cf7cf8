"""Equilibrium sweeps over the coupling ``a`` (bifurcation data).

Each ``a`` is solved from scratch with :func:`find_equilibrium`, so records
do not depend on sweep order and can be computed in parallel.  Set
``VARIGAME_THREADS`` to cap the number of worker processes (0 or unset
means one per CPU).
"""

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .double_oracle import find_equilibrium

__all__ = [
    "SweepRecord",
    "sweep_equilibria",
    "sweep_values",
    "detect_transitions",
    "refine_transitions",
    "write_csv",
    "write_json",
    "worker_count",
    "LOW_CONFIDENCE_A",
    "LOW_CONFIDENCE_DT",
]

log = logging.getLogger(__name__)

# the sin^3 game loses precision past a ~ 56 unless dt is small
LOW_CONFIDENCE_A = 56.0
LOW_CONFIDENCE_DT = 5e-5


@dataclass
class SweepRecord:
    a: float
    support_size: int
    endpoints: list
    probabilities: list
    converged: bool
    iterations: int = 0
    low_confidence: bool = False
    error: str = ""
    report: dict = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.endpoints) != self.support_size or len(self.probabilities) != self.support_size:
            raise ValueError("endpoints and probabilities must have support_size entries")
        if any(b <= a for a, b in zip(self.endpoints, self.endpoints[1:])):
            raise ValueError(f"endpoints must be strictly increasing: {self.endpoints}")


def worker_count():
    n = int(os.environ.get("VARIGAME_THREADS", "0") or 0)
    if n < 0:
        raise ValueError("VARIGAME_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def _low_confidence(cfg):
    return (cfg.kernel.name == "sin3" and cfg.a > LOW_CONFIDENCE_A
            and cfg.grid.dt > LOW_CONFIDENCE_DT)


def _solve_one(args):
    cfg, kw = args
    try:
        rep = find_equilibrium(cfg, **kw)
    except Exception as exc:  # a failed a-value must not end the sweep
        log.warning("a=%g failed: %s", cfg.a, exc)
        return SweepRecord(cfg.a, 0, [], [], False, low_confidence=_low_confidence(cfg),
                           error=f"{type(exc).__name__}: {exc}")
    ends, probs = rep.branch_endpoints
    return SweepRecord(
        a=cfg.a,
        support_size=rep.support_size,
        endpoints=ends,
        probabilities=probs,
        converged=rep.converged,
        iterations=rep.iterations,
        low_confidence=_low_confidence(cfg),
        report=rep.to_dict(),
    )


def sweep_values(a_values, cfg, workers=None, **kw):
    """One record per value in ``a_values``, sorted by ``a``.

    ``cfg`` is a template :class:`GameConfig`; extra keywords go to
    :func:`find_equilibrium`.
    """
    a_values = sorted({float(a) for a in a_values})
    if any(a < 0 for a in a_values):
        raise ValueError("a values must be non-negative")
    jobs = [(cfg.with_a(a), kw) for a in a_values]
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        records = [_solve_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            records = list(pool.map(_solve_one, jobs))
    bad = [r.a for r in records if not r.converged]
    if bad:
        log.warning("not converged at a = %s", ", ".join(f"{a:g}" for a in bad))
    return sorted(records, key=lambda r: r.a)


def sweep_equilibria(a_min, a_max, step, cfg, workers=None, **kw):
    """Sweep ``a = a_min, a_min + step, ...`` up to ``a_max`` inclusive."""
    if not 0 <= a_min <= a_max:
        raise ValueError("need 0 <= a_min <= a_max")
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((a_max - a_min) / step + 1e-9))
    values = [round(a_min + i * step, 12) for i in range(n + 1)]
    return sweep_values(values, cfg, workers=workers, **kw)


def detect_transitions(records):
    """``(a_low, a_high, old_size, new_size)`` wherever consecutive sizes differ.

    Records that did not converge are skipped.
    """
    ok = [r for r in records if r.converged]
    return [
        (r0.a, r1.a, r0.support_size, r1.support_size)
        for r0, r1 in zip(ok, ok[1:])
        if r0.support_size != r1.support_size
    ]


def refine_transitions(records, cfg, step, workers=None, **kw):
    """Re-sweep each transition interval at ``step / 10`` and merge the records."""
    extra = set()
    for lo, hi, _, _ in detect_transitions(records):
        extra.update(np.round(np.arange(lo, hi, step / 10)[1:], 12).tolist())
    extra -= {r.a for r in records}
    if not extra:
        return list(records)
    new = sweep_values(sorted(extra), cfg, workers=workers, **kw)
    return sorted(list(records) + new, key=lambda r: r.a)


def write_csv(records, path, config=None):
    """Plot-ready table; ragged rows are padded with empty fields.

    Two comment lines carry the schema version and the effective config.
    """
    k = max([r.support_size for r in records] + [1])
    header = (["a", "support_size"] + [f"endpoint_{i + 1}" for i in range(k)]
              + [f"prob_{i + 1}" for i in range(k)] + ["converged", "low_confidence"])
    with open(path, "w", newline="") as fh:
        fh.write("# schema_version: 1\n")
        if config is not None:
            fh.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for r in records:
            pad = [""] * (k - r.support_size)
            w.writerow(
                [repr(r.a), r.support_size]
                + [f"{e:.10g}" for e in r.endpoints] + pad
                + [f"{p:.10g}" for p in r.probabilities] + pad
                + [str(r.converged).lower(), str(r.low_confidence).lower()]
            )


def write_json(records, path, config=None):
    doc = {
        "schema_version": 1,
        "config": config,
        "transitions": detect_transitions(records),
        "records": [asdict(r) for r in records],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)

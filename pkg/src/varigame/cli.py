"""Command-line interface: ``varigame <subcommand> [flags]``.

Settings come from three layers: built-in defaults, an optional JSON file
given by ``--config``, and command-line flags, later layers winning.  Every
output carries the effective settings and a ``schema_version``.

Exit status: 0 success, 1 computational failure (no convergence, no roots,
failed lemma), 2 usage or configuration error.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .double_oracle import alternative_seeds, default_seeds, find_equilibrium
from .exceptions import ConfigurationError, VarigameError
from .grid import QUADRATURE_RULES, SampledFn, TimeGrid
from .kernel import BUILTIN_KERNELS
from .lemmas import run_all
from .matrix_game import cycle_solution, expected_payoffs, solve_symmetric_game
from .payoff import GameConfig, PayoffMatrix, payoff, payoff_matrix
from .series import TABLE1_A, recurrence, table1_row
from .shooting import (METHODS, MixtureTarget, N_SCAN, default_c_range, phase_portrait,
                       root_count, scan_roots)
from .sweep import detect_transitions, refine_transitions, sweep_equilibria, write_csv, write_json

__all__ = ["RunConfig", "load_config", "main", "run"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("varigame")


@dataclass
class RunConfig:
    a: float = 1.0
    kernel: str = "sin"
    dt: float = 1e-4
    quadrature: str = "trapezoid"
    method: str = "rk4"
    threshold: float = 1e-5
    c_min: float = None
    c_max: float = None
    n_scan: int = N_SCAN
    max_iter: int = 100
    out: str = "."
    seed: int = 42

    def validate(self):
        """All problems at once, as a list of messages."""
        errs = []
        if not _is_real(self.a) or self.a < 0:
            errs.append(f"a must be a finite real >= 0, got {self.a!r}")
        if self.kernel not in BUILTIN_KERNELS:
            errs.append(f"kernel must be one of {', '.join(BUILTIN_KERNELS)}, got {self.kernel!r}")
        if not _is_real(self.dt) or not 0 < self.dt <= 0.5:
            errs.append(f"dt must be in (0, 0.5], got {self.dt!r}")
        elif abs(1 / self.dt - round(1 / self.dt)) > 1e-6 * (1 / self.dt):
            errs.append(f"1/dt must be an integer, got dt={self.dt!r}")
        if self.quadrature not in QUADRATURE_RULES:
            errs.append(f"quadrature must be one of {', '.join(QUADRATURE_RULES)}, got {self.quadrature!r}")
        if self.method not in METHODS:
            errs.append(f"method must be one of {', '.join(METHODS)}, got {self.method!r}")
        if not _is_real(self.threshold) or self.threshold <= 0:
            errs.append(f"threshold must be positive, got {self.threshold!r}")
        for name in ("c_min", "c_max"):
            v = getattr(self, name)
            if v is not None and not _is_real(v):
                errs.append(f"{name} must be a finite real, got {v!r}")
        if (_is_real(self.c_min) and _is_real(self.c_max)) and self.c_min >= self.c_max:
            errs.append(f"c_min must be below c_max, got {self.c_min} >= {self.c_max}")
        if not _is_int(self.n_scan) or self.n_scan < 2:
            errs.append(f"n_scan must be an integer >= 2, got {self.n_scan!r}")
        if not _is_int(self.max_iter) or self.max_iter < 1:
            errs.append(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not isinstance(self.out, str) or not self.out:
            errs.append(f"out must be a directory path, got {self.out!r}")
        if not _is_int(self.seed):
            errs.append(f"seed must be an integer, got {self.seed!r}")
        return errs

    def game(self, a=None):
        return GameConfig(self.a if a is None else a, self.kernel, self.quadrature,
                          TimeGrid(round(1 / self.dt)))

    def c_range(self, a=None):
        lo, hi = default_c_range(self.a if a is None else a)
        return (lo if self.c_min is None else self.c_min,
                hi if self.c_max is None else self.c_max)


def _is_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


class ConfigError(Exception):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


_FIELDS = {f.name for f in fields(RunConfig)}


def load_config(path=None, overrides=None):
    """Merge defaults, the JSON file at ``path`` and ``overrides`` (a dict).

    Raises:
      ConfigError: listing every unknown key, bad type or bad value.
    """
    data = {}
    problems = []
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
            data = json.loads(text) if text.strip() else {}
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"cannot read config {path}: {exc}"]) from None
        if not isinstance(data, dict):
            raise ConfigError([f"config {path} must hold a JSON object"])
        data.pop("schema_version", None)
        problems += [f"unknown config key {k!r}" for k in sorted(set(data) - _FIELDS)]
        data = {k: v for k, v in data.items() if k in _FIELDS}
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = RunConfig(**data)
    problems += cfg.validate()
    if problems:
        raise ConfigError(problems)
    return cfg


def _echo(cfg, **extra):
    return dict({"schema_version": SCHEMA_VERSION, "config": asdict(cfg)}, **extra)


def _emit(doc):
    print(json.dumps(doc, indent=1, default=_json_default))


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _outdir(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _summary(msg):
    print(msg, file=sys.stderr)


# subcommands ---------------------------------------------------------------

def cmd_shoot(cfg, args):
    game = cfg.game()
    zero = MixtureTarget.pure(SampledFn.zero(game.grid))
    rng = cfg.c_range()
    roots = scan_roots(zero, game, rng, cfg.n_scan, cfg.method)
    _emit(_echo(cfg, c_range=list(rng), root_count=root_count(roots), roots=[
        {"c": r.terminal_value, "residual": r.residual, "tangent": r.tangent,
         "multiplicity": r.multiplicity}
        for r in roots
    ]))
    _summary(f"a={cfg.a:g}: {root_count(roots)} roots in c in [{rng[0]:.6g}, {rng[1]:.6g}]")
    return EXIT_OK


def cmd_phase(cfg, args):
    game = cfg.game()
    lo, hi = cfg.c_range()
    pp = phase_portrait(cfg.a, game.kernel, np.linspace(lo, hi, cfg.n_scan), game, cfg.method)
    path = os.path.join(_outdir(cfg), f"phase_a{cfg.a:g}.csv")
    pp.to_csv(path)
    with open(path + ".json", "w") as fh:
        json.dump(_echo(cfg, csv=os.path.basename(path)), fh, indent=1)
    _summary(f"a={cfg.a:g}: {pp.crossings()} crossings, {int(pp.diverged.sum())} diverged; wrote {path}")
    return EXIT_OK


def cmd_payoff(cfg, args):
    game = cfg.game()
    fns = [SampledFn.from_csv(p) for p in args.strategies]
    grid = fns[0].grid
    game = GameConfig(game.a, game.kernel, game.quadrature, grid)
    M = payoff_matrix(fns, game)
    doc = _echo(cfg, files=args.strategies, matrix=json.loads(M.to_json()))
    if len(fns) == 2:
        doc["S_fg"] = payoff(fns[0], fns[1], game)
        doc["S_gf"] = payoff(fns[1], fns[0], game)
    base = os.path.join(_outdir(cfg), "payoff_matrix")
    M.to_csv(base + ".csv")
    with open(base + ".json", "w") as fh:
        json.dump(doc, fh, indent=1)
    _emit(doc)
    _summary(f"{len(fns)}x{len(fns)} payoff matrix written to {base}.csv")
    return EXIT_OK


def cmd_lp(cfg, args):
    M = PayoffMatrix.from_csv(args.matrix)
    E = M.entries
    asym = float(np.abs(E + E.T).max())
    if asym > 1e-9 * max(1.0, float(np.abs(E).max())):
        log.warning("matrix is not antisymmetric (max |M + M^T| = %.3g); symmetrizing", asym)
        M = PayoffMatrix.from_array(0.5 * (E - E.T))
    p = solve_symmetric_game(M)
    doc = _echo(cfg, matrix=args.matrix, probabilities=p.tolist(),
                expected_payoffs=expected_payoffs(M, p).tolist())
    if len(p) == 3 and len(p.support()) == 3:
        try:
            doc["cycle_probabilities"] = cycle_solution(M).tolist()
        except ValueError:
            pass
    _emit(doc)
    _summary("probabilities " + ", ".join(f"{x:.6f}" for x in p))
    return EXIT_OK


def cmd_equilibrium(cfg, args):
    game = cfg.game()
    seeds = alternative_seeds(game) if args.alt_seeds else default_seeds(game)
    rep = find_equilibrium(game, seeds, cfg.threshold, cfg.max_iter,
                           c_range=cfg.c_range(), n_scan=cfg.n_scan, method=cfg.method)
    out = _outdir(cfg)
    doc = _echo(cfg, seeds="alternative" if args.alt_seeds else "default", report=rep.to_dict())
    files = []
    for i, f in enumerate(rep.support):
        name = f"equilibrium_a{cfg.a:g}_f{i + 1}.csv"
        f.to_csv(os.path.join(out, name))
        files.append(name)
    doc["support_files"] = files
    path = os.path.join(out, f"equilibrium_a{cfg.a:g}.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, default=_json_default)
    _emit(doc)
    ends = ", ".join(f"{e:.4f}" for e in rep.branch_endpoints[0])
    _summary(f"a={cfg.a:g}: converged={rep.converged} after {rep.iterations} iterations, "
             f"support size {rep.support_size} (f(1) = {ends}); wrote {path}")
    return EXIT_OK if rep.converged else EXIT_FAIL


def cmd_sweep(cfg, args):
    if args.a_min is None or args.a_max is None:
        raise ConfigError(["sweep needs --a-min and --a-max"])
    if not 0 <= args.a_min <= args.a_max or args.step <= 0:
        raise ConfigError(["sweep needs 0 <= a_min <= a_max and step > 0"])
    game = cfg.game()
    kw = dict(threshold=cfg.threshold, max_iter=cfg.max_iter, n_scan=cfg.n_scan,
              method=cfg.method)
    if cfg.c_min is not None or cfg.c_max is not None:
        kw["c_range"] = cfg.c_range()
    recs = sweep_equilibria(args.a_min, args.a_max, args.step, game, **kw)
    if args.refine:
        recs = refine_transitions(recs, game, args.step, **kw)
    echo = dict(asdict(cfg), a_min=args.a_min, a_max=args.a_max, step=args.step,
                refine=args.refine)
    out = _outdir(cfg)
    base = os.path.join(out, f"sweep_{cfg.kernel}")
    write_csv(recs, base + ".csv", echo)
    write_json(recs, base + ".json", echo)
    trans = detect_transitions(recs)
    bad = [r.a for r in recs if not r.converged]
    _emit({"schema_version": SCHEMA_VERSION, "config": echo, "transitions": trans,
           "not_converged": bad, "csv": base + ".csv"})
    _summary(f"{len(recs)} records, {len(trans)} transitions, {len(bad)} not converged; "
             f"wrote {base}.csv")
    return EXIT_OK if not bad else EXIT_FAIL


def cmd_taylor(cfg, args):
    if args.table:
        w = csv.writer(sys.stdout, lineterminator="\n")
        print(f"# schema_version: {SCHEMA_VERSION}; terms: {args.terms}")
        w.writerow(["a", "k", "series_f2", "ode_f2", "percent_difference", "shooting_f2"])
        for a in TABLE1_A:
            r = table1_row(a, args.terms, shooting=True, cfg=cfg.game())
            w.writerow([a, f"{r.k:.6f}", f"{r.series_f2:.6f}", f"{r.ode_f2:.6f}",
                        f"{r.percent_difference:.4f}", f"{r.shooting_f2:.6f}"])
        return EXIT_OK
    r = table1_row(cfg.a, args.terms, shooting=True, cfg=cfg.game())
    coeffs = recurrence(cfg.a, r.k, args.terms).coeffs
    _emit(_echo(cfg, terms=args.terms, coefficients=coeffs.tolist(), row=r.as_dict()))
    _summary(f"a={cfg.a:g}: k={r.k:.6f}, percent difference {r.percent_difference:.4f}")
    return EXIT_OK


def cmd_lemma_check(cfg, args):
    verdicts = run_all(cfg.seed)
    ok = all(v.passed for v in verdicts)
    _emit(_echo(cfg, passed=ok, verdicts=[v.as_dict() for v in verdicts]))
    _summary(("all lemma checks passed" if ok else "lemma check FAILED: "
              + ", ".join(v.name for v in verdicts if not v.passed)))
    return EXIT_OK if ok else EXIT_FAIL


# parser ----------------------------------------------------------------------

def _common(p):
    g = p.add_argument_group("settings (override --config)")
    g.add_argument("--config", help="JSON file with settings")
    g.add_argument("--a", type=float, help="coupling strength")
    g.add_argument("--kernel", choices=BUILTIN_KERNELS)
    g.add_argument("--dt", type=float, help="time step (default 1e-4)")
    g.add_argument("--quadrature", choices=QUADRATURE_RULES)
    g.add_argument("--method", choices=tuple(METHODS))
    g.add_argument("--threshold", type=float, help="improvement threshold (default 1e-5)")
    g.add_argument("--c-min", dest="c_min", type=float)
    g.add_argument("--c-max", dest="c_max", type=float)
    g.add_argument("--n-scan", dest="n_scan", type=int)
    g.add_argument("--max-iter", dest="max_iter", type=int)
    g.add_argument("--out", help="output directory (default .)")
    g.add_argument("--seed", type=int, help="RNG seed for lemma checks")
    g.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varigame",
        description="Best responses and mixed equilibria of the variational game "
                    "S(f,g) = int f'^2 - g'^2 - a phi(f - g) dt.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    add("shoot", cmd_shoot, "list best responses to g = 0 by shooting")
    add("phase", cmd_phase, "write startpoints (f(0), f'(0)) over a grid of f(1) values")
    p = add("payoff", cmd_payoff, "payoff matrix over strategies stored as CSV (t,f[,fprime])")
    p.add_argument("strategies", nargs="+", help="strategy CSV files")
    p = add("lp", cmd_lp, "solve a symmetric zero-sum matrix game from a CSV matrix")
    p.add_argument("--matrix", required=True, help="square headerless CSV")
    p = add("equilibrium", cmd_equilibrium, "mixed equilibrium by the double oracle loop")
    p.add_argument("--alt-seeds", action="store_true",
                   help="seed with c t (2 - t), c in {+-1, +-2, +-3}")
    p = add("sweep", cmd_sweep, "equilibria over a range of a values")
    p.add_argument("--a-min", dest="a_min", type=float)
    p.add_argument("--a-max", dest="a_max", type=float)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--refine", action="store_true", help="re-sweep transitions at step/10")
    p = add("taylor", cmd_taylor, "power-series approximation of the best response to g = 0")
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--table", action="store_true", help="all six reference rows as CSV")
    add("lemma-check", cmd_lemma_check, "numeric checks of the inequalities behind the small-a bound")
    return parser


def run(argv=None):
    """Parse ``argv``, run the subcommand and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, k, None) for k in _FIELDS}
    try:
        cfg = load_config(args.config, overrides)
        return args.func(cfg, args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        for msg in exc.problems:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VarigameError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        for note in getattr(exc, "__notes__", []):
            print(f"  {note}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

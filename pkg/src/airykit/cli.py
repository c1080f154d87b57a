"""Command line entry point: `airykit {tw-table,endpoint,persistence,validate}`.

Exit codes: 0 success, 1 failed check / route discrepancy / bad fit,
2 usage error, 3 grid coverage failure, 4 output could not be written.
"""
import argparse
from dataclasses import asdict, dataclass, fields
import json
import logging
import math
import os
import sys
import tempfile

import numpy as np

log = logging.getLogger("airykit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COVERAGE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


DEFAULTS = {
    "tw-table": dict(grid_min=-6.0, grid_max=4.0, grid_step=0.1, out="tw_table.csv"),
    "endpoint": dict(grid_min=-3.5, grid_max=3.5, grid_step=0.1,
                     m_min=-6.0, m_max=6.0, m_step=0.12, out="endpoint.csv"),
    "persistence": dict(grid_min=1.0, grid_max=2.5, grid_step=0.5, out="persistence.csv"),
    "validate": dict(out="validate.json", format="json"),
}


@dataclass
class RunConfig:
    command: str
    grid_min: float = None
    grid_max: float = None
    grid_step: float = None
    m_min: float = None
    m_max: float = None
    m_step: float = None
    level: float = None
    order: int = None
    mesh: int = 65
    seed: int = 0
    out: str = None
    format: str = "csv"

    def validate(self):
        if self.order is not None and self.order < 8:
            raise UsageError("--order must be at least 8")
        if self.mesh < 3:
            raise UsageError("--mesh must be at least 3")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.command != "validate":
            self.grid()
        return self

    def grid(self):
        return make_grid(self.grid_min, self.grid_max, self.grid_step, "grid")

    def m_grid(self):
        return make_grid(self.m_min, self.m_max, self.m_step, "m grid")


def make_grid(lo, hi, step, name="grid"):
    if lo is None or hi is None or step is None:
        raise UsageError("%s needs min, max and step" % name)
    if not (step > 0) or hi < lo or not all(map(math.isfinite, (lo, hi, step))):
        raise UsageError("%s [%g, %g] step %g is empty" % (name, lo, hi, step))
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def resolve_config(command, flags, config_path=None):
    """CLI flags > JSON config file > command defaults."""
    merged = {"command": command}
    merged.update(DEFAULTS.get(command, {}))
    if config_path:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as e:
            raise UsageError("cannot read config %s: %s" % (config_path, e))
        known = {f.name for f in fields(RunConfig)}
        extra = set(data) - known
        if extra:
            raise UsageError("unknown config keys: %s" % ", ".join(sorted(extra)))
        merged.update({k: v for k, v in data.items() if k != "command"})
    merged.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig(**merged).validate()


# ----------------------------------------------------------------------------
# output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def _header(cfg, extra=None):
    items = asdict(cfg)
    items.update(extra or {})
    return ["# %s=%s" % (k, items[k]) for k in sorted(items)]


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path, cfg, columns, rows, extra=None):
    if cfg.format == "json":
        doc = {"config": dict(sorted({**asdict(cfg), **(extra or {})}.items())),
               "columns": list(columns),
               "rows": [[float(v) if not isinstance(v, (int, np.integer)) else int(v) for v in r]
                        for r in rows]}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = _header(cfg, extra) + [",".join(columns)]
        lines += [",".join(_fmt(v) for v in r) for r in rows]
        text = "\n".join(lines) + "\n"
    atomic_write(path, text)


def sibling(path, tag):
    root, ext = os.path.splitext(path)
    return root + tag + (ext or ".csv")


def stats_path(path):
    return os.path.splitext(path)[0] + ".stats.json"


def write_json(path, doc):
    atomic_write(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")


# ----------------------------------------------------------------------------
# commands

def cmd_tw_table(cfg):
    from .distributions import f_gue, f_goe
    from .painleve import default_solution, f_goe_painleve, f_gue_painleve
    s = cfg.grid()
    if s[0] < -10 or s[-1] > 8:
        raise UsageError("tw-table grid must lie inside [-10, 8]")
    soln = default_solution()
    rows, worst = [], 0.0
    for x in s:
        x = float(x)
        a, b = f_gue(x, cfg.order), f_goe(x, cfg.order)
        c, d = f_gue_painleve(x, soln), f_goe_painleve(x, soln)
        disc = max(abs(a - c), abs(b - d))
        worst = max(worst, disc)
        rows.append((x, a, b, c, d, disc))
    write_table(cfg.out, cfg, ["s", "F_GUE", "F_GOE", "F_GUE_painleve", "F_GOE_painleve",
                               "max_route_discrepancy"], rows)
    if worst > 1e-5:
        bad = [r[0] for r in rows if r[5] > 1e-5]
        print("route discrepancy %.3e exceeds 1e-5 at s = %s" % (worst, bad), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_endpoint(cfg):
    from .distributions import CoverageError, endpoint_marginals
    t, m = cfg.grid(), cfg.m_grid()
    if t[0] > -3.5 + 1e-12 or t[-1] < 3.5 - 1e-12:
        raise CoverageError("t grid [%g, %g] does not cover [-3.5, 3.5]" % (t[0], t[-1]))
    if m[0] > -6 + 1e-12 or m[-1] < 4 - 1e-12:
        raise CoverageError("m grid [%g, %g] does not cover [-6, 4]" % (m[0], m[-1]))
    kw = {} if cfg.order is None else {"order": cfg.order}
    g = endpoint_marginals(t, m, **kw)
    joint = [(ti, mj, g.f_values[i, j]) for i, ti in enumerate(t) for j, mj in enumerate(m)]
    write_table(sibling(cfg.out, "_joint"), cfg, ["t", "m", "f"], joint)
    write_table(cfg.out, cfg, ["t", "f_end"], list(zip(t, g.marginal_t)))
    write_json(stats_path(cfg.out), {k: g.stats[k] for k in ("mass", "variance", "excess_kurtosis")}
               | {"mean": g.stats["mean"], "symmetry": g.stats["symmetry"]})
    return EXIT_OK


def cmd_persistence(cfg):
    from .distributions import goe_mean, persistence_rate
    Ls = cfg.grid()
    if len(Ls) < 3 or Ls[0] <= 0:
        raise UsageError("persistence needs at least 3 positive L values")
    m = goe_mean() / 2 if cfg.level is None else cfg.level
    fit = persistence_rate(m, tuple(Ls))
    rows = [(L, math.exp(lp), lp) for L, lp in zip(Ls, fit.log_p)]
    extra = {"level_used": repr(m)}
    write_table(cfg.out, cfg, ["L", "P", "log_P"], rows, extra)
    write_json(stats_path(cfg.out), {"kappa": fit.kappa, "intercept": fit.intercept,
                                     "residual": fit.residual, "level": m})
    if fit.residual > 0.02:
        print("persistence fit residual %.3e exceeds 0.02" % fit.residual, file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _check(name, routes, values, tol):
    values = [float(v) for v in values]
    disc = abs(values[0] - values[1])
    return {"check": name, "routes": list(routes), "values": values,
            "discrepancy": disc, "tolerance": tol, "pass": bool(disc <= tol)}


def validation_checks(order=None, mesh=65):
    """Every dual-route and oracle comparison, as (name, thunk) pairs."""
    from . import distributions as D, painleve as P, simulate as S
    from .kernels import BarrierFunction

    def tw(kind, s):
        def run():
            if kind == "gue":
                return _check("tw_gue(s=%g)" % s, ["fredholm", "painleve"],
                              [D.f_gue(s, order), P.f_gue_painleve(s)], 1e-6)
            return _check("tw_goe(s=%g)" % s, ["fredholm", "painleve"],
                          [D.f_goe(s, order), P.f_goe_painleve(s)], 1e-6)
        return run

    def goe_forms(s):
        return lambda: _check("goe_forms(s=%g)" % s, ["P_sB_0P_s", "P_0B_2sP_0"],
                              D.goe_form_pair(s, order), 1e-10)

    def johansson(m):
        return lambda: _check("johansson(m=%g)" % m, ["finite_L(L=3)", "F_GOE(4^(1/3) m)"],
                              [D.airy2_sup_parabola(m, 3.0, order=order), D.f_goe(D.CBRT4 * m, order)],
                              1e-3)

    def convergence(kind, s):
        fn = D.f_gue if kind == "gue" else D.f_goe
        o = order or D._default_order(s)
        return lambda: _check("convergence_%s(s=%g)" % (kind, s), ["order %d" % o, "order %d" % (2 * o)],
                              [fn(s, o), fn(s, 2 * o)], 1e-8)

    def fdd(proc, gap, x):
        fn = D.airy2_fdd if proc == "airy2" else D.airy1_fdd
        p = ((0.0, gap), (x, x))
        tol = 1e-5 if proc == "airy2" else 1e-4
        return lambda: _check("fdd_%s(gap=%g,x=%g)" % (proc, gap, x),
                              ["extended_kernel", "boundary_value"],
                              [fn(p, "extended_kernel", order), fn(p, "boundary_value", order)], tol)

    def marginal(proc, m):
        if proc == "airy2":
            return lambda: _check("marginal_airy2(m=%g)" % m, ["airy2_fdd", "F_GUE(m)"],
                                  [D.airy2_fdd(((0.0,), (m,)), order=order), D.f_gue(m, order)], 1e-8)
        return lambda: _check("marginal_airy1(m=%g)" % m, ["airy1_fdd", "F_GOE(2m)"],
                              [D.airy1_fdd(((0.0,), (m,)), order=order), D.f_goe(2 * m, order)], 1e-6)

    def endpoint():
        return _check("endpoint_routes(t=0.3,m=0)", ["resolvent", "determinant_difference"],
                      [D.endpoint_joint_density(0.3, 0.0, "resolvent"),
                       D.endpoint_joint_density(0.3, 0.0, "determinant_difference")], 1e-6)

    def crossover():
        return _check("crossover(alpha=4,m=0)", ["G_4(0)", "F_GOE(0)"],
                      [D.g_2to1(4.0, 0.0, order), D.f_goe(0.0, order)], 5e-3)

    def mesh_route():
        g = BarrierFunction.parabola(0.0, -1.0, 1.0)
        v, _ = D.continuum_barrier_prob("airy2", g, n_mesh=mesh)
        return _check("mesh_route(parabola,L=1,m=0)", ["mesh(n=%d)" % mesh, "explicit_kernel"],
                      [v, D.parabola_barrier_prob(0.0, -1.0, 1.0)], 1e-3)

    def eynard_mehta():
        import itertools
        d = S.toy_dpp()
        K = S.eynard_mehta_kernel(d)
        mu = S.enumerate_dpp_measure(d)
        worst, pair = 0.0, (1.0, 1.0)
        for lv in itertools.product(range(4), range(4)):
            a, b = S.gap_probability_kernel(d, K, lv), S.gap_probability_enumerated(mu, lv)
            if abs(a - b) >= worst:
                worst, pair = abs(a - b), (a, b)
        return _check("eynard_mehta_gaps(toy)", ["kernel", "enumeration"], pair, 1e-12)

    checks = [("tw_gue_%g" % s, tw("gue", s)) for s in (-2.0, 0.0, 2.0)]
    checks += [("tw_goe_%g" % s, tw("goe", s)) for s in (-2.0, 0.0, 2.0)]
    checks += [("goe_forms_%g" % s, goe_forms(s)) for s in (-1.0, 0.0, 1.0)]
    checks += [("johansson_%g" % m, johansson(m)) for m in (-1.0, 0.0, 1.0)]
    checks += [("convergence_gue", convergence("gue", -2.0)), ("convergence_goe", convergence("goe", -2.0))]
    checks += [("marginal_airy2", marginal("airy2", 0.0)), ("marginal_airy1", marginal("airy1", 0.0))]
    checks += [("fdd_airy2", fdd("airy2", 0.5, 0.0)), ("fdd_airy1", fdd("airy1", 0.5, 0.0))]
    checks += [("endpoint", endpoint), ("crossover", crossover), ("eynard_mehta", eynard_mehta),
               ("mesh_route", mesh_route)]
    return checks


def cmd_validate(cfg):
    report = []
    for name, run in validation_checks(cfg.order, cfg.mesh):
        try:
            rec = run()
        except Exception as e:  # a crashing route is a failed check, not a crash of the run
            rec = {"check": name, "routes": [], "values": [], "discrepancy": None,
                   "tolerance": None, "pass": False, "error": "%s: %s" % (type(e).__name__, e)}
        log.info("%s %s", "PASS" if rec["pass"] else "FAIL", rec["check"])
        report.append(rec)
    failed = [r["check"] for r in report if not r["pass"]]
    doc = {"config": asdict(cfg), "checks": report, "all_pass": not failed}
    write_json(cfg.out, doc)
    if failed:
        print("failed checks: %s" % ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {"tw-table": cmd_tw_table, "endpoint": cmd_endpoint,
            "persistence": cmd_persistence, "validate": cmd_validate}


def build_parser():
    p = argparse.ArgumentParser(prog="airykit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--grid-min", type=float)
        sp.add_argument("--grid-max", type=float)
        sp.add_argument("--grid-step", type=float)
        sp.add_argument("--order", type=int)
        sp.add_argument("--mesh", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--config")
        if name == "endpoint":
            sp.add_argument("--m-min", type=float)
            sp.add_argument("--m-max", type=float)
            sp.add_argument("--m-step", type=float)
        if name == "persistence":
            sp.add_argument("--level", type=float, help="barrier level (default: half the F_GOE mean)")
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    from .distributions import CoverageError
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        cfg = resolve_config(args.command, flags, args.config)
        return COMMANDS[args.command](cfg)
    except UsageError as e:
        print("airykit: usage error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except CoverageError as e:
        print("airykit: coverage check failed: %s" % e, file=sys.stderr)
        return EXIT_COVERAGE
    except OSError as e:
        print("airykit: cannot write output: %s" % e, file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

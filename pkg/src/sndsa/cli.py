"""Command line front end.

Subcommands: run a single solve, scan a grid of regimes and preconditioners,
verify the analytical claims with the oracle suite, and dump assembled
operators in Matrix Market form. Problems are described by flat key=value
config files; the `paper-1d` preset bakes in the thick-diffusive benchmark
(100 elements on [0, 2], degree 6, S4, scaled opacities sigma_t = sigma_a = 1,
source eps*(2*sin(3*x^2)^2 + cos(x/3)^2), zero inflow). All numeric output is
printed with full precision so runs are byte-for-byte reproducible.
"""

import argparse
import os
import sys as _sys

import numpy as np

from .dg import DGSpace, write_matrix_market
from .dsa import build_operators, make_preconditioner
from .errors import FactorizationError, InvalidCoefficientError
from .mesh import adversarial_ordering, uniform_mesh, upwind_ordering
from .oracles import OracleReport, run_suite
from .quadrature import gauss_legendre_set
from .system import build_system, solve_direct, source_iteration


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "domain_a": "0.0",
    "domain_b": "1.0",
    "n_elements": "16",
    "degree": "1",
    "n_angles": "4",
    "eps": "1e-2",
    "sigma_t": "1.0",
    "sigma_a": "1.0",
    "source": "1.0",
    "inflow": "0.0",
    "precond": "none",
    "inner_sweeps": "0",
    "update_flux_each_sweep": "false",
    "ordering": "upwind",
    "ordering_fraction": "0.5",
    "ordering_seed": "0",
    "max_iters": "40",
    "tol": "1e-12",
    "error_metric": "previous",
    "mip_c_penalty": "4.0",
    "eps_list": "1e-1,1e-2,1e-3",
}

PRESETS = {
    "paper-1d": {
        "domain_a": "0.0",
        "domain_b": "2.0",
        "n_elements": "100",
        "degree": "6",
        "n_angles": "4",
        "eps": "1e-4",
        "sigma_t": "1.0",
        "sigma_a": "1.0",
        "source": "eps*(2*sin(3*x**2)**2 + cos(x/3)**2)",
        "inflow": "0.0",
        "precond": "ip",
        "error_metric": "reference",
        "eps_list": "1e-4,1e-3,1e-2,1e-1,0.5,0.75",
    },
}

_PRECONDS = ("none", "sip", "ip", "mip", "additive")

# functions and constants usable in config expressions
_EXPR_NS = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "arcsin", "arccos", "arctan", "sinh", "cosh",
    "tanh", "exp", "log", "log10", "sqrt", "abs", "sign", "minimum",
    "maximum", "where", "pi", "e")}


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    cfg = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key=value, got %r"
                              % (lineno, raw.strip()))
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError("line %d: unknown config key %r" % (lineno, key))
        cfg[key] = value.strip()
    return cfg


def resolve_config(preset=None, config_path=None, overrides=()) -> dict:
    """Layer defaults, preset, config file, then key=value overrides."""
    cfg = dict(_DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("unknown preset %r (have: %s)"
                              % (preset, ", ".join(sorted(PRESETS))))
        cfg.update(PRESETS[preset])
    if config_path is not None:
        try:
            with open(config_path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cannot read config file: %s" % exc)
        cfg.update(parse_config_text(text))
    for item in overrides:
        if "=" not in item:
            raise ConfigError("override %r is not of the form key=value" % item)
        key, value = item.split("=", 1)
        if key not in _DEFAULTS:
            raise ConfigError("unknown config key %r" % key)
        cfg[key] = value
    return cfg


def _expression(source: str, allowed: tuple):
    try:
        code = compile(source, "<config>", "eval")
    except SyntaxError as exc:
        raise ConfigError("bad expression %r: %s" % (source, exc))
    for name in code.co_names:
        if name not in _EXPR_NS and name not in allowed:
            raise ConfigError("expression %r uses unknown name %r"
                              % (source, name))
    def evaluate(**kw):
        ns = dict(_EXPR_NS)
        ns.update(kw)
        return eval(code, {"__builtins__": {}}, ns)
    return evaluate


def _float(cfg, key):
    try:
        return float(cfg[key])
    except ValueError:
        raise ConfigError("config key %s: %r is not a number" % (key, cfg[key]))


def _int(cfg, key):
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError("config key %s: %r is not an integer"
                          % (key, cfg[key]))


def _bool(cfg, key):
    val = cfg[key].strip().lower()
    if val in ("true", "1", "yes"):
        return True
    if val in ("false", "0", "no"):
        return False
    raise ConfigError("config key %s: %r is not a boolean" % (key, cfg[key]))


def build_from_config(cfg):
    """Assemble (system, ordering) from a resolved config dict."""
    a, b = _float(cfg, "domain_a"), _float(cfg, "domain_b")
    if not b > a:
        raise ConfigError("domain_b must exceed domain_a")
    n = _int(cfg, "n_elements")
    degree = _int(cfg, "degree")
    n_angles = _int(cfg, "n_angles")
    eps = _float(cfg, "eps")
    st = _expression(cfg["sigma_t"], ("x", "eps"))
    sa = _expression(cfg["sigma_a"], ("x", "eps"))
    qe = _expression(cfg["source"], ("x", "mu", "eps"))
    ie = _expression(cfg["inflow"], ("x", "mu", "eps"))
    try:
        space = DGSpace(uniform_mesh(a, b, n), degree)
        dirs = gauss_legendre_set(n_angles)
        system = build_system(
            space, dirs, eps,
            sigma_t=lambda x: st(x=x, eps=eps),
            sigma_a=lambda x: sa(x=x, eps=eps),
            source=lambda x, mu: qe(x=x, mu=mu, eps=eps),
            inflow=lambda x, mu: ie(x=x, mu=mu, eps=eps))
    except (InvalidCoefficientError, ValueError) as exc:
        raise ConfigError(str(exc))
    kind = cfg["ordering"].strip().lower()
    if kind == "upwind":
        ordering = upwind_ordering(space.mesh, dirs)
    elif kind == "adversarial":
        ordering = adversarial_ordering(space.mesh, dirs,
                                        _float(cfg, "ordering_fraction"),
                                        seed=_int(cfg, "ordering_seed"))
    else:
        raise ConfigError("ordering must be 'upwind' or 'adversarial', got %r"
                          % cfg["ordering"])
    return system, ordering


def diffusivity_eta(sys) -> float:
    """Worst-element diffusivity indicator min(eps/(h*st), eps*sqrt(sa/st))."""
    v = sys.space.mesh.vertices
    mid = 0.5 * (v[:-1] + v[1:])
    st = sys.sigma_t(mid)
    sa = sys.sigma_a(mid)
    h = sys.space.mesh.widths
    per_elem = np.minimum(sys.eps / (h * st), sys.eps * np.sqrt(sa / st))
    return float(per_elem.min())


def _solve(cfg, system, ordering, precond_kind):
    precond = make_preconditioner(system, precond_kind,
                                  c_penalty=_float(cfg, "mip_c_penalty"))
    reference = None
    metric = cfg["error_metric"].strip().lower()
    if metric == "reference":
        reference = solve_direct(system)
    elif metric != "previous":
        raise ConfigError("error_metric must be 'reference' or 'previous', "
                          "got %r" % cfg["error_metric"])
    psi, history = source_iteration(
        system, ordering, precond=precond,
        max_iters=_int(cfg, "max_iters"), tol=_float(cfg, "tol"),
        n_inner=_int(cfg, "inner_sweeps"),
        update_flux_each_sweep=_bool(cfg, "update_flux_each_sweep"),
        reference=reference)
    return psi, history


def _write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _config_dump(cfg) -> str:
    return "".join("%s = %s\n" % (k, cfg[k]) for k in sorted(cfg))


def run_experiment(cfg, out_dir=None) -> int:
    """Solve one configuration; returns 0 if converged, 2 otherwise."""
    system, ordering = build_from_config(cfg)
    kind = cfg["precond"].strip().lower()
    if kind not in _PRECONDS:
        raise ConfigError("precond must be one of %s, got %r"
                          % ("/".join(_PRECONDS), cfg["precond"]))
    print("unknowns: %d  (directions=%d, spatial dofs=%d)"
          % (system.dirs.n * system.n_dofs, system.dirs.n, system.n_dofs))
    print("eps: %.17g  eta_min: %.17g" % (system.eps, diffusivity_eta(system)))
    print("precond: %s  inner_sweeps: %s  ordering: %s  error_metric: %s"
          % (kind, cfg["inner_sweeps"], cfg["ordering"], cfg["error_metric"]))
    psi, history = _solve(cfg, system, ordering, kind)
    if history.diverged:
        status = "diverged"
    elif history.converged:
        status = "converged"
    else:
        status = "not converged"
    final = history.errors[-1] if history.errors else 0.0
    sweeps = history.cumulative_sweeps[-1] if history.cumulative_sweeps else 0
    print("%s: %d iterations, %d sweeps, final error %.16e"
          % (status, history.n_iterations, sweeps, final))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        history.write_csv(os.path.join(out_dir, "history.csv"))
        x = system.space.node_coords
        phi = system.scalar_flux(psi)
        rows = ["x,phi"]
        rows += ["%.16e,%.16e" % (xi, pi) for xi, pi in zip(x, phi)]
        _write_text(os.path.join(out_dir, "solution.csv"),
                    "\n".join(rows) + "\n")
        _write_text(os.path.join(out_dir, "config.txt"), _config_dump(cfg))
        print("wrote history.csv, solution.csv, config.txt to %s" % out_dir)
    return 0 if history.converged else 2


def run_scan(cfg, out_dir=None) -> int:
    """Solve on the eps grid for each listed preconditioner; always exits 0."""
    eps_values = [v for v in (s.strip() for s in cfg["eps_list"].split(","))
                  if v]
    kinds = [v for v in (s.strip().lower()
                         for s in cfg["precond"].split(",")) if v]
    for kind in kinds:
        if kind not in _PRECONDS:
            raise ConfigError("precond must be drawn from %s, got %r"
                              % ("/".join(_PRECONDS), kind))
    rows = ["eps,precond,converged,diverged,iterations,sweeps,final_error"]
    print("%-10s %-10s %-10s %5s %7s %s"
          % ("eps", "precond", "status", "iters", "sweeps", "final_error"))
    for eps_text in eps_values:
        sub = dict(cfg)
        sub["eps"] = eps_text
        system, ordering = build_from_config(sub)
        for kind in kinds:
            psi, history = _solve(sub, system, ordering, kind)
            if history.diverged:
                status = "DIVERGED"
            elif history.converged:
                status = "ok"
            else:
                status = "stalled"
            final = history.errors[-1] if history.errors else 0.0
            sweeps = (history.cumulative_sweeps[-1]
                      if history.cumulative_sweeps else 0)
            print("%-10s %-10s %-10s %5d %7d %.16e"
                  % (eps_text, kind, status, history.n_iterations, sweeps,
                     final))
            rows.append("%.16e,%s,%s,%s,%d,%d,%.16e"
                        % (float(eps_text), kind,
                           str(history.converged).lower(),
                           str(history.diverged).lower(),
                           history.n_iterations, sweeps, final))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_text(os.path.join(out_dir, "scan.csv"), "\n".join(rows) + "\n")
        _write_text(os.path.join(out_dir, "config.txt"), _config_dump(cfg))
        print("wrote scan.csv, config.txt to %s" % out_dir)
    return 0


def run_verify(out_dir=None, seed: int = 0) -> int:
    """Run the oracle suite; returns 0 only if every check passes."""
    reports = run_suite(seed=seed)
    for rep in reports:
        print(rep.summary())
    n_pass = sum(r.passed for r in reports)
    print("%d/%d checks passed" % (n_pass, len(reports)))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        lines = [OracleReport.CSV_HEADER] + [r.csv_row() for r in reports]
        _write_text(os.path.join(out_dir, "oracles.csv"),
                    "\n".join(lines) + "\n")
        print("wrote oracles.csv to %s" % out_dir)
    return 0 if n_pass == len(reports) else 1


def run_dump(cfg, out_dir) -> int:
    """Write assembled operators as Matrix Market files."""
    system, _ = build_from_config(cfg)
    os.makedirs(out_dir, exist_ok=True)
    matrices = {
        "M_t": system.M_t, "M_a": system.M_a, "G": system.G,
        "F0": system.F0, "F1": system.F1, "F1t": system.F1t,
    }
    for d in range(system.dirs.n):
        matrices["F_d%d" % d] = system.F[d]
        matrices["Ft_d%d" % d] = system.Ft[d]
    if system.eps > 0:
        ops = build_operators(system, c_penalty=_float(cfg, "mip_c_penalty"))
        matrices.update({"D0": ops.D0, "D1": ops.D1, "D_eps": ops.D_eps,
                         "D_ip": ops.D_ip, "B_sip_direct": ops.B_sip_direct,
                         "B_mip": ops.B_mip})
    for name, mat in sorted(matrices.items()):
        write_matrix_market(os.path.join(out_dir, name + ".mtx"), mat)
    _write_text(os.path.join(out_dir, "config.txt"), _config_dump(cfg))
    print("wrote %d matrices to %s" % (len(matrices), out_dir))
    return 0


def _add_config_args(parser, with_solver_flags: bool):
    parser.add_argument("--config", help="path to a key=value config file")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="start from a named built-in configuration")
    parser.add_argument("--out", help="directory for output files")
    parser.add_argument("overrides", nargs="*", metavar="key=value",
                        help="config overrides applied last")
    if with_solver_flags:
        parser.add_argument("--eps", help="override the scaling parameter")
        parser.add_argument("--precond",
                            help="override the preconditioner selection")
        parser.add_argument("--inner-sweeps", dest="inner_sweeps",
                            help="override the lagged inner sweep count")
        parser.add_argument("--ordering",
                            help="override the sweep ordering kind")


def _collect(args, with_solver_flags: bool):
    overrides = list(args.overrides)
    if with_solver_flags:
        for key in ("eps", "precond", "inner_sweeps", "ordering"):
            val = getattr(args, key)
            if val is not None:
                overrides.append("%s=%s" % (key, val))
    return resolve_config(args.preset, args.config, overrides)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sndsa",
        description="1D discrete-ordinates transport with DG elements and "
                    "DSA-preconditioned source iteration")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one configuration")
    _add_config_args(p_run, with_solver_flags=True)
    p_scan = sub.add_parser("scan",
                            help="solve over an eps grid and precond list")
    _add_config_args(p_scan, with_solver_flags=True)
    p_verify = sub.add_parser("verify", help="run the oracle suite")
    p_verify.add_argument("--out", help="directory for oracles.csv")
    p_verify.add_argument("--seed", type=int, default=0)
    p_dump = sub.add_parser("dump", help="write assembled operators")
    _add_config_args(p_dump, with_solver_flags=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args.out, seed=args.seed)
        cfg = _collect(args, with_solver_flags=True)
        if args.command == "run":
            return run_experiment(cfg, args.out)
        if args.command == "scan":
            return run_scan(cfg, args.out)
        if args.out is None:
            raise ConfigError("dump requires --out DIR")
        return run_dump(cfg, args.out)
    except (ConfigError, FactorizationError) as exc:
        print("error: %s" % exc, file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

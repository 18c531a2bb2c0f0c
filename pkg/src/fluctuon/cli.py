"""Command-line front end.

Every subcommand evaluates one model on a parameter sweep and writes CSV or
JSON. Parameters come from built-in defaults, then an optional JSON config,
then command-line flags. Exit codes: 0 success, 1 failed verification,
2 invalid configuration, 3 numerical failure.
"""

import argparse
import hashlib
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, exponents, ising, markov, meanfield
from . import tent as tm
from .convex import hoeffding_f, legendre_at, structure_data
from .grid import GridFunction
from .numerics import NumericalError, parallel_map


class ConfigError(ValueError):
    pass


# name -> (type, default, unit); None default means "required or derived"
PARAMS = {
    "markov": {"forward": (float, 0.7, "1"), "backward": (float, 0.2, "1"), "model": (str, None, "path"),
               "quantity": (str, "pressure", ""), "alpha": (float, 0.0, "1"), "s": (float, 0.0, "nat/step"),
               "alpha_points": (int, 2001, "")},
    "gas": {"beta": (float, 1.0, "1/energy"), "mu": (float, -1.8, "energy"), "volume": (int, None, "sites"),
            "quantity": (str, "pressure", ""), "alpha": (float, 0.0, "1"), "s": (float, 0.0, "nat/site")},
    "ising": {"beta": (float, 1.0, "1/energy"), "J": (float, 1.0, "energy"), "h": (float, 0.5, "energy"),
              "volume": (int, None, "spins"), "quantity": (str, "pressure", ""), "alpha": (float, 0.0, "1"),
              "s": (float, 0.0, "nat/spin")},
    "tent": {"p": (float, 0.7, "1"), "kappa": (float, 0.0, "1"), "periods": (str, "23", "steps"),
             "quantity": (str, "convergence", ""), "kappa_max": (float, 50.0, "1")},
    "square": {"p1": (float, 0.9, "1"), "p2": (float, 0.1, "1"), "kappa1": (float, None, "1"),
               "kappa2": (float, None, "1"), "t": (int, 19, "steps"), "quantity": (str, "pressure", ""),
               "alpha": (float, 0.0, "1"), "s": (float, 0.0, "nat/step"), "alpha_points": (int, 1201, "")},
    "exponents": {"forward": (float, 0.7, "1"), "backward": (float, 0.2, "1"), "model": (str, None, "path"),
                  "t_list": (str, "8,10,12", "steps"), "t": (int, 12, "steps"), "u_points": (int, 9, "")},
}

QUANTITIES = {
    "markov": ("pressure", "rate"),
    "gas": ("pressure", "rate"),
    "ising": ("pressure", "rate"),
    "tent": ("convergence", "consistency", "critical"),
    "square": ("pressure", "rate"),
}


def parse_sweep(text):
    """``axis:lo:hi:steps`` -> dict."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"sweep must be axis:lo:hi:steps, got {text!r}")
    try:
        lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError as exc:
        raise ConfigError(f"bad sweep {text!r}: {exc}") from None
    if steps < 2:
        raise ConfigError("sweep steps must be >= 2")
    return {"axis": parts[0], "lo": lo, "hi": hi, "steps": steps}


def _coerce(model, name, value):
    typ = PARAMS[model][name][0]
    if value is None:
        return None
    try:
        return typ(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {name!r} expects {typ.__name__}, got {value!r}") from None


def resolve_config(model, file_cfg, flag_params, flag_sweeps, fmt, seed):
    """Merge defaults, config file and flags into one normalized config dict."""
    if file_cfg.get("model", model) != model:
        raise ConfigError(f"config is for model {file_cfg['model']!r}, not {model!r}")
    params = {k: v[1] for k, v in PARAMS[model].items()}
    for src in (file_cfg.get("params", {}), flag_params):
        for k, v in src.items():
            if k not in PARAMS[model]:
                raise ConfigError(f"model {model!r} has no parameter {k!r}")
            if v is not None:
                params[k] = _coerce(model, k, v)
    sweeps = file_cfg.get("sweep", [])
    if isinstance(sweeps, (str, dict)):
        sweeps = [sweeps]
    sweeps = [parse_sweep(s) if isinstance(s, str) else dict(s) for s in sweeps]
    if flag_sweeps:
        sweeps = [parse_sweep(s) for s in flag_sweeps]
    for sw in sweeps:
        if set(sw) != {"axis", "lo", "hi", "steps"}:
            raise ConfigError(f"sweep entries need axis, lo, hi, steps: {sw}")
        if sw["axis"] not in PARAMS[model] or PARAMS[model][sw["axis"]][0] is str:
            raise ConfigError(f"model {model!r} cannot sweep {sw['axis']!r}")
        if int(sw["steps"]) < 2:
            raise ConfigError("sweep steps must be >= 2")
    if model in QUANTITIES and params["quantity"] not in QUANTITIES[model]:
        raise ConfigError(f"quantity must be one of {QUANTITIES[model]}")
    out_cfg = file_cfg.get("output", {})
    fmt = fmt or out_cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    seed = seed if seed is not None else int(file_cfg.get("seed", 0))
    return {"model": model, "params": params, "sweep": sweeps, "format": fmt, "seed": seed}


def config_hash(cfg):
    text = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def sweep_points(cfg):
    """Parameter dicts for the cartesian product of all sweep axes, in row-major order."""
    axes = [(s["axis"], np.linspace(s["lo"], s["hi"], int(s["steps"]))) for s in cfg["sweep"]]
    base = cfg["params"]
    if not axes:
        return [dict(base)]
    out = []
    for combo in itertools.product(*[vals for _, vals in axes]):
        d = dict(base)
        for (name, _), v in zip(axes, combo):
            d[name] = _coerce(cfg["model"], name, v) if PARAMS[cfg["model"]][name][0] is int else float(v)
        out.append(d)
    return out


def _int_list(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def _load_markov(params):
    if params.get("model"):
        try:
            return markov.MarkovModel.from_json(Path(params["model"]).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read model file: {exc}") from None
    return markov.biased_cycle(params["forward"], params["backward"])


# ---- model runners: each returns (columns, units, rows) ----

def run_markov(cfg, points):
    m = _load_markov(cfg["params"])
    if cfg["params"]["quantity"] == "pressure":
        rows = parallel_map(lambda d: (d["alpha"], markov.entropic_pressure(m, d["alpha"])), points)
        return ["alpha", "e_alpha"], ["1", "nat/step"], rows
    n = cfg["params"]["alpha_points"]
    pair = markov.as_pair(m)
    e = markov.pressure_grid(pair, -1.0, 2.0, n)
    e_hat = markov.pressure_grid(pair.swapped(), -1.0, 2.0, n)
    s = np.array([d["s"] for d in points])
    rows = list(zip(s.tolist(), legendre_at(e.reflect(), s).tolist(), legendre_at(e_hat, s).tolist()))
    return ["s", "I", "I_hat"], ["nat/step", "nat/step", "nat/step"], rows


def run_gas(cfg, points):
    def one(d):
        b, mu = d["beta"], d["mu"]
        if cfg["params"]["quantity"] == "pressure":
            if d["volume"]:
                e = meanfield.finite_volume_renyi(b, mu, d["volume"], d["alpha"]) / d["volume"]
            else:
                e = meanfield.entropic_pressure(b, mu, d["alpha"])
            return b, mu, d["alpha"], e
        return b, mu, d["s"], meanfield.rate_function(b, mu, d["s"])
    rows = parallel_map(one, points)
    if cfg["params"]["quantity"] == "pressure":
        return ["beta", "mu", "alpha", "e_alpha"], ["1/energy", "energy", "1", "nat/site"], rows
    return ["beta", "mu", "s", "I"], ["1/energy", "energy", "nat/site", "nat/site"], rows


def run_ising(cfg, points):
    q = cfg["params"]["quantity"]

    def one(d):
        b, J, h = d["beta"], d["J"], d["h"]
        if q == "pressure":
            if d["volume"]:
                e = ising.finite_volume_renyi(b, J, h, d["volume"], d["alpha"]) / d["volume"]
            else:
                e = ising.entropic_pressure(b, J, h, d["alpha"])
            return b, J, h, d["alpha"], e
        e = ising.pressure_grid(b, J, h, -2.0, 3.0, 2001)
        return b, J, h, d["s"], float(legendre_at(e.reflect(), d["s"])[0])
    rows = parallel_map(one, points)
    units = ["1/energy", "energy", "energy"]
    if q == "pressure":
        return ["beta", "J", "h", "alpha", "e_alpha"], units + ["1", "nat/spin"], rows
    return ["beta", "J", "h", "s", "I"], units + ["nat/spin", "nat/spin"], rows


def run_tent(cfg, points):
    prm = cfg["params"]
    q = prm["quantity"]
    periods = _int_list(prm["periods"])
    for t in periods:
        if not tm.is_prime(t) or t > tm.orbits.ORBIT_CAP:
            raise ConfigError(f"periods must be primes <= {tm.orbits.ORBIT_CAP}, got {t}")
    if q == "convergence":
        rows = []
        for t in periods:
            for d in points:
                rows.append((t, d["kappa"], tm.pressure_approx(tm.TentPotential(d["p"]), d["kappa"], t)))
        return ["t", "kappa", "p_t"], ["steps", "1", "nat/step"], rows
    t = periods[-1]
    if q == "consistency":
        def one(d):
            mm, mp = tm.pressure_brackets(d["p"], d["kappa"])
            return d["p"], d["kappa"], tm.pressure_approx(tm.TentPotential(d["p"]), d["kappa"], t), mm, mp
        rows = parallel_map(one, points)
        return ["p", "kappa", f"p{t}", "mu_minus", "mu_plus"], ["1", "1", "nat/step", "nat/step", "nat/step"], rows

    def crit(d):
        kc = tm.critical_coupling(tm.TentPotential(d["p"]), t, d["kappa_max"])
        if math.isinf(kc):
            print(f"p={d['p']}: no transition detected below kappa_max={d['kappa_max']}", file=sys.stderr)
        km, kp = tm.critical_brackets(d["p"])
        return d["p"], kc, km, kp
    rows = [crit(d) for d in points]
    return ["p", "kappa_c", "kappa_minus", "kappa_plus"], ["1", "1", "1", "1"], rows


def run_square(cfg, points):
    prm = cfg["params"]
    t = prm["t"]
    v1, v2 = tm.TentPotential(prm["p1"]), tm.TentPotential(prm["p2"])
    k1 = prm["kappa1"] if prm["kappa1"] is not None else tm.critical_coupling(v1, t)
    k2 = prm["kappa2"] if prm["kappa2"] is not None else tm.critical_coupling(v2, t)
    if prm["quantity"] == "pressure":
        a = np.array([d["alpha"] for d in points])
        e = tm.square_entropic_pressure(prm["p1"], prm["p2"], k1, k2, a, t)
        return ["alpha", "e"], ["1", "nat/step"], list(zip(a.tolist(), np.atleast_1d(e).tolist()))
    s = np.array([d["s"] for d in points])
    e = tm.square_pressure_grid(prm["p1"], prm["p2"], k1, k2, -1.0, 2.0, prm["alpha_points"], t)
    return ["s", "I"], ["nat/step", "nat/step"], list(zip(s.tolist(), legendre_at(e.reflect(), s).tolist()))


def run_exponents(cfg, points):
    prm = cfg["params"]
    m = _load_markov(prm)
    t_list = _int_list(prm["t_list"])
    rows = []
    for est in (exponents.stein_exponent(m, t_list), exponents.chernoff_exponent(m, t_list)):
        rows.extend(est.rows())
    e = markov.pressure_grid(m, -1.0, 2.0, 3001)
    sd = structure_data(e)
    u = np.linspace(0.1 * sd.s_star, 0.9 * sd.s1_lower, prm["u_points"])
    for uu, emp, target in exponents.hoeffding_curve(m, prm["t"], u):
        rows.append((prm["t"], f"hoeffding_u={uu:.17g}", emp, target))
    return ["t", "quantity", "value", "target"], ["steps", "", "nat/step", "nat/step"], rows


RUNNERS = {"markov": run_markov, "gas": run_gas, "ising": run_ising, "tent": run_tent,
           "square": run_square, "exponents": run_exponents}


# ---- output ----

def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def header_line(cfg, units):
    return f"# fluctuon {__version__} config={config_hash(cfg)} units: {','.join(units)}"


def render(cfg, columns, units, rows):
    if cfg["format"] == "csv":
        lines = [header_line(cfg, units), ",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    doc = {"fluctuon": __version__, "config": cfg, "config_hash": config_hash(cfg),
           "columns": columns, "units": units,
           "rows": [[v if isinstance(v, str) else (_fmt(v) if not math.isfinite(float(v)) else v)
                     for v in row] for row in rows]}
    return json.dumps(doc, indent=1, default=float) + "\n"


def emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---- figures ----

def _csv(path, columns, units, rows, cfg):
    Path(path).write_text(render(dict(cfg, format="csv"), columns, units, rows))


def emit_figures(outdir, t=23):
    """Write one CSV per figure panel into ``outdir``; returns the written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def save(name, columns, units, rows, cfg):
        path = out / name
        _csv(path, columns, units, rows, dict(cfg, figure=name))
        written.append(path)

    base = {"model": "figures", "t": t}
    kap = np.linspace(0.0, 3.0, 241)
    pot = tm.TentPotential(0.7)
    rows = [(tt, k, tm.pressure_approx(pot, k, tt)) for tt in (3, 5, 7, 11, 13) for k in kap]
    save("tent_convergence.csv", ["t", "kappa", "p_t"], ["steps", "1", "nat/step"], rows, base)

    rows = []
    for p in (0.2, 0.8):
        km, _ = tm.critical_brackets(p)
        for k in np.linspace(0.0, 0.9 * km, 31):
            mm, mp = tm.pressure_brackets(p, k) if k > 0 else (math.log(2), math.log(2))
            rows.append((p, k, tm.pressure_approx(tm.TentPotential(p), k, t), mm, mp))
    save("tent_consistency.csv", ["p", "kappa", f"p{t}", "mu_minus", "mu_plus"],
         ["1", "1", "nat/step", "nat/step", "nat/step"], rows, base)

    rows = []
    for p in np.round(np.arange(0.1, 0.91, 0.1), 10):
        km, kp = tm.critical_brackets(p)
        rows.append((p, tm.critical_coupling(tm.TentPotential(p), t), km, kp))
    save("tent_kappa_critical.csv", ["p", "kappa_c", "kappa_minus", "kappa_plus"], ["1"] * 4, rows, base)

    ts = min(t, 19)
    I, _, e = tm.square_rate(0.9, 0.1, t=ts)
    save("square_pressure.csv", ["alpha", "e"], ["1", "nat/step"], list(zip(e.x, e.values)), base)
    save("square_rate.csv", ["s", "I"], ["nat/step", "nat/step"], list(zip(I.x, I.values)), base)

    rows = []
    for b in (0.9, 1.8):
        for mu in (-2.0, -1.8, -1.6, -1.4):
            sh = np.linspace(-1.0, 1.0, 201)
            rows += [(b, mu, x, y) for x, y in zip(sh, meanfield.rate_function_shat(b, mu, sh))]
    save("meanfield_rate.csv", ["beta", "mu", "s_hat", "I"], ["1/energy", "energy", "1", "nat/site"], rows, base)

    rows = []
    for b in (0.8, 1.0, 1.2, 1.5, 1.8):
        for mu in np.linspace(-3.0, -1.0, 201):
            rows.append((b, mu, meanfield.rho(b, mu), meanfield.pressure(b, mu)))
    save("meanfield_pressure.csv", ["beta", "mu", "rho", "p"], ["1/energy", "energy", "1", "energy"], rows, base)

    rows = []
    for b in (0.8, 0.9, 1.0, 1.1, 1.2):
        e = GridFunction.sample(lambda a: np.array([meanfield.entropic_pressure(b, -1.9, x) for x in a]),
                                -1.0, 2.0, 1201)
        u = np.linspace(0.0, 0.3, 61)
        rows += [(b, uu, ff) for uu, ff in zip(u, hoeffding_f(e, u))]
    save("meanfield_hoeffding.csv", ["beta", "u", "f"], ["1/energy", "nat/site", "nat/site"], rows, base)
    return written


# ---- argument parsing ----

def _add_common(sp):
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--sweep", action="append", help="axis:lo:hi:steps (repeatable)")
    sp.add_argument("-o", "--output", help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--seed", type=int)


def build_parser():
    ap = argparse.ArgumentParser(prog="fluctuon", description="Entropic pressures, rates and fluctuation relations.")
    ap.add_argument("--version", action="version", version=f"fluctuon {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for model, table in PARAMS.items():
        sp = sub.add_parser(model)
        _add_common(sp)
        for name, (typ, _, _) in table.items():
            flag = "--" + name.replace("_", "-")
            sp.add_argument(flag, dest=name, default=None, type=str)
    vp = sub.add_parser("verify", help="run the invariant suites")
    vp.add_argument("--all", action="store_true")
    vp.add_argument("--suite", action="append")
    vp.add_argument("--seed", type=int, default=0)
    fp = sub.add_parser("figures", help="write figure-panel CSVs")
    fp.add_argument("--outdir", default="figures")
    fp.add_argument("--t", type=int, default=23)
    return ap


def _run_verify(args):
    from .verify import run_suites
    names = None if args.all or not args.suite else args.suite
    try:
        results = run_suites(names, seed=args.seed)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.suite}: {r.name} {r.detail} ({r.seconds:.2f}s)")
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "figures":
            for p in emit_figures(args.outdir, args.t):
                print(p)
            return 0
        file_cfg = {}
        if args.config:
            try:
                file_cfg = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot load config: {exc}") from None
        flags = {k: getattr(args, k) for k in PARAMS[args.command]}
        cfg = resolve_config(args.command, file_cfg, flags, args.sweep, args.format, args.seed)
        out_path = args.output or file_cfg.get("output", {}).get("path")
        columns, units, rows = RUNNERS[args.command](cfg, sweep_points(cfg))
        emit(render(cfg, columns, units, rows), out_path)
        return 0
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Batch command-line interface.

Every command expands its parameter grids into cells, evaluates the cells
(optionally on a process pool) and writes one CSV or JSON-lines table in grid
order.  A cell that fails numerically is written with NaN values and a reason;
the run carries on and exits with status 1.

Grid syntax: ``start:stop:step`` (endpoints included within half a step) or a
comma list.  Negative values need the ``--flag=value`` form.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

import numpy as np

from . import __version__
from .params import FockDarbouxError, ParameterError, QuantumNumbers, SystemParams, Tolerance

log = logging.getLogger(__name__)

WORKERS_ENV = "FOCKDARBOUX_WORKERS"
COMMANDS = ("spectrum", "degeneracy", "density", "momentum", "entropy", "uncertainty",
            "dispersion", "geometry", "omega-cut", "validate")


class UsageError(ParameterError):
    pass


# ---------------------------------------------------------------------------
# grid parsing


def parse_values(spec, kind=float) -> list:
    """'a:b:s' (inclusive), 'x,y,z', a single value, or a list of those."""
    if isinstance(spec, (list, tuple)):
        return [v for item in spec for v in parse_values(item, kind)]
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return [kind(spec)]
    text = str(spec).strip()
    if not text:
        raise UsageError("empty grid")
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise UsageError(f"range {part!r} must be start:stop:step")
            start, stop, step = (float(b) for b in bits)
            if not step > 0 or stop < start:
                raise UsageError(f"range {part!r} needs step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 0.5)) + 1
            vals = [float(f"{start + i * step:.15g}") for i in range(count)]
            out.extend(kind(v) if kind is not int else _as_int(v, part) for v in vals)
        elif kind is int:
            out.append(_as_int(float(part), part))
        else:
            out.append(kind(float(Fraction(part))))
    return out


def _as_int(v, text):
    if v != int(v):
        raise UsageError(f"{text!r} is not an integer grid")
    return int(v)


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def emit_table(rows, schema, fmt="csv", path=None, metadata=None) -> int:
    """Stream rows to ``path`` (stdout for None or '-'); returns the row count.

    CSV: '#' metadata lines, a header row, RFC-4180 quoting, CRLF line ends,
    floats with 17 significant digits.  JSON: one object per line, the first
    holding the metadata and schema.  Missing values are empty / null.
    """
    meta = dict(metadata or {})
    meta.setdefault("version", __version__)
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown format {fmt!r}")
    close = False
    if path in (None, "-"):
        fh = sys.stdout
    else:
        try:
            fh = open(path, "w", newline="", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        close = True
    count = 0
    try:
        if fmt == "csv":
            for key in sorted(meta):
                fh.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\r\n")
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(schema)
            for row in rows:
                w.writerow([_fmt(row.get(k)) for k in schema])
                count += 1
        else:
            fh.write(json.dumps({"metadata": meta, "schema": list(schema)}, sort_keys=True) + "\n")
            for row in rows:
                fh.write(json.dumps({k: _json_value(row.get(k)) for k in schema}) + "\n")
                count += 1
    except OSError as exc:
        raise OSError(f"error writing {path or 'stdout'}: {exc}") from exc
    finally:
        if close:
            fh.close()
        else:
            fh.flush()
    return count


def read_table(path_or_text, fmt="csv"):
    """Parse an emitted table back into (metadata, rows of strings / JSON values)."""
    text = path_or_text
    if "\n" not in text and os.path.exists(text):
        with open(text, newline="", encoding="utf-8") as fh:
            text = fh.read()
    if fmt == "json":
        lines = [json.loads(x) for x in text.splitlines() if x.strip()]
        return lines[0], lines[1:]
    meta, body = {}, []
    for line in io.StringIO(text, newline=""):
        if line.startswith("#"):
            key, _, val = line[2:].rstrip("\r\n").partition(": ")
            meta[key] = json.loads(val)
        else:
            body.append(line)
    reader = csv.DictReader(io.StringIO("".join(body), newline=""))
    return meta, list(reader)


# ---------------------------------------------------------------------------
# cell functions (module level so that they pickle)


def _tol(opts):
    return Tolerance(abs_tol=opts["abs_tol"], rel_tol=opts["rel_tol"])


def _state(cell):
    return QuantumNumbers(cell["n"], cell["m"]), SystemParams(cell["omega"], cell["omega_c"], cell["lambda"])


def _cell_spectrum(cell, opts):
    from .spectra import effective_frequency, fd_energy, fdd_energy

    qn, sp = _state(cell)
    wt = sp.omega_t
    if opts["system"] == "fd":
        return [{"omega_t": wt, "Omega": wt, "energy": fd_energy(qn, sp),
                 "nu": sp.omega_c / wt, "sigma": 0.0}]
    return [{"omega_t": wt, "Omega": effective_frequency(qn, sp), "energy": fdd_energy(qn, sp),
             "nu": sp.omega_c / wt, "sigma": sp.lam / wt}]


def _grid_x(opts):
    """(x, nu) pairs: the nu grid directly, or nu = omega_c/omega_t along an omega_c grid."""
    if opts.get("omega_c_axis"):
        om = opts["omega"][0]
        return [(wc, wc / math.hypot(om, wc)) for wc in opts["omega_c_axis"]]
    return [(nu, nu) for nu in opts["nu"]]


def _cell_degeneracy(cell, opts):
    from .spectra import (degeneracy_curve_epsilon, fd_crossings, fdd_crossings,
                          fdd_dimensionless_energy, states_up_to)

    states = states_up_to(opts["nmax"], opts["mmax"])
    sigma = opts["sigma"]
    xs = _grid_x(opts)
    q_ratios = [Fraction(q).limit_denominator(1000) for q in opts["q_ratios"]]
    rows = []
    for x, nu in xs:
        for qn in states:
            eps = (qn.c - qn.m * nu) if opts["system"] == "fd" else fdd_dimensionless_energy(qn, sigma, nu)
            rows.append({"kind": "level", "x": x, "nu": nu, "n": qn.n, "m": qn.m, "epsilon": eps})
    if opts["system"] == "fd":
        for nu, a, b in fd_crossings(states, set(q_ratios)):
            rows.append({"kind": "crossing", "nu": float(nu), "n": a.n, "m": a.m, "n2": b.n, "m2": b.m,
                         "q": str(nu), "epsilon": float(a.c - a.m * nu)})
    else:
        for nu, a, b, eps in fdd_crossings(states, sigma):
            rows.append({"kind": "crossing", "nu": nu, "n": a.n, "m": a.m, "n2": b.n, "m2": b.m,
                         "q": str(Fraction(a.c - b.c, a.m - b.m)), "epsilon": eps})
        if sigma > 0:
            for q in q_ratios:
                for x, nu in xs:
                    rows.append({"kind": "curve", "x": x, "nu": nu, "q": str(q),
                                 "epsilon": degeneracy_curve_epsilon(sigma, float(q), nu)})
    return rows


def _cell_density(cell, opts):
    from .states import fd_momentum_density, fdd_position_density

    qn, sp = _state(cell)
    xs = np.asarray(opts["x"], dtype=float)
    if opts["space"] == "position":
        vals = fdd_position_density(qn, sp, xs)
    elif sp.lam == 0:
        vals = fd_momentum_density(qn, sp, xs)
    else:
        from .momentum import hankel_values

        F, _ = hankel_values(qn, sp, xs, _tol(opts))
        vals = F * F / (2 * math.pi)
    return [{"x": float(x), "density": float(v)} for x, v in zip(xs, np.atleast_1d(vals))]


def _cell_momentum(cell, opts):
    from .dispersion import p2_fdd
    from .momentum import fdd_momentum_density_table

    qn, sp = _state(cell)
    grid = np.asarray(opts["p"], dtype=float) if opts.get("p") else None
    tab = fdd_momentum_density_table(qn, sp, grid, _tol(opts))
    if opts.get("table"):
        return [{"p": float(p), "psi_tilde": float(s), "gamma": float(g)}
                for p, s, g in zip(tab.p_grid, tab.psi_tilde_magnitude, tab.gamma)]
    p2_tab = tab.moment(2)
    p2 = p2_fdd(qn, sp, _tol(opts)).total
    return [{"p_max": float(tab.p_grid[-1]), "points": len(tab.p_grid),
             "norm_residual": tab.norm_residual, "p2_table": p2_tab, "p2_analytic": p2,
             "p2_rel_diff": abs(p2_tab - p2) / p2, "max_abs_error": tab.max_abs_error}]


def _cell_entropy(cell, opts):
    from .entropy import entropy_report

    qn, sp = _state(cell)
    tol = _tol(opts)
    alpha = cell["alpha"]
    rep = entropy_report(qn, sp, alpha, opts["space"], opts.get("shannon", False), tol)
    row = {"W": rep.entropic_moment, "renyi": rep.renyi, "tsallis": rep.tsallis,
           "shannon": rep.shannon if opts.get("shannon") else None, "method": rep.method}
    if opts.get("relative_to_ho"):
        ho = entropy_report(qn, SystemParams(sp.omega), alpha, opts["space"], False, tol)
        row["renyi_minus_ho"] = rep.renyi - ho.renyi
        row["tsallis_minus_ho"] = rep.tsallis - ho.tsallis
    return [row]


def _cell_uncertainty(cell, opts):
    from .entropy import (conjugate_alpha, momentum_moment, position_entropic_moment,
                          renyi_bound, renyi_from_moment, tsallis_from_moment)

    qn, sp = _state(cell)
    alpha = cell["alpha"]
    beta = conjugate_alpha(alpha)
    Wa, _ = position_entropic_moment(qn, sp, alpha)
    Wb, _ = momentum_moment(qn, sp, beta, _tol(opts))
    ra, rb = renyi_from_moment(Wa, alpha), renyi_from_moment(Wb, beta)
    xi_t = (alpha / math.pi * Wa) ** (1 / (2 * alpha)) - (beta / math.pi * Wb) ** (1 / (2 * beta))
    return [{"beta": beta, "renyi_position": ra, "renyi_momentum": rb,
             "tsallis_position": tsallis_from_moment(Wa, alpha),
             "tsallis_momentum": tsallis_from_moment(Wb, beta),
             "renyi_bound": renyi_bound(alpha), "xi_renyi": ra + rb - renyi_bound(alpha),
             "xi_tsallis": xi_t}]


def _cell_dispersion(cell, opts):
    from .dispersion import uncertainty_product

    qn, sp = _state(cell)
    rep = uncertainty_product(qn, sp, _tol(opts))
    return [{"r2": rep.r2, "p2": rep.p2, "p2_radial": rep.p2_radial, "p2_angular": rep.p2_angular,
             "product": rep.product, "bound": rep.bound}]


def _cell_geometry(cell, opts):
    from .geometry import (SurfaceParams, ambient_radius, comparison_heights, conformal_factor,
                           embedding_height, embedding_slope, scalar_curvature)

    sp = SurfaceParams(cell["lambda"])
    r = np.asarray(opts["x"], dtype=float)
    cols = {"conformal_factor": conformal_factor(r, sp), "curvature": scalar_curvature(r, sp),
            "ambient_radius": ambient_radius(r, sp), "height": embedding_height(r, sp),
            "slope": embedding_slope(r, sp)}
    cols["paraboloid"], cols["hyperboloid"], cols["cone"] = comparison_heights(r, sp)
    cols = {k: np.atleast_1d(v) for k, v in cols.items()}
    return [{"x": float(x), **{k: float(v[i]) for k, v in cols.items()}} for i, x in enumerate(r)]


def _cell_omega_cut(cell, opts):
    from .dispersion import omega_cut, p2_fdd, r2_fdd

    qn = QuantumNumbers(cell["n"], cell["m"])
    lam, om = cell["lambda"], cell["omega"]
    wc = omega_cut(qn, lam, om)
    sp = SystemParams(om, wc, lam)
    row = {"omega_cut": wc, "r2_residual": abs(r2_fdd(qn, sp) - qn.c / om)}
    if not opts.get("no_p2"):
        row["p2_difference"] = p2_fdd(qn, sp, _tol(opts)).total - om * qn.c
    return [row]


# ---------------------------------------------------------------------------
# command table


STATE_KEYS = ("n", "m", "omega", "omega_c", "lambda")

SCHEMAS = {
    "spectrum": (STATE_KEYS, ("omega_t", "Omega", "energy", "nu", "sigma")),
    "degeneracy": ((), ("kind", "x", "nu", "n", "m", "n2", "m2", "q", "epsilon")),
    "density": (STATE_KEYS, ("space", "x", "density")),
    "momentum": (STATE_KEYS, ("p_max", "points", "norm_residual", "p2_table", "p2_analytic",
                              "p2_rel_diff", "max_abs_error")),
    "momentum-table": (STATE_KEYS, ("p", "psi_tilde", "gamma")),
    "entropy": (STATE_KEYS + ("alpha",), ("space", "W", "renyi", "tsallis", "shannon", "method")),
    "uncertainty": (STATE_KEYS + ("alpha",), ("beta", "renyi_position", "renyi_momentum",
                                              "tsallis_position", "tsallis_momentum",
                                              "renyi_bound", "xi_renyi", "xi_tsallis")),
    "dispersion": (STATE_KEYS, ("r2", "p2", "p2_radial", "p2_angular", "product", "bound")),
    "geometry": (("lambda",), ("x", "conformal_factor", "curvature", "ambient_radius", "height",
                               "slope", "paraboloid", "hyperboloid", "cone")),
    "omega-cut": (("n", "m", "omega", "lambda"), ("omega_cut", "r2_residual", "p2_difference")),
}

CELL_FUNCS = {
    "spectrum": _cell_spectrum, "degeneracy": _cell_degeneracy, "density": _cell_density,
    "momentum": _cell_momentum, "entropy": _cell_entropy, "uncertainty": _cell_uncertainty,
    "dispersion": _cell_dispersion, "geometry": _cell_geometry, "omega-cut": _cell_omega_cut,
}


def _schema(command, opts):
    key = "momentum-table" if command == "momentum" and opts.get("table") else command
    params, values = SCHEMAS[key]
    values = list(values)
    if command == "entropy" and opts.get("relative_to_ho"):
        values += ["renyi_minus_ho", "tsallis_minus_ho"]
    if command in ("entropy", "spectrum", "dispersion", "density", "uncertainty"):
        params = ("system",) + tuple(params)
    return list(params), values


def _cells(command, opts):
    if command == "degeneracy":
        return [{}]
    if command == "geometry":
        return [{"lambda": v} for v in opts["lambda"]]
    keys = list(SCHEMAS[command][0])
    grids = [opts[k] for k in keys]
    cells = [dict(zip(keys, combo)) for combo in itertools.product(*grids)]
    if "system" in opts:
        for c in cells:
            c["system"] = opts["system"]
    return cells


def _run_cell(command, opts, cell):
    """Evaluate one cell; numeric failures come back as a reason string."""
    try:
        return CELL_FUNCS[command](cell, opts), None
    except (FockDarbouxError, ArithmeticError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _rows(command, opts, workers, failures):
    params, values = _schema(command, opts)
    cells = _cells(command, opts)
    fn = partial(_run_cell, command, opts)
    if workers > 1 and len(cells) > 1:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(fn, cells, chunksize=1)
    else:
        pool = None
        results = map(fn, cells)
    try:
        for cell, (out, reason) in zip(cells, results):
            base = {k: cell.get(k) for k in params}
            if command in ("density", "entropy"):
                base["space"] = opts["space"]
            if reason is not None:
                failures.append((cell, reason))
                log.warning("cell %s failed: %s", cell, reason)
                row = dict(base)
                row.update({k: math.nan for k in values if k not in base})
                row["reason"] = reason
                yield row
                continue
            for r in out:
                row = dict(base)
                row.update(r)
                row["reason"] = ""
                yield row
    finally:
        if pool is not None:
            pool.shutdown()


# ---------------------------------------------------------------------------
# argument handling


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fockdarboux", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True, system=True):
        sp.add_argument("--config", help="JSON file with the same keys as the flags")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        sp.add_argument("--workers", type=int, default=None,
                        help=f"worker processes (default ${WORKERS_ENV} or 1)")
        sp.add_argument("--abs-tol", type=float, default=1e-10)
        sp.add_argument("--rel-tol", type=float, default=1e-10)
        if system:
            sp.add_argument("--system", choices=("fd", "fdd"), default="fdd")
        if state:
            sp.add_argument("--n", default="0")
            sp.add_argument("--m", default="0")
            sp.add_argument("--omega", default="1")
            sp.add_argument("--omega-c", default="0")
            sp.add_argument("--lambda", dest="lambda_", default="0")

    s = sub.add_parser("spectrum", help="energies and effective frequencies")
    common(s)
    s = sub.add_parser("degeneracy", help="dimensionless energies and level crossings")
    common(s, state=False)
    s.add_argument("--sigma", type=float, default=0.02)
    s.add_argument("--nu", default="0:1:0.01")
    s.add_argument("--omega-c-axis", default=None, help="scan omega_c instead of nu (uses --omega)")
    s.add_argument("--omega", default="1")
    s.add_argument("--nmax", type=int, default=4)
    s.add_argument("--mmax", type=int, default=6)
    s.add_argument("--q-ratios", default="1/5,1/3,1/2,3/5,1")
    s = sub.add_parser("density", help="radial probability densities")
    common(s)
    s.add_argument("--space", choices=("position", "momentum"), default="position")
    s.add_argument("--x", default="0:6:0.02", help="radius (or momentum) grid")
    s = sub.add_parser("momentum", help="momentum density tables and checks")
    common(s, system=False)
    s.add_argument("--p", default=None, help="explicit momentum grid (default: adaptive hybrid)")
    s.add_argument("--table", action="store_true", help="emit the tabulated density itself")
    s = sub.add_parser("entropy", help="entropic moments, Renyi, Tsallis and Shannon entropies")
    common(s)
    s.add_argument("--alpha", default="2")
    s.add_argument("--space", choices=("position", "momentum"), default="position")
    s.add_argument("--shannon", action="store_true", help="also compute the Shannon entropy")
    s.add_argument("--relative-to-ho", action="store_true",
                   help="add differences from the flat oscillator with omega_c = 0")
    s = sub.add_parser("uncertainty", help="Renyi and Tsallis uncertainty functions")
    common(s)
    s.add_argument("--alpha", default="2/3")
    s = sub.add_parser("dispersion", help="<r^2>, <p^2> and their product")
    common(s)
    s = sub.add_parser("geometry", help="curvature and embedding of the surface")
    common(s, state=False, system=False)
    s.add_argument("--lambda", dest="lambda_", default="0.1")
    s.add_argument("--x", default="0:5:0.05", help="radius grid")
    s = sub.add_parser("omega-cut", help="Larmor frequency matching the flat <r^2>")
    common(s, system=False)
    s.add_argument("--no-p2", action="store_true", help="skip the <p^2> difference")
    s = sub.add_parser("validate", help="run the oracle checks and print a pass/fail matrix")
    s.add_argument("--config", help=argparse.SUPPRESS)
    return p


INT_GRIDS = ("n", "m")
FLOAT_GRIDS = ("omega", "omega_c", "lambda", "alpha", "nu", "x", "p", "omega_c_axis", "q_ratios")


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _resolve(argv):
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    cfg = _load_config(known.config) if known.config else {}
    if cfg:
        command = cfg.pop("command", None)
        if not any(a in COMMANDS for a in argv):
            if command is None:
                raise UsageError("config has no 'command' and none was given")
            argv = [command] + argv
        cmd = next(a for a in argv if a in COMMANDS)
        subparser = parser._subparsers._group_actions[0].choices[cmd]
        dests = {a.dest for a in subparser._actions}
        defaults = {}
        for key, val in cfg.items():
            dest = key.replace("-", "_")
            dest = "lambda_" if dest == "lambda" else dest
            if dest not in dests:
                raise UsageError(f"unknown config field {key!r} for command {cmd!r}")
            defaults[dest] = val
        subparser.set_defaults(**defaults)
    args = parser.parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k not in ("config",)}
    if "lambda_" in opts:
        opts["lambda"] = opts.pop("lambda_")
    config_echo = {k: v for k, v in opts.items() if k not in ("output", "workers", "format")}
    for key in list(opts):
        if opts[key] is None:
            continue
        try:
            if key in INT_GRIDS:
                opts[key] = parse_values(opts[key], int)
            elif key in FLOAT_GRIDS:
                opts[key] = parse_values(opts[key], float)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad value for --{key.replace('_', '-')}: {exc}") from exc
    for key in ("abs_tol", "rel_tol"):
        if key in opts and not opts[key] > 0:
            raise UsageError(f"--{key.replace('_', '-')} must be positive")
    if opts.get("system") == "fd" and any(v != 0 for v in opts.get("lambda", [0])):
        raise UsageError("--lambda must be 0 for --system fd")
    return opts, config_echo


def _workers(opts):
    w = opts.get("workers")
    if w is None:
        env = os.environ.get(WORKERS_ENV, "1")
        try:
            w = int(env)
        except ValueError as exc:
            raise UsageError(f"{WORKERS_ENV}={env!r} is not an integer") from exc
    if w < 1:
        raise UsageError("worker count must be >= 1")
    return w


def run(opts, config_echo) -> int:
    command = opts["command"]
    if command == "validate":
        from .validation import run_validation

        return run_validation()
    params, values = _schema(command, opts)
    schema = params + values + ["reason"]
    failures = []
    rows = _rows(command, opts, _workers(opts), failures)
    emit_table(rows, schema, opts["format"], opts.get("output"),
               {"version": __version__, "config": config_echo})
    if failures:
        print(f"{len(failures)} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        opts, echo = _resolve(argv)
        return run(opts, echo)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``xplattice <command> [--config FILE] [key=value ...]``.

Every command writes one CSV (stdout by default) that starts with a comment
block holding the tool version, the resolved configuration and the formulas
used. Exit status is 0 on success, 1 for invalid input and 2 for numerical
failures.
"""
import argparse
import io
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import __version__
from .continuum import (box_geometry, continuum_counting_approx, continuum_spectrum,
                        semiclassical_count)
from .exact_spectrum import (counting_function, exact_root, solve_spectrum_dense,
                             solve_spectrum_exact)
from .exceptions import NumericalError
from .ipm import CouplingProfile, bvp_eigenvalues
from .levels import LevelSequence, ModelCouplings
from .model_core import commutator_spectrum
from .rg import run_flow
from .riemann import deviation_report, load_zeros

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2

_LEVEL_KEYS = {"N": 2, "a": 0.0, "c": 0.0, "levels": "uniform", "level_value": 1.0,
               "levels_file": ""}
_GRID_KEYS = {"E_min": 0.5, "E_max": 50.0, "points": 100}

COMMANDS = {
    "spectrum": dict(_LEVEL_KEYS, g=0.0, h=1.0, method="both"),
    "rgflow": dict(_LEVEL_KEYS, N=100, g=0.0, h=1.0, family="inverse", label=0,
                   E=0.0, direction="ir"),
    "commutator": {"N": 50, "hbar": 1.0},
    "riemann-table": {"zeros_file": "", "count": 10, "count_fn": "smooth"},
    "semiclassical": dict(_GRID_KEYS, E_min=1.0, E_max=100.0, cutoff=100.0,
                          velocity_power=1.0),
    "ipm-bvp": {"variant": "plus", "profile": "constant", "g": 0.0, "slope": 1.0,
                "amplitude": 1.0, "L": math.pi, "profile_file": "", "interp": "cubic",
                "count": 3, "gauge": "tilde", "h_max": 0.0},
    "continuum": dict(_LEVEL_KEYS, **_GRID_KEYS, N=1000, alpha=math.pi / 2, hbar=1.0,
                      what="counting", k_min=-5, k_max=5),
}
_COMMON = {"jobs": 0}

FORMULAS = {
    "spectrum": [
        "exact: roots of (1/pi) sum_n arctan(E h / (2 eps_n)) - atan2(h,g)/pi = integer",
        "dense: E = 1/lambda for the eigenvalues lambda of the inverse Hamiltonian "
        "H_I[n,m] = (g + i h sign(n-m)) / (2 sqrt(eps_n eps_m))",
    ],
    "rgflow": [
        "g' = g + (g^2 + h^2) / (2 K - g) with K = E_I eps_N (inverse) or eps_N (RD)",
        "s = sum of 1/eps over eliminated levels; pole_flag marks g passing through infinity",
    ],
    "commutator": ["eigenvalues of [X, P]/i on the lattice, X = diag(1..N), "
                   "P = -2 hbar i (-1)^(n+m) sign(n-m)"],
    "riemann-table": [
        "N_sm(E) = (1/pi) Im lnGamma(1/4 + iE/2) - (E/2pi) log pi + 1",
        "deviation = n - N_sm(E_n) - 1/2",
    ],
    "semiclassical": [
        "berry_keating = (E/2pi)(log(E/2pi) - 1) + 7/8",
        "connes = (E/2pi) log(cutoff^2) - (E/2pi)(log(E/2pi) - 1)",
        "generalized = (E/2pi) int_{v^-1(E/cutoff)}^cutoff dx/v + (cutoff/2pi) v^-1(E/cutoff), "
        "v(x) = x^velocity_power",
    ],
    "ipm-bvp": [
        "chi'' - (+/-) g'(q)/2 chi + (h_D^2/4) chi = 0 on [0, L]",
        "plus: chi(0)=0, chi'(L)=g(L)chi(L)/2; minus: chi'(0)=-g(0)chi(0)/2, chi(L)=0",
    ],
    "continuum": [
        "counting: exact sum (1/pi) sum arctan(E/(2 hbar eps_n)) - alpha/pi, "
        "its integral over n, and the large-N form (E/2pi hbar)(log N - log(E/2hbar) + 1)",
        "levels: E_k = (2 pi hbar / L_N)(k + alpha/pi), L_N = int_1^N dn/eps(n)",
    ],
}


class ConfigError(ValueError):
    pass


def _parse_pairs(items, source):
    out = {}
    for lineno, item in items:
        if "=" not in item:
            where = f"{source}{lineno}: " if lineno is not None else ""
            raise ConfigError(f"{where}expected key = value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def read_config_file(path):
    """Flat ``key = value`` file; blank lines and ``#`` comments ignored."""
    with open(path) as fh:
        lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(fh, start=1)]
    return _parse_pairs([(i, ln) for i, ln in lines if ln], f"{path}:")


def resolve_config(command, file_values, overrides):
    """Merge defaults, config file and overrides; convert types; reject
    unknown keys."""
    defaults = dict(COMMANDS[command], **_COMMON)
    raw = dict(file_values)
    raw.update(overrides)
    unknown = sorted(set(raw) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown key(s) for {command!r}: {', '.join(unknown)}")
    cfg = dict(defaults)
    for key, value in raw.items():
        kind = type(defaults[key])
        try:
            if kind is int:
                cfg[key] = int(value)
            elif kind is float:
                cfg[key] = float(value)
            else:
                cfg[key] = str(value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r} as {kind.__name__}") from None
    if cfg["jobs"] <= 0:
        env = os.environ.get("XPLATTICE_JOBS", "")
        try:
            cfg["jobs"] = int(env) if env else (os.cpu_count() or 1)
        except ValueError:
            raise ConfigError(f"XPLATTICE_JOBS must be an integer, got {env!r}") from None
    return cfg


def _levels(cfg):
    kind = cfg["levels"]
    N = cfg["N"]
    if kind == "uniform":
        return LevelSequence.uniform(N, cfg["a"])
    if kind == "corrected":
        return LevelSequence.corrected(N, cfg["a"], cfg["c"])
    if kind == "constant":
        return LevelSequence.constant(N, cfg["level_value"])
    if kind == "primes":
        return LevelSequence.prime_filtered(N, cfg["a"])
    if kind == "file":
        if not cfg["levels_file"]:
            raise ConfigError("levels = file needs levels_file")
        return LevelSequence.explicit(np.loadtxt(cfg["levels_file"], comments="#", ndmin=1))
    raise ConfigError(f"unknown level generator {kind!r}")


def _grid(cfg):
    if cfg["points"] < 1:
        raise ConfigError("points must be >= 1")
    if not cfg["E_max"] >= cfg["E_min"]:
        raise ConfigError("E_max must be >= E_min")
    return np.linspace(cfg["E_min"], cfg["E_max"], cfg["points"])


def _f(x):
    return repr(float(x))


def _rows(out, header, rows):
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_f(x) if isinstance(x, (float, np.floating)) else str(x)
                           for x in r) + "\n")


def cmd_spectrum(cfg, out):
    lv = _levels(cfg)
    c = ModelCouplings(g=cfg["g"], h=cfg["h"])
    method = cfg["method"]
    if method not in ("both", "exact", "dense"):
        raise ConfigError("method must be both, exact or dense")
    ex = solve_spectrum_exact(lv, c, n_jobs=cfg["jobs"]) if method != "dense" else None
    de = solve_spectrum_dense(lv, c) if method != "exact" else None
    if method == "dense":
        _rows(out, ["index", "E_dense"], [(i, e) for i, e in enumerate(de.energies_bk)])
        return
    if method == "exact":
        _rows(out, ["label", "E_exact", "E_inverse", "residual"],
              zip(ex.labels, ex.energies_bk, ex.energies_inverse, ex.residuals))
        out.write(f"#stats roots={len(ex)} unbounded={ex.unbounded}\n")
        return
    if len(de) != len(ex):
        raise NumericalError(f"exact route found {len(ex)} roots, dense route {len(de)}")
    rel = np.abs(ex.energies_bk - de.energies_bk) / np.abs(de.energies_bk)
    _rows(out, ["label", "E_exact", "E_dense", "rel_diff", "residual"],
          zip(ex.labels, ex.energies_bk, de.energies_bk, rel, ex.residuals))
    out.write(f"#stats roots={len(ex)} unbounded={ex.unbounded} max_rel_diff={_f(rel.max())}\n")


def cmd_rgflow(cfg, out):
    lv = _levels(cfg)
    c = ModelCouplings(g=cfg["g"], h=cfg["h"])
    E = cfg["E"] if cfg["E"] != 0 else exact_root(lv, c, cfg["label"])
    if cfg["family"] == "inverse":
        st = run_flow(lv, c, E_I=1.0 / E, family="inverse", direction=cfg["direction"])
    else:
        rd = ModelCouplings(g=c.g * E, h=c.h * E)
        st = run_flow(lv, rd, family="rd", direction=cfg["direction"])
    out.write(f"# energy E = {_f(E)}\n")
    st.to_csv(out)
    out.write(f"#stats poles={st.pole_count} closure_residual={_f(st.closure_residual)} "
              f"cycle_estimate={_f(E * math.log(lv.n) * c.h / (2 * math.pi))}\n")


def cmd_commutator(cfg, out):
    w = commutator_spectrum(cfg["N"], cfg["hbar"])
    _rows(out, ["index", "eigenvalue"], enumerate(w))
    out.write(f"#stats count={w.size} sum={_f(w.sum())}\n")


def cmd_riemann_table(cfg, out):
    z = load_zeros(cfg["zeros_file"] or None)
    if cfg["count"] < 1:
        raise ConfigError("count must be >= 1")
    if cfg["count_fn"] not in ("smooth", "zeta", "closed"):
        raise ConfigError("count_fn must be smooth, zeta or closed")
    out.write(f"# zeros source {z.source} sha256 {z.checksum}\n")
    deviation_report(z.head(cfg["count"]), cfg["count_fn"]).to_csv(out)


def cmd_semiclassical(cfg, out):
    E = _grid(cfg)
    if np.any(E <= 0):
        raise ConfigError("semiclassical energies must be positive")
    p = cfg["velocity_power"]
    if not p > 0:
        raise ConfigError("velocity_power must be positive")
    v = lambda x: x ** p
    rows = []
    for e in E:
        rows.append((e, semiclassical_count(e),
                     semiclassical_count(e, "connes", cfg["cutoff"]),
                     semiclassical_count(e, "generalized", cfg["cutoff"], v)))
    _rows(out, ["E", "berry_keating", "connes", "generalized"], rows)


def _profile(cfg):
    L = cfg["L"]
    kind = cfg["profile"]
    if kind == "constant":
        return CouplingProfile.constant(cfg["g"], L)
    if kind == "linear":
        g0, s = cfg["g"], cfg["slope"]
        return CouplingProfile.closed_form(lambda q: g0 + s * q, L, lambda q: s)
    if kind == "sine":
        g0, A = cfg["g"], cfg["amplitude"]
        return CouplingProfile.closed_form(lambda q: g0 + A * math.sin(q), L,
                                           lambda q: A * math.cos(q))
    if kind == "file":
        if not cfg["profile_file"]:
            raise ConfigError("profile = file needs profile_file")
        return CouplingProfile.from_csv(cfg["profile_file"], cfg["interp"])
    raise ConfigError(f"unknown profile {kind!r}")


def cmd_ipm_bvp(cfg, out):
    prof = _profile(cfg)
    res = bvp_eigenvalues(prof, cfg["variant"], cfg["count"], cfg["gauge"],
                          h_max=cfg["h_max"] or None, n_jobs=cfg["jobs"])
    _rows(out, ["index", "h_D", "E", "residual", "nodes"],
          zip(range(len(res)), res.values, res.energies, res.residuals, res.nodes))
    out.write(f"#stats found={len(res)} requested={res.requested} "
              f"complete={int(res.complete)} h_max={_f(res.window[1])}\n")


def cmd_continuum(cfg, out):
    lv = _levels(cfg)
    alpha, hbar = cfg["alpha"], cfg["hbar"]
    if cfg["what"] == "levels":
        geo = box_geometry(lv, alpha, hbar)
        ks = range(cfg["k_min"], cfg["k_max"] + 1)
        E = continuum_spectrum(lv, alpha, hbar, ks, geo)
        _rows(out, ["k", "E_continuum"], zip(ks, E))
        out.write(f"#stats L_N={_f(geo.L_N)}\n")
        return
    if cfg["what"] != "counting":
        raise ConfigError("what must be counting or levels")
    E = _grid(cfg)
    exact = counting_function(E, lv, alpha, hbar)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for e, n in zip(E, exact):
            rows.append((e, n, continuum_counting_approx(e, lv, alpha, hbar, "integral"),
                         continuum_counting_approx(e, lv, alpha, hbar, "asymptotic")))
    _rows(out, ["E", "N_exact", "N_integral", "N_asymptotic"], rows)


HANDLERS = {
    "spectrum": cmd_spectrum, "rgflow": cmd_rgflow, "commutator": cmd_commutator,
    "riemann-table": cmd_riemann_table, "semiclassical": cmd_semiclassical,
    "ipm-bvp": cmd_ipm_bvp, "continuum": cmd_continuum,
}


def render(command, cfg):
    """Full CSV text for a resolved configuration."""
    buf = io.StringIO()
    buf.write(f"# xplattice {__version__}\n# command: {command}\n")
    for key in sorted(cfg):
        if key != "jobs":  # parallelism does not change the output
            buf.write(f"# config: {key} = {cfg[key]}\n")
    for line in FORMULAS[command]:
        buf.write(f"# formula: {line}\n")
    HANDLERS[command](cfg, buf)
    return buf.getvalue()


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".xplattice-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_parser():
    p = argparse.ArgumentParser(prog="xplattice", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"xplattice {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, keys in COMMANDS.items():
        sp = sub.add_parser(name, help=f"keys: {', '.join(sorted(dict(keys, **_COMMON)))}")
        sp.add_argument("--config", help="flat key = value file")
        sp.add_argument("-o", "--output", default="-", help="CSV path (default stdout)")
        sp.add_argument("params", nargs="*", metavar="key=value")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        overrides = _parse_pairs([(None, s) for s in args.params], "")
        cfg = resolve_config(args.command, file_values, overrides)
        text = render(args.command, cfg)
    except NumericalError as exc:
        print(f"xplattice: error [{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"xplattice: error [validation]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output == "-":
        sys.stdout.write(text)
    else:
        try:
            _write_atomic(args.output, text)
        except OSError as exc:
            print(f"xplattice: error [validation]: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

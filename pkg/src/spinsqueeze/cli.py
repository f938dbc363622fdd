"""Command-line front end: sweeps, ramps, comparisons, thermal tables and entropy maps.

Every subcommand writes one table (CSV by default, ``--format json`` for the
JSON mirror) whose header records the tool version and the full validated
configuration. ``spinsqueeze replay FILE`` re-runs the configuration stored in
an output file. Energies are in units of J, times in 1/J, temperatures in J.

Exit codes: 0 success, 2 invalid configuration or input, 3 numerical failure.
The number of worker threads for ED grids is read from SPINSQUEEZE_THREADS.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import dynamics, ed, spinwave, tables, thermo
from .model import ModelSpec, NumericalError

COMMANDS = {
    "sweep": ("lsw", "ed"),
    "ramp": ("tlsw", "ed-ramp"),
    "compare": ("compare",),
    "thermal": ("ed-thermal",),
    "entropy": ("entropy",),
    "join": ("join",),
}
STATIC_METHODS = ("lsw", "ed")
RAMP_METHODS = ("tlsw", "tlsw-literal", "ed-ramp")
SWEEP_COLUMNS = ["method", "d", "delta", "L", "omega", "jx_per_spin", "var_jz", "var_jy", "cov_yz",
                 "xi2", "fq", "gap", "error"]
RAMP_COLUMNS = ["method", "t", "omega", "jx_per_spin", "var_jz", "xi2"]
THERMAL_COLUMNS = ["omega", "T", "e", "s_exact", "jx_per_spin", "var_jz", "var_jy", "xi2", "fq"]
ENTROPY_COLUMNS = ["omega", "T", "c", "s"]
MAP_COLUMNS = ["omega", "T", "s", "xi2"]


class ConfigError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class RunConfig:
    command: str
    method: str
    output: str
    format: str = "csv"
    d: int = 2
    L: int = 4
    extents: tuple | None = None
    delta: float = 1.0
    omega: float | None = None
    omega_grid: str | None = None
    sizes: tuple | None = None
    omega_i: float | None = None
    omega_f: float | None = None
    tau: float | None = None
    hold: float = 0.0
    dt: float | None = None
    sample_every: float = 0.5
    samples: int = 41
    literal_k0: bool = False
    temperatures: str | None = None
    methods: tuple | None = None
    column: str | None = None
    fit_window: tuple | None = None
    lsw_L: int | None = None
    inputs: tuple = ()
    entropy_inputs: tuple = ()
    anchor: str = "zero-at-tmin"
    anchor_value: float = 0.0
    boundary: str = "linear"

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    def model(self, L: int | None = None, omega: float | None = None) -> ModelSpec:
        return ModelSpec.hypercubic(self.d, L or self.L, self.delta,
                                    self.omega if omega is None else omega,
                                    extents=self.extents if L is None else None)

    @property
    def n_sites(self) -> int:
        return math.prod(self.extents) if self.extents else self.L**self.d

    def omegas(self) -> list[float]:
        if self.omega_grid:
            return parse_grid(self.omega_grid)
        return [self.omega] if self.omega is not None else []

    def ramp(self) -> dynamics.RampSchedule:
        return dynamics.RampSchedule(self.omega_i, self.omega_f, self.tau, self.hold)


def parse_grid(spec: str) -> list[float]:
    """``log:a:b:n`` (geometric), ``lin:a:b:n`` (linear) or a comma-separated list."""
    spec = str(spec).strip()
    if spec.startswith(("log:", "lin:")):
        kind, a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
        if n < 1:
            raise ValueError("grid needs at least one point")
        if kind == "log":
            if a <= 0 or b <= 0:
                raise ValueError("log grid bounds must be positive")
            return [float(x) for x in np.geomspace(a, b, n)]
        return [float(x) for x in np.linspace(a, b, n)]
    if not spec:
        return []
    return [float(x) for x in spec.split(",")]


def _window(value):
    if value is None or isinstance(value, (list, tuple)):
        return None if value is None else tuple(float(x) for x in value)
    lo, hi = str(value).split(":")
    return float(lo), float(hi)


def _tuple(value, cast=str):
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace("x", ",").split(",") if v]
    return tuple(cast(v) for v in value)


def validate_config(raw: dict) -> RunConfig:
    """Normalize a raw mapping into a :class:`RunConfig`, collecting every violation."""
    errs: list[str] = []
    raw = {k: v for k, v in dict(raw).items() if v is not None}
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        errs.append(f"unknown configuration keys: {unknown}")
        raw = {k: v for k, v in raw.items() if k in known}
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError([f"command must be one of {sorted(COMMANDS)}, got {command!r}"] + errs)
    raw.setdefault("method", COMMANDS[command][0])
    if raw["method"] not in COMMANDS[command]:
        errs.append(f"method {raw['method']!r} is not valid for {command}; choose {COMMANDS[command]}")
    if "output" not in raw:
        errs.append("an output path is required")
        raw["output"] = ""
    try:
        for key, cast in (("extents", int), ("sizes", int), ("methods", str),
                          ("inputs", str), ("entropy_inputs", str)):
            if key in raw:
                raw[key] = _tuple(raw[key], cast)
        if "fit_window" in raw:
            raw["fit_window"] = _window(raw["fit_window"])
        cfg = RunConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(errs + [f"malformed configuration: {exc}"]) from exc

    if cfg.format not in ("csv", "json"):
        errs.append(f"format must be csv or json, got {cfg.format!r}")
    if cfg.d not in (1, 2, 3):
        errs.append(f"d must be 1, 2 or 3, got {cfg.d}")
    if cfg.extents is not None and (len(cfg.extents) != cfg.d or min(cfg.extents) < 2):
        errs.append(f"extents {cfg.extents} must have d={cfg.d} entries, each >= 2")
    if cfg.L < 2:
        errs.append(f"L must be >= 2, got {cfg.L}")
    if cfg.sizes and min(cfg.sizes) < 2:
        errs.append("every size in --sizes must be >= 2")
    if not -1.0 < cfg.delta <= 1.0:
        errs.append(f"delta must lie in (-1, 1], got {cfg.delta}")

    computes = command != "compare" or not cfg.inputs
    if command in ("sweep", "thermal") or (command == "compare" and computes and _static(cfg)):
        _check_fields(cfg, errs)
    if command == "ramp" or (command == "compare" and computes and not _static(cfg)):
        _check_ramp(cfg, errs)
    if command == "compare" and cfg.inputs:
        if len(cfg.inputs) < 2:
            errs.append("compare from files needs at least two --input tables")
        if not cfg.column:
            errs.append("--column is required")
    elif command == "compare":
        _check_compare(cfg, errs)
    if command == "sweep":
        if cfg.fit_window is not None and not 0 < cfg.fit_window[0] < cfg.fit_window[1]:
            errs.append("fit window must be lo:hi with 0 < lo < hi")
        if cfg.column is not None and cfg.column not in SWEEP_COLUMNS[5:-1]:
            errs.append(f"--column must be one of {SWEEP_COLUMNS[5:-1]}, got {cfg.column!r}")
    if command == "thermal":
        if cfg.n_sites > ed.MAX_DENSE_SITES:
            errs.append(f"ed-thermal needs N <= {ed.MAX_DENSE_SITES}, got N={cfg.n_sites}")
        try:
            temps = parse_grid(cfg.temperatures) if cfg.temperatures else []
            if not temps or min(temps) <= 0:
                errs.append("thermal runs need a --temperatures grid of positive values")
        except ValueError as exc:
            errs.append(f"bad temperature grid: {exc}")
    if command in ("entropy", "join"):
        if not cfg.inputs:
            errs.append(f"{command} needs at least one --input table")
        if cfg.anchor not in thermo.ANCHORS:
            errs.append(f"anchor must be one of {thermo.ANCHORS}")
        elif cfg.anchor == "ln2-at-infinity":
            errs.append("anchor ln2-at-infinity is unsupported; use value-at-tmax")
        if cfg.boundary not in ("linear", "constant"):
            errs.append("boundary must be linear or constant")
    if errs:
        raise ConfigError(errs)
    return cfg


def _static(cfg: RunConfig) -> bool:
    return not cfg.methods or all(m in STATIC_METHODS for m in cfg.methods)


def _uses(cfg: RunConfig, method: str) -> bool:
    return cfg.method == method or bool(cfg.methods and method in cfg.methods)


def _check_fields(cfg: RunConfig, errs: list):
    try:
        omegas = cfg.omegas()
    except ValueError as exc:
        errs.append(f"bad omega grid: {exc}")
        return
    if not omegas:
        errs.append("give --omega or --omega-grid")
    if any(w < 0 for w in omegas):
        errs.append("fields must be non-negative")
    if _uses(cfg, "lsw") and any(w == 0 for w in omegas):
        errs.append("omega = 0 is a gapless mode for spin-wave theory (need omega > 0)")
    if (_uses(cfg, "ed") or cfg.command == "thermal") and any(w == 0 for w in omegas):
        errs.append("omega = 0: <Jx> vanishes and the squeezing parameter is undefined")
    if _uses(cfg, "ed"):
        sizes = cfg.sizes or (None,)
        ns = [cfg.n_sites if L is None else L**cfg.d for L in sizes]
        limit = ed.MAX_SITES if cfg.column == "gap" else ed.MAX_SPARSE_SITES
        if max(ns) > limit:
            errs.append(f"ed needs N <= {limit} here, got N={max(ns)}")


def _check_ramp(cfg: RunConfig, errs: list):
    if None in (cfg.omega_i, cfg.omega_f, cfg.tau):
        errs.append("ramps need --omega-i, --omega-f and --tau")
        return
    if not cfg.omega_i > cfg.omega_f > 0:
        errs.append(f"need omega_i > omega_f > 0, got {cfg.omega_i}, {cfg.omega_f}")
    if not cfg.tau > 0:
        errs.append("tau must be positive")
    if cfg.hold < 0:
        errs.append("hold must be non-negative")
    if cfg.dt is not None and not cfg.dt > 0:
        errs.append("dt must be positive")
    if not cfg.sample_every > 0:
        errs.append("sample_every must be positive")
    if _uses(cfg, "ed-ramp") and cfg.n_sites > ed.MAX_EVOLVE_SITES:
        errs.append(f"ed-ramp needs N <= {ed.MAX_EVOLVE_SITES}, got N={cfg.n_sites}")
    if (_uses(cfg, "tlsw") or _uses(cfg, "tlsw-literal")) and cfg.dt is not None and not errs:
        amax = 1.0 / dynamics.default_dt(cfg.model(omega=0.0), cfg.omega_i, safety=1.0)
        if cfg.dt * amax > 0.1:
            errs.append(f"dt={cfg.dt} too coarse for tlsw: need dt <= {0.1 / amax:.4g}")


def _check_compare(cfg: RunConfig, errs: list):
    if not cfg.methods or len(cfg.methods) != 2:
        errs.append("compare needs exactly two --methods, e.g. lsw,ed")
        return
    static = all(m in STATIC_METHODS for m in cfg.methods)
    ramp = all(m in RAMP_METHODS for m in cfg.methods)
    if not (static or ramp):
        errs.append(f"cannot compare {cfg.methods}: pick two of {STATIC_METHODS} or two of {RAMP_METHODS}")
    allowed = SWEEP_COLUMNS[5:-1] if static else RAMP_COLUMNS[3:]
    if cfg.column not in allowed:
        errs.append(f"--column must be one of {allowed}, got {cfg.column!r}")
    if cfg.fit_window is not None and (len(cfg.fit_window) != 2 or not 0 < cfg.fit_window[0] < cfg.fit_window[1]):
        errs.append("fit window must be lo:hi with 0 < lo < hi")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SPINSQUEEZE_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    if _threads() == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(_threads()) as pool:
        return list(pool.map(fn, items))


def _model_meta(cfg: RunConfig, **extra) -> dict:
    meta = {"d": cfg.d, "L": max(cfg.extents) if cfg.extents else cfg.L, "delta": cfg.delta}
    if cfg.sizes:
        del meta["L"]  # several sizes: every row carries its own L
    if cfg.extents:
        meta["extents"] = "x".join(str(e) for e in cfg.extents)
    meta.update(extra)
    return meta


# -- static sweeps -------------------------------------------------------------------------

def _ed_row(model: ModelSpec, gap_only: bool = False) -> dict:
    try:
        if gap_only:
            gs = ed.ground_and_gap(model)
            row = spinwave.observables_row(model, None)
            row["gap"] = gs.gap
            return row
        return spinwave.observables_row(model, ed.ground_observables(model))
    except NumericalError as exc:
        return spinwave.observables_row(model, None, f"{type(exc).__name__}: {exc}")


def static_rows(cfg: RunConfig, method: str, gap_only: bool = False) -> list[dict]:
    omegas = sorted(cfg.omegas())
    if method == "lsw":
        L = cfg.lsw_L or cfg.L
        if cfg.extents and not cfg.lsw_L:
            rows = []
            for w in omegas:
                model = cfg.model(omega=w)
                try:
                    rows.append(spinwave.observables_row(model, spinwave.solve(model)))
                except NumericalError as exc:
                    rows.append(spinwave.observables_row(model, None, f"{type(exc).__name__}: {exc}"))
        else:
            rows = spinwave.sweep(cfg.model(L=L, omega=0.0), omegas, cfg.sizes or [L])
    else:
        if cfg.sizes:
            models = [cfg.model(L=L, omega=w) for L in sorted(cfg.sizes) for w in omegas]
        else:
            models = [cfg.model(omega=w) for w in omegas]
        rows = _pmap(lambda m: _ed_row(m, gap_only), models)
    for row in rows:
        row["method"] = method
    return rows


def sweep_fits(cfg: RunConfig, rows: list[dict]):
    """Power-law fits of Var(Jz) and xi^2 (or ``--column``) per lattice size, if requested."""
    if cfg.fit_window is None:
        return None
    fits = {}
    for L in sorted({r["L"] for r in rows}):
        group = [r for r in rows if r["L"] == L]
        for column in ([cfg.column] if cfg.column else ["var_jz", "xi2"]):
            try:
                fit = spinwave.fit_power_law(group, column, cfg.fit_window)
                fits[f"L={L}:{column}"] = {"slope": fit.slope, "stderr": fit.stderr,
                                           "intercept": fit.intercept, "n_points": fit.n_points}
            except ValueError as exc:
                fits[f"L={L}:{column}"] = {"error": str(exc)}
    return {"fit_window": list(cfg.fit_window), "fits": fits}


# -- ramps ---------------------------------------------------------------------------------

def ed_default_dt(cfg: RunConfig) -> float:
    return 0.05 / max(cfg.omega_i, 2.0 * cfg.d)


def ramp_trace(cfg: RunConfig, method: str) -> dynamics.Trace:
    template = cfg.model(omega=cfg.omega_f)
    ramp = cfg.ramp()
    if method == "ed-ramp":
        dt = cfg.dt or ed_default_dt(cfg)
        stride = max(1, round(cfg.sample_every / dt))
        return ed.evolve_ramp(template, ramp, dt, stride=stride)
    dt = cfg.dt or dynamics.default_dt(template, cfg.omega_i)
    stride = max(1, round(cfg.sample_every / dt))
    literal = cfg.literal_k0 or method == "tlsw-literal"
    return dynamics.evolve(template, ramp, dt, stride=stride, literal_k0=literal)


# -- reports -------------------------------------------------------------------------------

def emit_report(tables_by_method: dict, column: str, key: str = "omega",
                fit_window: tuple | None = None):
    """Join per-method tables on ``key`` and summarize their deviation in ``column``.

    With two methods, ``rel_dev = (first - second) / |second|``. A fit window
    adds the log-log slope of ``column`` against ``key`` for every method.
    Returns ``(rows, columns, summary)``.
    """
    names = list(tables_by_method)
    keyed = []
    for name in names:
        keyed.append({float(r[key]): r for r in tables_by_method[name]})
    common = set(keyed[0])
    for k in keyed[1:]:
        if set(k) != common:
            raise ValueError(f"tables do not share the same {key} values")
    rows = []
    for kv in sorted(common):
        row = {key: kv}
        for name, table in zip(names, keyed):
            row[name] = float(table[kv][column])
        if len(names) == 2:
            a, b = row[names[0]], row[names[1]]
            row["rel_dev"] = (a - b) / abs(b) if b != 0 else math.nan
        rows.append(row)
    summary = {"column": column, "methods": names, "n_rows": len(rows)}
    if len(names) == 2:
        devs = np.array([abs(r["rel_dev"]) for r in rows if math.isfinite(r["rel_dev"])])
        summary["max_rel_dev"] = float(devs.max()) if devs.size else math.nan
        summary["mean_rel_dev"] = float(devs.mean()) if devs.size else math.nan
    if fit_window is not None:
        fits = {}
        for name in names:
            pts = [{key: r[key], column: r[name]} for r in rows]
            try:
                fit = spinwave.fit_power_law(pts, column, fit_window, x=key)
                fits[name] = {"slope": fit.slope, "stderr": fit.stderr, "intercept": fit.intercept,
                              "n_points": fit.n_points}
            except ValueError as exc:
                fits[name] = {"error": str(exc)}
        summary["fit_window"] = list(fit_window)
        summary["fits"] = fits
    columns = [key] + names + (["rel_dev"] if len(names) == 2 else [])
    return rows, columns, summary


def _resample(trace: dynamics.Trace, times, column: str) -> list[dict]:
    values = np.interp(times, trace.t, trace.column(column))
    return [{"t": float(t), column: float(v)} for t, v in zip(times, values)]


def compare_files(cfg: RunConfig):
    """Compare ``cfg.column`` across previously written tables, keyed by omega or t."""
    tabs = {}
    for path in cfg.inputs:
        rows, header = tables.read_table(path)
        name = (header.get("config") or {}).get("method") or os.path.basename(path)
        name = name if name not in tabs else f"{name}:{path}"
        tabs[name] = [r for r in rows if not r.get("error")]
    key = "t" if any(rows and "t" in rows[0] for rows in tabs.values()) else "omega"
    return emit_report(tabs, cfg.column, key, cfg.fit_window)


def run_compare(cfg: RunConfig):
    if cfg.inputs:
        return compare_files(cfg)
    if _static(cfg):
        gap_only = cfg.column == "gap"
        tabs = {m: static_rows(cfg, m, gap_only=gap_only and m == "ed") for m in cfg.methods}
        return emit_report(tabs, cfg.column, "omega", cfg.fit_window)
    times = np.linspace(0.0, cfg.tau + cfg.hold, cfg.samples)
    attr = {"jx_per_spin": "jx_per_spin", "var_jz": "var_jz", "xi2": "xi2"}[cfg.column]
    tabs = {m: _resample(ramp_trace(cfg, m), times, attr) for m in cfg.methods}
    return emit_report(tabs, cfg.column, "t", cfg.fit_window)


# -- thermodynamics ------------------------------------------------------------------------

def thermal_rows(cfg: RunConfig) -> list[dict]:
    temps = sorted(parse_grid(cfg.temperatures))
    rows = []
    for w in sorted(cfg.omegas()):
        solver = ed.ThermalSolver(cfg.model(omega=w))
        for T in temps:
            obs, e, s = solver.at(T)
            rows.append({"omega": w, "T": T, "e": e, "s_exact": s, "jx_per_spin": obs.jx_per_spin,
                         "var_jz": obs.var_jz, "var_jy": obs.var_jy, "xi2": obs.xi2, "fq": obs.fq})
    return rows


def _group_by_omega(rows, header, path):
    meta_omega = header["meta"].get("omega")
    groups: dict[float, list] = {}
    for row in rows:
        w = row.get("omega", meta_omega)
        if w is None or w == "":
            raise ValueError(f"{path}: no omega column and no omega in the metadata header")
        groups.setdefault(float(w), []).append(row)
    return groups


def _read_inputs(paths):
    """Yield ``(path, rows, header)``; all inputs must share (d, L, delta) metadata."""
    seen = None
    out = []
    for path in paths:
        rows, header = tables.read_table(path)
        sig = tuple(header["meta"].get(k) for k in thermo.META_KEYS)
        if seen is not None and sig != seen[1]:
            raise ValueError(f"metadata mismatch: {path} has {sig}, {seen[0]} has {seen[1]}")
        seen = seen or (path, sig)
        out.append((path, rows, header))
    return out


def entropy_curves(cfg: RunConfig, inputs) -> dict:
    curves = {}
    for path, rows, header in inputs:
        meta = {k: header["meta"].get(k) for k in thermo.META_KEYS}
        for w, grp in _group_by_omega(rows, header, path).items():
            grp = sorted(grp, key=lambda r: r["T"])
            table = thermo.EnergyTable([r["T"] for r in grp], [r["e"] for r in grp], meta)
            curves[w] = thermo.entropy_curve(table, cfg.anchor, cfg.anchor_value, cfg.boundary)
    return curves


def entropy_rows(curves: dict) -> list[dict]:
    rows = []
    for w in sorted(curves):
        cur = curves[w]
        for T, c, s in zip(cur.T, cur.c_at_grid(), cur.s):
            rows.append({"omega": w, "T": float(T), "c": float(c), "s": float(s)})
    return rows


def _curves_from_entropy_tables(inputs) -> dict:
    curves = {}
    for path, rows, header in inputs:
        meta = {k: header["meta"].get(k) for k in thermo.META_KEYS}
        for w, grp in _group_by_omega(rows, header, path).items():
            grp = sorted(grp, key=lambda r: r["T"])
            T = np.array([r["T"] for r in grp], dtype=float)
            s = np.array([r["s"] for r in grp], dtype=float)
            curves[w] = thermo.EntropyCurve(T, s, T, np.full_like(T, np.nan),
                                            {"rule": "from-file"}, meta)
    return curves


# -- dispatch ------------------------------------------------------------------------------

def execute(cfg: RunConfig):
    """Run a validated configuration; return ``(rows, columns, meta, summary)``."""
    if cfg.command == "sweep":
        rows = static_rows(cfg, cfg.method)
        return rows, SWEEP_COLUMNS, _model_meta(cfg), sweep_fits(cfg, rows)
    if cfg.command == "ramp":
        trace = ramp_trace(cfg, cfg.method)
        method = "tlsw-literal" if cfg.literal_k0 and cfg.method == "tlsw" else cfg.method
        summary = {"final_xi2": trace.final.xi2, "final_jx_per_spin": trace.final.jx_per_spin,
                   "dt": trace.extra["dt"]}
        return trace.rows(method), RAMP_COLUMNS, _model_meta(cfg), summary
    if cfg.command == "compare":
        rows, columns, summary = run_compare(cfg)
        meta = tables.read_table(cfg.inputs[0])[1]["meta"] if cfg.inputs else _model_meta(cfg)
        return rows, columns, meta, summary
    if cfg.command == "thermal":
        omegas = cfg.omegas()
        extra = {"omega": omegas[0]} if len(omegas) == 1 else {}
        return thermal_rows(cfg), THERMAL_COLUMNS, _model_meta(cfg, **extra), None
    inputs = _read_inputs(cfg.inputs)
    meta = {k: inputs[0][2]["meta"].get(k) for k in thermo.META_KEYS}
    if cfg.command == "entropy":
        curves = entropy_curves(cfg, inputs)
        anchor = next(iter(curves.values())).anchor if curves else {}
        return entropy_rows(curves), ENTROPY_COLUMNS, meta, {"anchor": anchor}
    # join
    if cfg.entropy_inputs:
        curves = _curves_from_entropy_tables(_read_inputs(cfg.entropy_inputs))
    else:
        curves = entropy_curves(cfg, inputs)
    squeezing = []
    for path, rows, header in inputs:
        for w, grp in _group_by_omega(rows, header, path).items():
            squeezing += [{"omega": w, "T": r["T"], "xi2": r["xi2"]} for r in grp]
    rows, problems = thermo.join_squeezing_entropy(squeezing, curves, meta)
    return rows, MAP_COLUMNS, meta, {"problems": problems}


def run(cfg: RunConfig) -> int:
    rows, columns, meta, summary = execute(cfg)
    tables.write_table(cfg.output, rows, columns, cfg.format, cfg.to_dict(), meta, summary)
    return 0


def _error(kind: str, code: int, message: str, violations=None) -> int:
    record = {"status": "error", "kind": kind, "exit_code": code, "message": message}
    if violations:
        record["violations"] = violations
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinsqueeze", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        p.add_argument("-o", "--output", required=True)
        p.add_argument("--format", default="csv", choices=["csv", "json"])
        if model:
            p.add_argument("-d", type=int, default=2, dest="d")
            p.add_argument("-L", type=int, default=4, dest="L")
            p.add_argument("--extents", help="rectangular cluster, e.g. 3x4")
            p.add_argument("--delta", type=float, default=1.0)

    p = sub.add_parser("sweep", help="static observables on a field grid")
    common(p)
    p.add_argument("--method", choices=COMMANDS["sweep"], default="lsw")
    p.add_argument("--omega", type=float)
    p.add_argument("--omega-grid")
    p.add_argument("--sizes", help="comma-separated list of L values")
    p.add_argument("--fit-window", help="lo:hi window for power-law fits of var_jz and xi2")
    p.add_argument("--column", help="fit this column instead")

    def ramp_args(p):
        p.add_argument("--omega-i", type=float, default=10.0)
        p.add_argument("--omega-f", type=float)
        p.add_argument("--tau", type=float)
        p.add_argument("--hold", type=float, default=0.0)
        p.add_argument("--dt", type=float)
        p.add_argument("--sample-every", type=float, default=0.5)

    p = sub.add_parser("ramp", help="time evolution along a field ramp")
    common(p)
    p.add_argument("--method", choices=COMMANDS["ramp"], default="tlsw")
    ramp_args(p)
    p.add_argument("--literal-k0", action="store_true",
                   help="double the k=0 right-hand side of the pair equations")

    p = sub.add_parser("compare", help="compare two methods on one column")
    common(p)
    p.add_argument("--methods", help="e.g. lsw,ed or tlsw,ed-ramp")
    p.add_argument("--input", action="append", dest="inputs",
                   help="compare existing tables instead of computing (repeat)")
    p.add_argument("--column", required=True)
    p.add_argument("--omega", type=float)
    p.add_argument("--omega-grid")
    p.add_argument("--lsw-L", type=int, help="grid size for the lsw side (default: -L)")
    p.add_argument("--fit-window", help="lo:hi window for power-law fits")
    ramp_args(p)
    p.add_argument("--samples", type=int, default=41)

    p = sub.add_parser("thermal", help="ED thermal observables and energies (N <= 12)")
    common(p)
    p.add_argument("--omega", type=float)
    p.add_argument("--omega-grid")
    p.add_argument("--temperatures", required=True, help="e.g. log:0.05:20:200")

    for name, help_ in (("entropy", "entropy from T,e tables"),
                        ("join", "squeezing vs entropy map from thermal tables")):
        p = sub.add_parser(name, help=help_)
        common(p, model=False)
        p.add_argument("--input", action="append", dest="inputs", required=True)
        p.add_argument("--anchor", default="zero-at-tmin")
        p.add_argument("--anchor-value", type=float, default=0.0)
        p.add_argument("--boundary", default="linear")
        if name == "join":
            p.add_argument("--entropy", action="append", dest="entropy_inputs")

    p = sub.add_parser("replay", help="re-run the configuration stored in an output file")
    p.add_argument("source")
    p.add_argument("-o", "--output")
    return ap


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    try:
        if args["command"] == "replay":
            _, header = tables.read_table(args["source"])
            if not header["config"]:
                raise ConfigError([f"{args['source']} carries no configuration header"])
            raw = dict(header["config"])
            if args.get("output"):
                raw["output"] = args["output"]
        else:
            raw = args
        cfg = validate_config(raw)
        return run(cfg)
    except ConfigError as exc:
        return _error("config", 2, str(exc), exc.violations)
    except NumericalError as exc:
        return _error("numerical", 3, f"{type(exc).__name__}: {exc}")
    except (ValueError, OSError) as exc:
        return _error("input", 2, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    raise SystemExit(main())

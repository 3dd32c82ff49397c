"""Scenario runner: JSON configuration in, CSV time series and a JSON manifest out.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure
(divergence, step-size, convergence or truncation), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import copy
import csv
import hashlib
import itertools
import json
import math
import os
import random
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analysis, classical, errata, fock, generator, phasespace
from ._backend import NAME as BACKEND_NAME
from .errors import ConfigError, TruncationError
from .fock import MonomialParams

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

COLUMNS = (
    "t",
    "lambda_min",
    "lambda_max",
    "negative_sum",
    "trace",
    "purity",
    "fidelity",
    "self_correlation",
    "minmax_bound",
)
METHODS = ("phase_space", "operator_ode", "short_time", "kraus", "oracle_check")
ANALYSES = ("spectrum", "minmax", "fidelity", "self_correlation", "purity", "kraus_completeness")
STATE_KINDS = ("fock", "coherent", "low_excited")
FAMILIES = ("two_level", "coherent_orthogonalized")
ORACLE_LEVELS = 7

_TOP_KEYS = {
    "hamiltonian", "initial_state", "dim", "grid", "time", "method", "analyses",
    "output_dir", "minmax", "oracle", "sweep",
}


def _complex(value, what):
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number or [re, im]")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{what}: expected a number or [re, im], got {value!r}")


def _int(value, what, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{what}: expected an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{what}: must be >= {minimum}, got {value}")
    return value


def _float(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{what}: expected a finite number, got {value!r}")
    return float(value)


def _keys(d, allowed, what):
    if not isinstance(d, dict):
        raise ConfigError(f"{what}: expected an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{what}: unknown keys {sorted(extra)}")


@dataclass
class ScenarioConfig:
    """Validated scenario; ``to_dict`` gives the fully resolved form."""

    params: MonomialParams
    state_kind: str
    state_n: int | None
    state_alpha: complex | None
    dim: int
    grid: phasespace.PhaseGrid
    t_max: float
    samples: int
    method: str
    analyses: tuple
    output_dir: str
    minmax_family: str
    minmax_half_width: float
    minmax_points: int
    minmax_refine: bool
    dt_probe: float
    sweep: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        _keys(raw, _TOP_KEYS, "config")
        for key in ("hamiltonian", "initial_state", "dim", "time", "method"):
            if key not in raw:
                raise ConfigError(f"config: missing required key {key!r}")
        ham = raw["hamiltonian"]
        _keys(ham, {"m", "n", "coupling"}, "hamiltonian")
        try:
            params = MonomialParams(
                _int(ham.get("m"), "hamiltonian.m"),
                _int(ham.get("n"), "hamiltonian.n"),
                _float(ham.get("coupling", 1.0), "hamiltonian.coupling"),
            )
        except ValueError as exc:
            raise ConfigError(f"hamiltonian: {exc}") from None
        dim = _int(raw["dim"], "dim", 2)
        if params.n >= dim:
            raise ConfigError(f"dim={dim} must exceed n={params.n}")

        st = raw["initial_state"]
        _keys(st, {"kind", "n", "alpha"}, "initial_state")
        kind = st.get("kind")
        if kind not in STATE_KINDS:
            raise ConfigError(f"initial_state.kind must be one of {STATE_KINDS}, got {kind!r}")
        n = alpha = None
        if kind == "fock":
            n = _int(st.get("n"), "initial_state.n", 0)
            if n >= dim:
                raise ConfigError(f"initial_state.n={n} must be below dim={dim}")
        else:
            if "alpha" not in st:
                raise ConfigError(f"initial_state: {kind} state needs alpha")
            alpha = _complex(st["alpha"], "initial_state.alpha")

        tm = raw["time"]
        _keys(tm, {"t_max", "samples"}, "time")
        t_max = _float(tm.get("t_max"), "time.t_max")
        if t_max < 0:
            raise ConfigError("time.t_max must be non-negative")
        samples = _int(tm.get("samples", 11), "time.samples", 1)

        method = raw["method"]
        if method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {method!r}")
        if method in ("operator_ode", "short_time", "kraus"):
            try:
                generator.generator_for(params, max(dim, 6))
            except ValueError as exc:
                raise ConfigError(f"method {method}: {exc}") from None

        analyses = raw.get("analyses", ["spectrum"])
        if not isinstance(analyses, list) or any(a not in ANALYSES for a in analyses):
            raise ConfigError(f"analyses must be a list drawn from {ANALYSES}, got {analyses!r}")
        if "kraus_completeness" in analyses and (params.m, params.n) not in ((1, 1), (2, 2), (1, 2)):
            raise ConfigError("kraus_completeness needs an explicit channel list (harmonic, Kerr or SHG)")

        center = abs(alpha) if alpha is not None else math.sqrt(n)
        g = raw.get("grid")
        if g is None:
            grid = phasespace.PhaseGrid.default(center)
        else:
            _keys(g, {"r_max", "points_per_axis"}, "grid")
            try:
                grid = phasespace.PhaseGrid(
                    _float(g.get("r_max"), "grid.r_max"), _int(g.get("points_per_axis"), "grid.points_per_axis", 2)
                )
            except ValueError as exc:
                raise ConfigError(f"grid: {exc}") from None

        mm = raw.get("minmax", {})
        _keys(mm, {"family", "half_width", "points", "refine"}, "minmax")
        family = mm.get("family", "coherent_orthogonalized" if kind == "coherent" else "two_level")
        if family not in FAMILIES:
            raise ConfigError(f"minmax.family must be one of {FAMILIES}")
        orc = raw.get("oracle", {})
        _keys(orc, {"dt_probe"}, "oracle")
        dt_probe = _float(orc.get("dt_probe", 1e-4), "oracle.dt_probe")
        if dt_probe <= 0:
            raise ConfigError("oracle.dt_probe must be positive")

        sweep = raw.get("sweep", {})
        if not isinstance(sweep, dict) or any(not isinstance(v, list) or not v for v in sweep.values()):
            raise ConfigError("sweep must map dotted keys to non-empty lists")

        return cls(
            params=params,
            state_kind=kind,
            state_n=n,
            state_alpha=alpha,
            dim=dim,
            grid=grid,
            t_max=t_max,
            samples=samples,
            method=method,
            analyses=tuple(analyses),
            output_dir=str(raw.get("output_dir", "twakraus_out")),
            minmax_family=family,
            minmax_half_width=_float(mm.get("half_width", 2.0), "minmax.half_width"),
            minmax_points=_int(mm.get("points", 21), "minmax.points", 1),
            minmax_refine=bool(mm.get("refine", True)),
            dt_probe=dt_probe,
            sweep=dict(sweep),
        )

    def to_dict(self) -> dict:
        st = {"kind": self.state_kind}
        if self.state_n is not None:
            st["n"] = self.state_n
        if self.state_alpha is not None:
            st["alpha"] = [self.state_alpha.real, self.state_alpha.imag]
        out = {
            "hamiltonian": {"m": self.params.m, "n": self.params.n, "coupling": self.params.coupling},
            "initial_state": st,
            "dim": self.dim,
            "grid": {"r_max": self.grid.r_max, "points_per_axis": self.grid.points_per_axis},
            "time": {"t_max": self.t_max, "samples": self.samples},
            "method": self.method,
            "analyses": list(self.analyses),
            "output_dir": self.output_dir,
            "minmax": {
                "family": self.minmax_family,
                "half_width": self.minmax_half_width,
                "points": self.minmax_points,
                "refine": self.minmax_refine,
            },
            "oracle": {"dt_probe": self.dt_probe},
        }
        if self.sweep:
            out["sweep"] = self.sweep
        return out

    @property
    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def times(self) -> np.ndarray:
        if self.samples == 1:
            return np.array([self.t_max])
        return np.linspace(0.0, self.t_max, self.samples)

    def psi0(self) -> np.ndarray:
        return fock.state_prep(self.state_kind, self.dim, n=self.state_n, alpha=self.state_alpha)

    @property
    def center(self) -> complex:
        return self.state_alpha if self.state_alpha is not None else 0j


def load_config(path) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


@dataclass
class RunRecord:
    config_hash: str
    version: str
    rows: list
    warnings: list
    extras: dict
    status: str = "ok"
    error: str | None = None


# evolution per method


def _check_top(R, t):
    try:
        fock.check_truncation(R)
    except TruncationError as exc:
        raise TruncationError(f"t={t:g}: {exc}") from None


def _operator_series(cfg, spec, R0, times):
    if cfg.method == "short_time":
        return [generator.short_time_R(spec, R0, t) for t in times]
    if cfg.method == "kraus":
        dt = generator.default_step(spec)
        ops = generator.kraus_operators(spec, dt)
        out, R, t_prev = [], R0.copy(), 0.0
        for t in times:
            n = math.ceil((t - t_prev) / dt - 1e-9) if t > t_prev else 0
            if n:
                step_ops = ops if abs((t - t_prev) / n - dt) < 1e-15 else generator.kraus_operators(spec, (t - t_prev) / n)
                for _ in range(n):
                    R = generator.kraus_apply(step_ops, R)
                t_prev = t
            out.append(0.5 * (R + R.conj().T))
        return out
    return generator.evolve_series(spec, R0, times)


def evolve(cfg: ScenarioConfig, method: str | None = None, extras: dict | None = None) -> list[np.ndarray]:
    """R(t) at every sample time for the configured (or given) method."""
    extras = {} if extras is None else extras
    if method is not None and method != cfg.method:
        cfg = copy.copy(cfg)
        cfg.method = method
    psi0 = cfg.psi0()
    R0 = fock.density(psi0)
    try:
        fock.check_truncation(R0)
    except TruncationError as exc:
        raise ConfigError(f"initial state does not fit in dim={cfg.dim}: {exc}") from None
    times = cfg.times
    if cfg.method == "phase_space":
        Rs = [phasespace.inverse_map(f, cfg.dim) for _, f in classical.twa_fields(R0, cfg.grid, cfg.params, times)]
    elif cfg.method == "oracle_check":
        S = generator.oracle_generator(cfg.params, cfg.dim, cfg.grid, cfg.dt_probe)
        spec = generator.GeneratorSpec(fock.symmetrized_hamiltonian(cfg.params, cfg.dim), (), (), S, "oracle")
        try:
            explicit = generator.generator_for(cfg.params, cfg.dim)
        except ValueError:
            explicit = None
        if explicit is not None:
            lv = min(ORACLE_LEVELS, cfg.dim)
            diff = generator.sub_block(S, cfg.dim, lv) - generator.sub_block(generator.superoperator(explicit), cfg.dim, lv)
            extras["oracle_discrepancy"] = float(np.linalg.norm(diff, 2))
            extras["oracle_levels"] = lv
        Rs = generator.evolve_series(spec, R0, times)
    else:
        spec = generator.generator_for(cfg.params, cfg.dim)
        Rs = _operator_series(cfg, spec, R0, times)
    for t, R in zip(times, Rs):
        if cfg.method != "phase_space":
            _check_top(R, t)
    return Rs


def _analyse(cfg, psi0, H, hs, t, R):
    row = {c: None for c in COLUMNS}
    row["t"] = float(t)
    row["trace"] = float(np.trace(R).real)
    if "spectrum" in cfg.analyses:
        sp = analysis.hermitian_eigen(R)
        row["lambda_min"], row["negative_sum"] = analysis.negativity(sp)
        row["lambda_max"] = sp.lambda_max
    if "purity" in cfg.analyses:
        row["purity"] = float(np.vdot(R, R).real)
    if "fidelity" in cfg.analyses:
        row["fidelity"] = analysis.fidelity(R, analysis.exact_evolve(psi0, H, t, hs))
    if "self_correlation" in cfg.analyses:
        row["self_correlation"] = analysis.self_correlation(R, psi0)
    if "minmax" in cfg.analyses:
        row["minmax_bound"] = analysis.minmax_bound(
            R, psi0, cfg.minmax_family, half_width=cfg.minmax_half_width,
            points=cfg.minmax_points, refine=cfg.minmax_refine,
        )
    return row


def analyse(cfg: ScenarioConfig, Rs, threads: int = 1) -> list[dict]:
    psi0 = cfg.psi0()
    H = hs = None
    if "fidelity" in cfg.analyses:
        H = fock.symmetrized_hamiltonian(cfg.params, cfg.dim)
        hs = analysis.hermitian_eigen(H)
    args = list(zip(cfg.times, Rs))
    if threads > 1 and len(args) > 1:
        # the compiled eigensolver releases the GIL; map keeps row order
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda tr: _analyse(cfg, psi0, H, hs, *tr), args))
    return [_analyse(cfg, psi0, H, hs, t, R) for t, R in args]


def _kraus_completeness(cfg):
    spec = generator.generator_for(cfg.params, cfg.dim)
    dt = generator.default_step(spec)
    deg = cfg.params.degree
    levels = max(1, cfg.dim - deg)
    res = {}
    for k, h in enumerate((dt, dt / 2)):
        ops = generator.kraus_operators(spec, h)
        res[f"dt{k}"] = {"dt": h, "residual": generator.kraus_completeness(ops, levels)}
    return {"levels": levels, **res}


def _fmt(v):
    return "" if v is None else repr(float(v))


def write_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in COLUMNS])


def _warning_list(caught):
    seen, out = set(), []
    for w in caught:
        item = (w.category.__name__, str(w.message))
        if item not in seen:
            seen.add(item)
            out.append({"category": item[0], "message": item[1]})
    return out


def _manifest(cfg, record, outputs, threads, seedless):
    return {
        "tool": "twakraus",
        "version": record.version,
        "backend": BACKEND_NAME,
        "numpy": np.__version__,
        "config_hash": record.config_hash,
        "config": cfg.to_dict(),
        "status": record.status,
        "error": record.error,
        "columns": list(COLUMNS),
        "rows": len(record.rows),
        "warnings": record.warnings,
        "extras": record.extras,
        "outputs": outputs,
        "threads": threads,
        "seedless": seedless,
    }


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(
    cfg: ScenarioConfig,
    out_dir=None,
    *,
    threads: int = 1,
    seedless: bool = False,
    dump_wigner: bool = False,
    dump_trajectory: bool = False,
) -> RunRecord:
    """Evolve, analyse and persist one scenario.

    Numerical failures are recorded in the manifest before being re-raised.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = RunRecord(cfg.config_hash, __version__, [], [], {})
    outputs = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            Rs = evolve(cfg, extras=record.extras)
            record.rows = analyse(cfg, Rs, threads)
            if "kraus_completeness" in cfg.analyses:
                record.extras["kraus_completeness"] = _kraus_completeness(cfg)
            if dump_wigner:
                for t, R in zip(cfg.times, Rs):
                    name = f"wigner_t{t:.6f}.csv"
                    phasespace.symbol(0.5 * (R + R.conj().T), cfg.grid).to_csv(out / name)
                    outputs.append(name)
            if dump_trajectory:
                pos = classical.trajectory_samples(cfg.params, cfg.center, cfg.times)
                classical.write_trajectory_csv(out / "trajectory.csv", cfg.times, pos)
                outputs.append("trajectory.csv")
        except ArithmeticError as exc:
            record.status, record.error = "failed", f"{type(exc).__name__}: {exc}"
            record.warnings = _warning_list(caught)
            _write_json(out / "manifest.json", _manifest(cfg, record, outputs, threads, seedless))
            raise
        record.warnings = _warning_list(caught)
    write_csv(out / "results.csv", record.rows)
    outputs.insert(0, "results.csv")
    _write_json(out / "manifest.json", _manifest(cfg, record, outputs + ["manifest.json"], threads, seedless))
    return record


def compare_routes(cfg: ScenarioConfig, out_dir=None) -> dict:
    """Max Frobenius distance between phase-space and operator-ODE R(t)."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ps = evolve(cfg, "phase_space")
        op = evolve(cfg, "operator_ode")
    per_t = [float(np.linalg.norm(a - b)) for a, b in zip(ps, op)]
    report = {
        "config_hash": cfg.config_hash,
        "times": [float(t) for t in cfg.times],
        "discrepancy": per_t,
        "max_discrepancy": max(per_t),
        "warnings": _warning_list(caught),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "compare.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "frobenius_discrepancy"])
            for t, d in zip(report["times"], per_t):
                w.writerow([repr(t), repr(d)])
        _write_json(out / "compare.json", report)
    return report


# sweeps


def _set_path(d, dotted, value):
    keys = dotted.split(".")
    cur = d
    for k in keys[:-1]:
        if not isinstance(cur.get(k), dict):
            raise ConfigError(f"sweep key {dotted!r} does not name a nested config entry")
        cur = cur[k]
    cur[keys[-1]] = value


def sweep_cells(raw: dict) -> list[tuple[dict, dict]]:
    sweep = raw.get("sweep") or {}
    if not sweep:
        raise ConfigError("sweep needs a non-empty 'sweep' object")
    keys = sorted(sweep)
    cells = []
    for values in itertools.product(*(sweep[k] for k in keys)):
        cell = copy.deepcopy(raw)
        cell.pop("sweep")
        for k, v in zip(keys, values):
            _set_path(cell, k, v)
        cells.append((cell, dict(zip(keys, values))))
    return cells


def _run_cell(args):
    cell, out_dir, seedless = args
    try:
        with _seedless_guard(seedless):
            cfg = ScenarioConfig.from_dict(cell)
            run(cfg, out_dir, threads=1, seedless=seedless)
        return EXIT_OK, None
    except BaseException as exc:  # reported per cell in the sweep index
        return exit_code_for(exc), f"{type(exc).__name__}: {exc}"


def sweep(raw: dict, out_dir, threads: int = 1, seedless: bool = False) -> int:
    cells = sweep_cells(raw)
    for cell, _ in cells:
        ScenarioConfig.from_dict(cell)
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    jobs = [(cell, str(root / f"cell_{i:03d}"), seedless) for i, (cell, _) in enumerate(cells)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]
    keys = sorted(raw["sweep"])
    with open(root / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell", *keys, "exit_code", "error"])
        for i, ((_, vals), (code, err)) in enumerate(zip(cells, results)):
            w.writerow([f"cell_{i:03d}", *(json.dumps(vals[k]) for k in keys), code, err or ""])
    codes = [c for c, _ in results if c != EXIT_OK]
    return codes[0] if codes else EXIT_OK


# RNG guard


_RNG_NAMES = ("default_rng", "seed", "rand", "randn", "random", "normal", "uniform", "randint", "choice", "shuffle")


@contextlib.contextmanager
def _seedless_guard(active: bool):
    """Make every common RNG entry point raise while active."""
    if not active:
        yield
        return

    def _blocked(*_a, **_k):
        raise RuntimeError("random number generation used in a --seedless run")

    saved = {name: getattr(np.random, name) for name in _RNG_NAMES}
    saved_py = {name: getattr(random, name) for name in ("random", "seed", "uniform", "gauss")}
    try:
        for name in _RNG_NAMES:
            setattr(np.random, name, _blocked)
        for name in saved_py:
            setattr(random, name, _blocked)
        yield
    finally:
        for name, fn in saved.items():
            setattr(np.random, name, fn)
        for name, fn in saved_py.items():
            setattr(random, name, fn)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ArithmeticError):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, (ValueError, KeyError, TypeError)):
        return EXIT_VALIDATION
    return 1


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides output_dir in the config)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker count (default: all cores)")
    common.add_argument("--seedless", action="store_true", help="fail if any random number generator is used")

    p = argparse.ArgumentParser(prog="twakraus", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run one scenario")
    r.add_argument("--config", required=True)
    r.add_argument("--dump-wigner", action="store_true", help="write wigner_t*.csv for every sample time")
    r.add_argument("--dump-trajectory", action="store_true", help="write trajectory.csv for the initial centroid")

    c = sub.add_parser("compare-routes", parents=[common], help="phase-space vs operator-ODE discrepancy")
    c.add_argument("--config", required=True)

    e = sub.add_parser("erratum-report", parents=[common], help="check printed formulas numerically")
    e.add_argument("--config", help="optional; only its dim is used")
    e.add_argument("--dim", type=int, default=16)

    s = sub.add_parser("sweep", parents=[common], help="cartesian parameter sweep, one run per cell")
    s.add_argument("--config", required=True)
    return p


def _main(args) -> int:
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    if args.command == "erratum-report":
        dim = args.dim
        if args.config:
            dim = _int(load_config(args.config).get("dim", dim), "dim", 6)
        findings = errata.erratum_report(dim)
        text = errata.render(findings)
        print(text)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "erratum_report.txt").write_text(text + "\n")
            _write_json(out / "erratum_report.json", [f.as_dict() for f in findings])
        return EXIT_OK
    raw = load_config(args.config)
    if args.command == "sweep":
        out = args.out or raw.get("output_dir", "twakraus_out")
        return sweep(raw, out, args.threads, args.seedless)
    cfg = ScenarioConfig.from_dict(raw)
    if args.command == "compare-routes":
        rep = compare_routes(cfg, args.out or cfg.output_dir)
        for t, d in zip(rep["times"], rep["discrepancy"]):
            print(f"t={t:.6g}  ||R_phase_space - R_operator||_F = {d:.3e}")
        print(f"max discrepancy {rep['max_discrepancy']:.3e}")
        return EXIT_OK
    rec = run(
        cfg, args.out, threads=args.threads, seedless=args.seedless,
        dump_wigner=args.dump_wigner, dump_trajectory=args.dump_trajectory,
    )
    for w in rec.warnings:
        print(f"warning: {w['category']}: {w['message']}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        with _seedless_guard(args.seedless):
            return _main(args)
    except Exception as exc:
        code = exit_code_for(exc)
        if code == 1:
            raise
        kind = {EXIT_VALIDATION: "invalid input", EXIT_NUMERICAL: "numerical failure", EXIT_IO: "I/O failure"}[code]
        print(f"twakraus: {kind}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())

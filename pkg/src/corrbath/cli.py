"""Command-line front end.

    corrbath <subcommand> --config run.toml [--out DIR] [--tol X] [--threads N]

The config is TOML with an optional top-level ``subcommand`` and the tables
``[model]``, ``[numeric]`` and ``[output]``. Unknown keys are errors. Every
run writes one table per observable family plus ``manifest.json``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, dynamics, kernels, linalg, measures, scans, spectra, validation
from .errors import CapacityError, ConvergenceError, NumericalQualityError, ShapeError, StructuralError, ValidationError
from .liouvillian import assemble_liouvillian
from .model import MAX_SPINS, ModelSpec, alpha_matrix, alpha_of, rates_from_spec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("corrbath")

SUBCOMMANDS = ("spectrum", "evolve", "steady", "sweep-temperature", "entropy-scan", "validate")
OUT_ENV = "CORRBATH_OUT"
DEFAULT_OUT = "corrbath-out"
SCHEMA_VERSION = 1

# column schemas, versioned together through SCHEMA_VERSION
SCHEMAS = {
    "eigenvalues": ("alpha", "re_lambda", "im_lambda", "is_zero_mode"),
    "spectrum_summary": ("alpha", "zero_modes", "adr", "relaxation_rate", "steady_states", "superop_norm"),
    "trajectory": ("t", "mz", "mzz", "mc", "trace_defect", "min_eig", "concurrence", "entropy", "purity"),
    "bloch": ("t", "mz", "mzz", "mc"),
    "steady_states": ("index", "kind", "mz", "mzz", "mc", "concurrence", "entropy", "purity", "min_eig"),
    "sweep_temperature": (
        "T", "beta", "alpha", "m0", "mz", "mzz", "mc", "concurrence", "entropy", "purity", "trace", "min_eig",
        "full_mismatch", "dmz_dT", "dmzz_dT", "dmc_dT",
    ),
    "entropy": ("n", "alpha", "entropy", "purity", "relax_time", "residual", "min_eig", "trace_defect"),
    "validate": ("check", "passed", "value", "threshold"),
}

_FLOAT, _INF_FLOAT, _INT, _STR, _FLOATS, _INTS, _VECTORS = "float", "float|inf", "int", "str", "floats", "ints", "vectors"

MODEL_KEYS = {
    "n_spins": _INT,
    "omega0": _FLOAT,
    "beta": _INF_FLOAT,
    "temperature": _FLOAT,
    "r1": _FLOAT,
    "bath_spacing": _FLOAT,
    "bath_hopping": _FLOAT,
    "positions": _FLOATS,
    "uniform_separation": _FLOAT,
    "alpha_override": _FLOAT,
    "lamb_j0": _FLOAT,
    "lamb_k0": _FLOAT,
}
NUMERIC_KEYS = {
    "tol": _FLOAT,
    "tol_abs": _FLOAT,
    "t_final": _FLOAT,
    "dt": _FLOAT,
    "alphas": _FLOATS,
    "temperatures": _FLOATS,
    "t0": _FLOAT,
    "k_max": _INT,
    "include_zero": "bool",
    "n_grid": _INTS,
    "entropy_alphas": _FLOATS,
    "initial": _STR,
    "bloch_x0": _FLOATS,
    "bloch_vectors": _VECTORS,
    "relax_tol": _FLOAT,
    "threads": _INT,
}
OUTPUT_KEYS = {"directory": _STR, "format": _STR, "precision": _INT}
SECTIONS = {"model": MODEL_KEYS, "numeric": NUMERIC_KEYS, "output": OUTPUT_KEYS}


@dataclass
class NumericConfig:
    tol: float = spectra.TOL_REL
    tol_abs: float = spectra.TOL_ABS
    t_final: float | None = None
    dt: float | None = None
    alphas: list | None = None
    temperatures: list | None = None
    t0: float | None = None
    k_max: int = 12
    include_zero: bool = True
    n_grid: list = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    entropy_alphas: list = field(default_factory=lambda: [1.0, 0.5])
    initial: str | None = None
    bloch_x0: list | None = None
    bloch_vectors: list | None = None
    relax_tol: float = 1e-12
    threads: int = 1


@dataclass
class OutputConfig:
    directory: str | None = None
    format: str = "csv"
    precision: int = 12


@dataclass
class RunConfig:
    subcommand: str | None
    model: ModelSpec
    numeric: NumericConfig = field(default_factory=NumericConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    source: str | None = None

    def echo(self):
        """JSON-safe dict that :func:`config_from_dict` turns back into this config."""
        model = {k: v for k, v in asdict(self.model).items() if v is not None}
        if "positions" in model:
            model["positions"] = list(model["positions"])
        model["beta"] = _json_number(model["beta"])
        numeric = {k: v for k, v in asdict(self.numeric).items() if v is not None}
        output = {k: v for k, v in asdict(self.output).items() if v is not None}
        return {"subcommand": self.subcommand, "model": model, "numeric": numeric, "output": output}


# ---------------------------------------------------------------------------
# config parsing


def _key_lines(text):
    """Map ``section.key`` to the 1-based line where it is assigned."""
    lines, section = {}, ""
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[\s*([A-Za-z0-9_.-]+)\s*\]", line)
        if m:
            section = m.group(1)
            continue
        m = re.match(r"^([A-Za-z0-9_-]+)\s*=", line)
        if m:
            lines.setdefault(f"{section}.{m.group(1)}" if section else m.group(1), k)
    return lines


def _coerce(kind, value):
    """Return ``(value, error)`` for one config entry."""
    if kind == "bool":
        return (value, None) if isinstance(value, bool) else (None, "expected true or false")
    if kind in (_FLOAT, _INF_FLOAT):
        if kind == _INF_FLOAT and isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf, None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return None, f"expected a number, got {value!r}"
        value = float(value)
        if math.isnan(value) or (kind == _FLOAT and math.isinf(value)):
            return None, f"expected a finite number, got {value!r}"
        return value, None
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            return None, f"expected an integer, got {value!r}"
        return value, None
    if kind == _STR:
        return (value, None) if isinstance(value, str) else (None, f"expected a string, got {value!r}")
    if kind in (_FLOATS, _INTS):
        if not isinstance(value, list):
            return None, f"expected an array, got {value!r}"
        item = _FLOAT if kind == _FLOATS else _INT
        out = []
        for v in value:
            c, err = _coerce(item, v)
            if err:
                return None, f"array element {v!r}: {err}"
            out.append(c)
        return out, None
    if kind == _VECTORS:
        if not isinstance(value, list) or not all(isinstance(v, list) and len(v) == 3 for v in value):
            return None, "expected an array of [x, y, z] Bloch vectors"
        out = []
        for v in value:
            c, err = _coerce(_FLOATS, v)
            if err:
                return None, err
            out.append(c)
        return out, None
    raise AssertionError(kind)


def config_from_dict(data, *, text=None, source=None):
    """Validate a config mapping; raises :class:`ValidationError` listing every problem."""
    lines = _key_lines(text) if text else {}
    errors = []

    def report(key, message):
        where = f"line {lines[key]}: " if key in lines else ""
        errors.append(f"{where}{key}: {message}")

    for key in data:
        if key != "subcommand" and key not in SECTIONS:
            report(key, "unknown key")
    subcommand = data.get("subcommand")
    if subcommand is not None and subcommand not in SUBCOMMANDS:
        report("subcommand", f"must be one of {', '.join(SUBCOMMANDS)}, got {subcommand!r}")

    parsed = {}
    for section, schema in SECTIONS.items():
        block = data.get(section, {})
        if not isinstance(block, dict):
            report(section, "expected a table")
            block = {}
        parsed[section] = {}
        for key, value in block.items():
            name = f"{section}.{key}"
            if key not in schema:
                report(name, "unknown key")
                continue
            coerced, err = _coerce(schema[key], value)
            if err:
                report(name, err)
            else:
                parsed[section][key] = coerced

    model = parsed["model"]
    if "model" not in data:
        report("model", "missing [model] table")
    if ("beta" in model) == ("temperature" in model):
        report("model.beta", "exactly one of beta or temperature is required")
    if "temperature" in model:
        t = model.pop("temperature")
        if t < 0:
            report("model.temperature", f"must be >= 0, got {t!r}")
        else:
            model["beta"] = math.inf if t == 0 else 1.0 / t
    geometry = ("positions" in model) or ("uniform_separation" in model)
    if not geometry and "alpha_override" not in model:
        # the both-present case is reported by ModelSpec itself
        report("model.alpha_override", "one of geometry (positions or uniform_separation) or alpha_override is required")
    n = model.get("n_spins", 2)
    if isinstance(n, int) and n > MAX_SPINS:
        report("model.n_spins", f"capacity is {MAX_SPINS} spins, got {n}")

    spec = None
    if isinstance(n, int) and n <= MAX_SPINS:
        try:
            spec = ModelSpec(**model)
        except ValidationError as exc:
            for msg in exc.errors:
                field_name, _, rest = msg.partition(":")
                if rest and field_name in MODEL_KEYS:
                    report(f"model.{field_name}", rest.strip())
                else:
                    report("model", msg)

    num = parsed["numeric"]
    for key in ("tol", "tol_abs", "t_final", "dt", "relax_tol", "t0"):
        if key in num and not num[key] > 0:
            report(f"numeric.{key}", f"must be > 0, got {num[key]!r}")
    if "threads" in num and num["threads"] < 1:
        report("numeric.threads", "must be >= 1")
    if "k_max" in num and num["k_max"] < 0:
        report("numeric.k_max", "must be >= 0")
    for key in ("alphas", "entropy_alphas"):
        if any(not 0.0 <= a <= 1.0 for a in num.get(key, [])):
            report(f"numeric.{key}", "values must lie in [0, 1]")
    if any(t <= 0 for t in num.get("temperatures", [])):
        report("numeric.temperatures", "values must be > 0 (T = 0 is controlled by include_zero)")
    if any(not 1 <= k <= MAX_SPINS for k in num.get("n_grid", [])):
        report("numeric.n_grid", f"values must lie in 1..{MAX_SPINS}")
    if "initial" in num and num["initial"] not in dynamics.PRESETS:
        report("numeric.initial", f"must be one of {', '.join(dynamics.PRESETS)}")
    if "bloch_x0" in num:
        if len(num["bloch_x0"]) != 3:
            report("numeric.bloch_x0", "expected [mz, mzz, mc]")
        else:
            try:
                dynamics.BlochState.from_array(num["bloch_x0"])
            except ValidationError as exc:
                report("numeric.bloch_x0", "; ".join(exc.errors))

    out = parsed["output"]
    if out.get("format", "csv") not in ("csv", "json"):
        report("output.format", f"must be csv or json, got {out['format']!r}")
    if "precision" in out and not 1 <= out["precision"] <= 17:
        report("output.precision", "must lie in 1..17")

    if errors:
        raise ValidationError(errors)
    return RunConfig(subcommand, spec, NumericConfig(**num), OutputConfig(**out), source)


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError([f"{path}: config file not found"]) from None
    except OSError as exc:
        raise ValidationError([f"{path}: cannot read config ({exc.strerror})"]) from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError([f"{path}: syntax error: {exc}"]) from None
    try:
        return config_from_dict(data, text=text, source=str(path))
    except ValidationError as exc:
        raise ValidationError([f"{path}: {e}" for e in exc.errors]) from None


# ---------------------------------------------------------------------------
# table output


def _json_number(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def format_cell(value, precision=12):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return ""
    # drop the sign of zero so identical runs on different paths print identically
    return format(value + 0.0, f".{precision}g")


def parse_cell(text):
    if text == "":
        return math.nan
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def schema_tag(name):
    return f"corrbath.{name}/v{SCHEMA_VERSION}"


def write_table(directory, name, rows, *, fmt="csv", precision=12):
    """Write ``rows`` under the registered schema ``name``; returns the file path."""
    columns = SCHEMAS[name]
    for row in rows:
        if len(row) != len(columns):
            raise ShapeError(f"{name}: row has {len(row)} cells, schema has {len(columns)}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = directory / f"{name}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# schema: {schema_tag(name)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_cell(v, precision) for v in row])
        return path
    path = directory / f"{name}.json"
    body = {
        "schema": schema_tag(name),
        "columns": list(columns),
        "rows": [[_json_cell(v, precision) for v in row] for row in rows],
    }
    path.write_text(json.dumps(body, indent=1) + "\n", encoding="utf-8")
    return path


def _json_cell(value, precision):
    cell = parse_cell(format_cell(value, precision))
    if isinstance(cell, float):
        if math.isnan(cell):
            return None
        return _json_number(cell)
    return cell


def read_table(path):
    """Inverse of :func:`write_table`: ``(schema, columns, rows)``."""
    path = Path(path)
    if path.suffix == ".json":
        body = json.loads(path.read_text(encoding="utf-8"))
        rows = [
            tuple(math.nan if v is None else (float(v) if v in ("inf", "-inf") else v) for v in row)
            for row in body["rows"]
        ]
        return body["schema"], tuple(body["columns"]), rows
    with path.open(newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("# schema: "):
            raise ValidationError([f"{path}: missing schema header"])
        reader = csv.reader(fh)
        columns = tuple(next(reader))
        rows = [tuple(parse_cell(c) for c in row) for row in reader]
    return first[len("# schema: "):].strip(), columns, rows


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# subcommands


def _initial_rho(cfg, n, default):
    num, spec = cfg.numeric, cfg.model
    if num.bloch_x0 is not None:
        if n != 2:
            raise ValidationError(["numeric.bloch_x0: only meaningful for two spins"])
        return dynamics.x_state_from_bloch(dynamics.BlochState.from_array(num.bloch_x0)), "bloch_x0"
    preset = num.initial or default
    rho = dynamics.initial_state(preset, n, omega0=spec.omega0, beta=spec.beta, vectors=num.bloch_vectors)
    return rho, preset


def _pair_alpha(spec):
    return alpha_of(spec, 0, 1) if spec.n_spins >= 2 else math.nan


def _state_row(rho):
    x = dynamics.bloch_observables(rho)
    c = measures.concurrence(rho) if rho.shape == (4, 4) else math.nan
    return (x.mz, x.mzz, x.mc, c, measures.von_neumann_entropy(rho), measures.purity(rho),
            float(np.linalg.eigvalsh(rho)[0]))


def run_spectrum(cfg, out):
    spec, num = cfg.model, cfg.numeric
    if num.alphas:
        rows, reports = scans.spectrum_cloud(spec, num.alphas, threads=num.threads, tol_abs=num.tol_abs, tol_rel=num.tol)
        alphas = list(num.alphas)
    else:
        reports = [spectra.analyze(assemble_liouvillian(spec), num.tol_abs, num.tol)]
        alphas = [_pair_alpha(spec)]
        rows = reports[0].rows(alphas[0])
    pair_matrix = None if num.alphas else alpha_matrix(spec).tolist()
    summary = [
        (a, r.zero_mode_count, r.adr, r.relaxation_rate, len(r.steady_states), r.superop_norm)
        for a, r in zip(alphas, reports)
    ]
    files = [out("eigenvalues", rows), out("spectrum_summary", summary)]
    diag = {"zero_cutoff": [r.tol_used for r in reports], "trace_sum_defect": max(r.trace_sum_defect for r in reports)}
    if pair_matrix is not None:
        diag["alpha_matrix"] = pair_matrix
    return files, diag


def _time_grid(cfg):
    r1 = cfg.model.r1
    t_final = cfg.numeric.t_final if cfg.numeric.t_final is not None else 20.0 / r1
    dt = cfg.numeric.dt if cfg.numeric.dt is not None else 0.1 / r1
    steps = max(1, int(round(t_final / dt)))
    return np.linspace(0.0, t_final, steps + 1)


def run_evolve(cfg, out):
    spec = cfg.model
    bundle = assemble_liouvillian(spec)
    rho0, label = _initial_rho(cfg, spec.n_spins, "all-up")
    times = _time_grid(cfg)
    traj = dynamics.evolve_full(bundle, rho0, times)
    traj.check_positivity()
    rows = []
    for t, rho in zip(times, traj.states):
        mz, mzz, mc, c, s, p, min_eig = _state_row(linalg.hermitian_part(rho))
        rows.append((t, mz, mzz, mc, abs(np.trace(rho) - 1.0), min_eig, c, s, p))
    files = [out("trajectory", rows)]
    diag = {k: v for k, v in traj.diagnostics.items()}
    diag["initial_state"] = label
    if spec.n_spins == 2:
        rates = rates_from_spec(spec)
        x0 = dynamics.bloch_observables(rho0)
        reduced = dynamics.evolve_bloch(rates, _pair_alpha(spec), x0, times).observables()
        files.append(out("bloch", [(t, *x) for t, x in zip(times, reduced)]))
        full = np.array([r[1:4] for r in rows])
        diag["reduced_full_mismatch"] = float(np.max(np.abs(full - reduced)))
    return files, diag


def run_steady(cfg, out):
    spec, num = cfg.model, cfg.numeric
    bundle = assemble_liouvillian(spec)
    report = spectra.analyze(bundle, num.tol_abs, num.tol)
    rows = [(k, "kernel", *_state_row(rho)) for k, rho in enumerate(report.steady_states)]
    rho0, label = _initial_rho(cfg, spec.n_spins, "all-up")
    limit = spectra.physical_state(spectra.project_to_kernel(bundle, rho0))
    rows.append((len(rows), f"limit:{label}", *_state_row(limit)))
    diag = {"zero_modes": report.zero_mode_count, "adr": report.adr, "initial_state": label}
    if spec.n_spins == 2:
        rates = rates_from_spec(spec)
        x = dynamics.bloch_steady_state(rates, _pair_alpha(spec), dynamics.bloch_observables(rho0))
        diag["reduced_full_mismatch"] = float(np.max(np.abs(np.array(rows[-1][2:5]) - x.as_array())))
    return [out("steady_states", rows)], diag


def run_sweep_temperature(cfg, out):
    spec, num = cfg.model, cfg.numeric
    if num.temperatures:
        temps = num.temperatures
    else:
        temps = scans.geometric_temperatures(num.t0 if num.t0 is not None else abs(spec.omega0) or 1.0, num.k_max)
    if num.bloch_x0 is not None:
        initial = dynamics.BlochState.from_array(num.bloch_x0)
    else:
        initial = num.initial or "mixed"
    result = scans.temperature_sweep(spec, temps, initial=initial, include_zero=num.include_zero)
    return [out("sweep_temperature", result.rows())], result.metadata


def run_entropy_scan(cfg, out):
    num = cfg.numeric
    result = scans.entropy_vs_n(cfg.model, num.n_grid, num.entropy_alphas, preset=num.initial or "all-up", threads=num.threads)
    return [out("entropy", result.rows())], result.metadata


def run_validate(cfg, out):
    rates = rates_from_spec(cfg.model)
    results = validation.run_suite(m0=rates.m0, r1=rates.r1)
    rows = [(r.name, r.passed, r.value, r.threshold) for r in results]
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.value:.3e}  (threshold {r.threshold:.1e})")
    failed = [r.name for r in results if not r.passed]
    return [out("validate", rows)], {"failed": failed}


RUNNERS = {
    "spectrum": run_spectrum,
    "evolve": run_evolve,
    "steady": run_steady,
    "sweep-temperature": run_sweep_temperature,
    "entropy-scan": run_entropy_scan,
    "validate": run_validate,
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else _json_number(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run(cfg, out_dir):
    """Execute ``cfg`` and write its tables plus ``manifest.json``; returns the exit code."""
    out_dir = Path(out_dir)
    start = time.perf_counter()
    fmt, precision = cfg.output.format, cfg.output.precision

    def out(name, rows):
        return write_table(out_dir, name, rows, fmt=fmt, precision=precision)

    files, diag = RUNNERS[cfg.subcommand](cfg, out)
    code = 2 if diag.get("failed") else 0
    manifest = {
        "artifact": "corrbath",
        "version": __version__,
        "subcommand": cfg.subcommand,
        "config": cfg.echo(),
        "backend": kernels.backend_name(),
        "files": [{"name": p.name, "schema": schema_tag(p.stem), "sha256": _sha256(p)} for p in files],
        "wall_clock_seconds": time.perf_counter() - start,
        "tolerances": {"tol_rel": cfg.numeric.tol, "tol_abs": cfg.numeric.tol_abs, "relax_tol": cfg.numeric.relax_tol},
        "diagnostics": diag,
        "exit_code": code,
    }
    (out_dir / "manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2) + "\n", encoding="utf-8")
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="corrbath", description=__doc__.split("\n")[0])
    p.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS, help="overrides `subcommand` in the config")
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--out", help=f"output directory (default: output.directory, ${OUT_ENV}, or ./{DEFAULT_OUT})")
    p.add_argument("--tol", type=float, help="relative zero-mode tolerance (times ||L||)")
    p.add_argument("--threads", type=int, help="worker threads for sweeps")
    p.add_argument("--format", choices=("csv", "json"), help="table format")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"corrbath {__version__}")
    return p


def _default_config():
    return RunConfig(subcommand=None, model=ModelSpec(n_spins=2, alpha_override=1.0))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            cfg = parse_config(args.config)
        elif args.subcommand == "validate":
            cfg = _default_config()
        else:
            raise ValidationError(["--config is required for this subcommand"])
        cfg.subcommand = args.subcommand or cfg.subcommand
        if cfg.subcommand is None:
            raise ValidationError(["no subcommand given on the command line or in the config"])
        problems = []
        if args.tol is not None:
            if not args.tol > 0:
                problems.append("--tol: must be > 0")
            cfg.numeric.tol = args.tol
        if args.threads is not None:
            if args.threads < 1:
                problems.append("--threads: must be >= 1")
            cfg.numeric.threads = args.threads
        if args.format:
            cfg.output.format = args.format
        if problems:
            raise ValidationError(problems)
        out_dir = args.out or cfg.output.directory or os.environ.get(OUT_ENV) or DEFAULT_OUT
        code = run(cfg, out_dir)
    except (ValidationError, CapacityError, ShapeError) as exc:
        for line in getattr(exc, "errors", None) or [str(exc)]:
            print(f"error: {line}", file=sys.stderr)
        return 1
    except (NumericalQualityError, StructuralError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    if code == 0:
        print(f"wrote {out_dir}/manifest.json")
    return code


if __name__ == "__main__":
    sys.exit(main())

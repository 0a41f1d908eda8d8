"""Command-line front end: one seeded, reproducible experiment per invocation.

Every command is described by a parameter schema.  The schema drives the
argparse subcommands, validation of JSON config files and the ``list``
catalog, so the three can never disagree.

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.
"""

import argparse
import difflib
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, synthesis, vortex, weakvalue
from .exceptions import SuperoscError
from .io import dumps, field_to_csv
from .signal import BandLimitedSpectrum, SampledField, check_seed

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
FORMATS = ("csv", "json")
TOP_LEVEL_KEYS = {"command", "parameters", "seed", "output", "name"}
REQUIRED = object()


class ConfigError(Exception):
    """Invalid experiment configuration (exit code 2)."""


# -- parameter types ------------------------------------------------------------------


def _number(v, name):
    if isinstance(v, bool):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {v!r}") from None
    if not np.isfinite(x):
        raise ConfigError(f"{name}: value must be finite, got {v!r}")
    return x


def _integer(v, name):
    x = _number(v, name)
    if not x.is_integer():
        raise ConfigError(f"{name}: expected an integer, got {v!r}")
    return int(x)


def _range(v, name):
    parts = v.split(":") if isinstance(v, str) else list(v)
    if len(parts) != 3:
        raise ConfigError(f"{name}: expected lo:hi:step, got {v!r}")
    lo, hi, step = (_number(p, name) for p in parts)
    if not (hi > lo and step > 0):
        raise ConfigError(f"{name}: need hi > lo and step > 0, got {v!r}")
    return [lo, hi, step]


def _pairs(v, name):
    items = [p.split(":") for p in v.split(",") if p.strip()] if isinstance(v, str) else list(v)
    out = []
    for item in items:
        if len(item) != 2:
            raise ConfigError(f"{name}: expected t:A pairs, got {item!r}")
        out.append([_number(item[0], name), _number(item[1], name)])
    if not out:
        raise ConfigError(f"{name}: at least one pair required")
    return out


def _complex(v, name):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return [_number(v[0], name), _number(v[1], name)]
    try:
        z = complex(str(v).replace(" ", "")) if isinstance(v, str) else complex(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a complex number, got {v!r}") from None
    return [z.real, z.imag]


def _vector(v, name):
    items = v.split(",") if isinstance(v, str) else list(v)
    if not items:
        raise ConfigError(f"{name}: empty vector")
    return [_complex(x, name) for x in items]


def _matrix(v, name):
    rows = [r for r in v.split(";")] if isinstance(v, str) else list(v)
    out = [_vector(r, name) for r in rows]
    if any(len(r) != len(out) for r in out):
        raise ConfigError(f"{name}: matrix must be square")
    return out


def _components(v, name):
    items = [p.split(":") for p in v.split(",") if p.strip()] if isinstance(v, str) else list(v)
    out = []
    for item in items:
        if len(item) == 2 and not isinstance(item[1], (list, tuple)):
            out.append([_number(item[0], name), _number(item[1], name), 0.0])
        elif len(item) == 3:
            out.append([_number(x, name) for x in item])
        else:
            raise ConfigError(f"{name}: expected k:re[:im] components, got {item!r}")
    if not out:
        raise ConfigError(f"{name}: at least one component required")
    return out


def _floats(v, name):
    if isinstance(v, str) and ":" in v:
        lo, hi, step = _range(v, name)
        return grid_from_range([lo, hi, step]).tolist()
    items = v.split(",") if isinstance(v, str) else list(v)
    return [_number(x, name) for x in items]


def _boolean(v, name):
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("true", "false", "1", "0", "yes", "no"):
        return v.lower() in ("true", "1", "yes")
    raise ConfigError(f"{name}: expected a boolean, got {v!r}")


PARSERS = {
    "float": _number, "int": _integer, "range": _range, "pairs": _pairs,
    "vector": _vector, "matrix": _matrix, "components": _components,
    "floats": _floats, "bool": _boolean,
}


def P(kind, help, default=REQUIRED, example=None, choices=None):
    spec = {"type": kind, "help": help}
    if default is not REQUIRED:
        spec["default"] = default
    if example is not None:
        spec["example"] = example
    if choices:
        spec["choices"] = list(choices)
    return spec


def grid_from_range(r):
    lo, hi, step = r
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _to_complex(v):
    return np.array([complex(re, im) for re, im in v])


# -- experiments ----------------------------------------------------------------------


def _f(v):
    return repr(float(v))


def _regions(regions):
    return [{"lo": r.lo, "hi": r.hi, "singular": r.singular} for r in regions]


def _scan_csv(table):
    lines = ["x,re,im,k,is_super"]
    for x, re, im, k, sup in table:
        lines.append(",".join(map(_f, (x, re, im, k))) + f",{int(sup)}")
    return "\n".join(lines) + "\n"


def run_synth_elementary(p, seed, threads):
    so = synthesis.elementary_so(p["a"], p["N"])
    x = grid_from_range(p["scan"])
    spec = so.spectrum
    regions = analysis.detect_so_regions(so, x, p["kmax"], dpsi=so.derivative)
    record = {
        "spectrum": {"k": spec.wavenumbers, "c": spec.coefficients.real,
                     "band_limit": spec.band_limit},
        "metrics": {"local_wavenumber_at_0": float(so.log_derivative(0.0).imag),
                    "period": so.period},
        "regions": _regions(regions),
    }
    table = analysis.scan_table(so, x, p["kmax"], dpsi=so.derivative)
    return record, lambda: _scan_csv(table)


def run_synth_gaussian(p, seed, threads):
    x = grid_from_range(p["scan"])
    res = synthesis.synthesize_gaussian(p["L"], x, kernel=p["kernel"], delta=p["delta"],
                                        order=p["order"], rtol=p["rtol"])
    record = {"metrics": {"window": list(res.window),
                          "in_window_amplitude": res.in_window_amplitude,
                          "sidelobe_amplitude": res.sidelobe_amplitude,
                          "sidelobe_ratio": res.sidelobe_ratio}}
    return record, lambda: field_to_csv(res.field)


def run_synth_interp(p, seed, threads):
    pts = np.array(p["points"])
    est = synthesis.min_energy_interpolant(pts, p["mu"], ridge=p["ridge"])
    record = est.to_record()
    record["metrics"]["energy_quadrature"] = est.spectral_energy()
    record["metrics"]["max_residual"] = float(np.max(np.abs(est.predict(pts[:, 0]) - pts[:, 1])))

    def csv():
        rows = ["t_k,a_k"] + [f"{_f(t)},{_f(a)}" for t, a in zip(est.knots_, est.coef_)]
        return "\n".join(rows) + "\n"

    return record, csv


def run_synth_yield(p, seed, threads):
    est = synthesis.optimize_yield(np.array(p["constraints"]), p["a"], p["N"], ridge=p["ridge"])
    record = est.to_record()
    record["metrics"]["projected_gradient_norm"] = est.projected_gradient_norm()

    def csv():
        rows = ["n,b_n"] + [f"{n},{_f(b)}" for n, b in enumerate(est.coef_)]
        return "\n".join(rows) + "\n"

    return record, csv


def run_analyze_scan(p, seed, threads):
    comps = np.array(p["components"])
    spec = BandLimitedSpectrum(comps[:, 0], comps[:, 1] + 1j * comps[:, 2],
                               np.max(np.abs(comps[:, 0])))
    x = grid_from_range(p["scan"])
    regions = analysis.detect_so_regions(spec, x, p["kmax"], dpsi=spec.derivative)
    table = analysis.scan_table(spec, x, p["kmax"], dpsi=spec.derivative)
    return {"regions": _regions(regions)}, lambda: _scan_csv(table)


def run_analyze_random_wave(p, seed, threads):
    res = analysis.so_fraction_mc(p["D"], p["terms"], p["k0"], p["samples"], seed,
                                  threads=threads)
    record = {"D": p["D"], "N_terms": p["terms"], "samples": res.samples,
              "estimate": res.estimate, "stderr": res.stderr,
              "closed_form": analysis.so_fraction_closed(p["D"]), "seed": seed}
    return record, None


def run_weak_value(p, seed, threads):
    if p["particles"]:
        n = p["particles"]
        aw = weakvalue.collective_spin_weak_value(n)
        record = {"A_w": complex(aw),
                  "metrics": {"particles": n, "eigenvalue_bound": n / 2,
                              "outside_spectrum": bool(aw > n / 2)}}
        return record, None
    for key in ("pre", "post", "operator"):
        if p[key] is None:
            raise ConfigError(f"weak-value: '{key}' is required unless 'particles' is given")
    op = weakvalue.HermitianOperator(np.array([_to_complex(r) for r in p["operator"]]))
    tsv = weakvalue.TwoStateVector.from_unnormalized(_to_complex(p["pre"]), _to_complex(p["post"]))
    aw = weakvalue.weak_value(tsv, op)
    record = {"A_w": aw, "metrics": {
        "overlap_abs": abs(tsv.overlap),
        "expectation_pre": weakvalue.expectation(op, tsv.pre),
        "a_min": op.a_min, "a_max": op.a_max,
        "outside_spectrum": bool(aw.real > op.a_max or aw.real < op.a_min),
    }}
    return record, None


def run_pointer_sim(p, seed, threads):
    op, tsv, rows = weakvalue.fig5_sweep(p["widths"], target=p["target"], coupling=p["coupling"],
                                         q_extent=p["q_extent"], spacing=p["spacing"])
    errs = [r["supershift_error"] for r in rows]
    aw = weakvalue.weak_value(tsv, op)
    record = {"A_w": aw, "metrics": {
        "sweep": [{k: v for k, v in r.items() if k != "state"} for r in rows],
        "strictly_decreasing": bool(np.all(np.diff(errs) < 0)),
        "peak_ratio_last_first": rows[-1]["peak_amplitude"] / rows[0]["peak_amplitude"],
        "momentum_shift": 2 * p["coupling"] * aw.imag * weakvalue.pointer_momentum_variance(
            rows[-1]["width"]),
    }}
    return record, lambda: field_to_csv(rows[-1]["state"].field,
                                        comments=[f"pointer width {rows[-1]['width']!r}"])


def run_spin_tails(p, seed, threads):
    res = weakvalue.spin_tail_mc(p["threshold"], p["samples"], seed, modulus=p["modulus"])
    record = {"estimate": res.estimate, "stderr": res.stderr, "samples": res.samples,
              "seed": seed, "convention": "modulus" if p["modulus"] else "real_part"}
    if not p["modulus"]:
        record["exact"] = float(weakvalue.spin_tail_exact(p["threshold"]))
    return record, None


def run_vortex_kick(p, seed, threads):
    probe = vortex.VortexProbe(p["m"], p["k0"], p["sigma"], p["x0"])
    record = vortex.summary(probe)
    record["oracle_l1"] = vortex.oracle_l1(probe, p["n"])

    def csv():
        fft = vortex.superkick_fft_oracle(probe, p["n"])
        kx, ky = np.meshgrid(*fft.axes(), indexing="ij")
        dens = vortex.transverse_density(probe, kx, ky)
        rows = ["k_x,k_y,density"] + [f"{_f(a)},{_f(b)},{_f(c)}"
                                      for a, b, c in zip(kx.ravel(), ky.ravel(), dens.ravel())]
        return "\n".join(rows) + "\n"

    return record, csv


COMMANDS = {
    "synth-elementary": {
        "help": "elementary superoscillation (cos(x/N) + i a sin(x/N))^N with a 1-D scan",
        "params": {
            "a": P("float", "speed factor a >= 1", example=4.0),
            "N": P("int", "order N", example=20),
            "scan": P("range", "scan grid lo:hi:step", "-2:2:0.001"),
            "kmax": P("float", "wavenumber threshold", 1.0),
        },
        "formats": FORMATS, "default_format": "csv", "run": run_synth_elementary,
    },
    "synth-gaussian": {
        "help": "kernel-based superoscillatory synthesis of a narrow Gaussian",
        "params": {
            "L": P("float", "target Gaussian width", 0.25),
            "delta": P("float", "Helmholtz kernel parameter", 0.005),
            "kernel": P("str", "synthesis kernel", "helmholtz",
                        choices=("helmholtz", "elementary", "plane")),
            "order": P("int", "order of the elementary kernel", 20),
            "scan": P("range", "x grid lo:hi:step", "-20:20:0.02"),
            "rtol": P("float", "relative error defining the window", 0.05),
        },
        "formats": FORMATS, "default_format": "json", "run": run_synth_gaussian,
    },
    "synth-interp": {
        "help": "minimum-energy band-limited interpolant through t:A points",
        "params": {
            "points": P("pairs", "interpolation points t:A,...", example="0:0,0.1:1,0.2:0"),
            "mu": P("float", "band limit (function limited to mu/2 Hz)", 1.0),
            "ridge": P("float", "optional Tikhonov term", 0.0),
        },
        "formats": FORMATS, "default_format": "json", "run": run_synth_interp,
    },
    "synth-yield": {
        "help": "cosine series through t:A constraints maximizing the energy yield in [-a, a]",
        "params": {
            "a": P("float", "half-width of the superoscillatory interval, 0 < a <= pi",
                   example=0.5),
            "N": P("int", "highest harmonic", example=4),
            "constraints": P("pairs", "constraints t:A,...", example="0:0,0.25:1"),
            "ridge": P("float", "optional denominator ridge", 0.0),
        },
        "formats": FORMATS, "default_format": "json", "run": run_synth_yield,
    },
    "analyze-scan": {
        "help": "superoscillatory regions of a discrete spectrum sum_m c_m exp(i k_m x)",
        "params": {
            "components": P("components", "k:re[:im],...", example="1:1,-1:0.5"),
            "kmax": P("float", "wavenumber threshold", example=1.0),
            "scan": P("range", "scan grid lo:hi:step", "-4:4:0.01"),
        },
        "formats": FORMATS, "default_format": "csv", "run": run_analyze_scan,
    },
    "analyze-random-wave": {
        "help": "Monte Carlo superoscillation probability of random monochromatic waves",
        "params": {
            "D": P("int", "dimension", example=2),
            "terms": P("int", "number of plane waves", 400),
            "k0": P("float", "wavenumber", 1.0),
            "samples": P("int", "number of sample points", 1000000),
        },
        "formats": ("json",), "default_format": "json", "run": run_analyze_random_wave,
    },
    "weak-value": {
        "help": "weak value <f|A|i>/<f|i> of a finite-dimensional observable",
        "params": {
            "pre": P("vector", "pre-selection (normalized on input)", None, example="1,0"),
            "post": P("vector", "post-selection (normalized on input)", None,
                      example="1,1"),
            "operator": P("matrix", "Hermitian matrix rows separated by ';'", None,
                          example="0.3535533905932738,0.3535533905932738;"
                                  "0.3535533905932738,-0.3535533905932738"),
            "particles": P("int", "collective spin demonstration with N particles", 0),
        },
        "formats": ("json",), "default_format": "json", "run": run_weak_value,
    },
    "pointer-sim": {
        "help": "pointer supershift sweep over Gaussian pointer widths",
        "params": {
            "target": P("float", "real weak value the selections are built for", 27.0),
            "widths": P("floats", "pointer widths, list or lo:hi:step", "1:10:1"),
            "coupling": P("float", "coupling lambda", 1.0),
            "q_extent": P("float", "pointer grid half-width", 120.0),
            "spacing": P("float", "pointer grid spacing", 0.05),
        },
        "formats": FORMATS, "default_format": "json", "run": run_pointer_sim,
    },
    "spin-tails": {
        "help": "tail probability of spin-1/2 weak values for Haar-random selections",
        "params": {
            "threshold": P("float", "threshold s", example=0.5),
            "samples": P("int", "number of samples", 1000000),
            "modulus": P("bool", "use |S_w| instead of |Re S_w|", False),
        },
        "formats": ("json",), "default_format": "json", "run": run_spin_tails,
    },
    "vortex-kick": {
        "help": "superkick momentum distribution of a probe near an optical vortex",
        "params": {
            "m": P("int", "vortex order", example=1),
            "k0": P("float", "axial wavenumber", 10.0),
            "sigma": P("float", "probe width", 1.0),
            "x0": P("float", "probe offset from the core", example=1.0),
            "n": P("int", "FFT oracle grid points per axis", 256),
        },
        "formats": FORMATS, "default_format": "json", "run": run_vortex_kick,
    },
}


def _parse_value(kind, value, name):
    if value is None:
        return None
    if kind == "str":
        return str(value)
    return PARSERS[kind](value, name)


def nearest(name, options):
    match = difflib.get_close_matches(name, list(options), n=1, cutoff=0.0)
    return match[0] if match else None


def validate_config(cfg):
    """Normalize an experiment config; raises :class:`ConfigError`."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(cfg) - TOP_LEVEL_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    command = cfg.get("command")
    if command not in COMMANDS:
        raise ConfigError(
            f"unknown command {command!r}; did you mean {nearest(str(command), COMMANDS)!r}?"
        )
    schema = COMMANDS[command]
    params = cfg.get("parameters", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError("parameters must be an object")
    unknown = set(params) - set(schema["params"])
    if unknown:
        bad = sorted(unknown)[0]
        raise ConfigError(
            f"{command}: unknown parameter {bad!r}; did you mean "
            f"{nearest(bad, schema['params'])!r}?"
        )
    clean = {}
    for key, spec in schema["params"].items():
        if key in params:
            value = params[key]
        elif "default" in spec:
            value = spec["default"]
        else:
            raise ConfigError(f"{command}: missing required parameter {key!r}")
        clean[key] = _parse_value(spec["type"], value, key)
        if "choices" in spec and clean[key] not in spec["choices"]:
            raise ConfigError(f"{key}: must be one of {spec['choices']}, got {clean[key]!r}")
    seed = cfg.get("seed", 0)
    if isinstance(seed, str):
        seed = int(seed) if seed.strip().isdigit() else _integer(seed, "seed")
    try:
        seed = check_seed(seed)
    except SuperoscError as exc:
        raise ConfigError(str(exc)) from None
    output = dict(cfg.get("output") or {})
    if set(output) - {"path", "format"}:
        raise ConfigError(f"unknown output keys {sorted(set(output) - {'path', 'format'})}")
    fmt = output.get("format") or schema["default_format"]
    if fmt not in schema["formats"]:
        raise ConfigError(f"{command}: format {fmt!r} not supported (use {list(schema['formats'])})")
    out = {"command": command, "parameters": clean, "seed": seed,
           "output": {"path": output.get("path", "-"), "format": fmt}}
    if "name" in cfg:
        out["name"] = str(cfg["name"])
    return out


def list_experiments():
    """Machine-readable catalog of every command and its parameter schema."""
    catalog = {}
    for name, schema in COMMANDS.items():
        catalog[name] = {
            "help": schema["help"],
            "formats": list(schema["formats"]),
            "default_format": schema["default_format"],
            "parameters": schema["params"],
        }
    return {"version": __version__, "commands": catalog}


def example_config(command):
    """Config built from the schema's defaults and examples."""
    params = {k: s["example"] for k, s in COMMANDS[command]["params"].items() if "example" in s}
    return {"command": command, "parameters": params, "seed": 0}


def provenance(cfg):
    """The part of a config that determines the output (everything but the path)."""
    return {"command": cfg["command"], "parameters": cfg["parameters"], "seed": cfg["seed"],
            "output": {"format": cfg["output"]["format"]}}


def render(cfg, threads=1):
    """Run a validated config and return the output text."""
    schema = COMMANDS[cfg["command"]]
    record, csv_maker = schema["run"](cfg["parameters"], cfg["seed"], threads)
    prov = provenance(cfg)
    if cfg["output"]["format"] == "json":
        body = dict(record)
        body["config"] = prov
        body["version"] = __version__
        return dumps(body)
    header = [f"superosc {__version__}",
              "config " + json.dumps(prov, sort_keys=True, separators=(",", ":"))]
    return "".join(f"# {h}\n" for h in header) + csv_maker()


def write_output(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def load_preset(name):
    try:
        text = resources.files("superosc.presets").joinpath(f"{name}.json").read_text("utf-8")
    except FileNotFoundError:
        names = preset_names()
        raise ConfigError(f"unknown preset {name!r}; did you mean {nearest(name, names)!r}?") \
            from None
    return json.loads(text)


def preset_names():
    return sorted(p.name[:-5] for p in resources.files("superosc.presets").iterdir()
                  if p.name.endswith(".json"))


def _threads(value):
    raw = value if value is not None else os.environ.get("SUPEROSC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"threads must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("threads must be >= 1")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="superosc", description="Superoscillation and weak-value experiments")
    parser.add_argument("--version", action="version", version=f"superosc {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("list", help="print the command catalog as JSON")
    run = sub.add_parser("run", help="run a JSON config file or a named preset")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to an experiment config (JSON)")
    src.add_argument("--preset", help=f"named preset ({', '.join(preset_names())})")
    run.add_argument("--output-dir", help="directory for multi-run outputs")
    run.add_argument("--threads", help="worker cap (default $SUPEROSC_THREADS or 1)")
    for name, schema in COMMANDS.items():
        cmd = sub.add_parser(name, help=schema["help"])
        for key, spec in schema["params"].items():
            flag = f"--{key.replace('_', '-')}"
            if spec["type"] == "bool":
                cmd.add_argument(flag, dest=key, action="store_true", help=spec["help"])
            else:
                cmd.add_argument(flag, dest=key, help=spec["help"], choices=spec.get("choices"))
        cmd.add_argument("--seed", default="0", help="64-bit seed")
        cmd.add_argument("--format", choices=schema["formats"], help="output format")
        cmd.add_argument("--output", default="-", help="output path ('-' for stdout)")
        cmd.add_argument("--threads", help="worker cap (default $SUPEROSC_THREADS or 1)")
    return parser


def _join_negative_values(argv):
    # "--scan -2:2:0.1" would read as an option; glue such values to their flag.
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None and len(nxt) > 1
                and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _configs_from_file(data, args):
    runs = data["runs"] if isinstance(data, dict) and "runs" in data else [data]
    if not isinstance(runs, list) or not runs:
        raise ConfigError("'runs' must be a non-empty list")
    configs = [validate_config(r) for r in runs]
    if len(configs) > 1 or args.output_dir:
        outdir = Path(args.output_dir or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        for i, c in enumerate(configs):
            name = c.get("name") or f"run{i}"
            c["output"]["path"] = str(outdir / f"{name}.{c['output']['format']}")
    return configs


def _diagnose(kind, exc, code):
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__,
                                 "message": str(exc), "exit_code": code}, sort_keys=True) + "\n")
    return code


def main(argv=None):
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS \
                and argv[0] not in ("list", "run"):
            raise ConfigError(
                f"unknown command {argv[0]!r}; did you mean "
                f"{nearest(argv[0], list(COMMANDS) + ['list', 'run'])!r}?"
            )
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ConfigError("no command given; try 'superosc list'")
        if args.command == "list":
            write_output(dumps(list_experiments()), "-")
            return EXIT_OK
        threads = _threads(args.threads)
        if args.command == "run":
            if args.config:
                try:
                    data = json.loads(Path(args.config).read_text(encoding="utf-8"))
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"config is not valid JSON: {exc}") from None
            else:
                data = load_preset(args.preset)
            configs = _configs_from_file(data, args)
        else:
            params = {k: getattr(args, k) for k in COMMANDS[args.command]["params"]
                      if getattr(args, k) not in (None, False)}
            configs = [validate_config({
                "command": args.command, "parameters": params, "seed": args.seed,
                "output": {"path": args.output, "format": args.format},
            })]
        for cfg in configs:
            text = render(cfg, threads)
            write_output(text, cfg["output"]["path"])
    except ConfigError as exc:
        return _diagnose("config", exc, EXIT_CONFIG)
    except OSError as exc:
        return _diagnose("io", exc, EXIT_IO)
    except (SuperoscError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _diagnose("numeric", exc, EXIT_NUMERIC)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

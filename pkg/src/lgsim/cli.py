"""Command-line front end.

Every subcommand resolves its parameters from defaults, then an optional
config file (``key=value`` lines, or a JSON report from a previous run), then
flags. Reports embed the resolved inputs, so a report fed back through
``--config`` reproduces itself.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from lgsim import __version__
from lgsim.full import FullProtocolParams, full_lgi_report
from lgsim.macrorealism import TelegraphModel, enumerate_exact, sample
from lgsim.macroscopicity import CONSTANTS, MacroParams, disconnectivity, extensive_difference
from lgsim.protocol import (
    ProtocolParams,
    compute_d,
    figure_curves,
    lg_report,
    run_ensemble,
    verify_logic_table,
)
from lgsim.stats import ndc_test, sample_protocol
from lgsim.units import parse_quantity

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 2, 3

SWEEP_COLUMNS = ("theta1_deg", "theta2_deg", "q3_pulse", "q3_nopulse", "q3_nopulse_infT2", "d")


class UsageError(Exception):
    pass


def _default_seed():
    raw = os.environ.get("LG_SEED")
    return 0 if raw is None else raw


def _pm1(v):
    v = int(v)
    if v not in (1, -1):
        raise ValueError(f"expected +1 or -1, got {v}")
    return v


def _probability(v):
    v = float(v)
    if not 0 <= v <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {v}")
    return v


def _optional_int(v):
    return None if v in (None, "", "none", "None") else int(v)


def _range(v):
    # "start:stop:step" (stop inclusive) or a single value, in degrees
    parts = str(v).split(":")
    if len(parts) == 1:
        return str(float(parts[0]))
    if len(parts) != 3:
        raise ValueError(f"range must be start:stop:step, got {v!r}")
    start, stop, step = (float(p) for p in parts)
    if not step > 0 or stop < start:
        raise ValueError(f"empty angle range {v!r}")
    return f"{start!r}:{stop!r}:{step!r}"


def _expand_range(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    start, stop, step = (float(p) for p in parts)
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _time(v):
    return parse_quantity(v, "time")


def _t2(v):
    value = parse_quantity(v, "time", allow_inf=True)
    if not value > 0:
        raise ValueError(f"T2 must be positive or inf, got {v!r}")
    return value


# key -> (converter, default, flag help)
PARAMETERS = {
    "theta1": (float, 90.0, "rotation before t2, degrees"),
    "theta2": (float, 90.0, "rotation after t2, degrees"),
    "theta_a": (float, 0.0, "rotation before t1 (full mode), degrees"),
    "t": (_time, 18e-9, "wait time, e.g. 18ns"),
    "T2": (_t2, 10e-9, "coherence time, e.g. 10ns, or inf"),
    "q1": (_pm1, -1, "Q1 preparation label"),
    "q2": (_pm1, 1, "Q2 value assignment"),
    "shots": (int, 10000, "shots per ensemble"),
    "seed": (int, None, "RNG seed (default $LG_SEED or 0)"),
    "p_init": (_probability, 0.5, "P(q1 = +1)"),
    "p_flip_12": (_probability, 0.0, "flip probability t1 -> t2"),
    "p_flip_23": (_probability, 0.0, "flip probability t2 -> t3"),
    "invasive": (_probability, 0.0, "probability the t2 measurement flips the state"),
    "ip": (lambda v: parse_quantity(v, "current"), 170e-9, "persistent current, e.g. 170nA"),
    "area": (lambda v: parse_quantity(v, "area"), 7e-12, "loop area, e.g. 7um2"),
    "length": (lambda v: parse_quantity(v, "length"), None, "loop circumference (default 4*sqrt(area))"),
    "vf": (lambda v: parse_quantity(v, "velocity"), 2.03e6, "Fermi velocity, m/s"),
    "overlap": (_probability, 1.0, "flux-eigenstate overlap factor"),
    "format": (str, "json", "csv or json"),
}

PROTOCOL_KEYS = ("theta1", "theta2", "t", "T2")
COMMANDS = {
    "sweep": PROTOCOL_KEYS + ("format",),
    "ndc": PROTOCOL_KEYS + ("q1", "shots", "seed", "format"),
    "lg": PROTOCOL_KEYS + ("q1", "q2", "format"),
    "table": ("format",),
    "sample": PROTOCOL_KEYS + ("q1", "shots", "seed", "format"),
    "full": ("theta_a",) + PROTOCOL_KEYS + ("format",),
    "mr": ("p_init", "p_flip_12", "p_flip_23", "invasive", "shots", "seed", "format"),
    "macro": ("ip", "area", "length", "vf", "overlap", "format"),
}
COMMAND_DEFAULTS = {
    "sweep": {"theta1": "0:180:1", "theta2": "0:180:1", "format": "csv"},
    "mr": {"shots": None},
}
COMMAND_CONVERTERS = {
    "sweep": {"theta1": _range, "theta2": _range},
    "mr": {"shots": _optional_int},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lgsim", description="Simplified Leggett-Garg protocol toolkit")
    parser.add_argument("--version", action="version", version=f"lgsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, keys in COMMANDS.items():
        p = sub.add_parser(name)
        for key in keys:
            flag = "--" + key.replace("_", "-")
            aliases = [flag]
            if key in ("theta_a", "p_flip_12", "p_flip_23", "p_init"):
                aliases.append("--" + key)
            p.add_argument(*aliases, dest=key, default=None, help=PARAMETERS[key][2])
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--config", default=None, help="key=value file or JSON report")
    return parser


def load_config(path: str) -> dict:
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed JSON config {path}: {exc.msg}") from exc
        inputs = doc.get("inputs")
        if not isinstance(inputs, dict):
            raise UsageError(f"JSON config {path} has no 'inputs' object")
        return dict(inputs)
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def resolve(command: str, args: argparse.Namespace) -> dict:
    keys = COMMANDS[command]
    raw = {k: PARAMETERS[k][1] for k in keys}
    raw.update({k: v for k, v in COMMAND_DEFAULTS.get(command, {}).items() if k in keys})
    if raw.get("seed", 0) is None:
        raw["seed"] = _default_seed()
    if args.config:
        cfg = load_config(args.config)
        unknown = set(cfg) - set(keys)
        if unknown:
            raise UsageError(f"config key(s) not valid for {command}: {', '.join(sorted(unknown))}")
        raw.update(cfg)
    raw.update({k: getattr(args, k) for k in keys if getattr(args, k, None) is not None})

    resolved = {}
    for key in keys:
        conv = COMMAND_CONVERTERS.get(command, {}).get(key, PARAMETERS[key][0])
        value = raw[key]
        try:
            resolved[key] = value if value is None else conv(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid --{key.replace('_', '-')}: {exc}") from exc
    if "length" in resolved and resolved["length"] is None:
        resolved["length"] = 4.0 * math.sqrt(resolved["area"])
    if resolved["format"] not in ("csv", "json"):
        raise UsageError(f"invalid --format {resolved['format']!r}: expected csv or json")
    return resolved


def _protocol(c: dict) -> ProtocolParams:
    return ProtocolParams(
        math.radians(c["theta1"]), math.radians(c["theta2"]), c["t"], c["T2"], c.get("q1", -1)
    )


def _child_seeds(seed: int, n: int):
    return np.random.SeedSequence(seed).spawn(n)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else "".join(map(str, k)) if isinstance(k, tuple) else str(k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, frozenset, set)):
        items = sorted(obj) if isinstance(obj, (frozenset, set)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def cmd_sweep(c: dict):
    theta1 = _expand_range(c["theta1"])
    theta2 = _expand_range(c["theta2"])
    rad2 = np.radians(theta2)

    def row_block(th1):
        curves = figure_curves(math.radians(th1), rad2, c["t"], c["T2"])
        cols = [np.broadcast_to(curves[k], rad2.shape) for k in SWEEP_COLUMNS[2:]]
        return [[float(th1), float(th2)] + [float(col[i]) for col in cols] for i, th2 in enumerate(theta2)]

    with ThreadPoolExecutor() as pool:
        blocks = list(pool.map(row_block, theta1))
    rows = [r for block in blocks for r in block]
    return {"columns": list(SWEEP_COLUMNS), "rows": rows}, EXIT_OK


def cmd_lg(c: dict):
    params = _protocol(c)
    rep = lg_report(params, c["q2"])
    out = {
        "lg": rep.values(),
        "violated": sorted(rep.violated),
        "d": rep.d,
        "q1": rep.q1,
        "q2": rep.q2,
        "epsilon_adroit": rep.epsilon_adroit,
        "q3_pulse": run_ensemble(params, True).q3_expectation,
        "q3_nopulse": run_ensemble(params, False).q3_expectation,
    }
    return out, (EXIT_VIOLATION if rep.violated else EXIT_OK)


def cmd_table(c: dict):
    table = verify_logic_table()
    rows = [
        {"Q1": r.q1, "Q2": r.q2, "inequality": r.inequality, "implication": r.constraint}
        for r in table.rows
    ]
    return {"rows": rows, "disjunction_holds": table.disjunction_holds}, EXIT_OK


def _record(rec):
    return {
        "n_plus": rec.n_plus,
        "n_minus": rec.n_minus,
        "shots": rec.shots,
        "estimate": rec.estimate,
        "std_error": rec.std_error,
    }


def cmd_sample(c: dict):
    params = _protocol(c)
    seed_g, seed_n = _child_seeds(c["seed"], 2)
    out = {}
    for name, pulse, seed in (("G", True, seed_g), ("no_pulse", False, seed_n)):
        rec = sample_protocol(params, pulse, c["shots"], seed)
        out[name] = dict(_record(rec), exact=run_ensemble(params, pulse).q3_expectation)
    return out, EXIT_OK


def cmd_ndc(c: dict):
    params = _protocol(c)
    seed_g, seed_n = _child_seeds(c["seed"], 2)
    rec_g = sample_protocol(params, True, c["shots"], seed_g)
    rec_n = sample_protocol(params, False, c["shots"], seed_n)
    test = ndc_test(rec_g, rec_n)
    exact_d = compute_d(run_ensemble(params, True), run_ensemble(params, False))
    return {
        "G": _record(rec_g),
        "no_pulse": _record(rec_n),
        "d_exact": exact_d,
        "d_hat": test.d_hat,
        "se_d": test.se_d,
        "z_score": test.z_score,
        "p_value": test.p_value,
        "degenerate": test.degenerate,
    }, EXIT_OK


def cmd_full(c: dict):
    params = FullProtocolParams(
        theta_a=math.radians(c["theta_a"]),
        theta_b=math.radians(c["theta1"]),
        theta_c=math.radians(c["theta2"]),
        t_b=c["t"],
        T2_b=c["T2"],
    )
    rep = full_lgi_report(params)
    return {
        "correlators": rep.correlators,
        "lgi_lhs": rep.lgi_lhs,
        "dcI": rep.dcI,
        "dcII": rep.dcII,
        "dcIII": rep.dcIII,
        "corrected_bound": rep.corrected_bound,
        "satisfied": rep.satisfied,
        "uncorrected_satisfied": rep.uncorrected_satisfied,
    }, EXIT_OK


def _stats(s):
    return {
        k: getattr(s, k)
        for k in ("q3_expectation", "q2_expectation", "corr_q1q2", "corr_q1q3", "corr_q2q3", "shots")
    }


def cmd_mr(c: dict):
    model = TelegraphModel(c["p_init"], c["p_flip_12"], c["p_flip_23"], c["invasive"])
    g = enumerate_exact(model, True)
    n = enumerate_exact(model, False)
    out = {"exact": {"G": _stats(g), "no_pulse": _stats(n), "d": compute_d(g, n)}}
    if c["shots"] is not None:
        seed_g, seed_n = _child_seeds(c["seed"], 2)
        sg = sample(model, c["shots"], seed_g, True)
        sn = sample(model, c["shots"], seed_n, False)
        out["sampled"] = {"G": _stats(sg), "no_pulse": _stats(sn), "d": compute_d(sg, sn)}
    return out, EXIT_OK


def cmd_macro(c: dict):
    p = MacroParams(c["ip"], c["area"], c["length"], c["vf"], c["overlap"])
    return {"delta_m_bohr": extensive_difference(p), "delta_n": disconnectivity(p)}, EXIT_OK


HANDLERS = {
    "sweep": cmd_sweep,
    "ndc": cmd_ndc,
    "lg": cmd_lg,
    "table": cmd_table,
    "sample": cmd_sample,
    "full": cmd_full,
    "mr": cmd_mr,
    "macro": cmd_macro,
}


def render_json(command: str, config: dict, outputs: dict) -> str:
    report = {
        "command": command,
        "inputs": config,
        "outputs": outputs,
        "provenance": {"version": __version__, "seed": config.get("seed"), "constants": CONSTANTS},
    }
    return json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n"


def render_csv(command: str, outputs: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "sweep":
        writer.writerow(outputs["columns"])
        for row in outputs["rows"]:
            writer.writerow([repr(v) for v in row])
    elif command == "table":
        writer.writerow(["Q1", "Q2", "inequality", "implication"])
        for r in outputs["rows"]:
            writer.writerow([r["Q1"], r["Q2"], r["inequality"], r["implication"]])
    else:
        raise UsageError(f"csv output is only available for sweep and table, not {command}")
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve(args.command, args)
        outputs, code = HANDLERS[args.command](config)
        if config["format"] == "csv":
            text = render_csv(args.command, outputs)
        else:
            text = render_json(args.command, config, outputs)
    except (UsageError, ValueError, OSError) as exc:
        print(f"lgsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: quantize, infer, report, dump-tables.

Meta-parameters come from an optional JSON config file and can be
overridden per flag; flag names match the parameter names exactly.
Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import fields, replace

from .activations import HardSigmoidParams, build_1to1_table, build_step_table
from .config import ConfigError, MetaParams
from .lstm_model import model_infer
from .model_io import (
    DataError,
    dumps_canonical,
    load_float_model,
    load_quant_model,
    load_sequences,
    save_quant_model,
)
from .perf_model import (
    DEVICE_BRAM_18K_TOTAL,
    DEVICE_DSP_TOTAL,
    DEVICE_LUT_TOTAL,
    estimate_resources,
    perf,
    reference_checks,
)
from .quantizer import quantize_model, quantize_sequence

_META_FLAG_HELP = {
    "hidden_size": "number of hidden units K",
    "input_size": "features per time step M",
    "ALU_resource_type": "map multipliers to DSP slices or LUT fabric",
    "weight_resource_type": "weight storage preference",
    "HardSigmoid_method": "arithmetic, 1to1 table, or step table",
    "HardTanh_threshold": "HardTanh clamp bounds",
    "in_features": "dense layer input width (must equal hidden_size)",
    "out_features": "dense layer output width P",
    "frac_bits": "fractional bits of the working format",
    "total_bits": "total bits of the working format",
    "engine": "MAC engine: scalar_fused or pipelined",
    "num_parallel_alus": "gate-ALU parallelism for the cycle schedule",
    "seq_len": "sequence length assumed by report",
    "clock_hz": "operating clock for latency figures",
    "power_w": "total power for efficiency and energy figures",
}


class _Parser(argparse.ArgumentParser):
    # single-line diagnostics and exit code 1 for usage problems
    def error(self, message):
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_meta_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("meta-parameters (override the config file)")
    g.add_argument("--hidden_size", type=int, help=_META_FLAG_HELP["hidden_size"])
    g.add_argument("--input_size", type=int, help=_META_FLAG_HELP["input_size"])
    g.add_argument("--ALU_resource_type", choices=["DSP", "LUT"],
                   help=_META_FLAG_HELP["ALU_resource_type"])
    g.add_argument("--weight_resource_type", choices=["BRAM", "LUTRAM", "AUTO"],
                   help=_META_FLAG_HELP["weight_resource_type"])
    g.add_argument("--HardSigmoid_method", choices=["arithmetic", "1to1", "step"],
                   help=_META_FLAG_HELP["HardSigmoid_method"])
    g.add_argument("--HardTanh_threshold", type=float, nargs=2, metavar=("MIN", "MAX"),
                   help=_META_FLAG_HELP["HardTanh_threshold"])
    g.add_argument("--in_features", type=int, help=_META_FLAG_HELP["in_features"])
    g.add_argument("--out_features", type=int, help=_META_FLAG_HELP["out_features"])
    g.add_argument("--frac_bits", type=int, help=_META_FLAG_HELP["frac_bits"])
    g.add_argument("--total_bits", type=int, help=_META_FLAG_HELP["total_bits"])
    g.add_argument("--engine", choices=["scalar_fused", "pipelined"],
                   help=_META_FLAG_HELP["engine"])
    g.add_argument("--num_parallel_alus", type=int, help=_META_FLAG_HELP["num_parallel_alus"])
    g.add_argument("--seq_len", type=int, help=_META_FLAG_HELP["seq_len"])
    g.add_argument("--clock_hz", type=float, help=_META_FLAG_HELP["clock_hz"])
    g.add_argument("--power_w", type=float, help=_META_FLAG_HELP["power_w"])


def _load_config_dict(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return doc


def _resolve_meta(args, base: dict | None = None) -> MetaParams:
    """defaults <- base dict <- config file <- command-line flags"""
    d = dict(base or {})
    d.update(_load_config_dict(args.config))
    for f in fields(MetaParams):
        val = getattr(args, f.name, None)
        if val is not None:
            d[f.name] = list(val) if f.name == "HardTanh_threshold" else val
    # in_features must equal hidden_size; when no source pins it, follow
    # the hidden size instead of forcing both flags every time
    if "in_features" not in d and "hidden_size" in d:
        d["in_features"] = d["hidden_size"]
    return MetaParams.from_dict(d)


# ============================================================
# Subcommands
# ============================================================

def cmd_quantize(args) -> int:
    fm = load_float_model(args.model)
    meta = _resolve_meta(args, base=fm.meta.to_dict())
    for name in ("hidden_size", "input_size", "out_features"):
        if getattr(meta, name) != getattr(fm.meta, name):
            raise ConfigError(
                f"{name} {getattr(meta, name)} does not match the model file ({getattr(fm.meta, name)})"
            )
    fm = replace(fm, meta=meta)
    qm, saturated = quantize_model(fm, meta.cfg)
    save_quant_model(qm, saturated, args.out)
    total = (4 * meta.hidden_size * (meta.hidden_size + meta.input_size + 1)
             + meta.out_features * (meta.hidden_size + 1))
    print(f"quantized {total} values into {meta.cfg}: {saturated} saturated")
    print(f"wrote {args.out}")
    return 0


def cmd_infer(args) -> int:
    qm, _stats = load_quant_model(args.model)
    if args.engine is not None and args.engine != qm.meta.engine:
        qm = replace(qm, meta=replace(qm.meta, engine=args.engine))
    seqs = load_sequences(args.input, input_size=qm.meta.input_size)
    results = []
    for seq in seqs:
        out, cycles = model_infer(quantize_sequence(seq, qm.cfg), qm)
        results.append({
            "output": [v.value for v in out],
            "output_raw": [v.raw for v in out],
            "cycles": {
                "per_step": list(cycles.per_step),
                "lstm": cycles.lstm_total,
                "dense": cycles.dense_cycles,
                "total": cycles.total,
            },
        })
    doc = {
        "engine": qm.meta.engine,
        "format": "fxlstm-inference",
        "num_sequences": len(results),
        "results": results,
    }
    text = dumps_canonical(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _sweep_rows(meta: MetaParams, num_layers: int) -> list[dict]:
    rows = []
    for h in range(20, 201, 10):
        m = replace(meta, hidden_size=h, in_features=h)
        r = estimate_resources(m, num_layers)
        rows.append({
            "hidden_size": h,
            "dsp_used": r.dsp_used,
            "lut_used": r.lut_used,
            "bram_18k_used": r.bram_18k_used,
            "lutram_luts": r.lutram_luts,
            "weight_bits": r.weight_bits,
            "fits_device": r.fits_device,
        })
    return rows


def cmd_report(args) -> int:
    meta = _resolve_meta(args)
    p = perf(meta)
    r = estimate_resources(meta, args.num_layers)
    checks = reference_checks()

    print(f"model: K={meta.hidden_size} M={meta.input_size} P={meta.out_features} "
          f"cfg {meta.cfg} engine {meta.engine} alus {meta.num_parallel_alus} "
          f"seq_len {meta.seq_len} layers {args.num_layers}")
    print()
    print("performance (cycle model at the configured operating point)")
    print(f"  ops/inference:       {p.ops}")
    print(f"  cycles/inference:    {p.cycles}")
    print(f"  clock:               {p.clock_hz / 1e6:.3f} MHz")
    print(f"  latency:             {p.latency_s * 1e6:.3f} us")
    print(f"  throughput:          {p.throughput_gops:.3f} GOP/s")
    print(f"  power:               {p.power_w * 1e3:.1f} mW")
    print(f"  energy efficiency:   {p.efficiency_gops_per_w:.2f} GOP/s/W")
    print(f"  energy/inference:    {p.energy_j * 1e6:.3f} uJ")
    print()
    print(f"resources (heuristic, XC7S15, {args.num_layers} layer(s))")
    print(f"  DSP:   {r.dsp_used}/{DEVICE_DSP_TOTAL} ({100 * r.dsp_util:.1f}%)")
    print(f"  LUT:   {r.lut_used}/{DEVICE_LUT_TOTAL} ({100 * r.lut_util:.1f}%) logic")
    print(f"  BRAM:  {r.bram_18k_used}/{DEVICE_BRAM_18K_TOTAL} 18Kbit blocks ({100 * r.bram_util:.1f}%)")
    print(f"  weight bits: {r.weight_bits} ({r.lutram_bits} spilled to LUTRAM, {r.lutram_luts} LUTs)")
    print(f"  fits device: {'yes' if r.fits_device else 'NO'}")
    print()
    print("reference checks (recorded design points)")
    for c in checks:
        print(f"  {c.name:32s} {c.value:10.4f}  [{c.lo:g}, {c.hi:g}]  {'ok' if c.ok else 'FAIL'}")

    if args.out_dir:
        from .report_figures import render_design_points_figure, render_utilization_figure

        os.makedirs(args.out_dir, exist_ok=True)
        rows = _sweep_rows(meta, args.num_layers)

        report_path = os.path.join(args.out_dir, "report.json")
        doc = {
            "meta": meta.to_dict(),
            "num_layers": args.num_layers,
            "performance": {
                "ops": p.ops, "cycles": p.cycles, "clock_hz": p.clock_hz,
                "latency_s": p.latency_s, "throughput_gops": p.throughput_gops,
                "power_w": p.power_w,
                "efficiency_gops_per_w": p.efficiency_gops_per_w,
                "energy_j": p.energy_j,
            },
            "resources": {
                "dsp_used": r.dsp_used, "lut_used": r.lut_used,
                "bram_18k_used": r.bram_18k_used, "lutram_bits": r.lutram_bits,
                "lutram_luts": r.lutram_luts, "weight_bits": r.weight_bits,
                "fits_device": r.fits_device,
            },
            "reference_checks": [
                {"name": c.name, "value": c.value, "lo": c.lo, "hi": c.hi, "ok": c.ok}
                for c in checks
            ],
        }
        with open(report_path, "w", encoding="utf-8") as f:
            f.write(dumps_canonical(doc))

        csv_path = os.path.join(args.out_dir, "resource_sweep.csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            w = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)

        util_path = os.path.join(args.out_dir, "utilization.png")
        mode = meta.ALU_resource_type
        render_utilization_figure(
            rows, util_path,
            f"estimated utilisation vs hidden size ({mode} ALUs, {args.num_layers} layer(s))",
        )
        points_path = os.path.join(args.out_dir, "design_points.png")
        render_design_points_figure(points_path)

        print()
        for path in (report_path, csv_path, util_path, points_path):
            print(f"wrote {path}")
    return 0


def cmd_dump_tables(args) -> int:
    meta = _resolve_meta(args)
    cfg = meta.cfg
    params = HardSigmoidParams.default(cfg)
    t1 = build_1to1_table(cfg, params)
    ts = build_step_table(cfg, params)
    lines = [
        f"# HardSigmoid* tables for cfg {cfg}",
        f"# slope_shift {params.slope_shift}, bounds [{params.lower_bound.value}, {params.upper_bound.value}), offset {params.offset.value}",
        f"# 1to1 entries: {t1.num_entries}",
        f"# step entries: {ts.num_entries}",
        "[1to1]",
        "input_raw output_raw",
    ]
    for i, out in enumerate(t1.outputs):
        lines.append(f"{t1.first_raw + i} {out}")
    lines += ["[step]", "upper_raw output_raw"]
    for upper, out in zip(ts.uppers, ts.outputs):
        lines.append(f"{upper} {out}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


# ============================================================
# Parser wiring
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fxlstm",
                     description="bit-exact fixed-point LSTM accelerator model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantize", help="quantise a float model file",
                       description="Quantise a float model into the working format.")
    p.add_argument("--model", required=True, help="float model JSON file")
    p.add_argument("--config", help="JSON config overriding the model's meta block")
    p.add_argument("--out", required=True, help="output quantised model file")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("infer", help="run inference on input sequences",
                       description="Run bit-exact inference over a sequences file.")
    p.add_argument("--model", required=True, help="quantised model JSON file")
    p.add_argument("--input", required=True, help="input sequences JSON file")
    p.add_argument("--out", help="write results here instead of stdout")
    p.add_argument("--engine", choices=["scalar_fused", "pipelined"],
                   help="override the engine stored in the model")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("report", help="performance and resource report",
                       description="Cycle, throughput, energy, and resource estimates.")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--num_layers", type=int, default=1,
                   help="stacked LSTM layers for the resource estimate")
    p.add_argument("--out-dir", dest="out_dir",
                   help="also write report.json, resource_sweep.csv, and figures here")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dump-tables", help="dump HardSigmoid* lookup tables",
                       description="Emit the 1to1 and step tables for the configured format.")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="write tables here instead of stdout")
    _add_meta_flags(p)
    p.set_defaults(func=cmd_dump_tables)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"error: data: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

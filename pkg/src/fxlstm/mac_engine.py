"""Multiply-accumulate engines: two models of the same dot product.

scalar_fused    Each product is widened, immediately rounded back to the
                working format (f_round), and accumulated with saturation.
                One iteration per cycle: N inputs take N cycles.  Rounding
                inside the loop loses the low product bits, so many small
                products can sum to exactly nothing.

pipelined       Products stay in the widened format, the accumulation is
                exact, the sum saturates to the wide rails once at the end,
                and a single f_round narrows the result.  The five-stage
                pipeline costs four cycles of fill: N inputs take N + 4
                cycles (8 inputs finish in 12), and for long vectors the
                per-element rate approaches one per cycle.

dot_bias folds the bias in as one extra iteration (the bias enters the
accumulator exactly, as if multiplied by 1.0), so a length-N dot with bias
costs N + 1 iterations plus the fill for the pipelined engine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .fixed_point import (
    FxConfig,
    FxValue,
    round_shift_half_away,
    saturate_raw,
)

PIPELINE_FILL_CYCLES = 4  # five stages, first result after cycle 5

# Elementwise path costs, one cycle per primitive on the dedicated
# elementwise ALU.  Per hidden unit and step: four gate activations,
# two multiplies and one add for the cell state, one activation and one
# multiply for the output.
ELEMENTWISE_MUL_CYCLES = 1
ELEMENTWISE_ADD_CYCLES = 1
ACTIVATION_CYCLES = 1


class EngineKind(enum.Enum):
    SCALAR_FUSED = "scalar_fused"
    PIPELINED = "pipelined"


@dataclass(frozen=True)
class MacResult:
    value: FxValue
    cycles: int


def engine_cycles(kind: EngineKind, iterations: int) -> int:
    """Cycle law: N for scalar_fused, N + 4 for pipelined."""
    if kind is EngineKind.PIPELINED:
        return iterations + PIPELINE_FILL_CYCLES
    return iterations


def _check_vectors(w: Sequence[FxValue], x: Sequence[FxValue]) -> FxConfig:
    if len(w) == 0:
        raise ValueError("dot product needs at least one element")
    if len(w) != len(x):
        raise ValueError(f"length mismatch: {len(w)} weights vs {len(x)} inputs")
    cfg = w[0].cfg
    for v in w:
        if v.cfg != cfg:
            raise ValueError("all weights must share one format")
    for v in x:
        if v.cfg != cfg:
            raise ValueError(f"input format {v.cfg} does not match weight format {cfg}")
    return cfg


# ----------------------------------------------------------------------
# Raw-integer cores.  The loops run on plain ints so a hundred thousand
# random vectors stay cheap; the public functions wrap and validate.
# ----------------------------------------------------------------------

def _scalar_fused_raw(w_raws, x_raws, cfg: FxConfig, bias_raw: int | None = None) -> int:
    frac_shift = cfg.frac_bits  # widened has 2a fractional bits, narrow back by a
    acc = 0
    for wr, xr in zip(w_raws, x_raws):
        prod = wr * xr
        term = saturate_raw(round_shift_half_away(prod, frac_shift), cfg)
        acc = saturate_raw(acc + term, cfg)
    if bias_raw is not None:
        acc = saturate_raw(acc + bias_raw, cfg)
    return acc


def _pipelined_raw(w_raws, x_raws, cfg: FxConfig, bias_raw: int | None = None) -> int:
    wide = cfg.widened()
    acc = 0
    for wr, xr in zip(w_raws, x_raws):
        acc += wr * xr
    if bias_raw is not None:
        acc += bias_raw << cfg.frac_bits  # exact widening of the bias
    acc = saturate_raw(acc, wide)
    return saturate_raw(round_shift_half_away(acc, cfg.frac_bits), cfg)


# ----------------------------------------------------------------------
# Public engines
# ----------------------------------------------------------------------

def mac_scalar(w: Sequence[FxValue], x: Sequence[FxValue]) -> MacResult:
    """Fused multiply-round-accumulate, one iteration per cycle."""
    cfg = _check_vectors(w, x)
    raw = _scalar_fused_raw([v.raw for v in w], [v.raw for v in x], cfg)
    return MacResult(FxValue(raw, cfg), engine_cycles(EngineKind.SCALAR_FUSED, len(w)))


def mac_pipelined(w: Sequence[FxValue], x: Sequence[FxValue]) -> MacResult:
    """Wide exact accumulation, one saturation and one rounding at the end."""
    cfg = _check_vectors(w, x)
    cfg.widened()  # reject formats too wide to hold products
    raw = _pipelined_raw([v.raw for v in w], [v.raw for v in x], cfg)
    return MacResult(FxValue(raw, cfg), engine_cycles(EngineKind.PIPELINED, len(w)))


def dot_bias(w: Sequence[FxValue], x: Sequence[FxValue], b: FxValue, kind: EngineKind) -> MacResult:
    """Dot product plus bias; the bias is one extra iteration on either engine."""
    cfg = _check_vectors(w, x)
    if b.cfg != cfg:
        raise ValueError(f"bias format {b.cfg} does not match {cfg}")
    w_raws = [v.raw for v in w]
    x_raws = [v.raw for v in x]
    if kind is EngineKind.PIPELINED:
        cfg.widened()
        raw = _pipelined_raw(w_raws, x_raws, cfg, bias_raw=b.raw)
    elif kind is EngineKind.SCALAR_FUSED:
        raw = _scalar_fused_raw(w_raws, x_raws, cfg, bias_raw=b.raw)
    else:
        raise ValueError(f"unknown engine kind {kind!r}")
    return MacResult(FxValue(raw, cfg), engine_cycles(kind, len(w) + 1))

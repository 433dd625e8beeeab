"""Hard activation functions over fixed-point values.

HardSigmoid* approximates the logistic function with a power-of-two slope
so the multiply degenerates to an arithmetic right shift:

    y = 0                      for x below the lower bound
    y = (x >> slope_shift) + 0.5   on the linear region
    y = 1                      at and above the upper bound

With the defaults (slope 2**-3 = 0.125, bounds -3 and +3) the linear
region covers -3 <= x < 3.  Slopes are restricted to powers of two by
construction; an arbitrary slope would need a real multiplier and is
rejected when the parameters are built.  For formats too narrow to
represent +-3 the bounds clamp to the format's own range and the linear
region simply fills everything below the top rail.

HardTanh clamps to [min_val, max_val], +-1 by default.

Three interchangeable HardSigmoid* implementations:

  arithmetic   shift + saturating add, evaluated per input
  1to1         one table entry per raw input across the linear span
  step         one entry per distinct output, found by breakpoint search

All three are bit-identical over the full input space of the working
format; run this module as a script for an exhaustive self test.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .fixed_point import FxConfig, FxValue, fx_add, fx_from_real, fx_shift_right_arith

DEFAULT_SLOPE_SHIFT = 3
DEFAULT_LOWER = -3.0
DEFAULT_UPPER = 3.0
DEFAULT_OFFSET = 0.5


# ============================================================
# Parameter containers
# ============================================================

@dataclass(frozen=True)
class HardTanhParams:
    min_val: FxValue
    max_val: FxValue

    def __post_init__(self):
        if self.min_val.cfg != self.max_val.cfg:
            raise ValueError("HardTanh bounds must share one format")
        if self.min_val.raw >= self.max_val.raw:
            raise ValueError("HardTanh needs min_val < max_val")

    @classmethod
    def default(cls, cfg: FxConfig, lo: float = -1.0, hi: float = 1.0) -> "HardTanhParams":
        return cls(fx_from_real(lo, cfg), fx_from_real(hi, cfg))


@dataclass(frozen=True)
class HardSigmoidParams:
    """slope_shift k gives slope 2**-k; bounds and offset live in the working format."""

    slope_shift: int
    lower_bound: FxValue
    upper_bound: FxValue
    offset: FxValue

    def __post_init__(self):
        cfg = self.lower_bound.cfg
        if self.upper_bound.cfg != cfg or self.offset.cfg != cfg:
            raise ValueError("HardSigmoid* parameters must share one format")
        if not isinstance(self.slope_shift, int) or self.slope_shift < 0:
            raise ValueError(f"slope_shift must be a non-negative int, got {self.slope_shift!r}")
        # slope 2**-k must be representable, i.e. at least one LSB
        if self.slope_shift > cfg.frac_bits:
            raise ValueError(
                f"slope 2**-{self.slope_shift} is below the resolution of {cfg}"
            )
        if self.lower_bound.raw >= self.upper_bound.raw:
            raise ValueError("HardSigmoid* needs lower_bound < upper_bound")

    @property
    def cfg(self) -> FxConfig:
        return self.lower_bound.cfg

    @property
    def one(self) -> FxValue:
        return fx_from_real(1.0, self.cfg)

    @classmethod
    def default(cls, cfg: FxConfig) -> "HardSigmoidParams":
        # +-3 saturate to the rails on narrow formats; the builders work on
        # the clamped region, so the linear span just fills the range there.
        return cls(
            DEFAULT_SLOPE_SHIFT,
            fx_from_real(DEFAULT_LOWER, cfg),
            fx_from_real(DEFAULT_UPPER, cfg),
            fx_from_real(DEFAULT_OFFSET, cfg),
        )


# ============================================================
# Direct evaluation
# ============================================================

def hardtanh(x: FxValue, p: HardTanhParams) -> FxValue:
    if x.cfg != p.min_val.cfg:
        raise ValueError(f"format mismatch: input {x.cfg}, params {p.min_val.cfg}")
    if x.raw < p.min_val.raw:
        return p.min_val
    if x.raw > p.max_val.raw:
        return p.max_val
    return x

def hardsigmoid_arith(x: FxValue, p: HardSigmoidParams) -> FxValue:
    """Shift-and-add HardSigmoid*: 0 below, 1 at/above, linear between."""
    if x.cfg != p.cfg:
        raise ValueError(f"format mismatch: input {x.cfg}, params {p.cfg}")
    if x.raw < p.lower_bound.raw:
        return FxValue(0, x.cfg)
    if x.raw >= p.upper_bound.raw:
        return p.one
    return fx_add(fx_shift_right_arith(x, p.slope_shift), p.offset)


# ============================================================
# Table forms
# ============================================================

@dataclass(frozen=True)
class ActivationTable:
    """1to1 form: outputs[i] is the output raw for input raw first_raw + i.

    Inputs below the span return low_out, at/above the span high_out.
    """

    cfg: FxConfig
    first_raw: int
    outputs: tuple[int, ...]
    low_out: int
    high_out: int

    @property
    def num_entries(self) -> int:
        return len(self.outputs)


@dataclass(frozen=True)
class StepTable:
    """Step form: segment i covers input raws up to uppers[i] inclusive.

    uppers is strictly increasing and ends at the format's top rail, so
    every input falls in exactly one segment; outputs are non-decreasing.
    """

    cfg: FxConfig
    uppers: tuple[int, ...]
    outputs: tuple[int, ...]

    @property
    def num_entries(self) -> int:
        return len(self.uppers)


def build_1to1_table(cfg: FxConfig, p: HardSigmoidParams | None = None) -> ActivationTable:
    """Tabulate the linear span [lower_bound, upper_bound) one raw at a time."""
    if p is None:
        p = HardSigmoidParams.default(cfg)
    if p.cfg != cfg:
        raise ValueError(f"params are for {p.cfg}, not {cfg}")
    outs = tuple(
        hardsigmoid_arith(FxValue(k, cfg), p).raw
        for k in range(p.lower_bound.raw, p.upper_bound.raw)
    )
    return ActivationTable(cfg, p.lower_bound.raw, outs, 0, p.one.raw)


def build_step_table(cfg: FxConfig, p: HardSigmoidParams | None = None) -> StepTable:
    """Collapse the full input range into runs of equal output.

    The saturation plateaus fall out of the merge: with the (4, 8) defaults
    this yields 14 segments, the 12 distinct linear-region outputs plus the
    0 and 1 plateaus.
    """
    if p is None:
        p = HardSigmoidParams.default(cfg)
    if p.cfg != cfg:
        raise ValueError(f"params are for {p.cfg}, not {cfg}")
    uppers: list[int] = []
    outputs: list[int] = []
    for k in range(cfg.min_raw, cfg.max_raw + 1):
        out = hardsigmoid_arith(FxValue(k, cfg), p).raw
        if outputs and outputs[-1] == out:
            uppers[-1] = k
        else:
            uppers.append(k)
            outputs.append(out)
    return StepTable(cfg, tuple(uppers), tuple(outputs))


def hardsigmoid_lookup(x: FxValue, table: ActivationTable | StepTable) -> FxValue:
    if x.cfg != table.cfg:
        raise ValueError(f"format mismatch: input {x.cfg}, table {table.cfg}")
    if isinstance(table, ActivationTable):
        i = x.raw - table.first_raw
        if i < 0:
            return FxValue(table.low_out, x.cfg)
        if i >= len(table.outputs):
            return FxValue(table.high_out, x.cfg)
        return FxValue(table.outputs[i], x.cfg)
    # step form: first segment whose inclusive upper bound covers x
    i = bisect_left(table.uppers, x.raw)
    return FxValue(table.outputs[i], x.cfg)


# ============================================================
# Self test
# ============================================================

def self_test() -> bool:
    """Exhaustive three-way agreement on the default format."""
    cfg = FxConfig(4, 8)
    p = HardSigmoidParams.default(cfg)
    t1 = build_1to1_table(cfg, p)
    ts = build_step_table(cfg, p)
    print(f"1to1 entries: {t1.num_entries}  step entries: {ts.num_entries}")
    ok = True
    for k in range(cfg.min_raw, cfg.max_raw + 1):
        x = FxValue(k, cfg)
        a = hardsigmoid_arith(x, p).raw
        b = hardsigmoid_lookup(x, t1).raw
        c = hardsigmoid_lookup(x, ts).raw
        if not (a == b == c):
            print(f"MISMATCH at raw {k}: arith {a}, 1to1 {b}, step {c}")
            ok = False
    print("PASS" if ok else "FAIL")
    return ok


if __name__ == "__main__":
    raise SystemExit(0 if self_test() else 1)

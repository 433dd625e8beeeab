"""Signed fixed-point formats and the arithmetic the datapath is built from.

A format is written (a, b): a fractional bits out of b total bits, two's
complement.  A raw integer k encodes the real value k * 2**-a, so the
default (4, 8) format spans [-8.0, 7.9375] in steps of 0.0625 and the
widened (8, 16) format holds any product of two (4, 8) values exactly.

Conventions, fixed once here and reused everywhere:

  * narrowing rounds half away from zero (f_round below);
  * adds and narrowing saturate at the rails instead of wrapping, because a
    wrapped add turns a large positive gate preactivation into a large
    negative one and the recurrence never recovers;
  * right shifts are arithmetic (shift-in sign, round toward -inf), which
    is what a bare shifter does in fabric and is deliberately cheaper than
    f_round.

Everything operates on plain Python ints wrapped in FxValue, so results
are bit-exact and independent of the host float unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MAX_TOTAL_BITS = 32


@dataclass(frozen=True)
class FxConfig:
    """A fixed-point format: frac_bits fractional out of total_bits total."""

    frac_bits: int
    total_bits: int

    def __post_init__(self):
        if not isinstance(self.frac_bits, int) or not isinstance(self.total_bits, int):
            raise ValueError("frac_bits and total_bits must be ints")
        if not 1 <= self.frac_bits < self.total_bits:
            raise ValueError(
                f"frac_bits {self.frac_bits} must satisfy 1 <= frac_bits < total_bits ({self.total_bits})"
            )
        if self.total_bits > MAX_TOTAL_BITS:
            raise ValueError(f"total_bits {self.total_bits} exceeds {MAX_TOTAL_BITS}")

    @property
    def resolution(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def min_value(self) -> float:
        return self.min_raw * self.resolution

    @property
    def max_value(self) -> float:
        return self.max_raw * self.resolution

    def widened(self) -> "FxConfig":
        """The product format: twice the fractional and twice the total bits."""
        if 2 * self.total_bits > MAX_TOTAL_BITS:
            raise ValueError(f"cannot widen {self}: {2 * self.total_bits} bits exceeds {MAX_TOTAL_BITS}")
        return FxConfig(2 * self.frac_bits, 2 * self.total_bits)

    def __str__(self) -> str:
        return f"({self.frac_bits},{self.total_bits})"


@dataclass(frozen=True)
class FxValue:
    """One number in a given format. raw is the two's-complement integer."""

    raw: int
    cfg: FxConfig

    def __post_init__(self):
        if not isinstance(self.raw, int):
            raise ValueError(f"raw must be int, got {type(self.raw).__name__}")
        if not self.cfg.min_raw <= self.raw <= self.cfg.max_raw:
            raise ValueError(f"raw {self.raw} outside {self.cfg} range [{self.cfg.min_raw}, {self.cfg.max_raw}]")

    @property
    def value(self) -> float:
        return self.raw * self.cfg.resolution

    def __str__(self) -> str:
        return f"{self.value} [raw {self.raw} @ {self.cfg}]"


def saturate_raw(raw: int, cfg: FxConfig) -> int:
    """Clamp a raw integer to the rails of cfg."""
    if raw > cfg.max_raw:
        return cfg.max_raw
    if raw < cfg.min_raw:
        return cfg.min_raw
    return raw


def round_shift_half_away(raw: int, shift: int) -> int:
    """Divide raw by 2**shift, rounding half away from zero. Exact, ints only."""
    if shift == 0:
        return raw
    half = 1 << (shift - 1)
    if raw >= 0:
        return (raw + half) >> shift
    return -((-raw + half) >> shift)


def fx_from_real(r: float, cfg: FxConfig) -> FxValue:
    """Quantise a real number: round half away from zero, saturate to range."""
    return quantize_real(r, cfg)[0]


def quantize_real(r: float, cfg: FxConfig) -> tuple[FxValue, bool]:
    """fx_from_real plus a flag telling whether the value hit the rails."""
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"cannot quantise non-finite value {r!r}")
    scaled = r * (1 << cfg.frac_bits)
    if scaled >= 0:
        raw = math.floor(scaled + 0.5)
    else:
        raw = math.ceil(scaled - 0.5)
    sat = raw < cfg.min_raw or raw > cfg.max_raw
    return FxValue(saturate_raw(raw, cfg), cfg), sat


def fx_to_real(v: FxValue) -> float:
    return v.raw * v.cfg.resolution


def fx_add(x: FxValue, y: FxValue) -> FxValue:
    """Saturating add. Both operands must share one format."""
    if x.cfg != y.cfg:
        raise ValueError(f"format mismatch in add: {x.cfg} vs {y.cfg}")
    return FxValue(saturate_raw(x.raw + y.raw, x.cfg), x.cfg)


def fx_mul_widening(x: FxValue, y: FxValue) -> FxValue:
    """Exact multiply into the widened format. Never overflows, never rounds.

    |raw| <= 2**(b-1) * 2**(b-1) = 2**(2b-2), inside the (2a, 2b) range.
    """
    if x.cfg != y.cfg:
        raise ValueError(f"format mismatch in multiply: {x.cfg} vs {y.cfg}")
    return FxValue(x.raw * y.raw, x.cfg.widened())


def fx_round_narrow(v: FxValue, target: FxConfig) -> FxValue:
    """Round v into target (f_round): half away from zero, then saturate.

    Requires target.frac_bits <= v.cfg.frac_bits; dropping integer bits alone
    (same frac_bits, fewer total bits) degenerates to a pure saturation.
    """
    shift = v.cfg.frac_bits - target.frac_bits
    if shift < 0:
        raise ValueError(f"cannot round {v.cfg} into {target}: target has more fractional bits")
    rounded = round_shift_half_away(v.raw, shift)
    return FxValue(saturate_raw(rounded, target), target)


def fx_shift_right_arith(v: FxValue, k: int) -> FxValue:
    """Arithmetic right shift by k >= 0: floor division by 2**k, format kept."""
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"shift amount must be a non-negative int, got {k!r}")
    return FxValue(v.raw >> k, v.cfg)

"""Build-time meta-parameters and their validation.

MetaParams mirrors the knobs the generator exposes: layer shapes, which
fabric resource implements the multipliers and the weight memories, how
HardSigmoid* is realised, the number format, the engine, and the operating
point used for performance reporting.  Everything is validated up front so
a bad configuration dies with a single-line diagnostic instead of a deep
stack trace.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, asdict

from .fixed_point import FxConfig
from .mac_engine import EngineKind

HIDDEN_SIZE_RANGE = (1, 200)
INPUT_SIZE_RANGE = (1, 10)
OUT_FEATURES_RANGE = (1, 200)

ALU_RESOURCE_TYPES = ("DSP", "LUT")
WEIGHT_RESOURCE_TYPES = ("BRAM", "LUTRAM", "AUTO")
HARDSIGMOID_METHODS = ("arithmetic", "1to1", "step")
ENGINES = ("scalar_fused", "pipelined")

# Widening products doubles the width, and the datapath caps at 32 bits.
MAX_WORKING_TOTAL_BITS = 16


class ConfigError(ValueError):
    """A meta-parameter is out of range or inconsistent."""


@dataclass
class MetaParams:
    hidden_size: int = 20
    input_size: int = 1
    ALU_resource_type: str = "DSP"
    weight_resource_type: str = "AUTO"
    HardSigmoid_method: str = "step"
    HardTanh_threshold: tuple[float, float] = (-1.0, 1.0)
    in_features: int = 20
    out_features: int = 1
    frac_bits: int = 4
    total_bits: int = 8
    engine: str = "pipelined"
    num_parallel_alus: int = 2
    seq_len: int = 6
    clock_hz: float = 204e6
    power_w: float = 0.057

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def check_int(name, val, lo, hi):
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"{name} must be an integer, got {val!r}")
            if not lo <= val <= hi:
                raise ConfigError(f"{name} {val} outside [{lo}, {hi}]")

        def check_enum(name, val, allowed):
            if val not in allowed:
                raise ConfigError(f"{name} {val!r} not one of {list(allowed)}")

        check_int("hidden_size", self.hidden_size, *HIDDEN_SIZE_RANGE)
        check_int("input_size", self.input_size, *INPUT_SIZE_RANGE)
        check_enum("ALU_resource_type", self.ALU_resource_type, ALU_RESOURCE_TYPES)
        check_enum("weight_resource_type", self.weight_resource_type, WEIGHT_RESOURCE_TYPES)
        check_enum("HardSigmoid_method", self.HardSigmoid_method, HARDSIGMOID_METHODS)
        check_enum("engine", self.engine, ENGINES)

        thr = self.HardTanh_threshold
        if not (isinstance(thr, (tuple, list)) and len(thr) == 2):
            raise ConfigError(f"HardTanh_threshold must be [min, max], got {thr!r}")
        lo, hi = float(thr[0]), float(thr[1])
        if not lo < hi:
            raise ConfigError(f"HardTanh_threshold min {lo} must be below max {hi}")
        self.HardTanh_threshold = (lo, hi)

        check_int("in_features", self.in_features, 1, HIDDEN_SIZE_RANGE[1])
        if self.in_features != self.hidden_size:
            raise ConfigError(
                f"in_features {self.in_features} must equal hidden_size {self.hidden_size} (dense reads the final hidden state)"
            )
        check_int("out_features", self.out_features, *OUT_FEATURES_RANGE)

        check_int("frac_bits", self.frac_bits, 1, MAX_WORKING_TOTAL_BITS - 1)
        check_int("total_bits", self.total_bits, 2, MAX_WORKING_TOTAL_BITS)
        if self.frac_bits >= self.total_bits:
            raise ConfigError(f"frac_bits {self.frac_bits} must be below total_bits {self.total_bits}")

        check_int("num_parallel_alus", self.num_parallel_alus, 1, 64)
        check_int("seq_len", self.seq_len, 1, 100000)
        if not (isinstance(self.clock_hz, (int, float)) and self.clock_hz > 0):
            raise ConfigError(f"clock_hz must be positive, got {self.clock_hz!r}")
        if not (isinstance(self.power_w, (int, float)) and self.power_w > 0):
            raise ConfigError(f"power_w must be positive, got {self.power_w!r}")
        self.clock_hz = float(self.clock_hz)
        self.power_w = float(self.power_w)

    @property
    def cfg(self) -> FxConfig:
        return FxConfig(self.frac_bits, self.total_bits)

    @property
    def engine_kind(self) -> EngineKind:
        return EngineKind(self.engine)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["HardTanh_threshold"] = list(self.HardTanh_threshold)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetaParams":
        if not isinstance(d, dict):
            raise ConfigError(f"config must be an object, got {type(d).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(d)
        if "HardTanh_threshold" in kwargs:
            thr = kwargs["HardTanh_threshold"]
            if isinstance(thr, list):
                kwargs["HardTanh_threshold"] = tuple(thr)
        try:
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"bad config: {e}") from None

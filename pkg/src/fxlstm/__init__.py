"""Bit-exact model of a fixed-point LSTM accelerator.

Fixed-point arithmetic, HardSigmoid*/HardTanh activations with lookup
table generators, two MAC engine timings, a quantiser, the full
LSTM-plus-dense inference path, and performance/resource estimators
for a small FPGA target.
"""

from .activations import (
    ActivationTable,
    HardSigmoidParams,
    HardTanhParams,
    StepTable,
    build_1to1_table,
    build_step_table,
    hardsigmoid_arith,
    hardsigmoid_lookup,
    hardtanh,
)
from .config import ConfigError, MetaParams
from .fixed_point import (
    FxConfig,
    FxValue,
    fx_add,
    fx_from_real,
    fx_mul_widening,
    fx_round_narrow,
    fx_shift_right_arith,
    fx_to_real,
    quantize_real,
)
from .lstm_model import (
    DenseWeights,
    LstmState,
    LstmWeights,
    QuantModel,
    dense_forward,
    float_reference_infer,
    lstm_cell_step,
    lstm_layer_forward,
    model_infer,
)
from .mac_engine import EngineKind, MacResult, dot_bias, engine_cycles, mac_pipelined, mac_scalar
from .model_io import (
    DataError,
    load_float_model,
    load_quant_model,
    load_sequences,
    save_float_model,
    save_quant_model,
    save_sequences,
)
from .perf_model import (
    CycleReport,
    PerfReport,
    ResourceReport,
    cell_step_cycles,
    count_ops,
    estimate_resources,
    perf,
    reference_checks,
    reference_point,
    schedule_cycles,
)
from .quantizer import (
    FloatModel,
    quantization_error,
    quantize_model,
    quantize_sequence,
    synthetic_float_model,
    synthetic_sequences,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationTable",
    "ConfigError",
    "CycleReport",
    "DataError",
    "DenseWeights",
    "EngineKind",
    "FloatModel",
    "FxConfig",
    "FxValue",
    "HardSigmoidParams",
    "HardTanhParams",
    "LstmState",
    "LstmWeights",
    "MacResult",
    "MetaParams",
    "PerfReport",
    "QuantModel",
    "ResourceReport",
    "StepTable",
    "build_1to1_table",
    "build_step_table",
    "cell_step_cycles",
    "count_ops",
    "dense_forward",
    "dot_bias",
    "engine_cycles",
    "estimate_resources",
    "float_reference_infer",
    "fx_add",
    "fx_from_real",
    "fx_mul_widening",
    "fx_round_narrow",
    "fx_shift_right_arith",
    "fx_to_real",
    "hardsigmoid_arith",
    "hardsigmoid_lookup",
    "hardtanh",
    "load_float_model",
    "load_quant_model",
    "load_sequences",
    "lstm_cell_step",
    "lstm_layer_forward",
    "mac_pipelined",
    "mac_scalar",
    "model_infer",
    "perf",
    "quantization_error",
    "quantize_model",
    "quantize_real",
    "quantize_sequence",
    "reference_checks",
    "reference_point",
    "save_float_model",
    "save_quant_model",
    "save_sequences",
    "schedule_cycles",
    "synthetic_float_model",
    "synthetic_sequences",
]

"""Post-training quantisation and quantisation-error measurement.

A FloatModel holds real-valued weights (the stand-in for a trained model);
quantize_model rounds every weight and bias into the working format and
counts how many hit the rails.  quantization_error then runs the float
reference and the quantised model over a dataset and reports the MSE of
the de-quantised outputs.

The synthetic_* helpers build a deterministic sinusoid workload so the
quantisation error has a stable regression baseline without any external
dataset.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .config import MetaParams
from .fixed_point import FxConfig, FxValue, fx_from_real, quantize_real
from .activations import HardSigmoidParams, HardTanhParams
from .lstm_model import (
    DenseWeights,
    LstmWeights,
    QuantModel,
    float_reference_infer,
    model_infer,
)

DEFAULT_SLOPE_SHIFT = 3
DEFAULT_SIGMOID_LOWER = -3.0
DEFAULT_SIGMOID_UPPER = 3.0


@dataclass
class FloatModel:
    """Real-valued twin of QuantModel; arrays are indexed [row][col]."""

    meta: MetaParams
    W_i: np.ndarray
    W_f: np.ndarray
    W_g: np.ndarray
    W_o: np.ndarray
    b_i: np.ndarray
    b_f: np.ndarray
    b_g: np.ndarray
    b_o: np.ndarray
    W_d: np.ndarray
    b_d: np.ndarray
    slope_shift: int = DEFAULT_SLOPE_SHIFT
    sigmoid_lower: float = DEFAULT_SIGMOID_LOWER
    sigmoid_upper: float = DEFAULT_SIGMOID_UPPER

    def __post_init__(self):
        k, m, p = self.meta.hidden_size, self.meta.input_size, self.meta.out_features
        for name in ("W_i", "W_f", "W_g", "W_o"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (k, k + m):
                raise ValueError(f"{name} has shape {arr.shape}, expected {(k, k + m)}")
            setattr(self, name, arr)
        for name in ("b_i", "b_f", "b_g", "b_o"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (k,):
                raise ValueError(f"{name} has shape {arr.shape}, expected {(k,)}")
            setattr(self, name, arr)
        self.W_d = np.asarray(self.W_d, dtype=float)
        if self.W_d.shape != (p, k):
            raise ValueError(f"W_d has shape {self.W_d.shape}, expected {(p, k)}")
        self.b_d = np.asarray(self.b_d, dtype=float)
        if self.b_d.shape != (p,):
            raise ValueError(f"b_d has shape {self.b_d.shape}, expected {(p,)}")

    @property
    def hidden_size(self) -> int:
        return self.meta.hidden_size

    @property
    def input_size(self) -> int:
        return self.meta.input_size

    @property
    def out_features(self) -> int:
        return self.meta.out_features


# ============================================================
# Quantisation
# ============================================================

class _SatCounter:
    def __init__(self):
        self.count = 0

    def q(self, r: float, cfg: FxConfig) -> FxValue:
        v, sat = quantize_real(r, cfg)
        if sat:
            self.count += 1
        return v


def _finite_or_die(fm: FloatModel):
    for name in ("W_i", "W_f", "W_g", "W_o", "b_i", "b_f", "b_g", "b_o", "W_d", "b_d"):
        arr = getattr(fm, name)
        if not np.all(np.isfinite(arr)):
            idx = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
            raise ValueError(f"{name}{list(idx)} is not finite")


def quantize_model(fm: FloatModel, cfg: FxConfig) -> tuple[QuantModel, int]:
    """Quantise every weight and bias; returns the model and the number of
    values that saturated at the rails."""
    _finite_or_die(fm)
    sat = _SatCounter()

    def mat(arr) -> tuple:
        return tuple(tuple(sat.q(float(x), cfg) for x in row) for row in arr)

    def vec(arr) -> tuple:
        return tuple(sat.q(float(x), cfg) for x in arr)

    lstm = LstmWeights(
        W_i=mat(fm.W_i), W_f=mat(fm.W_f), W_g=mat(fm.W_g), W_o=mat(fm.W_o),
        b_i=vec(fm.b_i), b_f=vec(fm.b_f), b_g=vec(fm.b_g), b_o=vec(fm.b_o),
    )
    dense = DenseWeights(W=mat(fm.W_d), b=vec(fm.b_d))

    lo, hi = fm.meta.HardTanh_threshold
    tanh = HardTanhParams(fx_from_real(lo, cfg), fx_from_real(hi, cfg))
    sigmoid = HardSigmoidParams(
        fm.slope_shift,
        fx_from_real(fm.sigmoid_lower, cfg),
        fx_from_real(fm.sigmoid_upper, cfg),
        fx_from_real(0.5, cfg),
    )
    meta = replace(fm.meta, frac_bits=cfg.frac_bits, total_bits=cfg.total_bits)
    return QuantModel(lstm=lstm, dense=dense, cfg=cfg, tanh=tanh,
                      sigmoid=sigmoid, meta=meta), sat.count


def quantize_sequence(seq, cfg: FxConfig) -> tuple:
    """Quantise one input sequence (list of per-step real vectors)."""
    return tuple(tuple(fx_from_real(float(x), cfg) for x in step) for step in seq)


def dequantize(values) -> list[float]:
    return [v.value for v in values]


# ============================================================
# Error measurement
# ============================================================

def quantization_error(fm: FloatModel, qm: QuantModel, dataset) -> float:
    """MSE between the float reference and the de-quantised model outputs,
    averaged over every sequence and output dimension."""
    if len(dataset) == 0:
        raise ValueError("dataset must contain at least one sequence")
    total = 0.0
    n = 0
    for seq in dataset:
        ref = float_reference_infer(seq, fm)
        out, _ = model_infer(quantize_sequence(seq, qm.cfg), qm)
        for r, q in zip(ref, out):
            total += (r - q.value) ** 2
            n += 1
    return total / n


# ============================================================
# Deterministic synthetic workload
# ============================================================

def synthetic_float_model(meta: MetaParams | None = None, seed: int = 2024,
                          scale: float = 0.5) -> FloatModel:
    """Seeded uniform weights in [-scale, scale); a stand-in trained model."""
    if meta is None:
        meta = MetaParams()
    rng = np.random.default_rng(seed)
    k, m, p = meta.hidden_size, meta.input_size, meta.out_features

    def u(*shape):
        return rng.uniform(-scale, scale, shape)

    return FloatModel(
        meta=meta,
        W_i=u(k, k + m), W_f=u(k, k + m), W_g=u(k, k + m), W_o=u(k, k + m),
        b_i=u(k), b_f=u(k), b_g=u(k), b_o=u(k),
        W_d=u(p, k), b_d=u(p),
    )


def synthetic_sequences(input_size: int, n_sequences: int, seq_len: int,
                        seed: int = 2024) -> list:
    """Mixtures of two sinusoids per feature, amplitudes bounded below 1."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_sequences):
        a = rng.uniform(0.2, 0.5, (2, input_size))
        w = rng.uniform(0.1, 1.5, (2, input_size))
        ph = rng.uniform(0.0, 2.0 * np.pi, (2, input_size))
        seq = []
        for t in range(seq_len):
            step = a[0] * np.sin(w[0] * t + ph[0]) + a[1] * np.sin(w[1] * t + ph[1])
            seq.append([float(x) for x in step])
        out.append(seq)
    return out

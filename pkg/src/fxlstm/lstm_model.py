"""Quantised LSTM cell, sequence unrolling, dense head, and a float reference.

Per step t, with z the concatenation [h_{t-1}, x_t] in exactly that order:

    i = HardSigmoid*(W_i z + b_i)        input gate
    f = HardSigmoid*(W_f z + b_f)        forget gate
    g = HardTanh   (W_g z + b_g)         cell candidate
    o = HardSigmoid*(W_o z + b_o)        output gate
    C_t = f * C_{t-1} + i * g            elementwise
    h_t = o * HardTanh(C_t)              elementwise

Gate preactivations run on one of the two MAC engines.  Elementwise
products are widened, rounded back with f_round, and added with
saturation, the same regime the fused scalar engine applies inside its
loop.  Initial h and C are zero.  Only the final hidden state feeds the
dense layer, and the dense layer has no activation.

float_reference_infer walks the identical dataflow in plain float
arithmetic with real-valued hard activations; it is the oracle the
quantisation error is measured against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

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
from .config import MetaParams
from .fixed_point import FxConfig, FxValue, fx_add, fx_mul_widening, fx_round_narrow
from .mac_engine import EngineKind, dot_bias
from .perf_model import ELEMENTWISE_CYCLES_PER_UNIT, CycleReport

if TYPE_CHECKING:
    from .quantizer import FloatModel

Vector = tuple[FxValue, ...]
Matrix = tuple[Vector, ...]


# ============================================================
# Weight and state containers
# ============================================================

def _check_matrix(name: str, m: Matrix, rows: int, cols: int, cfg: FxConfig):
    if len(m) != rows:
        raise ValueError(f"{name} has {len(m)} rows, expected {rows}")
    for r, row in enumerate(m):
        if len(row) != cols:
            raise ValueError(f"{name} row {r} has {len(row)} columns, expected {cols}")
        for v in row:
            if v.cfg != cfg:
                raise ValueError(f"{name} mixes formats: {v.cfg} vs {cfg}")


def _check_vector(name: str, v: Vector, length: int, cfg: FxConfig):
    if len(v) != length:
        raise ValueError(f"{name} has length {len(v)}, expected {length}")
    for x in v:
        if x.cfg != cfg:
            raise ValueError(f"{name} mixes formats: {x.cfg} vs {cfg}")


@dataclass(frozen=True)
class LstmWeights:
    """Four gate matrices K x (K+M) and their K biases, one shared format."""

    W_i: Matrix
    W_f: Matrix
    W_g: Matrix
    W_o: Matrix
    b_i: Vector
    b_f: Vector
    b_g: Vector
    b_o: Vector

    def __post_init__(self):
        k = len(self.W_i)
        if k < 1:
            raise ValueError("hidden size must be at least 1")
        cols = len(self.W_i[0]) if self.W_i[0] else 0
        if cols <= k:
            raise ValueError(f"gate rows have {cols} columns, need hidden+input > {k}")
        cfg = self.W_i[0][0].cfg
        for name in ("W_i", "W_f", "W_g", "W_o"):
            _check_matrix(name, getattr(self, name), k, cols, cfg)
        for name in ("b_i", "b_f", "b_g", "b_o"):
            _check_vector(name, getattr(self, name), k, cfg)

    @property
    def cfg(self) -> FxConfig:
        return self.W_i[0][0].cfg

    @property
    def hidden_size(self) -> int:
        return len(self.W_i)

    @property
    def input_size(self) -> int:
        return len(self.W_i[0]) - len(self.W_i)


@dataclass(frozen=True)
class DenseWeights:
    W: Matrix
    b: Vector

    def __post_init__(self):
        p = len(self.W)
        if p < 1 or len(self.W[0]) < 1:
            raise ValueError("dense layer needs at least one row and one column")
        cfg = self.W[0][0].cfg
        _check_matrix("W_d", self.W, p, len(self.W[0]), cfg)
        _check_vector("b_d", self.b, p, cfg)

    @property
    def cfg(self) -> FxConfig:
        return self.W[0][0].cfg

    @property
    def in_features(self) -> int:
        return len(self.W[0])

    @property
    def out_features(self) -> int:
        return len(self.W)


@dataclass(frozen=True)
class LstmState:
    h: Vector
    c: Vector

    def __post_init__(self):
        if len(self.h) != len(self.c):
            raise ValueError(f"state size mismatch: |h| {len(self.h)} vs |C| {len(self.c)}")

    @classmethod
    def zeros(cls, hidden_size: int, cfg: FxConfig) -> "LstmState":
        z = FxValue(0, cfg)
        return cls((z,) * hidden_size, (z,) * hidden_size)


SigmoidImpl = HardSigmoidParams | ActivationTable | StepTable


def _sigmoid_fn(impl: SigmoidImpl) -> Callable[[FxValue], FxValue]:
    if isinstance(impl, HardSigmoidParams):
        return lambda x: hardsigmoid_arith(x, impl)
    return lambda x: hardsigmoid_lookup(x, impl)


@dataclass
class QuantModel:
    """A quantised model plus the meta-parameters it was built for."""

    lstm: LstmWeights
    dense: DenseWeights
    cfg: FxConfig
    tanh: HardTanhParams
    sigmoid: HardSigmoidParams
    meta: MetaParams

    def __post_init__(self):
        if self.cfg != self.meta.cfg:
            raise ValueError(f"model format {self.cfg} does not match meta {self.meta.cfg}")
        if self.lstm.cfg != self.cfg or self.dense.cfg != self.cfg:
            raise ValueError("weight formats do not match the model format")
        if self.lstm.hidden_size != self.meta.hidden_size:
            raise ValueError(f"hidden_size {self.lstm.hidden_size} does not match meta {self.meta.hidden_size}")
        if self.lstm.input_size != self.meta.input_size:
            raise ValueError(f"input_size {self.lstm.input_size} does not match meta {self.meta.input_size}")
        if self.dense.in_features != self.meta.in_features:
            raise ValueError(f"dense in_features {self.dense.in_features} does not match meta {self.meta.in_features}")
        if self.dense.out_features != self.meta.out_features:
            raise ValueError(f"dense out_features {self.dense.out_features} does not match meta {self.meta.out_features}")
        if self.tanh.min_val.cfg != self.cfg or self.sigmoid.cfg != self.cfg:
            raise ValueError("activation parameter formats do not match the model format")

    def sigmoid_impl(self) -> SigmoidImpl:
        """The configured HardSigmoid* realisation; all three are bit-identical."""
        method = self.meta.HardSigmoid_method
        if method == "1to1":
            return build_1to1_table(self.cfg, self.sigmoid)
        if method == "step":
            return build_step_table(self.cfg, self.sigmoid)
        return self.sigmoid


# ============================================================
# Forward pass
# ============================================================

def _elementwise_mul(a: FxValue, b: FxValue) -> FxValue:
    """Widen, round back, as one fused elementwise multiplier does."""
    return fx_round_narrow(fx_mul_widening(a, b), a.cfg)


def lstm_cell_step(
    x_t: Sequence[FxValue],
    s: LstmState,
    w: LstmWeights,
    kind: EngineKind,
    tanh_p: HardTanhParams | None = None,
    sigmoid: SigmoidImpl | None = None,
) -> tuple[LstmState, int]:
    """One time step. Returns the new state and its cycle cost on one gate ALU."""
    k, m = w.hidden_size, w.input_size
    if len(x_t) != m:
        raise ValueError(f"input has {len(x_t)} features, model expects {m}")
    if len(s.h) != k:
        raise ValueError(f"state has {len(s.h)} units, model expects {k}")
    cfg = w.cfg
    for v in x_t:
        if v.cfg != cfg:
            raise ValueError(f"input format {v.cfg} does not match model format {cfg}")
    if tanh_p is None:
        tanh_p = HardTanhParams.default(cfg)
    if sigmoid is None:
        sigmoid = HardSigmoidParams.default(cfg)
    sig = _sigmoid_fn(sigmoid)

    z = tuple(s.h) + tuple(x_t)
    cycles = 0

    def gate(mat: Matrix, bias: Vector) -> list[FxValue]:
        nonlocal cycles
        out = []
        for row, b in zip(mat, bias):
            r = dot_bias(row, z, b, kind)
            cycles += r.cycles
            out.append(r.value)
        return out

    i_pre = gate(w.W_i, w.b_i)
    f_pre = gate(w.W_f, w.b_f)
    g_pre = gate(w.W_g, w.b_g)
    o_pre = gate(w.W_o, w.b_o)

    i = [sig(v) for v in i_pre]
    f = [sig(v) for v in f_pre]
    g = [hardtanh(v, tanh_p) for v in g_pre]
    o = [sig(v) for v in o_pre]

    c_new = []
    h_new = []
    for u in range(k):
        keep = _elementwise_mul(f[u], s.c[u])
        write = _elementwise_mul(i[u], g[u])
        c_t = fx_add(keep, write)
        c_new.append(c_t)
        h_new.append(_elementwise_mul(o[u], hardtanh(c_t, tanh_p)))
    cycles += ELEMENTWISE_CYCLES_PER_UNIT * k

    return LstmState(tuple(h_new), tuple(c_new)), cycles


def lstm_layer_forward(
    seq: Sequence[Sequence[FxValue]],
    w: LstmWeights,
    kind: EngineKind,
    tanh_p: HardTanhParams | None = None,
    sigmoid: SigmoidImpl | None = None,
    per_step_cycles: list[int] | None = None,
    state_trace: list[LstmState] | None = None,
) -> tuple[Vector, int]:
    """Run a sequence from zero state; returns the final hidden state and
    total cycles.  The two optional lists collect per-step cycles and
    states for debugging."""
    if len(seq) == 0:
        raise ValueError("sequence must have at least one step")
    state = LstmState.zeros(w.hidden_size, w.cfg)
    total = 0
    for x_t in seq:
        state, cycles = lstm_cell_step(x_t, state, w, kind, tanh_p, sigmoid)
        total += cycles
        if per_step_cycles is not None:
            per_step_cycles.append(cycles)
        if state_trace is not None:
            state_trace.append(state)
    return state.h, total


def dense_forward(
    h: Sequence[FxValue], d: DenseWeights, kind: EngineKind
) -> tuple[Vector, int]:
    """y_p = W_d[p] . h + b_d[p]; no activation afterwards."""
    if len(h) != d.in_features:
        raise ValueError(f"dense input has {len(h)} features, layer expects {d.in_features}")
    out = []
    cycles = 0
    for row, b in zip(d.W, d.b):
        r = dot_bias(row, h, b, kind)
        cycles += r.cycles
        out.append(r.value)
    return tuple(out), cycles


def model_infer(
    seq: Sequence[Sequence[FxValue]], m: QuantModel
) -> tuple[Vector, CycleReport]:
    """Full inference: LSTM over the sequence, dense on the final state."""
    per_step: list[int] = []
    h_final, _ = lstm_layer_forward(
        seq, m.lstm, m.meta.engine_kind, m.tanh, m.sigmoid_impl(),
        per_step_cycles=per_step,
    )
    y, dense_cycles = dense_forward(h_final, m.dense, m.meta.engine_kind)
    return y, CycleReport(per_step=tuple(per_step), dense_cycles=dense_cycles)


# ============================================================
# Float reference (exact dataflow twin, real arithmetic)
# ============================================================

def hardsigmoid_real(x: float, slope_shift: int, lower: float, upper: float) -> float:
    if x < lower:
        return 0.0
    if x >= upper:
        return 1.0
    return x * 2.0 ** -slope_shift + 0.5


def hardtanh_real(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def float_reference_infer(seq, fm: "FloatModel") -> list[float]:
    """Same dataflow as model_infer, plain floats, real hard activations."""
    k, m, p = fm.hidden_size, fm.input_size, fm.out_features
    lo, hi = fm.meta.HardTanh_threshold
    s_lo, s_hi, shift = fm.sigmoid_lower, fm.sigmoid_upper, fm.slope_shift
    if len(seq) == 0:
        raise ValueError("sequence must have at least one step")

    h = [0.0] * k
    c = [0.0] * k
    for x_t in seq:
        if len(x_t) != m:
            raise ValueError(f"input has {len(x_t)} features, model expects {m}")
        z = list(h) + [float(v) for v in x_t]

        def gate(mat, bias, act):
            return [
                act(sum(float(mat[r][j]) * z[j] for j in range(k + m)) + float(bias[r]))
                for r in range(k)
            ]

        i = gate(fm.W_i, fm.b_i, lambda v: hardsigmoid_real(v, shift, s_lo, s_hi))
        f = gate(fm.W_f, fm.b_f, lambda v: hardsigmoid_real(v, shift, s_lo, s_hi))
        g = gate(fm.W_g, fm.b_g, lambda v: hardtanh_real(v, lo, hi))
        o = gate(fm.W_o, fm.b_o, lambda v: hardsigmoid_real(v, shift, s_lo, s_hi))
        c = [f[u] * c[u] + i[u] * g[u] for u in range(k)]
        h = [o[u] * hardtanh_real(c[u], lo, hi) for u in range(k)]

    return [
        sum(float(fm.W_d[r][j]) * h[j] for j in range(k)) + float(fm.b_d[r])
        for r in range(p)
    ]

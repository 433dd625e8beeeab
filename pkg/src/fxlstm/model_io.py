"""JSON file formats for models and input sequences.

Three formats, each tagged by a "format" key:

  fxlstm-float-model   real-valued weights plus meta-parameters
  fxlstm-quant-model   raw fixed-point integers, the format, activation
                       parameter raws, and quantisation statistics
  fxlstm-sequences     a list of sequences; each sequence is a list of
                       per-step feature vectors (reals)

Writers emit canonical JSON (sorted keys, two-space indent, trailing
newline), so identical content produces identical bytes.
"""

from __future__ import annotations

import json
import math

from .activations import HardSigmoidParams, HardTanhParams
from .config import ConfigError, MetaParams
from .fixed_point import FxConfig, FxValue
from .lstm_model import DenseWeights, LstmWeights, QuantModel
from .quantizer import FloatModel

FLOAT_MODEL_FORMAT = "fxlstm-float-model"
QUANT_MODEL_FORMAT = "fxlstm-quant-model"
SEQUENCES_FORMAT = "fxlstm-sequences"


class DataError(ValueError):
    """A model or sequence file is malformed."""


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_json(path: str, expect_format: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != expect_format:
        raise DataError(f"{path} is not a {expect_format} file")
    return doc


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def _real_matrix(doc: dict, section: str, key: str, rows: int, cols: int) -> list:
    m = doc.get(section, {}).get(key)
    if not (isinstance(m, list) and len(m) == rows
            and all(isinstance(r, list) and len(r) == cols for r in m)):
        raise DataError(f"{section}.{key} must be a {rows}x{cols} matrix")
    for i, row in enumerate(m):
        for j, x in enumerate(row):
            if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                raise DataError(f"{section}.{key}[{i}][{j}] is not a finite number")
    return m


def _real_vector(doc: dict, section: str, key: str, length: int) -> list:
    v = doc.get(section, {}).get(key)
    if not (isinstance(v, list) and len(v) == length):
        raise DataError(f"{section}.{key} must be a vector of length {length}")
    for i, x in enumerate(v):
        if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
            raise DataError(f"{section}.{key}[{i}] is not a finite number")
    return v


def _meta_from(doc: dict, path: str) -> MetaParams:
    try:
        return MetaParams.from_dict(doc.get("meta", {}))
    except ConfigError as e:
        raise DataError(f"{path}: bad meta block: {e}") from None


# ============================================================
# Float model
# ============================================================

def save_float_model(fm: FloatModel, path: str) -> None:
    doc = {
        "format": FLOAT_MODEL_FORMAT,
        "version": 1,
        "meta": fm.meta.to_dict(),
        "slope_shift": fm.slope_shift,
        "sigmoid_lower": fm.sigmoid_lower,
        "sigmoid_upper": fm.sigmoid_upper,
        "lstm": {
            name: getattr(fm, name).tolist()
            for name in ("W_i", "W_f", "W_g", "W_o", "b_i", "b_f", "b_g", "b_o")
        },
        "dense": {"W": fm.W_d.tolist(), "b": fm.b_d.tolist()},
    }
    _write(path, dumps_canonical(doc))


def load_float_model(path: str) -> FloatModel:
    doc = _read_json(path, FLOAT_MODEL_FORMAT)
    meta = _meta_from(doc, path)
    k, m, p = meta.hidden_size, meta.input_size, meta.out_features
    kwargs = {}
    for name in ("W_i", "W_f", "W_g", "W_o"):
        kwargs[name] = _real_matrix(doc, "lstm", name, k, k + m)
    for name in ("b_i", "b_f", "b_g", "b_o"):
        kwargs[name] = _real_vector(doc, "lstm", name, k)
    w_d = _real_matrix(doc, "dense", "W", p, k)
    b_d = _real_vector(doc, "dense", "b", p)
    slope = doc.get("slope_shift", 3)
    if not isinstance(slope, int) or slope < 0:
        raise DataError(f"{path}: slope_shift must be a non-negative integer")
    try:
        return FloatModel(meta=meta, W_d=w_d, b_d=b_d, slope_shift=slope,
                          sigmoid_lower=float(doc.get("sigmoid_lower", -3.0)),
                          sigmoid_upper=float(doc.get("sigmoid_upper", 3.0)),
                          **kwargs)
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None


# ============================================================
# Quantised model
# ============================================================

def save_quant_model(qm: QuantModel, saturated: int, path: str) -> None:
    def mat(m):
        return [[v.raw for v in row] for row in m]

    def vec(v):
        return [x.raw for x in v]

    total = (4 * qm.meta.hidden_size * (qm.meta.hidden_size + qm.meta.input_size + 1)
             + qm.meta.out_features * (qm.meta.hidden_size + 1))
    doc = {
        "format": QUANT_MODEL_FORMAT,
        "version": 1,
        "meta": qm.meta.to_dict(),
        "activations": {
            "sigmoid": {
                "slope_shift": qm.sigmoid.slope_shift,
                "lower_raw": qm.sigmoid.lower_bound.raw,
                "upper_raw": qm.sigmoid.upper_bound.raw,
                "offset_raw": qm.sigmoid.offset.raw,
            },
            "tanh": {"min_raw": qm.tanh.min_val.raw, "max_raw": qm.tanh.max_val.raw},
        },
        "lstm": {
            "W_i": mat(qm.lstm.W_i), "W_f": mat(qm.lstm.W_f),
            "W_g": mat(qm.lstm.W_g), "W_o": mat(qm.lstm.W_o),
            "b_i": vec(qm.lstm.b_i), "b_f": vec(qm.lstm.b_f),
            "b_g": vec(qm.lstm.b_g), "b_o": vec(qm.lstm.b_o),
        },
        "dense": {"W": mat(qm.dense.W), "b": vec(qm.dense.b)},
        "quantization": {"saturated": saturated, "total_values": total},
    }
    _write(path, dumps_canonical(doc))


def _raw_value(x, cfg: FxConfig, where: str) -> FxValue:
    if not isinstance(x, int) or isinstance(x, bool):
        raise DataError(f"{where} must be an integer raw value")
    if not cfg.min_raw <= x <= cfg.max_raw:
        raise DataError(f"{where} raw {x} outside {cfg} range [{cfg.min_raw}, {cfg.max_raw}]")
    return FxValue(x, cfg)


def load_quant_model(path: str) -> tuple[QuantModel, dict]:
    doc = _read_json(path, QUANT_MODEL_FORMAT)
    meta = _meta_from(doc, path)
    cfg = meta.cfg
    k, m, p = meta.hidden_size, meta.input_size, meta.out_features

    def mat(section, key, rows, cols):
        raw = _real_matrix(doc, section, key, rows, cols)
        return tuple(
            tuple(_raw_value(x, cfg, f"{section}.{key}[{i}][{j}]") for j, x in enumerate(row))
            for i, row in enumerate(raw)
        )

    def vec(section, key, length):
        raw = _real_vector(doc, section, key, length)
        return tuple(_raw_value(x, cfg, f"{section}.{key}[{i}]") for i, x in enumerate(raw))

    lstm = LstmWeights(
        W_i=mat("lstm", "W_i", k, k + m), W_f=mat("lstm", "W_f", k, k + m),
        W_g=mat("lstm", "W_g", k, k + m), W_o=mat("lstm", "W_o", k, k + m),
        b_i=vec("lstm", "b_i", k), b_f=vec("lstm", "b_f", k),
        b_g=vec("lstm", "b_g", k), b_o=vec("lstm", "b_o", k),
    )
    dense = DenseWeights(W=mat("dense", "W", p, k), b=vec("dense", "b", p))

    act = doc.get("activations", {})
    sig = act.get("sigmoid", {})
    tanh = act.get("tanh", {})
    try:
        sigmoid_p = HardSigmoidParams(
            sig.get("slope_shift", 3),
            _raw_value(sig.get("lower_raw"), cfg, "activations.sigmoid.lower_raw"),
            _raw_value(sig.get("upper_raw"), cfg, "activations.sigmoid.upper_raw"),
            _raw_value(sig.get("offset_raw"), cfg, "activations.sigmoid.offset_raw"),
        )
        tanh_p = HardTanhParams(
            _raw_value(tanh.get("min_raw"), cfg, "activations.tanh.min_raw"),
            _raw_value(tanh.get("max_raw"), cfg, "activations.tanh.max_raw"),
        )
        model = QuantModel(lstm=lstm, dense=dense, cfg=cfg, tanh=tanh_p,
                           sigmoid=sigmoid_p, meta=meta)
    except ValueError as e:
        raise DataError(f"{path}: {e}") from None

    stats = doc.get("quantization", {})
    if not isinstance(stats, dict):
        raise DataError(f"{path}: quantization block must be an object")
    return model, stats


# ============================================================
# Input sequences
# ============================================================

def save_sequences(seqs, path: str) -> None:
    doc = {
        "format": SEQUENCES_FORMAT,
        "version": 1,
        "sequences": [[[float(x) for x in step] for step in seq] for seq in seqs],
    }
    _write(path, dumps_canonical(doc))


def load_sequences(path: str, input_size: int | None = None) -> list:
    doc = _read_json(path, SEQUENCES_FORMAT)
    seqs = doc.get("sequences")
    if not isinstance(seqs, list) or len(seqs) == 0:
        raise DataError(f"{path}: sequences must be a non-empty list")
    for s, seq in enumerate(seqs):
        if not isinstance(seq, list) or len(seq) == 0:
            raise DataError(f"{path}: sequence {s} must be a non-empty list of steps")
        for t, step in enumerate(seq):
            if not isinstance(step, list) or len(step) == 0:
                raise DataError(f"{path}: sequence {s} step {t} must be a feature vector")
            if input_size is not None and len(step) != input_size:
                raise DataError(
                    f"{path}: sequence {s} step {t} has {len(step)} features, model expects {input_size}"
                )
            for j, x in enumerate(step):
                if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
                    raise DataError(f"{path}: sequence {s} step {t} feature {j} is not a finite number")
    return seqs

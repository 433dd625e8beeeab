"""Command-line interface: subcommand flows, file outputs, exit codes."""

import json

import pytest

from fxlstm.cli import main
from fxlstm.config import MetaParams
from fxlstm.model_io import save_float_model, save_sequences
from fxlstm.quantizer import synthetic_float_model, synthetic_sequences

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@pytest.fixture
def small_files(tmp_path):
    meta = MetaParams(hidden_size=4, input_size=2, in_features=4, out_features=1)
    fm = synthetic_float_model(meta, seed=12)
    model = tmp_path / "float.json"
    seqs = tmp_path / "seqs.json"
    save_float_model(fm, str(model))
    save_sequences(synthetic_sequences(2, 2, 5, seed=12), str(seqs))
    return model, seqs


# ============================================================
# quantize
# ============================================================

def test_quantize_writes_model(small_files, tmp_path, capsys):
    model, _ = small_files
    out = tmp_path / "quant.json"
    assert main(["quantize", "--model", str(model), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "saturated" in text
    doc = json.loads(out.read_text())
    assert doc["format"] == "fxlstm-quant-model"
    # 4*4*(4+2+1) + 1*(4+1) values
    assert doc["quantization"]["total_values"] == 117


def test_quantize_format_flags(small_files, tmp_path):
    model, _ = small_files
    out = tmp_path / "q68.json"
    assert main(["quantize", "--model", str(model), "--out", str(out),
                 "--frac_bits", "6", "--total_bits", "8"]) == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["frac_bits"] == 6


def test_quantize_rejects_shape_override(small_files, tmp_path, capsys):
    model, _ = small_files
    out = tmp_path / "q.json"
    # changing the shape away from the stored model is a config error,
    # whether it trips meta validation or the explicit file comparison
    code = main(["quantize", "--model", str(model), "--out", str(out),
                 "--hidden_size", "7"])
    assert code == 1
    assert "error: config:" in capsys.readouterr().err
    code = main(["quantize", "--model", str(model), "--out", str(out),
                 "--hidden_size", "7", "--in_features", "7"])
    assert code == 1
    assert "does not match the model file" in capsys.readouterr().err


# ============================================================
# infer
# ============================================================

def _quantized(small_files, tmp_path, *extra):
    model, seqs = small_files
    qpath = tmp_path / "quant.json"
    assert main(["quantize", "--model", str(model), "--out", str(qpath), *extra]) == 0
    return qpath, seqs


def test_infer_stdout_document(small_files, tmp_path, capsys):
    qpath, seqs = _quantized(small_files, tmp_path)
    capsys.readouterr()  # drop the quantize step's output
    assert main(["infer", "--model", str(qpath), "--input", str(seqs)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["format"] == "fxlstm-inference"
    assert doc["num_sequences"] == 2
    for res in doc["results"]:
        assert len(res["output"]) == 1
        assert len(res["output_raw"]) == 1
        assert res["cycles"]["total"] == (res["cycles"]["lstm"]
                                          + res["cycles"]["dense"])
        assert sum(res["cycles"]["per_step"]) == res["cycles"]["lstm"]
        # outputs are on the (4,8) grid
        assert res["output"][0] == res["output_raw"][0] / 16


def test_infer_deterministic_bytes(small_files, tmp_path):
    qpath, seqs = _quantized(small_files, tmp_path)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["infer", "--model", str(qpath), "--input", str(seqs),
                 "--out", str(out1)]) == 0
    assert main(["infer", "--model", str(qpath), "--input", str(seqs),
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_infer_engine_override(small_files, tmp_path, capsys):
    qpath, seqs = _quantized(small_files, tmp_path)
    capsys.readouterr()  # drop the quantize step's output
    assert main(["infer", "--model", str(qpath), "--input", str(seqs)]) == 0
    doc_p = json.loads(capsys.readouterr().out)
    assert main(["infer", "--model", str(qpath), "--input", str(seqs),
                 "--engine", "scalar_fused"]) == 0
    doc_s = json.loads(capsys.readouterr().out)
    assert doc_p["engine"] == "pipelined"
    assert doc_s["engine"] == "scalar_fused"
    # K=4, M=2: pipelined dots cost 4 extra fill cycles each
    assert (doc_p["results"][0]["cycles"]["per_step"][0]
            > doc_s["results"][0]["cycles"]["per_step"][0])


def test_infer_data_error_exit(small_files, tmp_path, capsys):
    qpath, _ = _quantized(small_files, tmp_path)
    missing = tmp_path / "nope.json"
    assert main(["infer", "--model", str(qpath), "--input", str(missing)]) == 2
    assert "error: data:" in capsys.readouterr().err


def test_infer_rejects_width_mismatch(small_files, tmp_path, capsys):
    qpath, _ = _quantized(small_files, tmp_path)
    bad = tmp_path / "bad_seqs.json"
    save_sequences([[[0.1, 0.2, 0.3]]], str(bad))
    assert main(["infer", "--model", str(qpath), "--input", str(bad)]) == 2


# ============================================================
# report
# ============================================================

def test_report_stdout(capsys):
    assert main(["report"]) == 0
    text = capsys.readouterr().out
    assert "throughput:" in text
    assert "DSP:   8/20 (40.0%)" in text
    assert "fits device: yes" in text
    assert "FAIL" not in text  # all recorded-point checks hold


def test_report_out_dir(tmp_path, capsys):
    out = tmp_path / "rep"
    assert main(["report", "--out-dir", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["resources"]["dsp_used"] == 8
    assert all(c["ok"] for c in report["reference_checks"])
    csv_text = (out / "resource_sweep.csv").read_text()
    assert csv_text.splitlines()[0].startswith("hidden_size,")
    assert len(csv_text.splitlines()) == 20  # header + hidden 20..200 step 10
    for name in ("utilization.png", "design_points.png"):
        data = (out / name).read_bytes()
        assert data[:8] == PNG_MAGIC
        assert len(data) > 1000


def test_report_hidden_size_flag_alone(capsys):
    # in_features follows hidden_size when not pinned elsewhere
    assert main(["report", "--hidden_size", "60"]) == 0
    assert "K=60" in capsys.readouterr().out


def test_report_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"hidden_size": 30, "in_features": 30,
                               "engine": "scalar_fused"}))
    assert main(["report", "--config", str(cfg)]) == 0
    assert "K=30" in capsys.readouterr().out
    # flags override the file
    assert main(["report", "--config", str(cfg), "--hidden_size", "40",
                 "--in_features", "40"]) == 0
    out = capsys.readouterr().out
    assert "K=40" in out and "engine scalar_fused" in out


def test_report_five_layer_lut_mode(capsys):
    assert main(["report", "--hidden_size", "60", "--ALU_resource_type", "LUT",
                 "--num_layers", "5"]) == 0
    text = capsys.readouterr().out
    assert "DSP:   0/20" in text
    assert "fits device: yes" in text
    assert "spilled to LUTRAM" in text


# ============================================================
# dump-tables
# ============================================================

def test_dump_tables_counts(capsys):
    assert main(["dump-tables"]) == 0
    text = capsys.readouterr().out
    assert "# 1to1 entries: 96" in text
    assert "# step entries: 14" in text
    assert "[1to1]" in text and "[step]" in text


def test_dump_tables_to_file_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["dump-tables", "--out", str(a)]) == 0
    assert main(["dump-tables", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    # 96 1to1 rows + 14 step rows + headers
    assert sum(1 for l in lines if l and not l.startswith(("#", "[")) and
               not l.startswith(("input_raw", "upper_raw"))) == 110


def test_dump_tables_other_format(capsys):
    assert main(["dump-tables", "--frac_bits", "6", "--total_bits", "8"]) == 0
    text = capsys.readouterr().out
    assert "# 1to1 entries: 255" in text
    assert "# step entries: 33" in text


# ============================================================
# Exit codes and diagnostics
# ============================================================

def test_out_of_range_flag(capsys):
    assert main(["report", "--hidden_size", "300"]) == 1
    err = capsys.readouterr().err
    assert "error: config:" in err
    assert "hidden_size 300 outside [1, 200]" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["report", "--config", str(cfg)]) == 1
    assert "unknown config keys: bogus" in capsys.readouterr().err


def test_nan_weight_is_data_error(small_files, tmp_path, capsys):
    model, _ = small_files
    text = model.read_text()
    doc = json.loads(text)
    doc["lstm"]["W_i"][0][0] = None  # json null: not a finite number
    model.write_text(json.dumps(doc))
    out = tmp_path / "q.json"
    assert main(["quantize", "--model", str(model), "--out", str(out)]) == 2
    assert "error: data:" in capsys.readouterr().err


def test_usage_error(capsys):
    assert main(["quantize"]) == 1  # missing required --model/--out
    assert "error: usage:" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1

"""Operation counts, cycle schedule, throughput/energy identities,
recorded design points, and the resource heuristic's anchor values.
"""

import math

import pytest

from fxlstm.config import MetaParams
from fxlstm.mac_engine import EngineKind
from fxlstm.perf_model import (
    BRAM_18K_BITS,
    DEVICE_BRAM_18K_TOTAL,
    ELEMENTWISE_CYCLES_PER_UNIT,
    POWER_W_ALU_DSP,
    POWER_W_ALU_LUT,
    REFERENCE_POINTS,
    CycleReport,
    cell_step_cycles,
    count_ops,
    dense_phase_cycles,
    efficiency_gops_per_w,
    energy_joules,
    estimate_resources,
    perf,
    reference_checks,
    reference_point,
    schedule_cycles,
    sigmoid_luts,
    throughput_gops,
    weight_bits,
)


def meta_for(k: int, m: int = 1, p: int = 1, **kw) -> MetaParams:
    return MetaParams(hidden_size=k, input_size=m, in_features=k,
                      out_features=p, **kw)


# ============================================================
# Operation counting
# ============================================================

def test_count_ops_minimal_expansion():
    # K = M = P = 1, one step, expanded term by term:
    # gates 2*4*1*3 = 24, activations 4 + 1 = 5, elementwise 2*3 = 6,
    # dense 2*1*2 = 4; total 39
    meta = meta_for(1, seq_len=1)
    assert count_ops(meta) == 39


def test_count_ops_default_point():
    # K=20, M=1, P=1, 6 steps: 6*(2*4*20*22 + 4*20 + 6*20 + 20) + 2*21
    meta = meta_for(20)
    assert count_ops(meta) == 6 * 3740 + 42 == 22482


def test_count_ops_scales_linearly_with_seq():
    meta = meta_for(4, m=2)
    one = count_ops(meta, seq_len=1)
    dense = 2 * meta.out_features * (meta.hidden_size + 1)
    assert count_ops(meta, seq_len=5) == 5 * (one - dense) + dense


def test_count_ops_rejects_bad_seq():
    with pytest.raises(ValueError):
        count_ops(meta_for(2), seq_len=0)


# ============================================================
# Cycle schedule
# ============================================================

def test_elementwise_cost_constant():
    # 5 activations + 3 multiplies + 1 add per hidden unit
    assert ELEMENTWISE_CYCLES_PER_UNIT == 9


def test_cell_step_cycles_worked_values():
    # K=20, M=1: dot length 22
    assert cell_step_cycles(20, 1, EngineKind.PIPELINED, 1) == 80 * 26 + 180 == 2260
    assert cell_step_cycles(20, 1, EngineKind.PIPELINED, 2) == 40 * 26 + 180 == 1220
    assert cell_step_cycles(20, 1, EngineKind.SCALAR_FUSED, 1) == 80 * 22 + 180 == 1940
    assert cell_step_cycles(1, 1, EngineKind.PIPELINED, 1) == 4 * 7 + 9 == 37


def test_gate_alu_parallelism_law():
    # even split halves the gate phase exactly; the elementwise tail is fixed
    for k in (2, 8, 20):
        one = cell_step_cycles(k, 1, EngineKind.PIPELINED, 1)
        two = cell_step_cycles(k, 1, EngineKind.PIPELINED, 2)
        gate_one = one - 9 * k
        assert two - 9 * k == gate_one // 2
    # more ALUs than dots degenerates to a single dot's latency
    assert cell_step_cycles(2, 1, EngineKind.PIPELINED, 64) == 8 + 18


def test_dense_phase_cycles():
    assert dense_phase_cycles(20, 1, EngineKind.PIPELINED, 2) == 25
    assert dense_phase_cycles(20, 1, EngineKind.SCALAR_FUSED, 1) == 21
    assert dense_phase_cycles(10, 7, EngineKind.PIPELINED, 2) == 4 * 15


def test_schedule_cycles_report():
    meta = meta_for(20)
    r = schedule_cycles(meta)
    assert r.per_step == (1220,) * 6
    assert r.dense_cycles == 25
    assert r.lstm_total == 7320
    assert r.total == 7345


def test_cycle_report_totals():
    r = CycleReport(per_step=(10, 20), dense_cycles=5)
    assert r.lstm_total == 30 and r.total == 35


# ============================================================
# Throughput / efficiency / energy identities
# ============================================================

def test_identity_helpers():
    assert throughput_gops(1_000_000, 1e-3) == pytest.approx(1.0)
    assert efficiency_gops_per_w(0.74, 0.057) == pytest.approx(12.982456, abs=1e-5)
    assert energy_joules(0.057, 28.07e-6) == pytest.approx(1.6e-6, rel=0.01)
    with pytest.raises(ValueError):
        throughput_gops(100, 0.0)
    with pytest.raises(ValueError):
        efficiency_gops_per_w(0.5, 0.0)


def test_perf_report_identities():
    meta = meta_for(20)
    p = perf(meta)
    assert p.cycles == 7345
    assert p.latency_s == pytest.approx(7345 / 204e6)
    assert p.throughput_gops == pytest.approx(p.ops / p.latency_s / 1e9)
    assert p.efficiency_gops_per_w == pytest.approx(p.throughput_gops / p.power_w)
    assert p.energy_j == pytest.approx(p.power_w * p.latency_s)


# ============================================================
# Recorded design points
# ============================================================

def test_reference_point_values():
    base = reference_point("baseline")
    assert (base.clock_mhz, base.latency_us, base.throughput_gops) == (100.0, 57.25, 0.363)
    fast = reference_point("pipelined_step")
    assert (fast.clock_mhz, fast.latency_us, fast.throughput_gops) == (204.0, 28.07, 0.740)
    assert fast.power_w == 0.057
    assert len(REFERENCE_POINTS) == 5
    with pytest.raises(KeyError):
        reference_point("nonexistent")


def test_power_constants():
    assert POWER_W_ALU_DSP == 0.057
    assert POWER_W_ALU_LUT == 0.063


def test_reference_checks_all_pass():
    checks = reference_checks()
    assert len(checks) == 10
    for c in checks:
        assert c.ok, f"{c.name}: {c.value} outside [{c.lo}, {c.hi}]"


def test_reference_check_values():
    by_name = {c.name: c.value for c in reference_checks()}
    assert by_name["throughput_improvement_x"] == pytest.approx(2.0386, abs=1e-4)
    assert by_name["latency_reduction_pct"] == pytest.approx(50.9694, abs=1e-3)
    assert by_name["efficiency_dsp_gops_per_w"] == pytest.approx(12.9825, abs=1e-4)
    assert by_name["efficiency_lut_gops_per_w"] == pytest.approx(11.7460, abs=1e-4)
    assert by_name["efficiency_improvement_x"] == pytest.approx(2.3302, abs=1e-4)
    assert by_name["implied_cycles_baseline"] == pytest.approx(5725.0)


# ============================================================
# Resource heuristic
# ============================================================

def test_dsp_mode_anchor():
    r = estimate_resources(meta_for(20))
    assert r.dsp_used == 8
    assert r.dsp_util == pytest.approx(0.40)
    assert r.fits_device


def test_lut_mode_anchor():
    r = estimate_resources(meta_for(20, ALU_resource_type="LUT"))
    assert r.dsp_used == 0
    assert r.lut_used > estimate_resources(meta_for(20)).lut_used


def test_lut_mode_multiplier_delta():
    # moving the 8 multipliers to fabric costs 8 * 60 LUTs; the share of
    # one cell (7 multipliers) lands inside the anchored band
    d = estimate_resources(meta_for(20)).lut_used
    l = estimate_resources(meta_for(20, ALU_resource_type="LUT")).lut_used
    assert l - d == 480
    per_cell = l - d - 60  # subtract the dense layer's multiplier
    assert 350 <= per_cell <= 483
    assert per_cell == 420


def test_default_lut_breakdown():
    # 0 multiplier LUTs + HardTanh 5 + step sigmoid 3 + control 600 + 120
    r = estimate_resources(meta_for(20))
    assert r.lut_used == 728


def test_sigmoid_method_luts_recorded():
    assert sigmoid_luts(4, 8, "step") == 3
    assert sigmoid_luts(4, 8, "arithmetic") == 6
    assert sigmoid_luts(4, 8, "1to1") == 8
    assert sigmoid_luts(6, 8, "arithmetic") == 36
    assert sigmoid_luts(8, 10, "step") == 1793


def test_sigmoid_method_luts_nearest_fallback():
    # unmeasured formats borrow the nearest measured one
    assert sigmoid_luts(7, 10, "1to1") == 117   # closest total: (8,10)
    assert sigmoid_luts(4, 9, "step") == 3      # ties on total, frac picks (4,8)


def test_method_cost_ordering_default_format():
    # at (4,8) the step table is the cheapest realisation, 1to1 the largest
    costs = [sigmoid_luts(4, 8, m) for m in ("step", "arithmetic", "1to1")]
    assert costs == sorted(costs)


def test_weight_bits_values():
    # K=20, M=1, P=1: 4*20*22 + 21 = 1781 entries of 8 bits
    assert weight_bits(meta_for(20)) == 14248
    # stacked layers switch M to K after the first layer
    k60 = meta_for(60)
    assert weight_bits(k60, 5) == 8 * (4 * 60 * 62 + 4 * (4 * 60 * 121) + 61)


def test_bram_allocation():
    r = estimate_resources(meta_for(20))
    assert r.weight_bits == 14248
    assert r.bram_18k_used == 1
    assert r.lutram_bits == 0


def test_bram_spill_capped_auto():
    # five layers of hidden 60 exceed the 20-block budget; AUTO caps BRAM
    # and spills the rest to distributed RAM without failing the verdict
    meta = meta_for(60, ALU_resource_type="LUT")
    r = estimate_resources(meta, 5)
    assert r.bram_18k_used == DEVICE_BRAM_18K_TOTAL
    assert r.lutram_bits == r.weight_bits - DEVICE_BRAM_18K_TOTAL * BRAM_18K_BITS
    assert r.lutram_luts == math.ceil(r.lutram_bits / 64)
    assert r.fits_device


def test_five_layer_dsp_mode_does_not_fit():
    # 36 multipliers need 36 DSP slices on a 20-slice device
    r = estimate_resources(meta_for(60), 5)
    assert r.dsp_used == 36
    assert not r.fits_device


def test_weight_resource_type_modes():
    meta_l = meta_for(20, weight_resource_type="LUTRAM")
    r = estimate_resources(meta_l)
    assert r.bram_18k_used == 0 and r.lutram_bits == r.weight_bits
    meta_b = meta_for(60, weight_resource_type="BRAM")
    r = estimate_resources(meta_b, 5)
    assert r.bram_18k_used == math.ceil(r.weight_bits / BRAM_18K_BITS)
    assert r.bram_18k_used > DEVICE_BRAM_18K_TOTAL
    assert not r.fits_device  # forcing BRAM past the device budget fails


def test_resources_monotone_in_hidden_size():
    prev_bits = 0
    for k in (10, 20, 40, 80):
        r = estimate_resources(meta_for(k))
        assert r.weight_bits > prev_bits
        prev_bits = r.weight_bits
        # multiplier count is per cell, not per unit: DSP use stays flat
        assert r.dsp_used == 8


def test_rejects_bad_layer_count():
    with pytest.raises(ValueError):
        estimate_resources(meta_for(20), 0)

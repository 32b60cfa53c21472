import math

import numpy as np
import pytest

from neurosim.models.device_model import LeakModel
from neurosim.models.generic_error import ConfigError, DomainError
from neurosim.models.synapse_model import DpiSynapseParams, SynapseState
from neurosim.sim.device import effective_tau
from neurosim.sim.synapse import drive_target, exact_step, peak_after_train, periodic_envelope, relax, \
    steady_state_envelope, synapse_rhs, tune_weight


def test_gain_defaults_to_four_times_bias():
    assert DpiSynapseParams(I_tau=50e-15).I_gain == pytest.approx(200e-15)
    assert DpiSynapseParams(I_tau=50e-15, I_gain=70e-15).I_gain == pytest.approx(70e-15)


def test_zero_step_is_identity(synapse, leak, consts):
    state = SynapseState(I_syn=3e-12, pulse_active=True)
    assert exact_step(state, 0.0, synapse, leak, consts) == state


def test_negative_step_rejected(synapse, leak, consts):
    with pytest.raises(DomainError):
        exact_step(SynapseState(), -1e-9, synapse, leak, consts)


def test_decay_is_exact_exponential(synapse, no_leak, consts):
    tau = effective_tau(synapse.C_syn, synapse.I_tau, no_leak, consts)
    state = exact_step(SynapseState(I_syn=1e-9), tau, synapse, no_leak, consts)
    assert state.I_syn == pytest.approx(1e-9 / math.e, rel=1e-12)


def test_active_pulse_approaches_drive_target(synapse, leak, consts):
    target = drive_target(synapse, leak)
    state = exact_step(SynapseState(pulse_active=True), 1e3, synapse, leak, consts)
    assert state.I_syn == pytest.approx(target, rel=1e-12)
    assert target == pytest.approx(synapse.I_gain / (synapse.I_tau + leak.total()) * synapse.I_w)


def test_composition_matches_single_step(synapse, leak, consts):
    state = SynapseState(I_syn=2e-10, pulse_active=True)
    whole = exact_step(state, 3e-3, synapse, leak, consts)
    split = exact_step(exact_step(state, 1e-3, synapse, leak, consts), 2e-3, synapse, leak, consts)
    assert split.I_syn == pytest.approx(whole.I_syn, rel=1e-12)


def test_output_never_negative(synapse, leak, consts):
    state = exact_step(SynapseState(I_syn=0.0), 10.0, synapse, leak, consts)
    assert state.I_syn == 0.0


def test_rhs_matches_step_derivative(synapse, leak, consts):
    state = SynapseState(I_syn=1e-10, pulse_active=True)
    dt = 1e-9
    numeric = (exact_step(state, dt, synapse, leak, consts).I_syn - state.I_syn) / dt
    assert synapse_rhs(state, synapse, leak, consts) == pytest.approx(numeric, rel=1e-6)


def test_relax_endpoints():
    assert relax(1.0, 3.0, 0.0, 0.5) == 1.0
    assert relax(1.0, 3.0, 100.0, 0.5) == pytest.approx(3.0)


def test_periodic_envelope_is_fixed_point():
    target, tau, on, period = 2.0, 0.1, 0.01, 0.05
    peak, trough = periodic_envelope(target, tau, on, period)
    # 一个周期：充电 on，再放电 period-on，回到谷值
    assert relax(trough, target, on, tau) == pytest.approx(peak, rel=1e-12)
    assert relax(peak, 0.0, period - on, tau) == pytest.approx(trough, rel=1e-12)


def test_steady_state_envelope_bounds(synapse, leak, consts):
    peak, trough = steady_state_envelope(synapse, leak, consts, 50.0)
    assert 0 < trough < peak < drive_target(synapse, leak)


def test_steady_state_envelope_errors(synapse, leak, consts):
    with pytest.raises(DomainError):
        steady_state_envelope(synapse, leak, consts, 0.0)
    with pytest.raises(ConfigError):
        steady_state_envelope(synapse.model_copy(update={'pulse_width': 0.03}), leak, consts, 50.0)


def test_faster_synapse_sits_lower_with_more_ripple(leak, consts):
    fast = DpiSynapseParams(I_tau=500e-15)
    slow = DpiSynapseParams(I_tau=100e-15)
    fast_peak, fast_trough = steady_state_envelope(fast, leak, consts, 50.0)
    slow_peak, slow_trough = steady_state_envelope(slow, leak, consts, 50.0)
    assert fast_trough < slow_trough
    assert fast_peak - fast_trough > slow_peak - slow_trough


def test_peak_after_single_pulse(synapse, leak, consts):
    tau = effective_tau(synapse.C_syn, synapse.I_tau, leak, consts)
    expected = drive_target(synapse, leak) * -math.expm1(-synapse.pulse_width / tau)
    assert peak_after_train(synapse, leak, consts, 50.0, 0.02) == pytest.approx(expected, rel=1e-9)


def test_peak_after_train_approaches_envelope(synapse, leak, consts):
    peak, _ = steady_state_envelope(synapse, leak, consts, 50.0)
    assert peak_after_train(synapse, leak, consts, 50.0, 20.0) == pytest.approx(peak, rel=1e-9)


@pytest.mark.parametrize('I_tau', [1e-15, 100e-15, 500e-15])
def test_tune_weight_hits_target_peak(leak, consts, I_tau):
    params = tune_weight(DpiSynapseParams(I_tau=I_tau), leak, consts, 50.0, 1.0, 1e-9)
    assert peak_after_train(params, leak, consts, 50.0, 1.0) == pytest.approx(1e-9, rel=1e-9)


def test_peak_is_linear_in_weight(synapse, leak, consts):
    base = peak_after_train(synapse, leak, consts, 50.0, 1.0)
    doubled = peak_after_train(synapse.model_copy(update={'I_w': 2 * synapse.I_w}), leak, consts, 50.0, 1.0)
    np.testing.assert_allclose(doubled, 2 * base, rtol=1e-12)


def _rk4_trace(state: SynapseState, h: float, steps: int, params, leak, consts) -> np.ndarray:
    def rate(i: float) -> float:
        return synapse_rhs(state.model_copy(update={'I_syn': i}), params, leak, consts)

    i, out = state.I_syn, []
    for _ in range(steps):
        k1 = rate(i)
        k2 = rate(i + 0.5 * h * k1)
        k3 = rate(i + 0.5 * h * k2)
        k4 = rate(i + h * k3)
        i += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(i)
    return np.asarray(out)


@pytest.mark.parametrize('I_tau', [10e-15, 100e-15, 1e-12])
@pytest.mark.parametrize('leak_on', [True, False])
@pytest.mark.parametrize('start', [SynapseState(pulse_active=True), SynapseState(I_syn=1e-9)])
def test_rk4_on_rhs_agrees_with_closed_form(consts, I_tau, leak_on, start):
    params = DpiSynapseParams(I_tau=I_tau)
    leak = LeakModel(enabled=leak_on)
    tau = effective_tau(params.C_syn, params.I_tau, leak, consts)
    h = tau / 100
    numeric = _rk4_trace(start, h, 1000, params, leak, consts)
    exact = np.asarray([exact_step(start, k * h, params, leak, consts).I_syn for k in range(1, 1001)])
    scale = max(start.I_syn, drive_target(params, leak) if start.pulse_active else 0.0)
    np.testing.assert_allclose(numeric, exact, rtol=1e-6, atol=1e-6 * scale)


def test_gain_invariant_to_bias_without_leak(no_leak):
    # I_gain 跟着 I_tau 走时，增益与 I_tau 无关
    for I_tau in np.linspace(5e-15, 50e-15, 10):
        params = DpiSynapseParams(I_tau=float(I_tau))
        assert drive_target(params, no_leak) == pytest.approx(4 * params.I_w, rel=1e-12)


def test_leak_breaks_gain_invariance(leak):
    targets = [drive_target(DpiSynapseParams(I_tau=float(x)), leak) for x in np.linspace(5e-15, 50e-15, 10)]
    assert all(t < 4 * 100e-9 for t in targets)
    assert all(b > a for a, b in zip(targets, targets[1:]))

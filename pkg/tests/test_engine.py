import math

import numpy as np
import pytest

from neurosim.models.aer_model import ConnectivityTable, ReceiverModel
from neurosim.models.engine_model import CurrentStep, EngineConfig, Network, SpikeTrain, StimulusProgram, \
    SynapseSpec
from neurosim.models.generic_error import ConfigError, SimulationError
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.models.synapse_model import DpiSynapseParams, SynapseState
from neurosim.sim.engine import locate_crossing, run
from neurosim.sim.neuron import tau_mem
from neurosim.sim.synapse import exact_step


def dc(amplitude: float, start: float, stop: float) -> CurrentStep:
    return CurrentStep(kind='dc', amplitude=amplitude, start=start, stop=stop)


def regular(rate: float, start: float, stop: float) -> SpikeTrain:
    return SpikeTrain(kind='regular', rate=rate, start=start, stop=stop)


def single(neuron, *items) -> tuple[Network, StimulusProgram]:
    network = Network(neurons={'n0': neuron})
    return network, StimulusProgram(items={'n0': list(items)})


# ---- locate_crossing

def test_crossing_on_linear_ramp():
    t = locate_crossing(lambda s: 2.0 * s, 0.0, 1.0, 0.6, 1e-9)
    assert 0.3 <= t <= 0.3 + 1e-9


def test_crossing_on_exponential_approach():
    tau, target, thr = 0.02, 3.0, 1.0
    t = locate_crossing(lambda s: target * (1 - math.exp(-s / tau)), 0.0, 0.1, thr, 1e-10)
    expected = tau * math.log(target / (target - thr))
    assert expected <= t <= expected + 1e-10


def test_tolerance_wider_than_step_returns_step_end():
    assert locate_crossing(lambda s: s, 0.0, 1e-6, 5e-7, 1e-5) == 1e-6


def test_no_bracket_is_an_engine_error():
    with pytest.raises(SimulationError):
        locate_crossing(lambda s: 0.0, 0.0, 1.0, 0.5, 1e-9)


# ---- configuration

def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(dt_max=1e-9, crossing_tolerance=1e-9)
    with pytest.raises(ValueError):
        EngineConfig(duration=0.0)


def test_network_wiring_validation(neuron):
    with pytest.raises(ValueError):
        Network(neurons={'n0': neuron}, synapses={'s0': SynapseSpec(target='n9')})
    with pytest.raises(ValueError):
        Network(neurons={'x': neuron}, synapses={'x': SynapseSpec(target='x')})
    with pytest.raises(ValueError):
        Network(neurons={'n0': neuron}, connectivity=ConnectivityTable(fanout={'n0': [('s9', 1.0)]}))


def test_stimulus_must_match_target_kind(neuron, coarse):
    network = Network(neurons={'n0': neuron}, synapses={'s0': SynapseSpec(target='n0')})
    with pytest.raises(ConfigError):
        run(network, StimulusProgram(items={'n0': [regular(10.0, 0.0, 0.1)]}), coarse)
    with pytest.raises(ConfigError):
        run(network, StimulusProgram(items={'s0': [dc(1e-10, 0.0, 0.1)]}), coarse)


def test_stimulus_items_must_be_ordered():
    with pytest.raises(ValueError):
        StimulusProgram(items={'n0': [dc(1e-10, 0.5, 0.6), dc(1e-10, 0.1, 0.2)]})


# ---- behaviour

def test_quiet_network_stays_at_zero(neuron, coarse):
    network = Network(neurons={'n0': neuron.model_copy(update={'I_fb0': 0.0})},
                      synapses={'s0': SynapseSpec(target='n0')})
    result = run(network, StimulusProgram(), coarse)
    assert result.spikes.spikes == []
    assert len(result.traces.times) == 201
    for values in result.traces.signals.values():
        assert not any(values)


def test_unconnected_synapse_matches_exact_step_composition(synapse, leak, consts):
    network = Network(synapses={'s0': SynapseSpec(params=synapse)})
    stimulus = StimulusProgram(items={'s0': [regular(50.0, 0.0, 0.1)]})
    cfg = EngineConfig(sample_interval=1e-3, duration=0.2)
    times, values = run(network, stimulus, cfg).traces.series('s0')

    # 独立地按脉冲边沿和采样点切分，用 exact_step 逐段推进
    starts = [k / 50.0 for k in range(5)]
    edges = sorted({*starts, *(s + synapse.pulse_width for s in starts), *times.tolist()})
    state, t, expected = SynapseState(), 0.0, {}
    for edge in edges:
        state = exact_step(state, edge - t, synapse, leak, consts)
        t = edge
        active = any(s <= t < s + synapse.pulse_width for s in starts)
        state = state.model_copy(update={'pulse_active': active})
        expected[t] = state.I_syn
    np.testing.assert_allclose(values, [expected[t] for t in times.tolist()], rtol=1e-12, atol=1e-30)
    assert values.max() > 0


def test_extra_events_do_not_change_synapse_samples(synapse):
    network = Network(synapses={'s0': SynapseSpec(params=synapse)})
    stimulus = StimulusProgram(items={'s0': [regular(50.0, 0.0, 0.1)]})
    coarse_times, coarse_values = run(network, stimulus, EngineConfig(sample_interval=2e-3, duration=0.2)) \
        .traces.series('s0')
    _, fine_values = run(network, stimulus, EngineConfig(sample_interval=1e-3, duration=0.2)).traces.series('s0')
    np.testing.assert_allclose(fine_values[::2], coarse_values, rtol=1e-12, atol=1e-30)
    assert len(coarse_times) == 101


def test_membrane_matches_closed_form_step_response(linear_neuron, consts):
    tau = tau_mem(linear_neuron, consts)
    i_in = 50e-12
    network, stimulus = single(linear_neuron, dc(i_in, 0.0, 20.0))
    cfg = EngineConfig(sample_interval=1e-3, duration=10 * tau)
    result = run(network, stimulus, cfg)
    times, values = result.traces.series('n0.I_mem')
    expected = i_in * -np.expm1(-times / tau)
    np.testing.assert_allclose(values[1:], expected[1:], rtol=1e-6)
    assert result.spikes.spikes == []


def test_inserted_no_op_event_keeps_membrane_trace(linear_neuron):
    network, plain = single(linear_neuron, dc(50e-12, 0.0, 1.0))
    _, split = single(linear_neuron, dc(50e-12, 0.0, 1.0), dc(0.0, 0.0537, 0.0713))
    cfg = EngineConfig(dt_max=1e-4, sample_interval=1e-3, duration=0.1)
    _, a = run(network, plain, cfg).traces.series('n0.I_mem')
    _, b = run(network, split, cfg).traces.series('n0.I_mem')
    np.testing.assert_allclose(a, b, rtol=1e-9)


def test_interspike_interval_matches_analytic(linear_neuron, consts):
    # 无反馈时：ISI = ack 延迟 + 不应期 + 从 0 充到阈值的时间
    network, stimulus = single(linear_neuron, dc(200e-12, 0.0, 1.0))
    result = run(network, stimulus, EngineConfig(duration=0.1))
    isis = np.diff(result.spikes.times('n0'))
    expected = 10e-9 + 200e-9 + tau_mem(linear_neuron, consts) * math.log(2.0)
    assert len(isis) >= 3
    np.testing.assert_allclose(isis, expected, rtol=1e-5)


def test_handshake_cycle_per_spike(neuron):
    network, stimulus = single(neuron, dc(300e-12, 0.0, 0.15))
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.2))
    spikes = result.spikes.times('n0')
    assert len(spikes) >= 5
    kinds = [r.kind for r in result.event_log.of_kind('req_rise', 'ack_rise', 'req_fall', 'ack_fall')]
    assert kinds == ['req_rise', 'ack_rise', 'req_fall', 'ack_fall'] * len(spikes)
    assert len(result.aer_events) == len(spikes)
    for event, t in zip(result.aer_events, spikes):
        assert event.t_req == t
        assert event.t_ack == pytest.approx(t + 10e-9, abs=1e-15)


def test_one_spike_per_upward_crossing(linear_neuron):
    # 每个窗口只够充到阈值一次，复位后回不到阈值
    network, stimulus = single(linear_neuron, dc(200e-12, 0.0, 0.025), dc(200e-12, 0.3, 0.325))
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.5))
    spikes = result.spikes.times('n0')
    assert len(spikes) == 2
    assert spikes[0] < 0.025 and 0.3 < spikes[1] < 0.325


def test_crossing_during_busy_handshake_is_suppressed(neuron):
    network = Network(neurons={'n0': neuron}, receiver=ReceiverModel(ack_release_delay=5e-3))
    stimulus = StimulusProgram(items={'n0': [dc(1e-9, 0.0, 0.05)]})
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.05))
    assert result.spikes.count('n0') == 1
    suppressed = result.event_log.of_kind('suppressed')
    assert len(suppressed) == 1
    assert suppressed[0].detail == 'phase=ReqLow'


@pytest.mark.parametrize('start', np.linspace(2.86e-3, 2.978e-3, 7))
def test_busy_crossing_is_suppressed_when_another_neuron_fires_in_same_step(linear_neuron, start):
    # n1 握手未完成时再次上穿，同一步里 n0 恰好先上穿；n1 的上穿照样要被吞掉
    network = Network(neurons={'n0': linear_neuron, 'n1': linear_neuron},
                      receiver=ReceiverModel(ack_release_delay=5e-3))
    stimulus = StimulusProgram(items={'n0': [dc(1e-9, start, 0.05)], 'n1': [dc(1e-9, 0.0, 0.05)]})
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.05))
    assert result.spikes.count('n1') == 1
    assert [r.id for r in result.event_log.of_kind('suppressed')].count('n1') == 1
    assert len(result.aer_events) == len(result.spikes.spikes)


def test_spike_times_converge_with_tolerance(neuron):
    network, stimulus = single(neuron, dc(300e-12, 0.0, 1.0))
    loose = run(network, stimulus, EngineConfig(crossing_tolerance=1e-7, duration=0.1)).spikes.times('n0')
    tight = run(network, stimulus, EngineConfig(crossing_tolerance=1e-10, duration=0.1)).spikes.times('n0')
    assert len(loose) == len(tight) >= 3
    # 每个脉冲的定位误差会平移之后的整条轨迹，所以误差界随序号累积
    bound = 2 * 1e-7 * (np.arange(len(loose)) + 1)
    assert np.all(np.abs(loose - tight) <= bound)


def test_spike_times_converge_with_step(neuron):
    network, stimulus = single(neuron, dc(300e-12, 0.0, 1.0))
    tol = 1e-9
    coarse = run(network, stimulus, EngineConfig(dt_max=1e-5, crossing_tolerance=tol, duration=0.1))
    fine = run(network, stimulus, EngineConfig(dt_max=5e-6, crossing_tolerance=tol, duration=0.1))
    a, b = coarse.spikes.times('n0'), fine.spikes.times('n0')
    assert len(a) == len(b) >= 3
    assert np.all(np.abs(a - b) <= 2 * tol * (np.arange(len(a)) + 1) + 1e-12)


def test_synapse_drives_neuron_and_routes_events(neuron):
    params = DpiSynapseParams(I_tau=100e-15, I_w=100e-9, pulse_width=1e-6)
    network = Network(
        neurons={'pre': neuron, 'post': neuron},
        synapses={'s_in': SynapseSpec(params=params, target='pre'), 's_pp': SynapseSpec(params=params, target='post')},
        connectivity=ConnectivityTable(fanout={'pre': [('s_pp', 2.0)], 'post': []}),
    )
    stimulus = StimulusProgram(items={'pre': [dc(400e-12, 0.0, 0.15)]})
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.2))
    pre = result.spikes.count('pre')
    deliveries = result.event_log.of_kind('deliver')
    assert pre >= 3
    assert len(deliveries) == pre
    assert all(r.id == 's_pp' and 'src=pre' in r.detail for r in deliveries)
    _, i_pp = result.traces.series('s_pp')
    assert i_pp.max() > 0
    _, i_in = result.traces.series('s_in')
    assert not i_in.any()


def test_state_stays_non_negative():
    params = AdexNeuronParams(I_a=500e-12, t_pex=1e-3)
    network, stimulus = single(params, dc(300e-12, 0.0, 0.1))
    result = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.3))
    for name in ('n0.I_mem', 'n0.I_ahp'):
        _, values = result.traces.series(name)
        assert values.min() >= 0


def test_runs_are_bit_identical(neuron):
    network = Network(neurons={'n0': neuron}, synapses={'s0': SynapseSpec(target='n0')})
    stimulus = StimulusProgram(items={'s0': [SpikeTrain(kind='poisson', rate=200.0, start=0.0, stop=0.2)]})
    cfg = EngineConfig(dt_max=1e-4, duration=0.2, seed=5)
    first, second = run(network, stimulus, cfg), run(network, stimulus, cfg)
    assert first.spikes == second.spikes
    assert first.traces == second.traces
    assert first.event_log.lines() == second.event_log.lines()


def test_poisson_train_depends_on_seed():
    network = Network(synapses={'s0': SynapseSpec()})
    stimulus = StimulusProgram(items={'s0': [SpikeTrain(kind='poisson', rate=100.0, start=0.0, stop=1.0)]})
    a = run(network, stimulus, EngineConfig(duration=1.0, seed=1)).traces.series('s0')[1]
    b = run(network, stimulus, EngineConfig(duration=1.0, seed=2)).traces.series('s0')[1]
    assert not np.array_equal(a, b)


def test_event_log_line_format(neuron):
    network, stimulus = single(neuron, dc(300e-12, 0.0, 0.05))
    lines = run(network, stimulus, EngineConfig(dt_max=1e-4, duration=0.05)).event_log.lines()
    assert lines
    assert all(line.startswith('t=') and ' kind=' in line and ' id=' in line and ' detail=' in line
               for line in lines)

"""
混合仿真引擎

- 突触：区间内驱动恒定，用闭式解精确推进
- 神经元：RK4，步长不超过 dt_max
- 离散事件（脉冲边沿、握手、刺激起止、不应期/展宽结束、采样）放在最小堆里，
  连续推进只在相邻事件之间进行
- 阈值上穿用二分定位到 crossing_tolerance
"""
import heapq
import logging
import math
from collections.abc import Callable
from itertools import count

from neurosim.models.aer_model import AerEvent, ConnectivityTable
from neurosim.models.engine_model import EngineConfig, EventLog, EventRecord, Network, SimulationResult, \
    SpikeRecord, SpikeTrain, StimulusProgram, TraceSet
from neurosim.models.generic_error import ConfigError, SimulationError, err_bad_stimulus, err_no_bracket
from neurosim.models.neuron_model import AdexNeuronParams, HandshakePhase, HandshakeSignal, HandshakeState, \
    NeuronState
from neurosim.models.synapse_model import DpiSynapseParams
from neurosim.sim.aer import deliver_event, hs_step
from neurosim.sim.device import effective_tau, keyed_generator
from neurosim.sim.neuron import apply_reset, membrane_rates, tau_ahp, tau_mem, threshold_reached
from neurosim.sim.synapse import drive_target, relax

_logger = logging.getLogger(__name__)

# 同一时刻的事件按优先级处理，数值越小越先
_PRIO_STIMULUS = 0
_PRIO_PULSE_END = 1
_PRIO_PULSE_START = 2
_PRIO_HANDSHAKE = 3
_PRIO_TIMER = 4
_PRIO_SAMPLE = 8
_PRIO_STOP = 9


def locate_crossing(f: Callable[[float], float], t_start: float, t_end: float, threshold: float, tol: float) -> float:
    """
    二分定位一步内的阈值上穿
    :param f: 该步内任意时刻的值（从步起点重新积分得到）
    :param t_start: 步起点，要求 f(t_start) < threshold
    :param t_end: 步终点，要求 f(t_end) >= threshold
    :param threshold: 阈值
    :param tol: 定位窗口宽度；tol 不小于步长时直接返回步终点
    :return: 满足 f(t) >= threshold 的最早的二分上端点
    """
    if not f(t_start) < threshold <= f(t_end):
        raise SimulationError(err_no_bracket, f't=[{t_start!r}, {t_end!r}]')
    lo, hi = t_start, t_end
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return hi


class _SynapseSlot:
    __slots__ = ['sid', 'params', 'target', 'tau', 'gain', 'i_syn', 'active', 'active_until', 'i_w', 'i_start',
                 'drive']

    def __init__(self, sid: str, params: DpiSynapseParams, target: str | None, network: Network):
        self.sid = sid
        self.params = params
        self.target = target
        self.tau = effective_tau(params.C_syn, params.I_tau, network.leak, network.constants)
        self.gain = drive_target(params, network.leak, 1.0)
        self.i_syn = 0.0
        self.active = False
        self.active_until = 0.0
        self.i_w = params.I_w
        self.i_start = 0.0  # 本区间起点的值
        self.drive = 0.0  # 本区间内的目标值

    def freeze(self) -> None:
        self.i_start = self.i_syn
        self.drive = self.gain * self.i_w if self.active else 0.0

    def value_at(self, dt: float) -> float:
        return max(0.0, relax(self.i_start, self.drive, dt, self.tau))


class _NeuronSlot:
    __slots__ = ['nid', 'params', 'tau_mem', 'tau_ahp', 'i_mem', 'i_ahp', 'refractory_until', 'pex_start',
                 'pex_until', 'armed', 'handshake', 'dc_items', 'dc', 'afferents', 'refractory', 'pex_on']

    def __init__(self, nid: str, params: AdexNeuronParams, network: Network):
        self.nid = nid
        self.params = params
        self.tau_mem = tau_mem(params, network.constants)
        self.tau_ahp = tau_ahp(params, network.constants)
        self.i_mem = 0.0
        self.i_ahp = 0.0
        self.refractory_until = 0.0
        self.pex_start = 0.0
        self.pex_until = 0.0
        self.armed = True
        self.handshake = HandshakeState()
        self.dc_items: dict[int, float] = {}
        self.dc = 0.0
        self.afferents: list[_SynapseSlot] = []
        self.refractory = False
        self.pex_on = False

    def state(self) -> NeuronState:
        return NeuronState(I_mem=self.i_mem, I_ahp=self.i_ahp, refractory_until=self.refractory_until,
                           pex_start=self.pex_start, pex_until=self.pex_until, armed=self.armed,
                           handshake=self.handshake)

    def load(self, state: NeuronState) -> None:
        self.i_mem = state.I_mem
        self.i_ahp = state.I_ahp
        self.refractory_until = state.refractory_until
        self.pex_start = state.pex_start
        self.pex_until = state.pex_until
        self.armed = state.armed

    def fires_at(self, i_mem: float) -> bool:
        return not self.refractory and threshold_reached(i_mem, self.armed, self.handshake.phase, self.params)

    def crosses(self, i_mem: float) -> bool:
        return self.i_mem < self.params.I_thr <= i_mem


class _Simulation:

    def __init__(self, network: Network, stimulus: StimulusProgram, cfg: EngineConfig):
        self.network = network
        self.cfg = cfg
        self.synapses = {sid: _SynapseSlot(sid, spec.params, spec.target, network)
                         for sid, spec in network.synapses.items()}
        self.neurons = {nid: _NeuronSlot(nid, params, network) for nid, params in network.neurons.items()}
        for nid, slot in self.neurons.items():
            slot.afferents = [self.synapses[sid] for sid in network.afferents(nid)]
        self.base_weights = {sid: spec.params.I_w for sid, spec in network.synapses.items()}
        # 没有出边的神经元扇出为空
        self.routes = ConnectivityTable(fanout={nid: network.connectivity.fanout.get(nid, []) for nid in self.neurons})
        self.queue: list[tuple] = []
        self.seq = count()
        self.times: list[float] = []
        self.signals: dict[str, list[float]] = {}
        for sid in self.synapses:
            self.signals[sid] = []
        for nid in self.neurons:
            self.signals[f'{nid}.I_mem'] = []
            self.signals[f'{nid}.I_ahp'] = []
        self.spikes: list[tuple[str, float]] = []
        self.aer_events: list[AerEvent] = []
        self.log: list[EventRecord] = []
        self._schedule_stimulus(stimulus)
        n_samples = int(math.floor(cfg.duration / cfg.sample_interval + 1e-9))
        for k in range(n_samples + 1):
            self._schedule(min(k * cfg.sample_interval, cfg.duration), _PRIO_SAMPLE, 'sample', '')
        self._schedule(cfg.duration, _PRIO_STOP, 'stop', '')

    def _schedule(self, t: float, prio: int, kind: str, target: str, payload=None) -> None:
        if t > self.cfg.duration:
            return
        heapq.heappush(self.queue, (t, prio, next(self.seq), kind, target, payload))

    def _record(self, t: float, kind: str, target: str, detail: str = '') -> None:
        self.log.append(EventRecord(t=t, kind=kind, id=target, detail=detail))

    def _schedule_stimulus(self, stimulus: StimulusProgram) -> None:
        for target, items in stimulus.items.items():
            for idx, item in enumerate(items):
                if isinstance(item, SpikeTrain):
                    if target not in self.synapses:
                        raise ConfigError(err_bad_stimulus, f'spike train target {target} is not a synapse')
                    for t in self._train_times(target, idx, item):
                        self._schedule(t, _PRIO_PULSE_START, 'pulse_start', target, self.base_weights[target])
                else:
                    if target not in self.neurons:
                        raise ConfigError(err_bad_stimulus, f'current step target {target} is not a neuron')
                    self._schedule(item.start, _PRIO_STIMULUS, 'dc_on', target, (idx, item.amplitude))
                    self._schedule(item.stop, _PRIO_STIMULUS, 'dc_off', target, (idx, 0.0))

    def _train_times(self, target: str, idx: int, train: SpikeTrain) -> list[float]:
        if train.rate <= 0:
            return []
        if train.kind == 'regular':
            n = math.ceil((train.stop - train.start) * train.rate - 1e-9)
            return [train.start + k / train.rate for k in range(max(n, 0))]
        # 泊松：按 (seed, 目标, 条目) 取计数器型随机流，顺序调度也能复现
        rng = keyed_generator(self.cfg.seed, f'{target}#{idx}')
        times = []
        t = train.start
        while True:
            t += float(rng.exponential(1.0 / train.rate))
            if t >= train.stop:
                return times
            times.append(t)

    def execute(self) -> SimulationResult:
        _logger.debug('run start: %d neurons, %d synapses, duration=%r', len(self.neurons), len(self.synapses),
                      self.cfg.duration)
        t = 0.0
        while self.queue:
            t_evt = self.queue[0][0]
            if t_evt > t:
                t = self._advance(t, t_evt)
                continue
            _, _, _, kind, target, payload = heapq.heappop(self.queue)
            if kind == 'stop':
                break
            self._handle(kind, target, payload, t)
        _logger.debug('run end: %d spikes', len(self.spikes))
        return SimulationResult(
            traces=TraceSet(times=self.times, signals=self.signals),
            spikes=SpikeRecord(spikes=self.spikes),
            aer_events=self.aer_events,
            event_log=EventLog(records=self.log),
        )

    def _handle(self, kind: str, target: str, payload, t: float) -> None:
        match kind:
            case 'sample':
                self._sample(t)
            case 'dc_on' | 'dc_off':
                slot = self.neurons[target]
                idx, amplitude = payload
                if kind == 'dc_on':
                    slot.dc_items[idx] = amplitude
                else:
                    slot.dc_items.pop(idx, None)
                slot.dc = sum(slot.dc_items.values())
            case 'pulse_start':
                syn = self.synapses[target]
                syn.active = True
                syn.i_w = payload
                syn.active_until = max(syn.active_until, t + syn.params.pulse_width)
                self._schedule(t + syn.params.pulse_width, _PRIO_PULSE_END, 'pulse_end', target)
            case 'pulse_end':
                syn = self.synapses[target]
                # 脉冲重叠时旧的结束事件作废
                if t >= syn.active_until:
                    syn.active = False
            case 'ack_rise':
                self._acknowledge(self.neurons[target], payload, t)
            case 'ack_fall':
                slot = self.neurons[target]
                slot.handshake = hs_step(slot.handshake, HandshakeSignal.ACK_FALL, t)
                self._record(t, 'ack_fall', target)
            case 'refractory_end' | 'pex_end':
                pass

    def _sample(self, t: float) -> None:
        self.times.append(t)
        for sid, syn in self.synapses.items():
            self.signals[sid].append(syn.i_syn)
        for nid, slot in self.neurons.items():
            self.signals[f'{nid}.I_mem'].append(slot.i_mem)
            self.signals[f'{nid}.I_ahp'].append(slot.i_ahp)

    def _fire(self, slot: _NeuronSlot, t: float) -> None:
        slot.handshake = hs_step(slot.handshake, HandshakeSignal.REQ_RISE, t)
        slot.armed = False
        self.spikes.append((slot.nid, t))
        self._record(t, 'req_rise', slot.nid)
        self._schedule(t + self.network.receiver.ack_delay, _PRIO_HANDSHAKE, 'ack_rise', slot.nid, t)

    def _acknowledge(self, slot: _NeuronSlot, t_req: float, t: float) -> None:
        slot.handshake = hs_step(slot.handshake, HandshakeSignal.ACK_RISE, t)
        self._record(t, 'ack_rise', slot.nid)
        event = AerEvent(source_id=slot.nid, t_req=t_req, t_ack=t)
        self.aer_events.append(event)
        slot.load(apply_reset(slot.state(), t, slot.params))
        if math.isfinite(slot.refractory_until):
            self._schedule(slot.refractory_until, _PRIO_TIMER, 'refractory_end', slot.nid)
        self._schedule(slot.pex_until, _PRIO_TIMER, 'pex_end', slot.nid)
        slot.handshake = hs_step(slot.handshake, HandshakeSignal.REQ_FALL, t)
        self._record(t, 'req_fall', slot.nid)
        for delivery in deliver_event(event, self.routes, self.base_weights):
            self._record(t, 'deliver', delivery.synapse_id, f'src={slot.nid} I_w={delivery.I_w!r}')
            self._schedule(delivery.t_start, _PRIO_PULSE_START, 'pulse_start', delivery.synapse_id, delivery.I_w)
        self._schedule(t + self.network.receiver.ack_release_delay, _PRIO_HANDSHAKE, 'ack_fall', slot.nid)

    def _input(self, slot: _NeuronSlot, dt: float) -> float:
        total = slot.dc
        for syn in slot.afferents:
            total += syn.value_at(dt)
        return total

    def _rk4(self, slot: _NeuronSlot, t0: float, t: float, h: float) -> tuple[float, float]:
        m, a = slot.i_mem, slot.i_ahp
        if h <= 0:
            return m, a
        p = slot.params

        def rates(mm: float, aa: float, s: float) -> tuple[float, float]:
            return membrane_rates(mm, aa, self._input(slot, s - t0), slot.pex_on, p, slot.tau_mem, slot.tau_ahp)

        k1 = rates(m, a, t)
        k2 = rates(m + 0.5 * h * k1[0], a + 0.5 * h * k1[1], t + 0.5 * h)
        k3 = rates(m + 0.5 * h * k2[0], a + 0.5 * h * k2[1], t + 0.5 * h)
        k4 = rates(m + h * k3[0], a + h * k3[1], t + h)
        a_new = max(0.0, a + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))
        if slot.refractory:
            # 不应期内膜电流钳在 I_reset
            return m, a_new
        m_new = max(0.0, m + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]))
        return m_new, a_new

    def _move_synapses(self, dt: float) -> None:
        for syn in self.synapses.values():
            syn.i_syn = syn.value_at(dt)

    def _advance(self, t0: float, t1: float) -> float:
        """
        在 [t0, t1] 内连续推进；区间内没有离散事件，驱动、不应期和展宽状态都不变
        :return: 实际推进到的时刻；发生阈值上穿时提前返回上穿时刻
        """
        for syn in self.synapses.values():
            syn.freeze()
        if not self.neurons:
            self._move_synapses(t1 - t0)
            return t1
        slots = list(self.neurons.values())
        for slot in slots:
            slot.refractory = t0 < slot.refractory_until
            slot.pex_on = t0 < slot.pex_until
        n_steps = max(1, math.ceil((t1 - t0) / self.cfg.dt_max - 1e-9))
        h = (t1 - t0) / n_steps
        t = t0
        for k in range(1, n_steps + 1):
            t_next = t1 if k == n_steps else t0 + k * h
            proposals = [self._rk4(slot, t0, t, t_next - t) for slot in slots]
            crossers = [slot for slot, (m, _) in zip(slots, proposals) if slot.crosses(m) and slot.fires_at(m)]
            if crossers:
                t_hit = min(self._crossing_time(slot, t0, t, t_next) for slot in crossers)
                for slot in slots:
                    m, a = self._rk4(slot, t0, t, t_hit - t)
                    self._suppress(slot, m, t_hit)
                    slot.i_mem, slot.i_ahp = m, a
                self._move_synapses(t_hit - t0)
                self._settle(slots, t_hit)
                return t_hit
            for slot, (m, a) in zip(slots, proposals):
                self._suppress(slot, m, t_next)
                slot.i_mem, slot.i_ahp = m, a
            self._settle(slots, t_next)
            t = t_next
        self._move_synapses(t1 - t0)
        return t1

    def _crossing_time(self, slot: _NeuronSlot, t0: float, t: float, t_next: float) -> float:
        return locate_crossing(lambda s: self._rk4(slot, t0, t, s - t)[0], t, t_next, slot.params.I_thr,
                               self.cfg.crossing_tolerance)

    def _suppress(self, slot: _NeuronSlot, i_mem: float, t: float) -> None:
        # 握手未完成时的上穿被吞掉，不排队
        if slot.armed and not slot.refractory and slot.handshake.phase != HandshakePhase.IDLE and slot.crosses(i_mem):
            slot.armed = False
            self._record(t, 'suppressed', slot.nid, f'phase={slot.handshake.phase.value}')
            _logger.debug('crossing of %s suppressed at t=%r', slot.nid, t)

    def _settle(self, slots: list[_NeuronSlot], t: float) -> None:
        for slot in slots:
            if not slot.armed and slot.i_mem < slot.params.I_thr:
                slot.armed = True
            elif slot.fires_at(slot.i_mem):
                self._fire(slot, t)


def run(network: Network, stimulus: StimulusProgram, cfg: EngineConfig) -> SimulationResult:
    """
    运行一次仿真
    :param network: 网络
    :param stimulus: 刺激程序
    :param cfg: 引擎配置
    :return: 采样波形、放电记录、AER 事件和事件日志；同样的输入（含 seed）结果逐位一致
    """
    return _Simulation(network, stimulus, cfg).execute()

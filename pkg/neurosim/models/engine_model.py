from typing import Annotated, Literal

from typing_extensions import Self

import numpy as np
from pydantic import Field, model_validator

from neurosim.models.aer_model import AerEvent, ConnectivityTable, ReceiverModel
from neurosim.models.device_model import LeakModel, PhysicalConstants
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.models.quantity import FrozenModel, quantity
from neurosim.models.synapse_model import DpiSynapseParams


class SynapseSpec(FrozenModel):
    params: DpiSynapseParams = DpiSynapseParams()
    target: str | None = None  # None 表示探针突触，只记录不驱动神经元


class Network(FrozenModel):
    neurons: dict[str, AdexNeuronParams] = Field(default_factory=dict)
    synapses: dict[str, SynapseSpec] = Field(default_factory=dict)
    connectivity: ConnectivityTable = ConnectivityTable()
    receiver: ReceiverModel = ReceiverModel()
    leak: LeakModel = LeakModel()
    constants: PhysicalConstants = PhysicalConstants()

    @model_validator(mode='after')
    def check_wiring(self) -> Self:
        shared = self.neurons.keys() & self.synapses.keys()
        if shared:
            raise ValueError(f'ids used by both neurons and synapses: {sorted(shared)}')
        for sid, spec in self.synapses.items():
            if spec.target is not None and spec.target not in self.neurons:
                raise ValueError(f'synapse {sid} targets unknown neuron {spec.target}')
        for src in self.connectivity.fanout:
            if src not in self.neurons:
                raise ValueError(f'connectivity source {src} is not a neuron')
        missing = self.connectivity.targets() - self.synapses.keys()
        if missing:
            raise ValueError(f'connectivity targets unknown synapses: {sorted(missing)}')
        return self

    def afferents(self, nid: str) -> list[str]:
        return [sid for sid, spec in self.synapses.items() if spec.target == nid]


class SpikeTrain(FrozenModel):
    kind: Literal['regular', 'poisson']
    rate: float = quantity('Hz', ge=0)
    start: float = quantity('s', 0.0, ge=0)
    stop: float = quantity('s', ge=0)

    @model_validator(mode='after')
    def check_window(self) -> Self:
        if self.stop < self.start:
            raise ValueError('stop must not precede start')
        return self


class CurrentStep(FrozenModel):
    kind: Literal['dc']
    amplitude: float = quantity('A', ge=0)
    start: float = quantity('s', 0.0, ge=0)
    stop: float = quantity('s', ge=0)

    @model_validator(mode='after')
    def check_window(self) -> Self:
        if self.stop < self.start:
            raise ValueError('stop must not precede start')
        return self


StimulusItem = Annotated[SpikeTrain | CurrentStep, Field(discriminator='kind')]


class StimulusProgram(FrozenModel):
    items: dict[str, list[StimulusItem]] = Field(default_factory=dict)

    @model_validator(mode='after')
    def check_order(self) -> Self:
        for target, items in self.items.items():
            starts = [item.start for item in items]
            if starts != sorted(starts):
                raise ValueError(f'stimulus items of {target} are not ordered by start time')
        return self


class EngineConfig(FrozenModel):
    dt_max: float = quantity('s', 1e-5, gt=0)
    crossing_tolerance: float = quantity('s', 1e-9, gt=0)
    sample_interval: float = quantity('s', 1e-4, gt=0)
    duration: float = quantity('s', 1.0, gt=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode='after')
    def check_tolerance(self) -> Self:
        if not self.crossing_tolerance < self.dt_max:
            raise ValueError('crossing_tolerance must be smaller than dt_max')
        return self


class TraceSet(FrozenModel):
    times: list[float] = Field(default_factory=list)
    signals: dict[str, list[float]] = Field(default_factory=dict)

    def series(self, signal_id: str) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.times), np.asarray(self.signals[signal_id])

    def rows(self):
        # (time, signal id, value)，信号按 id 排序保证输出稳定
        for signal_id in sorted(self.signals):
            for t, v in zip(self.times, self.signals[signal_id]):
                yield t, signal_id, v


class SpikeRecord(FrozenModel):
    spikes: list[tuple[str, float]] = Field(default_factory=list)

    def times(self, neuron_id: str) -> np.ndarray:
        return np.asarray([t for nid, t in self.spikes if nid == neuron_id], dtype=float)

    def count(self, neuron_id: str) -> int:
        return sum(1 for nid, _ in self.spikes if nid == neuron_id)


class EventRecord(FrozenModel):
    t: float
    kind: str
    id: str
    detail: str = ''

    def line(self) -> str:
        return f't={self.t!r} kind={self.kind} id={self.id} detail={self.detail}'


class EventLog(FrozenModel):
    records: list[EventRecord] = Field(default_factory=list)

    def lines(self) -> list[str]:
        return [r.line() for r in self.records]

    def of_kind(self, *kinds: str) -> list[EventRecord]:
        return [r for r in self.records if r.kind in kinds]


class SimulationResult(FrozenModel):
    traces: TraceSet
    spikes: SpikeRecord
    aer_events: list[AerEvent] = Field(default_factory=list)
    event_log: EventLog = EventLog()

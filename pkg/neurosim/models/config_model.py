from pydantic import BaseModel, ConfigDict, Field

from neurosim.models.aer_model import Edge, ReceiverModel
from neurosim.models.analysis_model import PowerModel
from neurosim.models.device_model import LeakModel, MismatchSpec, PhysicalConstants
from neurosim.models.engine_model import EngineConfig, StimulusProgram
from neurosim.models.neuron_model import AdexNeuronParams, AdexVoltageParams
from neurosim.models.quantity import FrozenModel
from neurosim.models.synapse_model import DpiSynapseParams


class NetworkSection(FrozenModel):
    neurons: list[str] = Field(default_factory=lambda: ['n0'])
    synapses: dict[str, str | None] = Field(default_factory=lambda: {'s0': 'n0'})
    edges: list[Edge] = Field(default_factory=list)
    receiver: ReceiverModel = ReceiverModel()


class ConfigDocument(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    constants: PhysicalConstants = PhysicalConstants()
    leak: LeakModel = LeakModel()
    synapse: DpiSynapseParams = DpiSynapseParams()
    neuron: AdexNeuronParams = AdexNeuronParams()
    oracle: AdexVoltageParams = AdexVoltageParams()
    network: NetworkSection = NetworkSection()
    stimulus: StimulusProgram = StimulusProgram()
    engine: EngineConfig = EngineConfig()
    mismatch: MismatchSpec = MismatchSpec()
    power: PowerModel = PowerModel()


class RunManifest(BaseModel):
    command: str
    config: str  # 解析后的完整配置快照（--print-config 格式）
    seed: int
    tool_version: str
    outputs: list[str]
    wall_clock_s: float

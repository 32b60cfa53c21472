import pytest

from neurosim.models.device_model import LeakModel, PhysicalConstants
from neurosim.models.engine_model import EngineConfig
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.models.synapse_model import DpiSynapseParams
from neurosim.settings import settings


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: long-running acceptance runs')


@pytest.fixture(autouse=True)
def serial_batches(monkeypatch):
    # 测试默认串行，需要并行的用例显式传 threads
    monkeypatch.setattr(settings, 'threads', 1)


@pytest.fixture
def consts() -> PhysicalConstants:
    return PhysicalConstants()


@pytest.fixture
def leak() -> LeakModel:
    return LeakModel()


@pytest.fixture
def no_leak() -> LeakModel:
    return LeakModel(enabled=False)


@pytest.fixture
def synapse() -> DpiSynapseParams:
    return DpiSynapseParams()


@pytest.fixture
def neuron() -> AdexNeuronParams:
    return AdexNeuronParams()


@pytest.fixture
def linear_neuron() -> AdexNeuronParams:
    """关掉正反馈，膜电流是纯一阶系统"""
    return AdexNeuronParams(I_fb0=0.0)


@pytest.fixture
def coarse() -> EngineConfig:
    return EngineConfig(dt_max=1e-4, sample_interval=1e-3, duration=0.2)

from typing_extensions import Self

from pydantic import Field, model_validator

from neurosim.models.device_model import PhysicalConstants
from neurosim.models.engine_model import EngineConfig
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.models.quantity import FrozenModel, quantity


class TauFitResult(FrozenModel):
    tau: float = Field(gt=0)
    r_squared: float = Field(ge=0, le=1)
    window: tuple[float, float]
    n_points: int


class TauRow(FrozenModel):
    I_tau: float
    tau_theoretical_s: float
    tau_fitted_s: float
    r2: float


class FiCurve(FrozenModel):
    points: list[tuple[float, float]] = Field(default_factory=list)  # (I_in, rate)
    swept: str = ''  # 扫描的偏置，比如 'I_ref=1e-06'

    @model_validator(mode='after')
    def check_points(self) -> Self:
        currents = [i for i, _ in self.points]
        if any(b <= a for a, b in zip(currents, currents[1:])):
            raise ValueError('I_in must be strictly increasing')
        if any(rate < 0 for _, rate in self.points):
            raise ValueError('rates must be >= 0')
        return self

    def rates(self) -> list[float]:
        return [r for _, r in self.points]


class LinearFit(FrozenModel):
    slope: float
    intercept: float
    r_squared: float
    n_points: int


class AdaptationResult(FrozenModel):
    spike_times: list[float]
    first_isi: float
    steady_isi: float
    initial_rate: float
    steady_rate: float
    ahp_peak: float


class PowerModel(FrozenModel):
    P_static: float = quantity('W', 456.52e-12, ge=0)
    E_switch: float = quantity('J', 0.78261e-12, ge=0)
    residual_rms: float = quantity('J', 0.0, ge=0)


class HistogramBin(FrozenModel):
    low: float
    high: float
    count: int


class McSetup(FrozenModel):
    """蒙特卡洛单次运行的基准：单个神经元、DC 电流注入、关闭适应"""
    neuron: AdexNeuronParams
    I_in: float = Field(ge=0)
    constants: PhysicalConstants = PhysicalConstants()
    engine: EngineConfig = EngineConfig()
    warmup_fraction: float = Field(default=0.1, ge=0, lt=1)


class McResult(FrozenModel):
    n_runs: int
    rates: list[float]
    mean: float
    std: float
    cv: float
    histogram: list[HistogramBin] = Field(default_factory=list)
    zero_rate_runs: list[int] = Field(default_factory=list)

    @model_validator(mode='after')
    def check_count(self) -> Self:
        if self.n_runs != len(self.rates):
            raise ValueError('n_runs must equal the number of rates')
        return self

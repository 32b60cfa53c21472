try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Any

from pydantic import Field, model_validator

from neurosim.models.quantity import FrozenModel, quantity


class HandshakePhase(StrEnum):
    IDLE = 'Idle'
    REQ_HIGH = 'ReqHigh'
    ACK_HIGH = 'AckHigh'
    REQ_LOW = 'ReqLow'


class HandshakeSignal(StrEnum):
    REQ_RISE = 'ReqRise'
    ACK_RISE = 'AckRise'
    REQ_FALL = 'ReqFall'
    ACK_FALL = 'AckFall'


class HandshakeState(FrozenModel):
    phase: HandshakePhase = HandshakePhase.IDLE
    last_transition: float = 0.0


class AdexNeuronParams(FrozenModel):
    C_mem: float = quantity('F', 821e-15, gt=0)
    C_ahp: float = quantity('F', 1e-12, gt=0)
    I_leak: float = quantity('A', 1e-12, gt=0)
    gain_ratio_leak: float = Field(default=1.0, gt=0)
    I_thr: float = quantity('A', 100e-12, gt=0)
    I_ref: float = quantity('A', 1e-6, ge=0)
    Q_ref: float = quantity('C', 200e-15, ge=0)
    infinite_refractory: bool = False
    I_a: float = quantity('A', 0.0, ge=0)
    I_tau_ahp: float = quantity('A', 1e-12 / 3, gt=0)
    gain_ratio_ahp: float = Field(default=1.0, ge=0)
    t_pex: float = quantity('s', 1e-6, gt=0)
    I_fb0: float = quantity('A', 50e-15, ge=0)
    I_norm: float = quantity('A', gt=0)  # 缺省为 I_thr/5
    feedback_ceiling: float = Field(default=100.0, gt=0)  # 以 I_thr 为单位
    I_reset: float = quantity('A', 0.0, ge=0)

    @model_validator(mode='before')
    @classmethod
    def default_norm(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get('I_norm') is None:
            data = dict(data)
            data['I_norm'] = data.get('I_thr', cls.model_fields['I_thr'].default) / 5
        return data


class AdexVoltageParams(FrozenModel):
    C: float = quantity('F', 281e-12, gt=0)
    g_L: float = quantity('S', 30e-9, gt=0)
    E_L: float = quantity('V', -70.6e-3)
    Delta_T: float = quantity('V', 2e-3, gt=0)
    V_T: float = quantity('V', -50.4e-3)
    a: float = quantity('S', 4e-9)
    tau_w: float = quantity('s', 144e-3, gt=0)
    b_increment: float = quantity('A', 80.5e-12)
    V_reset: float = quantity('V', -70.6e-3)
    V_peak: float = quantity('V', -40.4e-3)


class PulseWindow(FrozenModel):
    start: float
    end: float


class NeuronState(FrozenModel):
    I_mem: float = Field(default=0.0, ge=0)
    I_ahp: float = Field(default=0.0, ge=0)
    refractory_until: float = 0.0
    pex_start: float = 0.0
    pex_until: float = 0.0
    armed: bool = True  # 低于阈值后才重新允许触发，保证一次上穿只发一个脉冲
    handshake: HandshakeState = HandshakeState()

    def pex_window(self) -> PulseWindow | None:
        if self.pex_until > self.pex_start:
            return PulseWindow(start=self.pex_start, end=self.pex_until)
        return None

import math
from typing import Any

from pydantic import Field, model_validator

from neurosim.models.quantity import FrozenModel, quantity


class DpiSynapseParams(FrozenModel):
    C_syn: float = quantity('F', 821e-15, gt=0)
    I_tau: float = quantity('A', 100e-15, gt=0)
    I_gain: float = quantity('A', gt=0)  # 缺省为 4*I_tau
    I_w: float = quantity('A', 100e-9, gt=0)
    pulse_width: float = quantity('s', 100e-9, gt=0)

    @model_validator(mode='before')
    @classmethod
    def default_gain(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get('I_gain') is None:
            data = dict(data)
            data['I_gain'] = 4 * data.get('I_tau', cls.model_fields['I_tau'].default)
        return data

    @model_validator(mode='after')
    def check_ratio(self) -> 'DpiSynapseParams':
        if not math.isfinite(self.I_gain / self.I_tau):
            raise ValueError('I_gain/I_tau must be finite')
        return self


class SynapseState(FrozenModel):
    I_syn: float = Field(default=0.0, ge=0)
    pulse_active: bool = False
    pulse_end_time: float = 0.0

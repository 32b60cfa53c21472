from typing import Literal

from pydantic import Field, field_validator

from neurosim.models.quantity import FrozenModel, quantity


class PhysicalConstants(FrozenModel):
    U_T: float = quantity('V', 0.025, gt=0)
    kappa: float = Field(default=0.75, gt=0, lt=1)
    V_dd: float = quantity('V', 0.8, gt=0)


class LeakModel(FrozenModel):
    cap_leak_baseline: float = quantity('A', 3.5e-15, ge=0)
    transistor_leak_floor: float = quantity('A', 1e-16, ge=0)
    enabled: bool = True

    def total(self) -> float:
        if not self.enabled:
            return 0.0
        return self.cap_leak_baseline + self.transistor_leak_floor


# 在 70 Hz 标称点上标定出来的默认失配（LEAK 块为主，CC 比较器次之，K+ 块可忽略）
CALIBRATED_SIGMAS = {'I_leak': 0.12, 'I_thr': 0.04, 'I_ref': 0.02}


class MismatchSpec(FrozenModel):
    sigmas: dict[str, float] = Field(default_factory=lambda: dict(CALIBRATED_SIGMAS))
    distribution: Literal['lognormal'] = 'lognormal'
    seed: int = Field(default=0, ge=0)

    @field_validator('sigmas')
    @classmethod
    def check_sigmas(cls, v: dict[str, float]) -> dict[str, float]:
        for name, sigma in v.items():
            if not sigma >= 0:
                raise ValueError(f'sigma for {name} must be >= 0')
        return v

    def scaled(self, factor: float) -> 'MismatchSpec':
        return self.model_copy(update={'sigmas': {k: s * factor for k, s in self.sigmas.items()}})

"""
DPI 突触：脉冲门控驱动的一阶线性滤波器

tau_syn dI_syn/dt + I_syn = (I_gain/I_tau_eff) I_w   （输入脉冲为高时）
tau_syn dI_syn/dt + I_syn = 0                       （其余时间）

驱动在一个区间内分段恒定，所以每段都可以用闭式解精确推进。
"""
import math

from neurosim.models.device_model import LeakModel, PhysicalConstants
from neurosim.models.generic_error import ConfigError, DomainError, err_negative_step, err_non_positive_freq, \
    err_pulse_too_wide
from neurosim.models.synapse_model import DpiSynapseParams, SynapseState
from neurosim.sim.device import effective_tau


def relax(i_start: float, i_target: float, dt: float, tau: float) -> float:
    return i_target + (i_start - i_target) * math.exp(-dt / tau)


def drive_target(params: DpiSynapseParams, leak: LeakModel, I_w: float | None = None) -> float:
    """脉冲期间的渐近目标电流，漏电抬高了有效 I_tau，从而压低增益"""
    i_w = params.I_w if I_w is None else I_w
    return params.I_gain / (params.I_tau + leak.total()) * i_w


def synapse_rhs(state: SynapseState, params: DpiSynapseParams, leak: LeakModel, consts: PhysicalConstants) -> float:
    tau = effective_tau(params.C_syn, params.I_tau, leak, consts)
    target = drive_target(params, leak) if state.pulse_active else 0.0
    return (target - state.I_syn) / tau


def exact_step(state: SynapseState, dt: float, params: DpiSynapseParams, leak: LeakModel,
               consts: PhysicalConstants) -> SynapseState:
    """
    闭式推进 dt，要求 [t, t+dt] 内脉冲状态不变（引擎在脉冲边沿处切分步长）
    :return: 新状态，I_syn 不会小于 0
    """
    if dt < 0:
        raise DomainError(err_negative_step, f'dt={dt!r}')
    if dt == 0:
        return state
    tau = effective_tau(params.C_syn, params.I_tau, leak, consts)
    target = drive_target(params, leak) if state.pulse_active else 0.0
    return state.model_copy(update={'I_syn': max(0.0, relax(state.I_syn, target, dt, tau))})


def periodic_envelope(target: float, tau: float, on_time: float, period: float) -> tuple[float, float]:
    """
    周期方波驱动下一阶滤波器的稳态峰值和谷值（单周期映射的不动点）
    :param target: 驱动为高时的渐近值
    :param tau: 时间常数
    :param on_time: 每周期驱动为高的时长
    :param period: 周期
    :return: (peak, trough)
    """
    a = math.exp(-on_time / tau)
    b = math.exp(-(period - on_time) / tau)
    charge = -math.expm1(-on_time / tau)
    denom = -math.expm1(-period / tau)
    trough = b * target * charge / denom
    peak = target * charge + a * trough
    return peak, trough


def steady_state_envelope(params: DpiSynapseParams, leak: LeakModel, consts: PhysicalConstants,
                          rate: float) -> tuple[float, float]:
    if not rate > 0:
        raise DomainError(err_non_positive_freq, f'rate={rate!r}')
    period = 1.0 / rate
    if params.pulse_width >= period:
        raise ConfigError(err_pulse_too_wide, f'pulse_width={params.pulse_width!r} period={period!r}')
    tau = effective_tau(params.C_syn, params.I_tau, leak, consts)
    return periodic_envelope(drive_target(params, leak), tau, params.pulse_width, period)


def peak_after_train(params: DpiSynapseParams, leak: LeakModel, consts: PhysicalConstants,
                     rate: float, duration: float) -> float:
    """从静息开始、规则脉冲串刺激 duration 后的峰值（最后一个脉冲结束时刻）"""
    if not rate > 0:
        raise DomainError(err_non_positive_freq, f'rate={rate!r}')
    period = 1.0 / rate
    if params.pulse_width >= period:
        raise ConfigError(err_pulse_too_wide, f'pulse_width={params.pulse_width!r} period={period!r}')
    tau = effective_tau(params.C_syn, params.I_tau, leak, consts)
    target = drive_target(params, leak)
    n_pulses = math.ceil(duration * rate - 1e-9)
    i_syn = 0.0
    for k in range(n_pulses):
        if k:
            i_syn = relax(i_syn, 0.0, period - params.pulse_width, tau)
        i_syn = relax(i_syn, target, params.pulse_width, tau)
    return i_syn


def tune_weight(params: DpiSynapseParams, leak: LeakModel, consts: PhysicalConstants,
                rate: float, duration: float, target_peak: float) -> DpiSynapseParams:
    """峰值对 I_w 是线性的，按比例缩放一次即可命中目标峰值"""
    peak = peak_after_train(params, leak, consts, rate, duration)
    return params.model_copy(update={'I_w': params.I_w * target_peak / peak})

"""
电流模 AdExp 神经元

tau_mem dI_mem/dt = -I_mem + g*(f(I_mem) - I_ahp + I_in),  g = I_gain/I_leak
tau_ahp dI_ahp/dt = g_ahp*I_a*[脉冲展宽输出为高] - I_ahp

以及电压域 AdExp 参考模型，只用来做定性对照。
"""
import math

from neurosim.models.device_model import PhysicalConstants
from neurosim.models.generic_error import ConfigError, err_zero_refractory_current
from neurosim.models.neuron_model import AdexNeuronParams, AdexVoltageParams, HandshakePhase, NeuronState, PulseWindow
from neurosim.sim.synapse import periodic_envelope


def tau_mem(params: AdexNeuronParams, consts: PhysicalConstants) -> float:
    return params.C_mem * consts.U_T / (consts.kappa * params.I_leak)


def tau_ahp(params: AdexNeuronParams, consts: PhysicalConstants) -> float:
    return params.C_ahp * consts.U_T / (consts.kappa * params.I_tau_ahp)


def refractory_period(params: AdexNeuronParams) -> float:
    if params.infinite_refractory:
        return float('inf')
    if params.I_ref <= 0:
        raise ConfigError(err_zero_refractory_current, f'Q_ref={params.Q_ref!r}')
    return params.Q_ref / params.I_ref


def f_positive_feedback(I_mem: float, params: AdexNeuronParams) -> float:
    """
    正反馈电流 I_fb0*exp(I_mem/I_norm)，上限 feedback_ceiling*I_thr
    :param I_mem: 膜电流
    :param params: 神经元参数
    :return: 反馈电流
    """
    if params.I_fb0 <= 0:
        return 0.0
    ceiling = params.feedback_ceiling * params.I_thr
    # 先在指数域里截断，避免 exp 溢出
    exponent = min(I_mem / params.I_norm, math.log(ceiling / params.I_fb0))
    return min(params.I_fb0 * math.exp(exponent), ceiling)


def membrane_rates(I_mem: float, I_ahp: float, I_in: float, ahp_drive: bool, params: AdexNeuronParams,
                   t_mem: float, t_ahp: float) -> tuple[float, float]:
    d_mem = (-I_mem + params.gain_ratio_leak * (f_positive_feedback(I_mem, params) - I_ahp + I_in)) / t_mem
    if I_mem <= 0 and d_mem < 0:
        d_mem = 0.0
    target = params.gain_ratio_ahp * params.I_a if ahp_drive else 0.0
    d_ahp = (target - I_ahp) / t_ahp
    return d_mem, d_ahp


def neuron_rhs(state: NeuronState, I_in: float, params: AdexNeuronParams, consts: PhysicalConstants,
               t: float = 0.0) -> tuple[float, float]:
    """
    神经元状态导数 (dI_mem/dt, dI_ahp/dt)
    :param state: 当前状态
    :param I_in: 输入电流
    :param params: 神经元参数
    :param consts: 物理常数
    :param t: 当前时刻，用来判断脉冲展宽是否仍为高
    :return: 两个电流的变化率 (A/s)
    """
    return membrane_rates(state.I_mem, state.I_ahp, I_in, t < state.pex_until, params,
                          tau_mem(params, consts), tau_ahp(params, consts))


def threshold_reached(I_mem: float, armed: bool, phase: HandshakePhase, params: AdexNeuronParams) -> bool:
    """是否发出 Req：已重新布防、达到阈值（含等于）、握手空闲"""
    return armed and I_mem >= params.I_thr and phase == HandshakePhase.IDLE


def check_threshold(state: NeuronState, params: AdexNeuronParams) -> bool:
    return threshold_reached(state.I_mem, state.armed, state.handshake.phase, params)


def pulse_extender(t_req_rise: float, params: AdexNeuronParams, active: PulseWindow | None = None) -> PulseWindow:
    """
    脉冲展宽：窗口 [t, t+t_pex]，窗口未结束时再次触发则从新的上升沿重新计时（可重触发）
    :param t_req_rise: Req 上升沿时刻
    :param params: 神经元参数
    :param active: 当前窗口
    :return: 展宽后的窗口
    """
    if active is not None and active.start <= t_req_rise <= active.end:
        return PulseWindow(start=active.start, end=t_req_rise + params.t_pex)
    return PulseWindow(start=t_req_rise, end=t_req_rise + params.t_pex)


def apply_reset(state: NeuronState, t_spike: float, params: AdexNeuronParams) -> NeuronState:
    window = pulse_extender(t_spike, params, state.pex_window())
    return state.model_copy(update={
        'I_mem': params.I_reset,
        'refractory_until': t_spike + refractory_period(params),
        'pex_start': window.start,
        'pex_until': window.end,
        'armed': params.I_reset < params.I_thr,
    })


def ahp_envelope(params: AdexNeuronParams, consts: PhysicalConstants, rate: float) -> tuple[float, float]:
    """周期放电时 I_ahp 的稳态峰值/谷值；展宽窗口覆盖整个周期时退化为常数驱动"""
    period = 1.0 / rate
    target = params.gain_ratio_ahp * params.I_a
    if params.t_pex >= period:
        return target, target
    return periodic_envelope(target, tau_ahp(params, consts), params.t_pex, period)


def adexp_voltage_rhs(V: float, w: float, I: float, p: AdexVoltageParams) -> tuple[float, float]:
    exponent = min((V - p.V_T) / p.Delta_T, 50.0)
    dV = (-p.g_L * (V - p.E_L) + p.g_L * p.Delta_T * math.exp(exponent) - w + I) / p.C
    dw = (p.a * (V - p.E_L) - w) / p.tau_w
    return dV, dw


def simulate_voltage_oracle(p: AdexVoltageParams, I: float, duration: float, dt: float = 1e-5) -> list[float]:
    """
    定步长 RK4 积分电压域 AdExp，V >= V_peak 时复位
    :return: 放电时刻
    """
    V, w = p.E_L, 0.0
    spikes = []
    n = int(round(duration / dt))
    for k in range(n):
        k1 = adexp_voltage_rhs(V, w, I, p)
        k2 = adexp_voltage_rhs(V + 0.5 * dt * k1[0], w + 0.5 * dt * k1[1], I, p)
        k3 = adexp_voltage_rhs(V + 0.5 * dt * k2[0], w + 0.5 * dt * k2[1], I, p)
        k4 = adexp_voltage_rhs(V + dt * k3[0], w + dt * k3[1], I, p)
        V += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        w += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if V >= p.V_peak:
            spikes.append((k + 1) * dt)
            V = p.V_reset
            w += p.b_increment
    return spikes

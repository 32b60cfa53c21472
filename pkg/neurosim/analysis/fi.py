import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np
from scipy.optimize import brentq
from scipy.stats import linregress

from neurosim.models.analysis_model import AdaptationResult, FiCurve, LinearFit
from neurosim.models.device_model import PhysicalConstants
from neurosim.models.engine_model import CurrentStep, EngineConfig, Network, SimulationResult, StimulusProgram
from neurosim.models.generic_error import ConfigError, DomainError, FitError, err_fit_too_few, err_invalid_value, \
    err_no_root, err_non_positive
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.sim.engine import run
from neurosim.utils.batch import run_batch

_logger = logging.getLogger(__name__)

RateMethod = Literal['count', 'isi']


def firing_rate(spike_times: Sequence[float], start: float, end: float, method: RateMethod = 'count') -> float:
    """
    窗口 [start, end) 内的平均发放率
    :param spike_times: 放电时刻
    :param start: 窗口起点
    :param end: 窗口终点
    :param method: count 为个数/窗口长度；isi 为 (n-1)/(最后一个-第一个)，不受窗口边界相位影响
    :return: 发放率 (Hz)，不足以计算时为 0
    """
    if not end > start:
        raise DomainError(err_non_positive, f'window=[{start!r}, {end!r}]')
    times = np.asarray(spike_times, dtype=float)
    inside = times[(times >= start) & (times < end)]
    if method == 'count':
        return inside.size / (end - start)
    if inside.size < 2:
        return 0.0
    return (inside.size - 1) / float(inside[-1] - inside[0])


def dc_run(neuron: AdexNeuronParams, consts: PhysicalConstants, I_in: float, cfg: EngineConfig) -> SimulationResult:
    """单个神经元 n0，整个仿真时长内注入恒定电流"""
    network = Network(neurons={'n0': neuron}, constants=consts)
    stimulus = StimulusProgram(items={'n0': [CurrentStep(kind='dc', amplitude=I_in, start=0.0, stop=cfg.duration)]})
    return run(network, stimulus, cfg)


def dc_rate(neuron: AdexNeuronParams, consts: PhysicalConstants, I_in: float, cfg: EngineConfig,
            warmup_fraction: float = 0.1, method: RateMethod = 'count') -> float:
    result = dc_run(neuron, consts, I_in, cfg)
    return firing_rate(result.spikes.times('n0'), warmup_fraction * cfg.duration, cfg.duration, method)


def _fi_point(job: tuple) -> float:
    neuron, consts, I_in, cfg, warmup_fraction, method = job
    rate = dc_rate(neuron, consts, I_in, cfg, warmup_fraction, method)
    _logger.info('I_in=%r: %.6g Hz', I_in, rate)
    return rate


def fi_sweep(neuron: AdexNeuronParams, consts: PhysicalConstants, I_in_grid: Sequence[float], cfg: EngineConfig,
             warmup_fraction: float = 0.1, method: RateMethod = 'count', swept: str = '',
             threads: int | None = None) -> FiCurve:
    """
    F-I 曲线：每个网格点单独仿真 cfg.duration，去掉前 warmup_fraction 后统计发放率
    :param neuron: 神经元参数（关掉适应时 I_a 设为 0）
    :param consts: 物理常数
    :param I_in_grid: 严格递增的输入电流
    :param cfg: 引擎配置，duration 为每个点的仿真时长
    :param warmup_fraction: 预热比例
    :param method: 发放率算法
    :param swept: 写进结果的扫描说明
    :param threads: 并行上限
    :return: F-I 曲线
    """
    if not I_in_grid:
        raise ConfigError(err_invalid_value, 'empty I_in grid')
    jobs = [(neuron, consts, I_in, cfg, warmup_fraction, method) for I_in in I_in_grid]
    rates = run_batch(_fi_point, jobs, threads)
    return FiCurve(points=list(zip(I_in_grid, rates)), swept=swept)


def fit_linear_region(curve: FiCurve, upto: float | None = None) -> LinearFit:
    """
    线性区回归：只用发放率大于 0、且 I_in 不超过 upto 的点
    :param curve: F-I 曲线
    :param upto: 饱和起点；None 表示全部
    :return: 斜率 (Hz/A)、截距和 R²
    """
    points = [(i, r) for i, r in curve.points if r > 0 and (upto is None or i <= upto)]
    if len(points) < 3:
        raise FitError(err_fit_too_few, f'{len(points)} points in the linear region')
    x, y = np.array(points).T
    fit = linregress(x, y)
    return LinearFit(slope=float(fit.slope), intercept=float(fit.intercept), r_squared=float(fit.rvalue) ** 2,
                     n_points=len(points))


def adaptation_profile(result: SimulationResult, neuron_id: str = 'n0') -> AdaptationResult:
    """
    从一次恒流仿真中提取适应特征，稳态 ISI 取最后四分之一的 ISI 的均值
    :param result: 仿真结果
    :param neuron_id: 神经元 id
    :return: 首个/稳态 ISI、对应发放率和 I_ahp 峰值
    """
    spikes = result.spikes.times(neuron_id)
    if spikes.size < 3:
        raise FitError(err_fit_too_few, f'{spikes.size} spikes from {neuron_id}')
    isis = np.diff(spikes)
    tail = isis[-max(1, isis.size // 4):]
    _, ahp = result.traces.series(f'{neuron_id}.I_ahp')
    steady_isi = float(np.mean(tail))
    return AdaptationResult(
        spike_times=spikes.tolist(),
        first_isi=float(isis[0]),
        steady_isi=steady_isi,
        initial_rate=1.0 / float(isis[0]),
        steady_rate=1.0 / steady_isi,
        ahp_peak=float(np.max(ahp)) if ahp.size else 0.0,
    )


def find_input_for_rate(neuron: AdexNeuronParams, consts: PhysicalConstants, target_rate: float, cfg: EngineConfig,
                        warmup_fraction: float = 0.1, bracket: tuple[float, float] | None = None) -> float:
    """
    Brent 法求使发放率等于 target_rate 的恒定输入
    :param neuron: 神经元参数
    :param consts: 物理常数
    :param target_rate: 目标发放率 (Hz)
    :param cfg: 引擎配置
    :param warmup_fraction: 预热比例
    :param bracket: 搜索区间，缺省 [1, 20] * I_thr/g
    :return: 输入电流 (A)
    """
    if bracket is None:
        unit = neuron.I_thr / neuron.gain_ratio_leak
        bracket = (unit, 20 * unit)
    lo, hi = bracket

    def excess(I_in: float) -> float:
        return dc_rate(neuron, consts, I_in, cfg, warmup_fraction, 'isi') - target_rate

    f_lo, f_hi = excess(lo), excess(hi)
    if f_lo * f_hi > 0:
        raise FitError(err_no_root, f'rate {target_rate!r} Hz outside [{lo!r}, {hi!r}] A')
    I_in = brentq(excess, lo, hi, xtol=lo * 1e-6)
    _logger.info('input for %r Hz: %r A', target_rate, I_in)
    return float(I_in)

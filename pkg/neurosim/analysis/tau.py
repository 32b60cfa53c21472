import logging
from collections.abc import Sequence

import numpy as np
from scipy.stats import linregress

from neurosim.models.analysis_model import TauFitResult, TauRow
from neurosim.models.device_model import LeakModel, PhysicalConstants
from neurosim.models.engine_model import EngineConfig, Network, SpikeTrain, StimulusProgram, SynapseSpec
from neurosim.models.generic_error import FitError, err_fit_degenerate, err_fit_non_monotone, err_fit_too_few
from neurosim.models.synapse_model import DpiSynapseParams
from neurosim.sim.device import effective_tau
from neurosim.sim.engine import run
from neurosim.sim.synapse import tune_weight
from neurosim.utils.batch import run_batch

_logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 10
FIT_FLOOR = 0.01  # 低于峰值 1% 的样本不参与拟合

STANDARD_I_TAU = [1e-15, 5e-15, 10e-15, 20e-15, 50e-15, 100e-15, 200e-15, 300e-15, 400e-15, 500e-15]


def fit_tau(times: Sequence[float], values: Sequence[float]) -> TauFitResult:
    """
    对衰减段做 ln(I/I_peak) - t 的最小二乘直线拟合
    :param times: 采样时刻，从刺激结束附近开始
    :param values: 对应的电流
    :return: tau = -1/slope 以及 R²
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.size < MIN_FIT_POINTS:
        raise FitError(err_fit_too_few, f'{t.size} samples')
    start = int(np.argmax(v))
    peak = v[start]
    if not peak > 0:
        raise FitError(err_fit_degenerate, f'peak={peak!r}')
    # 从峰值开始取连续的、不低于 1% 峰值的一段
    below = np.nonzero(v[start:] < FIT_FLOOR * peak)[0]
    stop = start + (int(below[0]) if below.size else v.size - start)
    seg_t, seg_v = t[start:stop], v[start:stop]
    if seg_t.size < MIN_FIT_POINTS:
        raise FitError(err_fit_too_few, f'{seg_t.size} samples above {FIT_FLOOR} of peak')
    if np.any(np.diff(seg_v) > 0):
        raise FitError(err_fit_non_monotone, f'window=[{seg_t[0]!r}, {seg_t[-1]!r}]')
    fit = linregress(seg_t, np.log(seg_v / peak))
    if not fit.slope < 0:
        raise FitError(err_fit_degenerate, f'slope={fit.slope!r}')
    return TauFitResult(
        tau=-1.0 / fit.slope,
        r_squared=min(1.0, float(fit.rvalue) ** 2),
        window=(float(seg_t[0]), float(seg_t[-1])),
        n_points=int(seg_t.size),
    )


def decay_window(tau: float) -> float:
    return float(np.clip(5 * tau, 0.25, 30.0))


def _tau_point(job: tuple) -> TauRow:
    params, leak, consts, rate, stim_duration, target_peak, seed = job
    params = tune_weight(params, leak, consts, rate, stim_duration, target_peak)
    window = decay_window(effective_tau(params.C_syn, params.I_tau, leak, consts))
    network = Network(synapses={'s0': SynapseSpec(params=params)}, leak=leak, constants=consts)
    stimulus = StimulusProgram(items={'s0': [SpikeTrain(kind='regular', rate=rate, start=0.0, stop=stim_duration)]})
    cfg = EngineConfig(duration=stim_duration + window, sample_interval=window / 500, seed=seed)
    times, values = run(network, stimulus, cfg).traces.series('s0')
    decay = times >= stim_duration
    fit = fit_tau(times[decay], values[decay])
    theory = effective_tau(params.C_syn, params.I_tau, LeakModel(enabled=False), consts)
    _logger.info('I_tau=%r: tau fitted %.4g s (theory %.4g s, r2 %.6f)', params.I_tau, fit.tau, theory,
                 fit.r_squared)
    return TauRow(I_tau=params.I_tau, tau_theoretical_s=theory, tau_fitted_s=fit.tau, r2=fit.r_squared)


def tau_sweep(params: DpiSynapseParams, leak: LeakModel, consts: PhysicalConstants,
              I_tau_values: Sequence[float] = tuple(STANDARD_I_TAU), rate: float = 50.0, stim_duration: float = 1.0,
              target_peak: float = 1e-9, seed: int = 0, threads: int | None = None) -> list[TauRow]:
    """
    时间常数扫描：每个 I_tau 先用规则脉冲串把 EPSC 充到 target_peak，再拟合撤掉刺激后的衰减
    :param params: 突触参数，I_gain/I_tau 比例在扫描中保持不变
    :param leak: 漏电模型
    :param consts: 物理常数
    :param I_tau_values: 扫描点
    :param rate: 刺激频率
    :param stim_duration: 刺激时长
    :param target_peak: 刺激结束时的 EPSC 峰值，通过调 I_w 达到
    :param seed: 引擎种子
    :param threads: 并行上限
    :return: 每个扫描点一行
    """
    jobs = []
    for value in I_tau_values:
        swept = params.model_copy(update={'I_tau': value, 'I_gain': params.I_gain * value / params.I_tau})
        jobs.append((swept, leak, consts, rate, stim_duration, target_peak, seed))
    return run_batch(_tau_point, jobs, threads)

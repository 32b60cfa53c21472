import logging

import numpy as np

from neurosim.analysis.fi import dc_rate
from neurosim.models.analysis_model import HistogramBin, McResult, McSetup
from neurosim.models.device_model import MismatchSpec
from neurosim.models.generic_error import DomainError, FitError, err_no_root, err_non_positive
from neurosim.sim.device import sample_mismatch
from neurosim.utils.batch import run_batch

_logger = logging.getLogger(__name__)

CV_BAND = (0.12, 0.14)


def _nominal(setup: McSetup) -> dict[str, float]:
    return {k: v for k, v in setup.neuron.model_dump().items() if type(v) is float}


def _mc_run(job: tuple) -> float:
    setup, spec, run_index = job
    sampled = sample_mismatch(_nominal(setup), spec, run_index)
    neuron = setup.neuron.model_copy(update={name: sampled[name] for name in spec.sigmas})
    return dc_rate(neuron, setup.constants, setup.I_in, setup.engine, setup.warmup_fraction, 'isi')


def histogram(rates: list[float], bins: int = 20) -> list[HistogramBin]:
    counts, edges = np.histogram(np.asarray(rates, dtype=float), bins=bins)
    return [HistogramBin(low=float(lo), high=float(hi), count=int(c)) for lo, hi, c in zip(edges, edges[1:], counts)]


def monte_carlo(setup: McSetup, spec: MismatchSpec, n: int, bins: int = 20, threads: int | None = None) -> McResult:
    """
    失配蒙特卡洛：第 i 次运行的参数只取决于 (seed, i)，和并行度、n 都无关
    :param setup: 名义神经元和输入
    :param spec: 失配 sigma 和种子
    :param n: 运行次数
    :param bins: 直方图分箱数
    :param threads: 并行上限
    :return: 发放率统计；零发放的运行记为 0 并列在 zero_rate_runs 里
    """
    if n < 1:
        raise DomainError(err_non_positive, f'n={n}')
    # 提前检查 sigma 表，避免在子进程里才报错
    sample_mismatch(_nominal(setup), spec, 0)
    _logger.info('monte carlo: %d runs, seed %d', n, spec.seed)
    rates = run_batch(_mc_run, [(setup, spec, i) for i in range(n)], threads)
    zero = [i for i, r in enumerate(rates) if r == 0]
    if zero:
        _logger.warning('%d runs produced no spikes: %s', len(zero), zero)
    arr = np.asarray(rates, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if n > 1 else 0.0
    cv = std / mean if mean > 0 else 0.0
    _logger.info('monte carlo done: mean %.4g Hz, std %.4g Hz, cv %.4f', mean, std, cv)
    return McResult(n_runs=n, rates=rates, mean=mean, std=std, cv=cv, histogram=histogram(rates, bins),
                    zero_rate_runs=zero)


def calibrate_sigma_scale(setup: McSetup, spec: MismatchSpec, n: int, band: tuple[float, float] = CV_BAND,
                          hi: float = 4.0, max_iter: int = 20, threads: int | None = None) -> tuple[float, McResult]:
    """
    二分一个全局 sigma 倍数，直到 CV 落进 band
    :param setup: 名义神经元和输入
    :param spec: 被缩放的失配表
    :param n: 每次评估的运行次数
    :param band: 目标 CV 区间
    :param hi: 倍数上限
    :param max_iter: 最多评估次数
    :param threads: 并行上限
    :return: (倍数, 该倍数下的结果)
    """
    lo = 0.0
    result = monte_carlo(setup, spec.scaled(hi), n, threads=threads)
    if result.cv < band[0]:
        raise FitError(err_no_root, f'cv {result.cv:.4f} at scale {hi!r} is below {band[0]!r}')
    if result.cv <= band[1]:
        return hi, result
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        result = monte_carlo(setup, spec.scaled(mid), n, threads=threads)
        _logger.info('sigma scale %.6g: cv %.4f', mid, result.cv)
        if band[0] <= result.cv <= band[1]:
            return mid, result
        if result.cv < band[0]:
            lo = mid
        else:
            hi = mid
    raise FitError(err_no_root, f'cv did not reach {band!r} in {max_iter} steps')

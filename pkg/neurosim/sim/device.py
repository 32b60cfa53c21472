import zlib

import numpy as np

from neurosim.models.device_model import LeakModel, MismatchSpec, PhysicalConstants
from neurosim.models.generic_error import ConfigError, DomainError, err_non_positive, err_unknown_mismatch_param


def effective_tau(C: float, I_tau: float, leak: LeakModel, consts: PhysicalConstants) -> float:
    """
    DPI 时间常数 C*U_T/(kappa*I)，电容漏电以恒定基线电流叠加在 I_tau 上
    :param C: 电容 (F)
    :param I_tau: 偏置电流 (A)
    :param leak: 漏电模型，关闭时退化为理论值
    :param consts: 物理常数
    :return: 时间常数 (s)
    """
    if not C > 0:
        raise DomainError(err_non_positive, f'C={C!r}')
    if not I_tau > 0:
        raise DomainError(err_non_positive, f'I_tau={I_tau!r}')
    return C * consts.U_T / (consts.kappa * (I_tau + leak.total()))


def tau_ceiling(C: float, leak: LeakModel, consts: PhysicalConstants) -> float:
    """I_tau -> 0 时时间常数的饱和上限；漏电关闭时为无穷大"""
    total = leak.total()
    if total <= 0:
        return float('inf')
    return C * consts.U_T / (consts.kappa * total)


def run_generator(seed: int, run_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, run_index])))


def keyed_generator(seed: int, key: str) -> np.random.Generator:
    # 字符串 id 用 crc32，跨进程稳定（内置 hash 每次启动随机）
    return run_generator(seed, zlib.crc32(key.encode()))


def sample_mismatch(nominal_params: dict[str, float], spec: MismatchSpec, run_index: int) -> dict[str, float]:
    """
    对名义参数乘以独立的对数正态因子 exp(sigma*z)，z~N(0,1)
    :param nominal_params: 名义参数
    :param spec: 每个参数的相对 sigma 和种子
    :param run_index: 第几次运行，和 seed 一起决定随机流
    :return: 失配后的参数（未出现在 sigma 表里的参数原样返回）
    """
    unknown = sorted(set(spec.sigmas) - set(nominal_params))
    if unknown:
        raise ConfigError(err_unknown_mismatch_param, ', '.join(unknown))
    rng = run_generator(spec.seed, run_index)
    sampled = dict(nominal_params)
    # 按名字排序抽样，sigma 表的书写顺序不影响结果
    for name in sorted(spec.sigmas):
        z = rng.standard_normal()
        sigma = spec.sigmas[name]
        if sigma > 0:
            sampled[name] = nominal_params[name] * float(np.exp(sigma * z))
    return sampled

"""
每个脉冲的能耗模型  E(f) = P_static/f + E_switch

低频时反相器在高增益区停留得更久，静态功耗摊到每个脉冲上就更多。
"""
from collections.abc import Sequence

import numpy as np

from neurosim.models.analysis_model import PowerModel
from neurosim.models.generic_error import DomainError, FitError, err_fit_degenerate, err_fit_too_few, \
    err_non_positive_freq


def energy_per_spike(model: PowerModel, freq: float) -> float:
    if not freq > 0:
        raise DomainError(err_non_positive_freq, f'freq={freq!r}')
    return model.P_static / freq + model.E_switch


def calibrate_power(points: Sequence[tuple[float, float]]) -> PowerModel:
    """
    用 (频率, 每脉冲能耗) 点做最小二乘，两个点时是精确解
    :param points: [(Hz, J), ...]
    :return: 能耗模型，residual_rms 为拟合残差的均方根
    """
    if len(points) < 2:
        raise FitError(err_fit_too_few, f'{len(points)} calibration points')
    freqs = np.array([f for f, _ in points], dtype=float)
    energies = np.array([e for _, e in points], dtype=float)
    if np.any(freqs <= 0):
        raise DomainError(err_non_positive_freq, f'freqs={freqs.tolist()}')
    if np.unique(freqs).size < 2:
        raise FitError(err_fit_degenerate, 'calibration frequencies are all equal')
    design = np.column_stack([1.0 / freqs, np.ones_like(freqs)])
    (p_static, e_switch), *_ = np.linalg.lstsq(design, energies, rcond=None)
    if p_static < 0 or e_switch < 0:
        raise FitError(err_fit_degenerate, f'P_static={p_static!r} E_switch={e_switch!r}')
    residual = design @ np.array([p_static, e_switch]) - energies
    return PowerModel(P_static=float(p_static), E_switch=float(e_switch),
                      residual_rms=float(np.sqrt(np.mean(residual ** 2))))


def energy_curve(model: PowerModel, freqs: Sequence[float]) -> list[tuple[float, float]]:
    return [(float(f), energy_per_spike(model, float(f))) for f in freqs]

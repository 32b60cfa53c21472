import re
from decimal import Decimal, InvalidOperation

import numpy as np

from neurosim.models.generic_error import ConfigError, err_malformed_number, err_unit_mismatch, err_usage

UNITS = {'A', 'F', 's', 'Hz', 'V', 'W', 'J', 'S', 'C'}
PREFIXES = {'f': -15, 'p': -12, 'n': -9, 'u': -6, 'µ': -6, 'm': -3, 'k': 3, 'M': 6, 'G': 9}

_QUANTITY = re.compile(r'^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-zµ]*)$')


def split_unit(suffix: str) -> tuple[int, str] | None:
    # 先按完整单位匹配，'S'、'Hz' 这类不会被误当成前缀
    if suffix in UNITS:
        return 0, suffix
    if len(suffix) > 1 and suffix[0] in PREFIXES and suffix[1:] in UNITS:
        return PREFIXES[suffix[0]], suffix[1:]
    return None


def parse_quantity(text: str, line: int | None = None) -> tuple[float, str | None]:
    """
    解析带 SI 前缀的数值，比如 '100fA'、'1.5 kHz'、'2e-3'
    小数点固定为 '.'，和 locale 无关
    :param text: 原文
    :param line: 配置行号，用于报错
    :return: (以基本单位表示的值, 单位)；纯数字时单位为 None
    """
    match = _QUANTITY.match(text.strip())
    if match is None:
        raise ConfigError(err_malformed_number, repr(text), line)
    number, suffix = match.groups()
    if not suffix:
        return float(number), None
    parts = split_unit(suffix)
    if parts is None:
        raise ConfigError(err_malformed_number, f'unknown unit in {text!r}', line)
    exponent, unit = parts
    try:
        # Decimal 缩放再转 float，'100fA' 得到的就是 1e-13 本身
        return float(Decimal(number).scaleb(exponent)), unit
    except InvalidOperation:
        raise ConfigError(err_malformed_number, repr(text), line)


def format_quantity(value: float, unit: str | None) -> str:
    return f'{value!r}{unit or ""}'


def parse_typed(text: str, unit: str | None) -> float:
    value, got = parse_quantity(text)
    if got is not None and got != unit:
        raise ConfigError(err_unit_mismatch, f'{text!r}, expected {unit or "a plain number"}')
    return value


def parse_values(text: str, unit: str | None) -> list[float]:
    """逗号分隔的列表，比如 '1fA,5fA,10fA'"""
    return [parse_typed(part, unit) for part in text.split(',') if part.strip()]


def parse_grid(text: str, unit: str, geometric: bool = False) -> list[float]:
    """
    START:STOP:STEPS 形式的网格
    :param text: 原文，比如 '1nA:10nA:10'
    :param unit: 端点的单位
    :param geometric: True 时按对数等分
    :return: 网格点；STEPS 为 0 时报错
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ConfigError(err_usage, f'grid {text!r} is not START:STOP:STEPS')
    start, stop = parse_typed(parts[0], unit), parse_typed(parts[1], unit)
    try:
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(err_malformed_number, f'steps in {text!r}')
    if steps < 1:
        raise ConfigError(err_usage, f'grid {text!r} is empty')
    if steps == 1:
        return [start]
    if geometric:
        if not (start > 0 and stop > 0):
            raise ConfigError(err_usage, f'geometric grid {text!r} needs positive ends')
        return np.geomspace(start, stop, steps).tolist()
    return np.linspace(start, stop, steps).tolist()

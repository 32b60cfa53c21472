"""
实验配置文件

    # 注释
    [synapse]
    I_tau = 100fA
    C_syn = 821fF

    [network]
    neurons = n0, n1
    synapses = s0:n0, s1:n1, monitor:none
    n0 -> s1 : 0.5

    [stimulus]
    s0 = regular 50Hz 0s 1s
    n1 = dc 200pA 0s 2s; dc 400pA 2s 3s

    [mismatch]
    seed = 7
    sigma.I_leak = 0.12

命令行的 --set section.key=value 在文本层面覆盖同名键，报错时行号记为 0。
"""
import re
from dataclasses import dataclass, field
from typing import Any, get_args

from pydantic import BaseModel, ValidationError

from neurosim.models.aer_model import ConnectivityTable, Edge, ReceiverModel
from neurosim.models.config_model import ConfigDocument, NetworkSection
from neurosim.models.device_model import MismatchSpec
from neurosim.models.engine_model import CurrentStep, Network, SpikeTrain, StimulusProgram, SynapseSpec
from neurosim.models.generic_error import ConfigError, err_bad_network, err_bad_stimulus, err_invalid_value, \
    err_malformed_line, err_malformed_number, err_unit_mismatch, err_unknown_key, err_unknown_section
from neurosim.models.quantity import field_unit
from neurosim.utils.units import format_quantity, parse_quantity

OVERRIDE_LINE = 0

# 直接对应一个参数模型的段
FLAT_SECTIONS: dict[str, type[BaseModel]] = {
    name: ConfigDocument.model_fields[name].annotation
    for name in ('constants', 'leak', 'synapse', 'neuron', 'oracle', 'engine', 'power')
}
SECTIONS = [*FLAT_SECTIONS, 'network', 'stimulus', 'mismatch']

_SECTION = re.compile(r'^\[(\w+)]$')
_EDGE = re.compile(r'^(\w+)\s*->\s*(\w+)\s*(?::\s*(\S+))?$')
_RECEIVER_KEYS = ('ack_delay', 'ack_release_delay')
_STIMULUS_UNITS = {'regular': 'Hz', 'poisson': 'Hz', 'dc': 'A'}


@dataclass
class RawSection:
    values: dict[str, tuple[str, int]] = field(default_factory=dict)  # key -> (原文, 行号)
    edges: list[tuple[str, str, str | None, int]] = field(default_factory=list)


def _read(text: str) -> dict[str, RawSection]:
    raw: dict[str, RawSection] = {}
    current: RawSection | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        header = _SECTION.match(line)
        if header:
            name = header.group(1)
            if name not in SECTIONS:
                raise ConfigError(err_unknown_section, name, lineno)
            current = raw.setdefault(name, RawSection())
            continue
        if current is None:
            raise ConfigError(err_malformed_line, 'key outside of any section', lineno)
        edge = _EDGE.match(line)
        if edge:
            current.edges.append((*edge.groups(), lineno))
            continue
        key, sep, value = line.partition('=')
        if not sep or not key.strip():
            raise ConfigError(err_malformed_line, repr(line), lineno)
        key = key.strip()
        if key in current.values:
            raise ConfigError(err_malformed_line, f'duplicate key {key}', lineno)
        current.values[key] = (value.strip(), lineno)
    return raw


def _apply_overrides(raw: dict[str, RawSection], overrides: list[str]) -> None:
    for item in overrides:
        path, sep, value = item.partition('=')
        section, dot, key = path.strip().partition('.')
        if not sep or not dot or not key:
            raise ConfigError(err_malformed_line, f'override {item!r} is not section.key=value', OVERRIDE_LINE)
        if section not in SECTIONS:
            raise ConfigError(err_unknown_section, section, OVERRIDE_LINE)
        raw.setdefault(section, RawSection()).values[key] = (value.strip(), OVERRIDE_LINE)


def _convert(model: type[BaseModel], name: str, text: str, line: int) -> Any:
    annotation = model.model_fields[name].annotation
    if annotation is bool:
        if text.lower() not in ('true', 'false'):
            raise ConfigError(err_invalid_value, f'{name} = {text!r} is not true/false', line)
        return text.lower() == 'true'
    if annotation is int:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(err_malformed_number, f'{name} = {text!r}', line)
    if get_args(annotation) and all(isinstance(a, str) for a in get_args(annotation)):
        return text  # Literal，交给 pydantic 校验
    value, unit = parse_quantity(text, line)
    expected = field_unit(model, name)
    if unit is not None and unit != expected:
        raise ConfigError(err_unit_mismatch, f'{name} expects {expected or "a plain number"}, got {unit}', line)
    return value


def _validate(model: type[BaseModel], data: dict[str, Any], lines: dict[str, int], section: str,
              detail=err_invalid_value) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = str(first['loc'][0]) if first['loc'] else ''
        raise ConfigError(detail, f'[{section}] {key}: {first["msg"]}', lines.get(key))


def _flat(section: str, raw: RawSection) -> Any:
    model = FLAT_SECTIONS[section]
    if raw.edges:
        raise ConfigError(err_malformed_line, f'edge in [{section}]', raw.edges[0][3])
    data, lines = {}, {}
    for key, (text, line) in raw.values.items():
        if key not in model.model_fields:
            raise ConfigError(err_unknown_key, f'[{section}] {key}', line)
        data[key] = _convert(model, key, text, line)
        lines[key] = line
    return _validate(model, data, lines, section)


def _split_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(',') if part.strip()]


def _network(raw: RawSection) -> NetworkSection:
    data: dict[str, Any] = {}
    lines: dict[str, int] = {}
    receiver: dict[str, Any] = {}
    for key, (text, line) in raw.values.items():
        lines[key] = line
        if key == 'neurons':
            data['neurons'] = _split_list(text)
        elif key == 'synapses':
            synapses: dict[str, str | None] = {}
            for entry in _split_list(text):
                sid, sep, target = entry.partition(':')
                if not sep:
                    raise ConfigError(err_malformed_line, f'synapse {entry!r} is not id:target', line)
                target = target.strip()
                synapses[sid.strip()] = None if target.lower() == 'none' else target
            data['synapses'] = synapses
        elif key in _RECEIVER_KEYS:
            receiver[key] = _convert(ReceiverModel, key, text, line)
        else:
            raise ConfigError(err_unknown_key, f'[network] {key}', line)
    edges = []
    for src, dst, weight, line in raw.edges:
        w, unit = (1.0, None) if weight is None else parse_quantity(weight, line)
        if unit is not None:
            raise ConfigError(err_unit_mismatch, f'edge weight is a plain factor, got {unit}', line)
        try:
            edges.append(Edge(source=src, target=dst, weight=w))
        except ValidationError as e:
            raise ConfigError(err_bad_network, f'{src} -> {dst}: {e.errors()[0]["msg"]}', line)
    data['edges'] = edges
    data['receiver'] = _validate(ReceiverModel, receiver, lines, 'network')
    return _validate(NetworkSection, data, lines, 'network', err_bad_network)


def _stimulus_item(text: str, line: int) -> SpikeTrain | CurrentStep:
    parts = text.split()
    if len(parts) != 4 or parts[0] not in _STIMULUS_UNITS:
        raise ConfigError(err_bad_stimulus, f'{text!r} is not "<regular|poisson|dc> <value> <start> <stop>"', line)
    kind = parts[0]
    values = []
    for part, unit in zip(parts[1:], (_STIMULUS_UNITS[kind], 's', 's')):
        value, got = parse_quantity(part, line)
        if got is not None and got != unit:
            raise ConfigError(err_unit_mismatch, f'{part!r} in {kind} item, expected {unit}', line)
        values.append(value)
    model = CurrentStep if kind == 'dc' else SpikeTrain
    first = 'amplitude' if kind == 'dc' else 'rate'
    try:
        return model(kind=kind, **{first: values[0]}, start=values[1], stop=values[2])
    except ValidationError as e:
        raise ConfigError(err_bad_stimulus, f'{text!r}: {e.errors()[0]["msg"]}', line)


def _stimulus(raw: RawSection) -> StimulusProgram:
    if raw.edges:
        raise ConfigError(err_malformed_line, 'edge in [stimulus]', raw.edges[0][3])
    items, lines = {}, {}
    for target, (text, line) in raw.values.items():
        items[target] = [_stimulus_item(part.strip(), line) for part in text.split(';') if part.strip()]
        lines[target] = line
    return _validate(StimulusProgram, {'items': items}, lines, 'stimulus', err_bad_stimulus)


def _mismatch(raw: RawSection) -> MismatchSpec:
    data: dict[str, Any] = {}
    lines: dict[str, int] = {}
    sigmas: dict[str, float] = {}
    for key, (text, line) in raw.values.items():
        lines[key] = line
        if key.startswith('sigma.'):
            value, unit = parse_quantity(text, line)
            if unit is not None:
                raise ConfigError(err_unit_mismatch, f'{key} is a relative sigma, got {unit}', line)
            sigmas[key.removeprefix('sigma.')] = value
            lines['sigmas'] = line
        elif key == 'sigmas' and text.lower() == 'none':
            data['sigmas'] = {}
        elif key in ('seed', 'distribution'):
            data[key] = _convert(MismatchSpec, key, text, line)
        else:
            raise ConfigError(err_unknown_key, f'[mismatch] {key}', line)
    if sigmas:
        # 一旦写了 sigma，就只用写出来的这些
        data['sigmas'] = sigmas
    return _validate(MismatchSpec, data, lines, 'mismatch')


def parse_config(text: str, overrides: list[str] | None = None) -> ConfigDocument:
    """
    解析并校验配置文本，缺省项全部补齐
    :param text: 配置文件内容
    :param overrides: section.key=value 形式的覆盖
    :return: 配置文档
    """
    raw = _read(text)
    _apply_overrides(raw, overrides or [])
    sections: dict[str, Any] = {}
    for name, section in raw.items():
        if name in FLAT_SECTIONS:
            sections[name] = _flat(name, section)
        elif name == 'network':
            sections[name] = _network(section)
        elif name == 'stimulus':
            sections[name] = _stimulus(section)
        else:
            sections[name] = _mismatch(section)
    return ConfigDocument(**sections)


def _format_value(model: BaseModel, name: str) -> str:
    value = getattr(model, name)
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format_quantity(value, field_unit(type(model), name))
    return str(value)


def _format_item(item: SpikeTrain | CurrentStep) -> str:
    first = item.amplitude if isinstance(item, CurrentStep) else item.rate
    return ' '.join([item.kind, format_quantity(first, _STIMULUS_UNITS[item.kind]),
                     format_quantity(item.start, 's'), format_quantity(item.stop, 's')])


def format_config(doc: ConfigDocument) -> str:
    """按配置文件格式输出完整配置，输出可以原样再解析回同一个文档"""
    out: list[str] = []
    for name, model in FLAT_SECTIONS.items():
        section = getattr(doc, name)
        out.append(f'[{name}]')
        out.extend(f'{key} = {_format_value(section, key)}' for key in model.model_fields)
        out.append('')
    net = doc.network
    out.append('[network]')
    out.append(f'neurons = {", ".join(net.neurons)}')
    synapses = [f'{sid}:{target or "none"}' for sid, target in net.synapses.items()]
    out.append(f'synapses = {", ".join(synapses)}')
    for key in _RECEIVER_KEYS:
        out.append(f'{key} = {_format_value(net.receiver, key)}')
    out.extend(f'{e.source} -> {e.target} : {e.weight!r}' for e in net.edges)
    out.append('')
    out.append('[stimulus]')
    for target, items in doc.stimulus.items.items():
        out.append(f'{target} = {"; ".join(_format_item(item) for item in items)}')
    out.append('')
    out.append('[mismatch]')
    out.append(f'seed = {doc.mismatch.seed}')
    out.append(f'distribution = {doc.mismatch.distribution}')
    if not doc.mismatch.sigmas:
        out.append('sigmas = none')
    out.extend(f'sigma.{name} = {sigma!r}' for name, sigma in doc.mismatch.sigmas.items())
    return '\n'.join(out) + '\n'


def build_network(doc: ConfigDocument) -> Network:
    net = doc.network
    try:
        return Network(
            neurons={nid: doc.neuron for nid in net.neurons},
            synapses={sid: SynapseSpec(params=doc.synapse, target=target) for sid, target in net.synapses.items()},
            connectivity=ConnectivityTable.from_edges(net.neurons, net.edges),
            receiver=net.receiver,
            leak=doc.leak,
            constants=doc.constants,
        )
    except ValidationError as e:
        raise ConfigError(err_bad_network, e.errors()[0]['msg'])

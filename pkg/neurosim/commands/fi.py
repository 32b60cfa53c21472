import argparse

from neurosim.analysis.fi import fi_sweep
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import ConfigError, err_usage
from neurosim.models.neuron_model import AdexNeuronParams
from neurosim.utils.output import OutputWriter, fmt
from neurosim.utils.plotting import plot_fi
from neurosim.utils.units import parse_grid, parse_values

# 命令行里的偏置名 -> (神经元参数名, 单位)
BIASES = {'I_ref': ('I_ref', 'A'), 'gain_ratio': ('gain_ratio_leak', None), 'I_thr': ('I_thr', 'A')}


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('fi', parents=parents, help='firing rate vs input current')
    parser.add_argument('--iin-grid', required=True, help='START:STOP:STEPS, e.g. 1nA:10nA:10')
    parser.add_argument('--sweep-bias', default=None, help='{I_ref|gain_ratio|I_thr}=v1,v2,...')
    parser.set_defaults(handler=run)


def bias_values(text: str) -> tuple[str, str, list[float]]:
    name, sep, values = text.partition('=')
    name = name.strip()
    if not sep or name not in BIASES:
        raise ConfigError(err_usage, f'--sweep-bias {text!r} must be one of {sorted(BIASES)}=v1,v2,...')
    field, unit = BIASES[name]
    parsed = parse_values(values, unit)
    if not parsed:
        raise ConfigError(err_usage, '--sweep-bias has no values')
    return name, field, parsed


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    grid = parse_grid(args.iin_grid, 'A')
    neuron = doc.neuron.model_copy(update={'I_a': 0.0})  # 关掉适应
    if args.sweep_bias is None:
        variants = [('fi.csv', '', neuron)]
    else:
        name, field, values = bias_values(args.sweep_bias)
        variants = []
        for value in values:
            try:
                # 扫阈值时 I_norm 跟着阈值走
                data = neuron.model_dump(exclude={'I_norm'} if field == 'I_thr' else None)
                variant = AdexNeuronParams.model_validate({**data, field: value})
            except ValueError as e:
                raise ConfigError(err_usage, f'{name}={value!r}: {e}')
            variants.append((f'fi_{name}_{fmt(value)}.csv', f'{name}={fmt(value)}', variant))
    summary = {}
    written = []
    for filename, label, variant in variants:
        curve = fi_sweep(variant, doc.constants, grid, doc.engine, swept=label)
        written.append(writer.csv(filename, ['I_in_A', 'rate_hz'], curve.points))
        summary[label or 'nominal'] = [list(p) for p in curve.points]
    writer.json('summary.json', {'fi': summary})
    if args.plot:
        plot_fi(written, writer.path('fi.svg'))

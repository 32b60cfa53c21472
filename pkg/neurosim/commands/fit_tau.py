import argparse

from neurosim.analysis.tau import STANDARD_I_TAU, tau_sweep
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import ConfigError, err_usage
from neurosim.utils.output import OutputWriter
from neurosim.utils.plotting import plot_tau_table
from neurosim.utils.units import parse_typed, parse_values


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('fit-tau', parents=parents, help='synapse time constant sweep')
    parser.add_argument('--sweep', default=None, help='I_tau=1fA,5fA,... (default: the ten standard values)')
    parser.add_argument('--rate', default='50Hz', help='stimulus rate')
    parser.add_argument('--stim-duration', default='1s', help='stimulus length before the decay')
    parser.set_defaults(handler=run)


def sweep_values(text: str | None) -> list[float]:
    if text is None:
        return list(STANDARD_I_TAU)
    name, sep, values = text.partition('=')
    if not sep or name.strip() != 'I_tau':
        raise ConfigError(err_usage, f'--sweep {text!r} must be I_tau=v1,v2,...')
    parsed = parse_values(values, 'A')
    if not parsed:
        raise ConfigError(err_usage, '--sweep has no values')
    return parsed


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    rows = tau_sweep(doc.synapse, doc.leak, doc.constants, sweep_values(args.sweep),
                     rate=parse_typed(args.rate, 'Hz'), stim_duration=parse_typed(args.stim_duration, 's'),
                     seed=doc.engine.seed)
    table = writer.csv('tau_table.csv', ['I_tau', 'tau_theoretical_s', 'tau_fitted_s', 'r2'],
                       ((r.I_tau, r.tau_theoretical_s, r.tau_fitted_s, r.r2) for r in rows))
    writer.json('summary.json', {'tau_s': [r.tau_fitted_s for r in rows], 'r2': [r.r2 for r in rows],
                                 'I_tau': [r.I_tau for r in rows]})
    if args.plot:
        plot_tau_table(table, writer.path('tau_table.svg'))

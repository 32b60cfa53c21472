import argparse

from neurosim.analysis.fi import find_input_for_rate
from neurosim.analysis.montecarlo import monte_carlo
from neurosim.models.analysis_model import McSetup
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import ConfigError, err_usage
from neurosim.utils.output import OutputWriter
from neurosim.utils.plotting import plot_histogram
from neurosim.utils.units import parse_typed


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('mc', parents=parents, help='Monte Carlo mismatch statistics')
    parser.add_argument('--runs', type=int, default=500)
    parser.add_argument('--bins', type=int, default=20)
    parser.add_argument('--rate', default='70Hz', help='nominal firing rate the DC input is tuned to')
    parser.add_argument('--iin', default=None, help='fixed DC input instead of tuning to --rate')
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    if args.runs < 1 or args.bins < 1:
        raise ConfigError(err_usage, '--runs and --bins must be >= 1')
    neuron = doc.neuron.model_copy(update={'I_a': 0.0})  # 关掉适应
    if args.iin is None:
        i_in = find_input_for_rate(neuron, doc.constants, parse_typed(args.rate, 'Hz'), doc.engine)
    else:
        i_in = parse_typed(args.iin, 'A')
    setup = McSetup(neuron=neuron, I_in=i_in, constants=doc.constants, engine=doc.engine)
    result = monte_carlo(setup, doc.mismatch, args.runs, bins=args.bins)
    hist = writer.csv('histogram.csv', ['bin_low_hz', 'bin_high_hz', 'count'],
                      ((b.low, b.high, b.count) for b in result.histogram))
    writer.csv('rates.csv', ['run', 'rate_hz'], enumerate(result.rates))
    writer.json('summary.json', {'mc': {
        'mean_hz': result.mean,
        'std_hz': result.std,
        'cv': result.cv,
        'n_runs': result.n_runs,
        'I_in_A': i_in,
        'zero_rate_runs': result.zero_rate_runs,
    }})
    if args.plot:
        plot_histogram(hist, writer.path('histogram.svg'))

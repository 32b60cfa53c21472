import argparse
import logging

from neurosim.analysis.fi import adaptation_profile, dc_run
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import FitError
from neurosim.utils.output import OutputWriter
from neurosim.utils.plotting import plot_traces
from neurosim.utils.units import parse_typed

_logger = logging.getLogger(__name__)


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        'adapt', parents=parents, help='spike-frequency adaptation under DC input',
        description='Adaptation needs a non-zero I_a and a pulse extender longer than the ISI scale, '
                    'e.g. --set neuron.I_a=500pA --set neuron.t_pex=1ms; with the defaults (I_a=0) '
                    'the ISIs do not lengthen.')
    parser.add_argument('--iin', required=True, help='input current, e.g. 250pA')
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    if doc.neuron.I_a == 0:
        _logger.warning('neuron.I_a is 0, no adaptation current; set e.g. neuron.I_a=500pA')
    result = dc_run(doc.neuron, doc.constants, parse_typed(args.iin, 'A'), doc.engine)
    traces = writer.csv('traces.csv', ['time_s', 'signal_id', 'value_A'], result.traces.rows())
    writer.csv('spikes.csv', ['neuron_id', 'time_s'], result.spikes.spikes)
    summary = {'spikes': result.spikes.count('n0')}
    try:
        profile = adaptation_profile(result)
        summary['adaptation'] = profile.model_dump(exclude={'spike_times'})
    except FitError as e:
        _logger.warning('no adaptation profile: %s', e)
    writer.json('summary.json', summary)
    if args.plot:
        plot_traces(traces, writer.path('traces.svg'))

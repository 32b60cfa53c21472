import argparse

from neurosim.models.config_model import ConfigDocument
from neurosim.sim.engine import run as run_engine
from neurosim.utils.config_loader import build_network
from neurosim.utils.output import OutputWriter
from neurosim.utils.plotting import plot_traces


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('simulate', parents=parents, help='run the configured network')
    parser.add_argument('--duration', help='simulated time, e.g. 2s (overrides engine.duration)')
    parser.set_defaults(handler=run, overrides=overrides)


def overrides(args: argparse.Namespace) -> list[str]:
    return [f'engine.duration={args.duration}'] if args.duration else []


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    result = run_engine(build_network(doc), doc.stimulus, doc.engine)
    traces = writer.csv('traces.csv', ['time_s', 'signal_id', 'value_A'], result.traces.rows())
    writer.csv('spikes.csv', ['neuron_id', 'time_s'], result.spikes.spikes)
    writer.text('events.log', result.event_log.lines())
    if args.plot:
        plot_traces(traces, writer.path('traces.svg'))

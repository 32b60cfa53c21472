import argparse

from neurosim.analysis.power import calibrate_power, energy_curve
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import ConfigError, err_usage
from neurosim.utils.output import OutputWriter
from neurosim.utils.plotting import plot_energy
from neurosim.utils.units import parse_grid, parse_typed


def add_parser(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser('energy', parents=parents, help='energy per spike vs firing rate')
    parser.add_argument('--calibrate', default=None, help='f1:e1,f2:e2,..., e.g. 30Hz:16pJ,2.1kHz:1pJ')
    parser.add_argument('--grid', default='10Hz:10kHz:31', help='F1:F2:STEPS, log spaced')
    parser.set_defaults(handler=run)


def calibration_points(text: str) -> list[tuple[float, float]]:
    points = []
    for item in text.split(','):
        freq, sep, energy = item.partition(':')
        if not sep:
            raise ConfigError(err_usage, f'calibration point {item!r} is not FREQ:ENERGY')
        points.append((parse_typed(freq, 'Hz'), parse_typed(energy, 'J')))
    return points


def run(args: argparse.Namespace, doc: ConfigDocument, writer: OutputWriter) -> None:
    model = doc.power if args.calibrate is None else calibrate_power(calibration_points(args.calibrate))
    curve = energy_curve(model, parse_grid(args.grid, 'Hz', geometric=True))
    table = writer.csv('energy.csv', ['freq_hz', 'energy_pj'], ((f, e * 1e12) for f, e in curve))
    writer.json('summary.json', {
        'energy_pj': [e * 1e12 for _, e in curve],
        'freq_hz': [f for f, _ in curve],
        'P_static_W': model.P_static,
        'E_switch_J': model.E_switch,
        'residual_rms_J': model.residual_rms,
    })
    if args.plot:
        plot_energy(table, writer.path('energy.svg'))

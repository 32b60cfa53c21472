import argparse
import logging
import sys
import time
from pathlib import Path

from neurosim import __version__
from neurosim.commands import adapt, energy, fi, fit_tau, mc, simulate
from neurosim.models.config_model import ConfigDocument
from neurosim.models.generic_error import ConfigError, NeurosimError, err_unreadable_config, err_usage
from neurosim.settings import settings
from neurosim.utils.config_loader import format_config, parse_config
from neurosim.utils.output import OutputWriter

_logger = logging.getLogger('neurosim')

COMMANDS = [simulate, fit_tau, fi, adapt, energy, mc]


class ArgumentParser(argparse.ArgumentParser):
    # 用法错误走 ConfigError，退出码 1
    def error(self, message: str):
        raise ConfigError(err_usage, message)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='experiment config file')
    common.add_argument('--set', action='append', default=[], metavar='SECTION.KEY=VALUE',
                        help='override a config key (repeatable)')
    common.add_argument('--out', default='out', help='output directory')
    common.add_argument('--plot', action='store_true', help='also write SVG plots')
    common.add_argument('--seed', type=int, default=None, help='overrides engine.seed and mismatch.seed')

    parser = ArgumentParser(prog='neurosim', description='subthreshold neuromorphic circuit simulator')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--print-defaults', action='store_true', help='print the fully defaulted config')
    parser.add_argument('--print-config', metavar='FILE', help='print FILE after parsing and defaulting')
    subparsers = parser.add_subparsers(dest='command')
    for command in COMMANDS:
        command.add_parser(subparsers, [common])
    return parser


def read_config(path: str | None, overrides: list[str]) -> ConfigDocument:
    text = ''
    if path is not None:
        try:
            text = Path(path).read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(err_unreadable_config, f'{path}: {e.strerror}')
    return parse_config(text, overrides)


def execute(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(format_config(ConfigDocument()))
        return
    if args.print_config:
        sys.stdout.write(format_config(read_config(args.print_config, [])))
        return
    if args.command is None:
        raise ConfigError(err_usage, 'a subcommand is required')
    overrides = list(args.set)
    if args.seed is not None:
        overrides += [f'engine.seed={args.seed}', f'mismatch.seed={args.seed}']
    extra = getattr(args, 'overrides', None)
    if extra is not None:
        overrides += extra(args)
    doc = read_config(args.config, overrides)
    writer = OutputWriter(args.out)
    started = time.perf_counter()
    _logger.info('%s: writing to %s', args.command, writer.out_dir)
    args.handler(args, doc, writer)
    writer.manifest(args.command, format_config(doc), doc.engine.seed, time.perf_counter() - started)
    _logger.info('%s: done, %d files', args.command, len(writer.outputs))


def main(argv: list[str] | None = None) -> int:
    """
    命令行入口
    :return: 0 成功，1 配置/用法错误，2 运行时/协议错误
    """
    logging.basicConfig(level=settings.log_level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        execute(argv)
    except NeurosimError as e:
        _logger.error('%s', e)
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())

'''
The ``netroute`` command line.

.. code-block:: console

    $ netroute gen --count 10000 --seed 1 --out train.drtn
    $ netroute drc --data train.drtn --failures-only
    $ netroute train --data train.drtn --val val.drtn --epochs 20 --out-dir run
    $ netroute eval --checkpoint run/epoch-020.ckpt --data test.drtn
    $ netroute route --pins "3,3;3,8" --oracle --out net.ppm

Exit status is 0 on success, 1 for invalid arguments or unreadable files and
2 when an audit (``drc``, ``gradcheck``) finds a failure.
'''
import argparse
from collections import namedtuple
import configparser
import contextlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from ._checkpoint import load_checkpoint
from ._errors import AcceptanceError, Error, ValidationError
from ._io import atomic_write
from .dataset import combo_statistics, generate, read
from .drc import run_drc
from .fcn import (
    REFERENCE_BATCH,
    REFERENCE_LR,
    FcnConfig,
    build,
    checkpoint_path,
    evaluate,
    fit,
    format_metrics_row,
    metrics_row,
    predict,
    scaled_learning_rate,
)
from .layout import GridDims, LayoutGrid, PinSet, decode_to_rgb, encode_pins, pins_grid
from .metrics import summarize
from .nn import DEFAULT_TOLERANCE, LossConfig
from .router import ResistanceModel, WireClassCombo, route
from .selfcheck import run_suite

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ACCEPTANCE = 2

# Commands that read the [router] section of a --config file.
_ROUTER_COMMANDS = ('gen', 'stats', 'route')


class RunManifest(namedtuple('RunManifest', ['command', 'flags', 'seeds', 'artifacts', 'wall_clock', 'version'])):
    '''
    A record of one command invocation, written as JSON next to its outputs.
    Re-running ``command`` with ``flags`` reproduces ``artifacts``.
    '''
    __slots__ = ()

    def to_json(self):
        return json.dumps(self._asdict(), indent=2, sort_keys=True) + '\n'

    def write(self, path):
        with atomic_write(path) as fp:
            fp.write(self.to_json().encode('utf-8'))


_Outcome = namedtuple('_Outcome', ['seeds', 'artifacts', 'manifest', 'failure'])


def _outcome(seeds=None, artifacts=(), manifest=None, failure=None):
    return _Outcome(seeds or {}, list(artifacts), manifest, failure)


class _ArgumentParser(argparse.ArgumentParser):
    '''Report usage errors as :py:exc:`netroute.ValidationError`.'''

    def error(self, message):
        raise ValidationError('{0}: {1}'.format(self.prog, message))


def _floats(text, name):
    try:
        return tuple(float(item) for item in text.split(','))
    except ValueError:
        raise ValidationError('{0} must be comma-separated numbers, got {1!r}'.format(name, text))


def _resistance_model(args):
    base = ResistanceModel.balanced() if args.model == 'balanced' else ResistanceModel()
    return ResistanceModel(
        _floats(args.rates, 'rates') if args.rates else base.rates,
        _floats(args.overheads, 'overheads') if args.overheads else base.overheads,
    )


def _sibling(path, tag):
    root, ext = os.path.splitext(path)
    return '{0}.{1}{2}'.format(root, tag, ext or '.ppm')


def _cmd_gen(args):
    dims = GridDims(args.height, args.width)
    generate(args.out, args.count, args.seed, _resistance_model(args), dims, args.workers)
    print('wrote {0} samples to {1}'.format(args.count, args.out))
    return _outcome({'seed': args.seed}, [args.out], args.out + '.manifest.json')


def _cmd_drc(args):
    failed = 0
    with read(args.data) as reader:
        total = len(reader)
        for index, sample in enumerate(reader):
            report = run_drc(sample.label, sample.pins)
            if not report.passed:
                failed += 1
            if not (args.failures_only and report.passed):
                print('sample {0}: {1}'.format(index, report))
    print('pass rate: {0:.4f} ({1}/{2})'.format((total - failed) / float(total), total - failed, total))
    failure = None
    if failed:
        failure = AcceptanceError('{0} of {1} samples in {2} fail the design rules'.format(failed, total, args.data))
    return _outcome(failure=failure)


def _cmd_stats(args):
    model = _resistance_model(args)
    with read(args.data) as reader:
        stats = combo_statistics(reader, model)
    print('break-even lengths: M3M4/M4M5 {0:g}, M4M5/M5M6 {1:g}'.format(
        model.break_even(WireClassCombo.M3M4, WireClassCombo.M4M5),
        model.break_even(WireClassCombo.M4M5, WireClassCombo.M5M6),
    ))
    for combo in WireClassCombo:
        print('{0} count={1} frequency={2:.4f} mean_length={3:.2f}'.format(
            combo.name, stats[combo].count, stats[combo].frequency, stats[combo].mean_length
        ))
    return _outcome()


def _learning_rate(args):
    if not args.lr_scale_from:
        return args.lr
    try:
        batch, lr = args.lr_scale_from.split(':')
        batch, lr = int(batch), float(lr)
    except ValueError:
        raise ValidationError('--lr-scale-from expects BATCH:LR, got {0!r}'.format(args.lr_scale_from))
    return scaled_learning_rate(args.batch, batch, lr)


def _cmd_train(args):
    lr = _learning_rate(args)
    with contextlib.ExitStack() as stack:
        train = stack.enter_context(read(args.data))
        val = stack.enter_context(read(args.val)) if args.val else None
        if args.resume:
            model = load_checkpoint(args.resume)
        else:
            config = FcnConfig(
                n_stages=args.stages,
                first_filter=args.first_filter,
                dims=train.dims,
                loss=LossConfig(args.k0, args.k1, args.l2),
            )
            model = build(config, args.seed, lr=lr)
        for dataset in (train, val):
            if dataset is not None and dataset.dims != model.config.dims:
                raise ValidationError('dataset grid {0} does not match the network grid {1}'.format(
                    tuple(dataset.dims), tuple(model.config.dims)
                ))
        remaining = args.epochs - model.epoch
        if remaining < 1:
            raise ValidationError('checkpoint is already at epoch {0} of {1}'.format(model.epoch, args.epochs))
        _LOGGER.info('training %r for %d epochs, batch %d, lr %g', model, remaining, args.batch, lr)
        rows = fit(model, train, remaining, args.batch, lr, args.seed, val, args.out_dir, args.eval_batch)

    for row in rows:
        print(','.join(format_metrics_row(row)))
    epochs = sorted(set(row.epoch for row in rows))
    artifacts = [os.path.join(args.out_dir, 'metrics.csv')] + [checkpoint_path(args.out_dir, epoch) for epoch in epochs]
    return _outcome({'seed': args.seed}, artifacts, os.path.join(args.out_dir, 'manifest.json'))


def _cmd_eval(args):
    model = load_checkpoint(args.checkpoint)
    with read(args.data) as reader:
        result = evaluate(model, reader, args.batch, args.by_pins, args.drc)
    print(','.join(format_metrics_row(metrics_row(model.epoch, args.split, result))))
    if result.by_pins is not None:
        for pins in sorted(result.by_pins):
            summary = summarize(result.by_pins[pins])
            print('pins={0} precision={1:.6f} recall={2:.6f} f1={3:.6f}'.format(
                pins, summary.precision, summary.recall, summary.f1
            ))
    if result.drc_pass_rate is not None:
        print('drc pass rate: {0:.4f}'.format(result.drc_pass_rate))
    return _outcome()


def _cmd_route(args):
    if not args.checkpoint and not args.oracle:
        raise ValidationError('route needs --checkpoint, --oracle or both')
    model = load_checkpoint(args.checkpoint) if args.checkpoint else None
    dims = model.config.dims if model is not None else GridDims(args.height, args.width)
    pins = PinSet.parse(args.pins).validate(dims)

    artifacts = []
    if model is not None:
        layout = LayoutGrid(predict(model, encode_pins(pins, dims)[np.newaxis].astype(np.float32))[0])
        _LOGGER.info('predicted layout: %s', run_drc(layout, pins))
        decode_to_rgb(layout).save(args.out, args.scale)
        artifacts.append(args.out)
    if args.oracle:
        path = args.out if model is None else _sibling(args.out, 'oracle')
        decode_to_rgb(route(pins, _resistance_model(args), dims)).save(path, args.scale)
        artifacts.append(path)
    for path in artifacts:
        print('wrote {0}'.format(path))
    return _outcome(artifacts=artifacts, manifest=args.out + '.manifest.json')


def _cmd_render(args):
    with read(args.data) as reader:
        if not 0 <= args.index < len(reader):
            raise ValidationError('sample index {0} outside [0, {1})'.format(args.index, len(reader)))
        sample = reader[args.index]
    os.makedirs(args.out_dir, exist_ok=True)
    stem = os.path.join(args.out_dir, 'sample-{0:06d}'.format(args.index))
    artifacts = [stem + '.data.ppm', stem + '.label.ppm']
    decode_to_rgb(pins_grid(sample.data)).save(artifacts[0], args.scale)
    decode_to_rgb(sample.label).save(artifacts[1], args.scale)
    for path in artifacts:
        print('wrote {0}'.format(path))
    return _outcome(artifacts=artifacts, manifest=stem + '.manifest.json')


def _cmd_gradcheck(args):
    results = run_suite(args.seed, args.tolerance)
    for report, passed in results:
        print('{0} {1}'.format(report, 'ok' if passed else 'FAILED'))
    failed = [report.name for report, passed in results if not passed]
    failure = None
    if failed:
        failure = AcceptanceError('gradient check above {0:g} for: {1}'.format(args.tolerance, ', '.join(failed)))
    return _outcome({'seed': args.seed}, failure=failure)


def _add_router_options(parser):
    parser.add_argument(
        '--model', choices=('default', 'balanced'), default='default',
        help='resistance model preset (default: %(default)s)',
    )
    parser.add_argument('--rates', help='per-pixel resistance of M3M4,M4M5,M5M6')
    parser.add_argument('--overheads', help='fixed resistance of M3M4,M4M5,M5M6')


def _add_grid_options(parser):
    parser.add_argument('--height', type=int, default=32, help='grid rows (default: %(default)s)')
    parser.add_argument('--width', type=int, default=32, help='grid columns (default: %(default)s)')


def build_parser():
    '''
    :return: ``(parser, {command: subparser})``
    '''
    parser = _ArgumentParser(prog='netroute', description='Single-net routing with a fully convolutional network.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('-v', '--verbose', action='count', default=0, help='more logging (repeatable)')
    parser.add_argument('-q', '--quiet', action='count', default=0, help='less logging (repeatable)')
    parser.add_argument('--config', help='INI file of flag defaults, one section per command')
    parser.add_argument('--manifest', help='write the run manifest here')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True
    commands = {}

    sub = commands['gen'] = subparsers.add_parser('gen', help='generate a routed dataset')
    sub.add_argument('--count', type=int, required=True, help='number of samples')
    sub.add_argument('--seed', type=int, default=0, help='generation seed (default: %(default)s)')
    sub.add_argument('--out', required=True, help='dataset file to write')
    sub.add_argument('--workers', type=int, default=1, help='worker processes (default: %(default)s)')
    _add_grid_options(sub)
    _add_router_options(sub)
    sub.set_defaults(func=_cmd_gen)

    sub = commands['drc'] = subparsers.add_parser('drc', help='design-rule check every label of a dataset')
    sub.add_argument('--data', required=True, help='dataset file')
    sub.add_argument('--failures-only', action='store_true', help='only list failing samples')
    sub.set_defaults(func=_cmd_drc)

    sub = commands['stats'] = subparsers.add_parser('stats', help='wire class statistics of a dataset')
    sub.add_argument('--data', required=True, help='dataset file')
    _add_router_options(sub)
    sub.set_defaults(func=_cmd_stats)

    sub = commands['train'] = subparsers.add_parser('train', help='train a network')
    sub.add_argument('--data', required=True, help='training dataset')
    sub.add_argument('--val', help='validation dataset')
    sub.add_argument('--epochs', type=int, default=1, help='train until this epoch (default: %(default)s)')
    sub.add_argument('--batch', type=int, default=REFERENCE_BATCH, help='mini-batch size (default: %(default)s)')
    sub.add_argument('--lr', type=float, default=REFERENCE_LR, help='learning rate (default: %(default)s)')
    sub.add_argument(
        '--lr-scale-from', metavar='BATCH:LR',
        help='derive the learning rate from --batch by scaling this reference pair linearly',
    )
    sub.add_argument('--lambda', dest='l2', type=float, default=1e-5, help='L2 coefficient (default: %(default)s)')
    sub.add_argument('--k0', type=float, default=1.0, help='background class weight (default: %(default)s)')
    sub.add_argument('--k1', type=float, default=3.0, help='foreground class weight (default: %(default)s)')
    sub.add_argument('--seed', type=int, default=0, help='initialization and shuffling seed (default: %(default)s)')
    sub.add_argument(
        '--first-filter', type=int, choices=(3, 33), default=33,
        help='first stage filter size (default: %(default)s)',
    )
    sub.add_argument('--stages', type=int, default=15, help='network stages (default: %(default)s)')
    sub.add_argument('--eval-batch', type=int, default=20, help='evaluation batch size (default: %(default)s)')
    sub.add_argument('--resume', metavar='CHECKPOINT', help='continue from a checkpoint')
    sub.add_argument('--out-dir', required=True, help='directory for checkpoints and metrics.csv')
    sub.set_defaults(func=_cmd_train)

    sub = commands['eval'] = subparsers.add_parser('eval', help='evaluate a checkpoint on a dataset')
    sub.add_argument('--checkpoint', required=True, help='checkpoint file')
    sub.add_argument('--data', required=True, help='dataset file')
    sub.add_argument('--batch', type=int, default=20, help='batch size (default: %(default)s)')
    sub.add_argument('--split', default='eval', help='split name for the metrics line (default: %(default)s)')
    sub.add_argument('--by-pins', action='store_true', help='also report metrics per pin count')
    sub.add_argument('--drc', action='store_true', help='also design-rule check the predictions')
    sub.set_defaults(func=_cmd_eval)

    sub = commands['route'] = subparsers.add_parser('route', help='route one net and render it')
    sub.add_argument('--pins', required=True, help='pins as "x,y;x,y;..."')
    sub.add_argument('--out', required=True, help='PPM image to write')
    sub.add_argument('--checkpoint', help='predict the route with this network')
    sub.add_argument(
        '--oracle', action='store_true',
        help='render the reference router output (to OUT, or OUT.oracle.ppm with --checkpoint)',
    )
    sub.add_argument('--scale', type=int, default=1, help='pixel replication factor (default: %(default)s)')
    _add_grid_options(sub)
    _add_router_options(sub)
    sub.set_defaults(func=_cmd_route)

    sub = commands['render'] = subparsers.add_parser('render', help='render a dataset sample')
    sub.add_argument('--data', required=True, help='dataset file')
    sub.add_argument('--index', type=int, default=0, help='sample index (default: %(default)s)')
    sub.add_argument('--out-dir', required=True, help='directory for the images')
    sub.add_argument('--scale', type=int, default=1, help='pixel replication factor (default: %(default)s)')
    sub.set_defaults(func=_cmd_render)

    sub = commands['gradcheck'] = subparsers.add_parser('gradcheck', help='verify analytic gradients')
    sub.add_argument('--seed', type=int, default=0, help='seed (default: %(default)s)')
    sub.add_argument(
        '--tolerance', type=float, default=DEFAULT_TOLERANCE,
        help='maximum relative error (default: %(default)s)',
    )
    sub.set_defaults(func=_cmd_gradcheck)

    return parser, commands


def _option_names(action):
    names = set(option.lstrip('-').replace('-', '_') for option in action.option_strings)
    names.add(action.dest)
    return names


def apply_config(path, commands):
    '''
    Use an INI file as flag defaults. Section ``[name]`` configures command
    ``name``; ``[router]`` configures the commands taking a resistance model;
    ``[DEFAULT]`` applies wherever a key matches a flag.
    '''
    config = configparser.ConfigParser()
    if not config.read(path):
        raise ValidationError('cannot read config file {0}'.format(path))
    known = set(commands) | {'router'}
    for section in config.sections():
        if section not in known:
            raise ValidationError('{0}: unknown section [{1}]'.format(path, section))

    for command, parser in commands.items():
        sections = [command] + (['router'] if command in _ROUTER_COMMANDS else [])
        values = dict(config.defaults())
        explicit = set()
        for section in sections:
            if config.has_section(section):
                values.update(config.items(section))
                explicit.update(key for key in config.options(section) if key not in config.defaults())

        actions = {}
        for action in parser._actions: # pylint: disable=protected-access
            if action.option_strings and action.dest != 'help':
                for name in _option_names(action):
                    actions[name] = action

        defaults = {}
        for key, value in values.items():
            action = actions.get(key.replace('-', '_'))
            if action is None:
                if key in explicit:
                    raise ValidationError('{0}: unknown option {1!r} for {2}'.format(path, key, command))
                continue
            if isinstance(action, argparse._StoreTrueAction): # pylint: disable=protected-access
                if value.lower() not in config.BOOLEAN_STATES:
                    raise ValidationError('{0}: {1} must be a boolean, got {2!r}'.format(path, key, value))
                defaults[action.dest] = config.BOOLEAN_STATES[value.lower()]
            else:
                # argparse applies the action's type to string defaults.
                defaults[action.dest] = value
            action.required = False
        parser.set_defaults(**defaults)


def parse_args(argv=None):
    parser, commands = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    if known.config:
        apply_config(known.config, commands)
    return parser.parse_args(argv)


def _configure_logging(args):
    level = logging.WARNING + 10 * (args.quiet - args.verbose)
    logging.basicConfig(
        level=max(logging.DEBUG, min(logging.CRITICAL, level)),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def _json_flags(args):
    return dict(
        (key, value)
        for key, value in sorted(vars(args).items())
        if key not in ('func', 'verbose', 'quiet', 'manifest')
    )


def main(argv=None):
    '''
    Run the command line.

    :param list argv: Arguments, without the program name; defaults to
        ``sys.argv[1:]``.
    :return: The exit status.
    :rtype: int
    '''
    try:
        args = parse_args(argv)
        _configure_logging(args)
        started = time.time()
        outcome = args.func(args)
        manifest = args.manifest or outcome.manifest
        if manifest:
            RunManifest(
                args.command,
                _json_flags(args),
                outcome.seeds,
                outcome.artifacts,
                round(time.time() - started, 3),
                __version__,
            ).write(manifest)
            _LOGGER.debug('wrote manifest %s', manifest)
        if outcome.failure is not None:
            raise outcome.failure
    except AcceptanceError as ex:
        sys.stderr.write('netroute: {0}\n'.format(ex))
        return EXIT_ACCEPTANCE
    except (Error, OSError) as ex:
        sys.stderr.write('netroute: error: {0}\n'.format(ex))
        return EXIT_FAILURE
    return EXIT_OK

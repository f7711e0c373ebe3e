"""
Command-line front end.

Usage:
    python -m kernelkit good fixtures/sec5.dg
    python -m kernelkit fk-vertices fixtures/sec5.dg --json
    python -m kernelkit tdi fixtures/sec5.dg --k 2 --cbound 2
    python -m kernelkit verify fixtures/k13.mg --cbound 2

Exit codes: 0 verdict true / success, 1 verdict false / refutation,
2 usage or input error, 3 budget exceeded.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from kernelkit.config import configure_logging
from kernelkit.services import formats
from kernelkit.services.commands import COMMANDS, EXIT_BUDGET, EXIT_FALSE, EXIT_INPUT, Source, run_command
from kernelkit.services.graphcore import PARITIES
from kernelkit.services.lp import SENSES

SLOT_HELP = {
    'digraph': 'digraph file (.dg) or preference file',
    'prefs': 'preference file (.pref)',
    'multigraph': 'root multigraph file (.mg)',
    'point': 'point JSON {edge: "p/q"}',
    'objective': 'objective JSON {variable: coefficient}',
    'system': 'linear system JSON',
    'polyhedron': 'system JSON, digraph or preference file',
    'certificate': 'certificate JSON (or a command\'s --json output)',
    'prefs*': 'further preference files',
    'inputs*': 'instance files the certificate refers to',
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='kernelkit', description='Kernels in orientations of line multigraphs')
    parser.add_argument('--log-level', default=None, help='stderr diagnostics level')
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='command')
    for name, spec in COMMANDS.items():
        sub = subparsers.add_parser(name, help=spec.help, description=spec.help)
        for slot in spec.slots:
            dest = slot.rstrip('*')
            if slot.endswith('*'):
                sub.add_argument(f"{dest}_rest", nargs='*', metavar=dest.upper(), help=SLOT_HELP[slot])
            else:
                sub.add_argument(dest, metavar=dest.upper(), help=SLOT_HELP[slot])
        sub.add_argument('--json', action='store_true', help='JSON output')
        sub.add_argument('--budget', type=int, default=None, help='cap every enumeration at N')
        sub.add_argument('--k', type=int, default=None, help='denominator k for 1/k-integrality and TDI/k')
        sub.add_argument('--cbound', type=int, default=None, help='objective box half-width')
        sub.add_argument('--order', default=None, help='comma-separated elimination order')
        sub.add_argument('--parity', choices=PARITIES, default=None, help='cycle parity filter')
        sub.add_argument('--table', default=None, help='internal gadget order table file')
        sub.add_argument('--sense', choices=SENSES, default=None, help='optimization sense for lp')
    return parser


def _read(path: str) -> Source:
    try:
        return Source(Path(path).name, Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise FileNotFoundError(f"cannot read {path}: {e.strerror}") from None


def _paths(args: argparse.Namespace, slots: Sequence[str]) -> List[str]:
    paths = []
    for slot in slots:
        dest = slot.rstrip('*')
        if slot.endswith('*'):
            paths.extend(getattr(args, f"{dest}_rest"))
        else:
            paths.append(getattr(args, dest))
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        Exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    spec = COMMANDS[args.command]
    try:
        sources = [_read(path) for path in _paths(args, spec.slots)]
        options = {
            'k': args.k,
            'cbound': args.cbound,
            'order': args.order,
            'parity': args.parity,
            'budget': args.budget,
            'sense': args.sense,
        }
        if args.table:
            options['table'] = _read(args.table).text
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    result = run_command(args.command, sources, options)
    if args.json:
        sys.stdout.write(formats.dumps(result.payload))
    else:
        stream = sys.stderr if result.exit_code in (EXIT_INPUT, EXIT_BUDGET) else sys.stdout
        stream.write(result.text)
        if result.exit_code == EXIT_FALSE and 'certificate' in result.payload:
            sys.stdout.write('certificate: ' + json.dumps(result.payload['certificate']) + '\n')
    return result.exit_code


if __name__ == '__main__':
    sys.exit(main())

import argparse
import logging
import sys
from typing import List, Optional

from mesh_stego import __version__
from mesh_stego.cli.commands import COMMANDS
from mesh_stego.core.config import PROFILES, get_settings
from mesh_stego.core.errors import MeshStegoError
from mesh_stego.core.log import configure_logging
from mesh_stego.core.metrics import write_metrics
from mesh_stego.mesh.io import FORMATS

logger = logging.getLogger("mesh_stego.cli")

# exit code for bad input that is not a MeshStegoError (missing file, bad --changes)
USAGE_EXIT = 2


def _common(parser: argparse.ArgumentParser):
    parser.add_argument('--json', action='store_true', help='Print the report as JSON')
    parser.add_argument('--metrics-file', type=str, default=None, help='Write Prometheus metrics to this file')
    parser.add_argument('--log-level', type=str, default=None, help='DEBUG, INFO, WARNING or ERROR')
    parser.add_argument('--threads', type=int, default=None, help='Worker threads (default: all cores)')
    parser.add_argument('--kstar', type=int, default=None, help='Fractional digits kept (default: 6)')


def _changes(parser: argparse.ArgumentParser):
    parser.add_argument('--alpha', type=float, default=None, help='Payload in bits per vertex')
    parser.add_argument('--changes', type=str, default=None,
                        help="Integer steps: preset (1.5, 3, 4.5, 6, table), range --changes=-6..6 or list --changes=-1,0,1,2")
    parser.add_argument('--profile', type=str, choices=PROFILES, default=None, help='Cost profile (default: ifpd-cs)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='mesh-stego', description='Adaptive steganography for triangle meshes')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('embed', help='Hide a message in a cover mesh')
    p.add_argument('--cover', required=True, help='Cover mesh (.off or .ply)')
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--message', type=str, help="Message file ('-' reads stdin)")
    source.add_argument('--text', type=str, help='Literal message text (UTF-8)')
    p.add_argument('--out', type=str, default=None, help='Stego mesh path (default: <cover>.stego.<ext>)')
    p.add_argument('--params', type=str, default=None, help='Params path (default: <cover>.params)')
    p.add_argument('--format', type=str, choices=FORMATS, default=None, help='Stego mesh format')
    p.add_argument('--stc-height', type=int, default=None, help='STC constraint height h (default: 12)')
    p.add_argument('--seed', type=int, default=None, help='STC submatrix seed (default: 0)')
    p.add_argument('--alpha-split', type=str, default=None, help="Channel weights, e.g. '1,1,2'")
    _changes(p)
    _common(p)

    p = sub.add_parser('extract', help='Recover a message from a stego mesh')
    p.add_argument('--stego', required=True, help='Stego mesh')
    p.add_argument('--params', required=True, help='Params file written by embed')
    p.add_argument('--out', type=str, default=None, help='Message output path (default: stdout)')
    _common(p)

    p = sub.add_parser('costmap', help='Export per-vertex change costs')
    p.add_argument('--cover', required=True, help='Mesh to cost')
    p.add_argument('--out', type=str, default=None, help='Output path (default: stdout)')
    _changes(p)
    _common(p)

    p = sub.add_parser('capacity', help='Report payload limits of a mesh')
    p.add_argument('--cover', required=True, help='Mesh to analyse')
    p.add_argument('--alpha-split', type=str, default=None, help="Channel weights, e.g. '1,1,2'")
    _changes(p)
    _common(p)

    p = sub.add_parser('stats', help='Compare cover and stego meshes')
    p.add_argument('--cover', required=True, help='Cover mesh')
    p.add_argument('--stego', required=True, help='Stego mesh')
    p.add_argument('--csv', type=str, default=None, help='Write the per-vertex RMSE table here')
    _common(p)

    p = sub.add_parser('bench', help='Time full recomputation against influence-domain costing')
    p.add_argument('--cover', required=True, help='Mesh to benchmark')
    p.add_argument('--ofpd-sample', type=int, default=50,
                   help='Vertices timed with full recomputation, extrapolated to the mesh (0 = all)')
    p.add_argument('--seed', type=int, default=None, help='Sampling seed (default: 0)')
    _changes(p)
    _common(p)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or "INFO")
    try:
        settings = get_settings()
        if args.log_level is None:
            configure_logging(settings.log_level)
        report = COMMANDS[args.command](args, settings)
    except MeshStegoError as e:
        logger.error(f"{args.command} failed: {e.message}")
        return e.exit_code
    except (ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return USAGE_EXIT
    except Exception as e:
        logger.error(f"{args.command} failed unexpectedly: {e}")
        logger.debug("Traceback", exc_info=True)
        return 1
    finally:
        if args.metrics_file:
            write_metrics(args.metrics_file)

    if args.json:
        print(report.model_dump_json(indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())

from mesh_stego.cli.main import build_parser, main
from mesh_stego.cli.reports import parse_report

__all__ = ["build_parser", "main", "parse_report"]

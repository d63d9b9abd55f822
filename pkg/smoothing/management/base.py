import argparse
import logging
import os
import sys

from django.core.management.base import BaseCommand, CommandError
from pydantic import ValidationError

from smoothing.exceptions import MeshError
from smoothing.mesh_io import read_mesh, write_mesh, write_report

logging.basicConfig(level=os.environ.get("LOGLEVEL", "INFO"))
logger = logging.getLogger(__name__)

# exit status for a run that did not converge (the result is still written)
EXIT_NOT_CONVERGED = 2


def boolean(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got '{value}'")


def format_quality(value) -> str:
    return "-" if value is None else f"{value:.6f}"


class MeshCommand(BaseCommand):
    """
    Base class for the smoothing subcommands.
    Usage and validation errors exit with status 1, non-convergence with 2.
    """

    requires_system_checks = []

    # option name -> flag, used to name the flag behind a config validation error
    flags = {}

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # make argparse raise CommandError (status 1) instead of exiting with 2
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            # argument parsing happens outside BaseCommand's own handler
            self.stderr.write(f"CommandError: {e}")
            sys.exit(e.returncode)

    def read_input(self, path, dimension=None):
        try:
            return read_mesh(path, dimension=dimension)
        except (MeshError, ValueError) as e:
            raise CommandError(f"--input {path}: {e}")
        except OSError as e:
            raise CommandError(f"--input {path}: {e.strerror or e}")

    def write_output(self, mesh, path):
        try:
            write_mesh(mesh, path)
        except (MeshError, ValueError) as e:
            raise CommandError(f"--output {path}: {e}")
        except OSError as e:
            raise CommandError(f"--output {path}: {e.strerror or e}")

    def write_report(self, records, path, fmt):
        try:
            write_report(records, path, fmt)
        except OSError as e:
            raise CommandError(f"--report {path}: {e.strerror or e}")

    def build_config(self, factory, **values):
        try:
            return factory(**{k: v for k, v in values.items() if v is not None})
        except ValidationError as v:
            error = v.errors()[0]
            field = error["loc"][0] if error["loc"] else None
            flag = self.flags.get(field, f"--{str(field).replace('_', '-')}" if field else "arguments")
            raise CommandError(f"{flag}: {error['msg']}")

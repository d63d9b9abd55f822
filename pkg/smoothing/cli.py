import os
import sys
from typing import Optional, Sequence


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand (e.g. ["smooth", "--input", "a.obj", ...]) and return
    its exit code: 0 success, 1 input or validation error, 2 not converged.
    """
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "mdmsmooth.settings")
    from django.core.management import execute_from_command_line

    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        execute_from_command_line(["manage.py", *argv])
    except SystemExit as e:
        if e.code is None:
            return 0
        return e.code if isinstance(e.code, int) else 1
    return 0

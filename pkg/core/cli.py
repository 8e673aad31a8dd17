"""
The installed ``k3eq`` script: ``k3eq <command> <subcommand> [options]``.

Runs one of the project's management commands under the production settings
and returns its exit code.
"""

import os
import sys

COMMANDS = ("lattice", "forms", "lefschetz", "action", "reproduce")

USAGE = f"usage: k3eq {{{','.join(COMMANDS)}}} ...\n"


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings.production")

    import django
    from django.core.management import get_commands, load_command_class

    django.setup()
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(USAGE)
        return 2
    command = load_command_class(get_commands()[argv[0]], argv[0])
    try:
        command.run_from_argv(["k3eq", *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


def main() -> None:
    sys.exit(run())

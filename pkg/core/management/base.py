"""
Shared plumbing for the k3eq management commands: subcommand dispatch, JSON
input from a file, inline text or stdin, form validation, exact output and
the mapping of domain errors to exit codes.
"""

import csv
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

from django import forms
from django.core.management.base import BaseCommand, CommandError

from core.exceptions import (
    K3EquivariantError,
    OrderLimitExceeded,
    SearchBudgetExceeded,
)
from core.serializers import dumps

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3


class ExactCommand(BaseCommand):
    """
    Subclasses declare their subcommands in ``add_subcommands`` and implement
    ``handle_<name>`` for each; options shared by every subcommand are added
    here.
    """

    stealth_options = ("stdin",)

    def create_parser(self, prog_name, subcommand, **kwargs):
        # subcommand flags such as --s must not be read as abbreviations of --settings
        return super().create_parser(prog_name, subcommand, allow_abbrev=False, **kwargs)

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)
        self.add_subcommands(subparsers)
        for subparser in subparsers.choices.values():
            subparser.add_argument(
                "--format",
                choices=["json", "table"],
                default="table",
                help="Output format (default: table).",
            )
            subparser.add_argument(
                "--budget",
                type=int,
                default=None,
                help="Node budget for searches (default: K3EQ_SEARCH_BUDGET).",
            )

    def add_subcommands(self, subparsers) -> None:
        raise NotImplementedError("subclasses of ExactCommand must define add_subcommands()")

    def handle(self, *args, **options):
        subcommand = options["subcommand"]
        self.stdin = options.get("stdin") or sys.stdin
        handler = getattr(self, f"handle_{subcommand.replace('-', '_')}")
        logger.info(f"{self.__module__.rsplit('.', 1)[-1]} {subcommand}")
        try:
            handler(**options)
        except (SearchBudgetExceeded, OrderLimitExceeded) as exc:
            logger.warning(f"❌ {exc}")
            raise CommandError(str(exc), returncode=EXIT_BUDGET) from exc
        except K3EquivariantError as exc:
            raise CommandError(str(exc), returncode=EXIT_INVALID) from exc
        except (ValueError, ZeroDivisionError) as exc:
            raise CommandError(str(exc), returncode=EXIT_INVALID) from exc

    def load_json(self, source: str) -> Any:
        """A file path, ``-`` for stdin, or the JSON text itself."""
        if source == "-":
            text = self.stdin.read()
        elif source.lstrip()[:1] in ("[", "{"):
            text = source
        elif not Path(source).is_file():
            if source.endswith(".json") or "/" in source or os.sep in source:
                raise CommandError(f"no such file: {source}", returncode=EXIT_INVALID)
            text = source
        else:
            text = Path(source).read_text(encoding="utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise CommandError(
                f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
                returncode=EXIT_INVALID,
            ) from exc

    def validate(self, form_class: type[forms.Form], data: Any) -> dict[str, Any]:
        if not isinstance(data, dict):
            raise CommandError("expected a JSON object", returncode=EXIT_INVALID)
        form = form_class(data=data)
        if not form.is_valid():
            errors = "; ".join(
                f"{field}: {' '.join(messages)}" for field, messages in form.errors.items()
            )
            raise CommandError(f"invalid input: {errors}", returncode=EXIT_INVALID)
        return form.cleaned_data

    def emit(
        self,
        options: dict[str, Any],
        payload: Any,
        rows: Iterable[Sequence[Any]] = (),
        header: Sequence[str] | None = None,
    ) -> None:
        if options["format"] == "json":
            self.stdout.write(dumps(payload))
            return
        self.stdout.write(tsv(rows, header), ending="")

    def conclude(
        self, options: dict[str, Any], verdict: Any, summary: str, payload: Any = None
    ) -> None:
        """Write a verdict; a negative one exits with code 1 after the output."""
        if options["format"] == "json":
            self.stdout.write(dumps(payload if payload is not None else verdict))
        else:
            self.stdout.write(summary)
        logger.info(f"{'✅' if verdict else '❌'} {summary}")
        if not verdict:
            self.fail(summary)

    def fail(self, message: str) -> None:
        raise CommandError(message, returncode=EXIT_FAILED)


def tsv(rows: Iterable[Sequence[Any]], header: Sequence[str] | None = None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter="\t", lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return ""
    if isinstance(value, (list, tuple, dict)):
        return dumps(value, indent=None)
    return str(value)

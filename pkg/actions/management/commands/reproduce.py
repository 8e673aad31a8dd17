import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from actions.reproductions import (
    MAZUR_DETERMINANT,
    REPRODUCTIONS,
    mazur_report,
    niktable_report,
)
from actions.services import ExampleReport
from core.exceptions import OrderLimitExceeded, SearchBudgetExceeded
from core.management.base import EXIT_BUDGET, EXIT_FAILED
from core.serializers import dumps

logger = logging.getLogger(__name__)


def render(report: ExampleReport) -> list[str]:
    """Human-readable report; the last line is the verdict."""
    lines = []
    for section in report.sections:
        lines.append(f"== {section.title} ==")
        lines += [f"  {line}" for line in section.lines]
        for check in section.checks:
            status = "PASS" if check.matches else "FAIL"
            detail = f" ({check.detail})" if check.detail else ""
            lines.append(f"  [{status}] {check.name}{detail}")
    lines.append(report.verdict)
    return lines


class Command(BaseCommand):
    help = "Re-run the worked examples with a pass/fail summary"

    def add_arguments(self, parser):
        parser.add_argument("example", choices=[*REPRODUCTIONS, "all"])
        parser.add_argument("--format", choices=["json", "table"], default="table")
        parser.add_argument("--max-points", type=int, default=None)
        parser.add_argument("--upper", type=int, default=MAZUR_DETERMINANT)

    def build(self, name: str, options) -> ExampleReport:
        if name == "niktable":
            return niktable_report(options["max_points"] or settings.LEFSCHETZ_MAX_POINTS)
        if name == "mazur":
            return mazur_report(options["upper"])
        return REPRODUCTIONS[name]()

    def handle(self, *args, **options):
        names = list(REPRODUCTIONS) if options["example"] == "all" else [options["example"]]
        try:
            reports = {name: self.build(name, options) for name in names}
        except (SearchBudgetExceeded, OrderLimitExceeded) as exc:
            raise CommandError(str(exc), returncode=EXIT_BUDGET) from exc
        failed = [name for name, report in reports.items() if not report.passed]

        if options["format"] == "json":
            payload = {name: report.to_payload() for name, report in reports.items()}
            self.stdout.write(dumps(payload if len(names) > 1 else payload[names[0]]))
        else:
            for name, report in reports.items():
                if len(names) > 1:
                    self.stdout.write(f"# {name}")
                self.stdout.write("\n".join(render(report)))
            if len(names) > 1:
                self.stdout.write(f"{len(names) - len(failed)}/{len(names)} reproductions passed")

        for name in names:
            logger.info(f"{'❌' if name in failed else '✅'} reproduce {name}")
        if failed:
            raise CommandError(f"failed reproductions: {', '.join(failed)}", returncode=EXIT_FAILED)

import logging

from django.core.management.base import CommandError

from actions.constructions import block_involution, order_eight_action, order_four_action
from actions.forms import ActionForm, TraceSequenceForm
from actions.k3action import factor_order, power_gate, trace_sequence, validate_action
from actions.services import (
    INCOMPATIBLE,
    derived_partner_check,
    discriminant_action,
    enriques_signature,
    order_admissibility,
)
from core.management.base import EXIT_INVALID, ExactCommand, tsv
from core.serializers import dumps
from lattices.forms import LatticeForm, MatrixForm

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("order8", "order4", "involution")


class Command(ExactCommand):
    help = "Validate and compare cyclic actions on the Mukai lattice"

    def add_subcommands(self, subparsers):
        for name, help_text in (
            ("validate", "Order, isometry and Picard checks of an action"),
            ("trace", "Trace sequence, rational multiplicities and power gate"),
        ):
            parser = subparsers.add_parser(name, help=help_text)
            parser.add_argument("source", help="Action JSON: file path, inline text or -")

        factor = subparsers.add_parser("factor", help="Factorization N = n * m")
        factor.add_argument("source", nargs="?")
        factor.add_argument("--N", type=int, dest="N")
        factor.add_argument("--s", type=int, dest="s")

        gate = subparsers.add_parser("gate", help="Power gate for a (partial) trace sequence")
        gate.add_argument("--N", type=int, required=True, dest="N")
        gate.add_argument("--n", type=int, required=True)
        gate.add_argument("--m", type=int, required=True)
        gate.add_argument("--traces", required=True, help='e.g. {"1": 0, "2": 4, "4": 8}')

        compare = subparsers.add_parser("compare", help="Necessary conditions for derived partners")
        compare.add_argument("first")
        compare.add_argument("second")

        admissible = subparsers.add_parser("admissible", help="Can an action with (n, m) exist?")
        admissible.add_argument("--n", type=int, required=True)
        admissible.add_argument("--m", type=int, required=True)

        enriques = subparsers.add_parser("enriques", help="Compare with U(2) + E8(-2)")
        enriques.add_argument("source", help="Lattice JSON")
        enriques.add_argument("--full-isometry", action="store_true")

        disc_action = subparsers.add_parser(
            "disc-action", help="Action of a lattice isometry on the discriminant group"
        )
        disc_action.add_argument("source", help="Lattice JSON")
        disc_action.add_argument("--matrix", required=True)

        construct = subparsers.add_parser(
            "construct", help="Write one of the built-in actions as action JSON"
        )
        construct.add_argument("kind", choices=CONSTRUCTIONS)
        construct.add_argument("--chi", type=int, default=0, help="chi(sigma) for order8")
        construct.add_argument("--s", type=int, default=None, dest="s")

    def action(self, source):
        return self.validate(ActionForm, self.load_json(source))["action"]

    def valid_action(self, source):
        action = self.action(source)
        verdict = validate_action(action)
        if not verdict:
            raise CommandError(
                f"invalid action: {'; '.join(verdict.violations)}", returncode=EXIT_INVALID
            )
        return action

    def handle_validate(self, **options):
        verdict = validate_action(self.action(options["source"]))
        summary = "valid" if verdict else "invalid: " + "; ".join(verdict.violations)
        self.conclude(options, verdict, summary)

    def handle_factor(self, **options):
        if options["source"]:
            action = self.action(options["source"])
            N, s = action.N, action.s
        elif options["N"] is not None and options["s"] is not None:
            N, s = options["N"], options["s"]
        else:
            raise CommandError("give an action or both --N and --s", returncode=EXIT_INVALID)
        if N < 1:
            raise ValueError("order N must be positive")
        factorization = factor_order(N, s)
        self.emit(
            options,
            {"N": N, "s": s % N, **factorization.to_payload()},
            [(N, s % N, factorization.n, factorization.m, factorization.kind)],
            header=("N", "s", "n", "m", "kind"),
        )

    def handle_trace(self, **options):
        action = self.valid_action(options["source"])
        traces = trace_sequence(action)
        factorization = action.factorization
        consistency = traces.consistency()
        gate = power_gate(traces, factorization.n, factorization.m)
        payload = {
            "traces": traces,
            "factorization": factorization,
            "consistency": consistency,
            "gate": gate,
        }
        if options["format"] == "json":
            self.stdout.write(dumps(payload))
        else:
            rows = [("chi", r, value) for r, value in traces.values.items()]
            rows += [
                ("multiplicity", d, value)
                for d, value in traces.rational_multiplicities().items()
            ]
            self.stdout.write(tsv(rows, ("kind", "index", "value")), ending="")
            for violation in consistency.violations + gate.violations:
                self.stdout.write(f"# {violation}")
        if not (consistency and gate):
            self.fail("trace sequence rejected")

    def handle_gate(self, **options):
        data = self.load_json(options["traces"])
        traces = self.validate(TraceSequenceForm, {"N": options["N"], "values": data})["traces"]
        gate = power_gate(traces, options["n"], options["m"])
        consistency = traces.consistency() if traces.is_complete else None
        accepted = bool(gate) and (consistency is None or bool(consistency))
        summary = "accepted" if accepted else "rejected: " + "; ".join(
            gate.violations + (consistency.violations if consistency is not None else ())
        )
        payload = {"accepted": accepted, "gate": gate, "consistency": consistency}
        self.conclude(options, accepted, summary, payload)

    def handle_compare(self, **options):
        first = self.valid_action(options["first"])
        second = self.valid_action(options["second"])
        report = derived_partner_check(first, second, options["budget"])
        if options["format"] == "json":
            self.stdout.write(dumps(report))
        else:
            self.stdout.write(
                tsv(
                    [(check.name, check.matches, check.detail) for check in report.checks],
                    ("check", "matches", "detail"),
                ),
                ending="",
            )
            self.stdout.write(f"verdict: {report.verdict}")
        if report.verdict == INCOMPATIBLE:
            self.fail(f"incompatible: {report.first_mismatch.name}")

    def handle_admissible(self, **options):
        verdict = order_admissibility(options["n"], options["m"])
        summary = f"(n, m) = ({verdict.n}, {verdict.m}): " + (
            "admissible" if verdict else "not admissible"
        ) + f" [{verdict.rule}]"
        if verdict.notes:
            summary += "; " + "; ".join(verdict.notes)
        self.conclude(options, verdict, summary)

    def handle_enriques(self, **options):
        lattice = self.validate(LatticeForm, self.load_json(options["source"]))["lattice"]
        verdict = enriques_signature(lattice, options["full_isometry"], options["budget"])
        failed = [check.name for check in verdict.checks if not check.matches]
        summary = "matches U(2)+E8(-2)" if verdict else f"differs: {', '.join(failed)}"
        if verdict.full_isometry is not None:
            summary += f"; isometric: {'yes' if verdict.full_isometry else 'no'}"
        self.conclude(options, verdict, summary)

    def handle_disc_action(self, **options):
        lattice = self.validate(LatticeForm, self.load_json(options["source"]))["lattice"]
        data = self.load_json(options["matrix"])
        matrix = self.validate(MatrixForm, {"matrix": data})["matrix"]
        result = discriminant_action(lattice, matrix)
        self.emit(
            options,
            result,
            [(index, list(image)) for index, image in enumerate(result.images, 1)]
            + [("classification", result.classification)],
            header=("generator", "image"),
        )

    def handle_construct(self, **options):
        kind = options["kind"]
        if kind == "order8":
            action = order_eight_action(options["chi"])
        elif kind == "order4":
            action = order_four_action(options["s"] if options["s"] is not None else 0)
        else:
            action = block_involution(options["s"] if options["s"] is not None else 1)
        self.stdout.write(dumps(action))

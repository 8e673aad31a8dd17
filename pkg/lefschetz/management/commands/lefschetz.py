import logging

from core.management.base import ExactCommand, tsv
from core.serializers import dumps
from lefschetz.contributions import (
    curve_specialization_check,
    fixed_points_guaranteed,
    nonvanishing_table,
)
from lefschetz.forms import FixedPointConfigForm
from lefschetz.solver import (
    PointConfigSolver,
    nikulin_power_consistency,
    verify_config,
)
from lefschetz.tables import NIKULIN_STABILIZERS

logger = logging.getLogger(__name__)


class Command(ExactCommand):
    help = "Exact checks and searches for the holomorphic Lefschetz formula"

    def add_subcommands(self, subparsers):
        verify = subparsers.add_parser("verify", help="Check that a configuration balances")
        verify.add_argument("source", help="Config JSON: file path, inline text or -")

        search = subparsers.add_parser("search", help="All balancing point configurations")
        search.add_argument("--N", type=int, required=True, dest="N")
        search.add_argument("--s", type=int, required=True, dest="s")
        search.add_argument("--max-points", type=int, default=None)
        search.add_argument(
            "--all-weights",
            action="store_true",
            help="Also allow weights with gcd(i, j, N) > 1.",
        )

        guarantee = subparsers.add_parser("guarantee", help="Is a fixed point forced for N = n*m?")
        guarantee.add_argument("--n", type=int, required=True)
        guarantee.add_argument("--m", type=int, required=True)

        table = subparsers.add_parser("nonvanishing", help="Vanishing of 1 + zeta^-n for N <= limit")
        table.add_argument("--limit", type=int, default=66)

        consistency = subparsers.add_parser(
            "consistency", help="Symplectic fixed-point counts against the powers of sigma"
        )
        consistency.add_argument("--n", type=int, choices=sorted(NIKULIN_STABILIZERS), required=True)

        specialization = subparsers.add_parser(
            "specialization", help="General curve term against the K3 curve term"
        )
        specialization.add_argument("--g", type=int, required=True)
        specialization.add_argument("--s", type=int, required=True, dest="s")
        specialization.add_argument("--N", type=int, required=True, dest="N")

    def handle_verify(self, **options):
        config = self.validate(FixedPointConfigForm, self.load_json(options["source"]))["config"]
        verdict = verify_config(config)
        summary = f"{config}: {verdict.status}"
        if not verdict:
            summary += f", residual {verdict.residual}"
        self.conclude(options, verdict, summary)

    def handle_search(self, **options):
        if options["N"] < 1:
            raise ValueError("order N must be positive")
        solver = PointConfigSolver(
            options["N"],
            options["s"],
            options["max_points"],
            faithful_only=not options["all_weights"],
            budget=options["budget"],
        )
        configs = solver.solve()
        logger.info(f"N={options['N']} s={options['s']}: {len(configs)} configurations")
        if options["format"] == "json":
            self.emit(
                options,
                {
                    "N": options["N"],
                    "s": solver.s,
                    "max_points": solver.max_points,
                    "nodes": solver.nodes,
                    "configs": configs,
                },
            )
            return
        for config in configs:
            self.stdout.write(dumps(config, indent=None))
        rows = [(index, config.point_count, str(config)) for index, config in enumerate(configs, 1)]
        self.stdout.write(tsv(rows, ("config", "points", "summary")), ending="")

    def handle_guarantee(self, **options):
        verdict = fixed_points_guaranteed(options["n"], options["m"])
        self.emit(
            options,
            verdict,
            [(verdict.n, verdict.m, verdict.n * verdict.m, verdict.status, str(verdict.lhs))],
            header=("n", "m", "N", "status", "lhs"),
        )

    def handle_nonvanishing(self, **options):
        rows = nonvanishing_table(options["limit"])
        self.emit(
            options,
            [{"n": n, "m": m, "lhs_zero": zero} for n, m, zero in rows],
            [(n, m, n * m, zero) for n, m, zero in rows],
            header=("n", "m", "N", "lhs_zero"),
        )

    def handle_consistency(self, **options):
        consistency = nikulin_power_consistency(options["n"])
        payload = {
            "n": consistency.n,
            "consistent": bool(consistency),
            "rows": [{"r": r, "order": order, "fixed_points": count} for r, order, count in consistency.rows],
        }
        if options["format"] == "json":
            self.stdout.write(dumps(payload))
        else:
            self.stdout.write(tsv(consistency.rows, ("r", "order", "fixed_points")), ending="")
        if not consistency:
            self.fail(f"stabilizer table of order {consistency.n} is inconsistent with its powers")

    def handle_specialization(self, **options):
        check = curve_specialization_check(options["g"], options["s"], options["N"])
        payload = {
            "g": check.g,
            "s": check.s,
            "N": check.n,
            "matches_at_minus_s": check.matches_at_minus_s,
            "conjugate_at_s": check.conjugate_at_s,
        }
        summary = (
            f"g={check.g} s={check.s} N={check.n}: equal at r=-s {check.matches_at_minus_s}, "
            f"conjugate at r=s {check.conjugate_at_s}"
        )
        self.conclude(options, check, summary, payload)

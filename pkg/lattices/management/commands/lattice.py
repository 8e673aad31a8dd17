import logging

from core.management.base import ExactCommand
from lattices.discriminant import (
    ComparisonMode,
    discriminant_forms_isomorphic,
    discriminant_group,
)
from lattices.forms import GlueVectorsForm, LatticeForm, SpanForm
from lattices.genus import same_genus, stable_equivalence_check, stable_isometry_witness
from lattices.isometry import is_isometric_definite
from lattices.lattice import STANDARD_NAMES, orthogonal_complement, standard_lattice

logger = logging.getLogger(__name__)


class Command(ExactCommand):
    help = "Discriminant forms, complements, genus and isometry tests of integer lattices"

    def add_subcommands(self, subparsers):
        disc = subparsers.add_parser("disc", help="Discriminant form report")
        disc.add_argument("source", help="Lattice JSON: file path, inline text or -")
        disc.add_argument("--generators", help="Glue vectors to use as generators")

        glue = subparsers.add_parser("glue", help="Reduce a glue vector to generator coefficients")
        glue.add_argument("source")
        glue.add_argument("--vector", required=True, help='e.g. ["-5/21", "2/21"]')
        glue.add_argument("--generators")

        complement = subparsers.add_parser("complement", help="Orthogonal complement of a span")
        complement.add_argument("source")
        complement.add_argument("--span", required=True, help="Integral vectors, e.g. [[1,0]]")

        standard = subparsers.add_parser("standard", help="One of the standard lattices")
        standard.add_argument("name", choices=STANDARD_NAMES)

        for name, help_text in (
            ("isometric", "Isometry test for definite lattices"),
            ("genus", "Same-genus test for even lattices"),
            ("stable", "Stable equivalence A + U = B + U of binary even lattices"),
            ("forms", "Compare discriminant forms up to isometry or anti-isometry"),
        ):
            parser = subparsers.add_parser(name, help=help_text)
            parser.add_argument("first")
            parser.add_argument("second")
            if name == "forms":
                parser.add_argument(
                    "--mode",
                    choices=[mode.value for mode in ComparisonMode],
                    default=ComparisonMode.ISOMETRY.value,
                )

    def lattice(self, source):
        return self.validate(LatticeForm, self.load_json(source))["lattice"]

    def glue_vectors(self, source):
        return self.validate(GlueVectorsForm, {"vectors": self.load_json(source)})["vectors"]

    def discriminant_form(self, options):
        form = discriminant_group(self.lattice(options["source"]))
        if options.get("generators"):
            form = form.with_generators(self.glue_vectors(options["generators"]))
        return form

    def handle_disc(self, **options):
        form = self.discriminant_form(options)
        q_values = form.quadratic_values or [None] * len(form.generators)
        rows = [
            (index, generator.order, q, [str(x) for x in generator.coordinates])
            for index, (generator, q) in enumerate(zip(form.generators, q_values), start=1)
        ]
        self.emit(
            options,
            {"lattice": form.lattice, "group": str(form.group), **form.to_payload()},
            rows,
            header=("generator", "order", "q", "coordinates"),
        )

    def handle_glue(self, **options):
        form = self.discriminant_form(options)
        data = self.load_json(options["vector"])
        if isinstance(data, list) and data and not isinstance(data[0], list):
            data = [data]
        vectors = self.validate(GlueVectorsForm, {"vectors": data})["vectors"]
        coefficients = [form.reduce(v) for v in vectors]
        self.emit(
            options,
            {"orders": list(form.orders), "coefficients": coefficients},
            [([str(x) for x in v], list(c)) for v, c in zip(vectors, coefficients)],
            header=("vector", "coefficients"),
        )

    def handle_complement(self, **options):
        ambient = self.lattice(options["source"])
        span = self.validate(SpanForm, {"vectors": self.load_json(options["span"])})["vectors"]
        complement = orthogonal_complement(ambient, span)
        self.emit(
            options,
            {"lattice": complement, "rank": complement.rank, "det": complement.det},
            complement.rows,
        )

    def handle_standard(self, **options):
        lattice = standard_lattice(options["name"])
        self.emit(options, lattice, lattice.rows)

    def handle_isometric(self, **options):
        first, second = self.lattice(options["first"]), self.lattice(options["second"])
        verdict = is_isometric_definite(first, second, options["budget"]).require_decided()
        self.conclude(options, verdict, f"{first} vs {second}: {verdict.status}")

    def handle_genus(self, **options):
        first, second = self.lattice(options["first"]), self.lattice(options["second"])
        verdict = same_genus(first, second)
        self.conclude(options, verdict, f"{verdict.status}: {verdict.reason}")

    def handle_stable(self, **options):
        first, second = self.lattice(options["first"]), self.lattice(options["second"])
        verdict = stable_equivalence_check(first, second)
        payload = verdict.to_payload()
        if verdict:
            certificate = stable_isometry_witness(first, second, options["budget"])
            payload["certificate"] = certificate.to_payload()
            payload["certificate_verified"] = certificate.verify()
        self.conclude(options, verdict, f"{verdict.status}", payload)

    def handle_forms(self, **options):
        first, second = self.lattice(options["first"]), self.lattice(options["second"])
        verdict = discriminant_forms_isomorphic(
            discriminant_group(first),
            discriminant_group(second),
            options["mode"],
            budget=options["budget"],
        )
        self.conclude(options, verdict, f"{verdict.mode}: {verdict.status} ({verdict.reason})")


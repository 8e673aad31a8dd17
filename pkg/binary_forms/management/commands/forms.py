import argparse

from binary_forms.reduction import (
    BinaryEvenLattice,
    class_counts,
    enumerate_even,
    gauss_reduce,
    represents,
)
from binary_forms.services import genus_lookup, genus_partition, mazur_search
from core.management.base import ExactCommand
from lattices.forms import LatticeForm


def determinant_range(text: str) -> range:
    """``a..b`` (inclusive) or a single determinant."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}")
    if low < 1 or high < low:
        raise argparse.ArgumentTypeError(f"empty or nonpositive range {text!r}")
    return range(low, high + 1)


class Command(ExactCommand):
    help = "Reduced even binary lattices: enumeration, reduction, genera and Mazur pairs"

    def add_subcommands(self, subparsers):
        enumerate_parser = subparsers.add_parser("enumerate", help="Reduced forms of a determinant")
        enumerate_parser.add_argument("--det", type=int, required=True)
        enumerate_parser.add_argument("--sign", type=int, choices=[1, -1], default=1)

        reduce_parser = subparsers.add_parser("reduce", help="Reduce a definite binary lattice")
        reduce_parser.add_argument("source", help="Lattice JSON: file path, inline text or -")

        genus = subparsers.add_parser("genus", help="Genus partition of a determinant")
        genus.add_argument("--det", type=int, required=True)
        genus.add_argument("--sign", type=int, choices=[1, -1], default=1)

        mazur = subparsers.add_parser(
            "mazur", help="Same-genus pairs representing neither 2 nor -2"
        )
        mazur.add_argument("--det-range", type=determinant_range, required=True)
        mazur.add_argument("--sign", type=int, choices=[1, -1], default=-1)

        represent = subparsers.add_parser("represents", help="Does a form represent n?")
        represent.add_argument("source")
        represent.add_argument("--n", type=int, required=True)

    def binary_lattice(self, source) -> BinaryEvenLattice:
        lattice = self.validate(LatticeForm, self.load_json(source))["lattice"]
        if lattice.rank != 2:
            raise ValueError(f"expected a rank-two lattice, got rank {lattice.rank}")
        return BinaryEvenLattice.from_gram(lattice.rows)

    def handle_enumerate(self, **options):
        det, sign = options["det"], options["sign"]
        forms = enumerate_even(det, sign)
        genera = genus_partition(det, sign)
        lookup = genus_lookup(genera)
        target = 2 * sign
        rows = [
            {
                "a": form.a,
                "b": form.b,
                "c": form.c,
                "det": form.det,
                "reduced": (form if sign > 0 else -form).is_reduced,
                f"represents_{target}": bool(represents(form, target)),
                "genus_id": lookup[form],
                "gram": str(form),
            }
            for form in forms
        ]
        proper, improper = class_counts(det)
        self.emit(
            options,
            {
                "det": det,
                "sign": sign,
                "forms": rows,
                "proper_classes": proper,
                "improper_classes": improper,
                "genera": genera,
            },
            [list(row.values()) for row in rows],
            header=list(rows[0]) if rows else None,
        )

    def handle_reduce(self, **options):
        reduction = gauss_reduce(self.binary_lattice(options["source"]))
        w = reduction.change_of_basis
        self.emit(
            options,
            reduction,
            [(str(reduction.source), str(reduction.signed), [[int(x) for x in w.row(i)] for i in range(2)])],
            header=("input", "reduced", "change_of_basis"),
        )

    def handle_genus(self, **options):
        genera = genus_partition(options["det"], options["sign"])
        self.emit(
            options,
            {"det": options["det"], "sign": options["sign"], "genera": genera},
            [(g.genus_id, len(g.members), [str(m) for m in g.members]) for g in genera],
            header=("genus_id", "size", "members"),
        )

    def handle_mazur(self, **options):
        dets = options["det_range"]
        pairs = mazur_search(dets, options["sign"])
        self.emit(
            options,
            {"range": [dets.start, dets.stop - 1], "sign": options["sign"], "pairs": pairs},
            [(pair.det, str(pair.first), str(pair.second)) for pair in pairs],
            header=("det", "A", "B"),
        )

    def handle_represents(self, **options):
        verdict = represents(self.binary_lattice(options["source"]), options["n"])
        summary = (
            f"{verdict.form} represents {verdict.n} at {verdict.witness}"
            if verdict
            else f"{verdict.form} does not represent {verdict.n}"
        )
        self.conclude(options, verdict, summary)

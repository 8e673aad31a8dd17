import io
import json
import random

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from core.exceptions import DegenerateLatticeError, IndefiniteLatticeError, SearchBudgetExceeded
from lattices.genus import stable_equivalence_check
from lattices.isometry import IsometryStatus, is_isometric_definite

from .reduction import (
    BinaryEvenLattice,
    class_counts,
    enumerate_even,
    gauss_reduce,
    represents,
)
from .services import GenusService, genus_lookup, genus_partition, mazur_search

DET_47 = [
    "[[2,1],[1,24]]",
    "[[4,1],[1,12]]",
    "[[4,-1],[-1,12]]",
    "[[6,1],[1,8]]",
    "[[6,-1],[-1,8]]",
]
MAZUR_PAIR = ("[[-4,-1],[-1,-12]]", "[[-6,-1],[-1,-8]]")


def _random_unimodular(rng):
    """A random product of the generators of SL2(Z)."""
    w = [[1, 0], [0, 1]]
    for _ in range(rng.randint(0, 8)):
        step = rng.choice(([[1, 1], [0, 1]], [[1, -1], [0, 1]], [[0, -1], [1, 0]]))
        w = [[sum(w[i][k] * step[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return w


def _transform(form, w):
    g = form.rows
    rows = [
        [sum(w[k][i] * g[k][l] * w[l][j] for k in range(2) for l in range(2)) for j in range(2)]
        for i in range(2)
    ]
    return BinaryEvenLattice.from_gram(rows)


def _brute_force_reduced(det):
    found = set()
    for a in range(1, det + 1):
        for b in range(-a, a + 1):
            if (det + b * b) % (4 * a) == 0:
                form = BinaryEvenLattice(a, b, (det + b * b) // (4 * a))
                if form.is_reduced:
                    found.add(form)
    return found


class ReductionTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(2718)

    def test_reduces_to_the_identity_form(self):
        reduction = gauss_reduce(BinaryEvenLattice.from_gram([[4, 2], [2, 2]]))
        self.assertEqual(reduction.reduced, BinaryEvenLattice(1, 0, 1))
        self.assertTrue(reduction.verify())

    def test_negative_definite_input(self):
        reduction = gauss_reduce(BinaryEvenLattice(-2, -1, -6))
        self.assertTrue(reduction.negated)
        self.assertEqual(reduction.reduced, BinaryEvenLattice(2, 1, 6))
        self.assertEqual(reduction.signed, BinaryEvenLattice(-2, -1, -6))

    def test_indefinite_and_degenerate_inputs(self):
        with self.assertRaises(IndefiniteLatticeError):
            gauss_reduce(BinaryEvenLattice(1, 3, 1))
        with self.assertRaises(DegenerateLatticeError):
            gauss_reduce(BinaryEvenLattice(1, 2, 1))

    def test_odd_diagonal_is_rejected(self):
        with self.assertRaises(ValueError):
            BinaryEvenLattice.from_gram([[1, 0], [0, 2]])

    def test_reduction_recovers_the_proper_class(self):
        dets = [d for d in range(3, 201) if d % 4 in (0, 3)]
        for _ in range(1000):
            forms = enumerate_even(self.rng.choice(dets))
            form = self.rng.choice(forms)
            moved = _transform(form, _random_unimodular(self.rng))
            reduction = gauss_reduce(moved)
            self.assertTrue(reduction.verify())
            self.assertEqual(reduction.reduced, form)

    def test_reduction_is_idempotent(self):
        dets = [d for d in range(3, 201) if d % 4 in (0, 3)]
        for _ in range(500):
            form = self.rng.choice(enumerate_even(self.rng.choice(dets)))
            reduced = gauss_reduce(_transform(form, _random_unimodular(self.rng))).reduced
            again = gauss_reduce(reduced)
            self.assertEqual(again.reduced, reduced)
            self.assertTrue(again.verify())


class EnumerationTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(1729)

    def test_determinant_47(self):
        self.assertEqual([str(form) for form in enumerate_even(47)], DET_47)
        self.assertEqual(class_counts(47), (5, 3))

    def test_negative_sign(self):
        forms = enumerate_even(47, sign=-1)
        self.assertEqual(str(forms[0]), "[[-2,-1],[-1,-24]]")
        self.assertTrue(all(form.is_negative_definite for form in forms))

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            enumerate_even(0)
        with self.assertRaises(ValueError):
            enumerate_even(47, sign=2)

    def test_matches_brute_force(self):
        for det in range(1, 201):
            forms = enumerate_even(det)
            self.assertEqual(set(forms), _brute_force_reduced(det), det)
            self.assertEqual(len(forms), len(set(forms)))

    def test_only_one_form_of_det_47_represents_2(self):
        representing = [str(form) for form in enumerate_even(47) if represents(form, 2)]
        self.assertEqual(representing, ["[[2,1],[1,24]]"])

    def test_represents_matches_brute_force(self):
        dets = [d for d in range(3, 201) if d % 4 in (0, 3)]
        for _ in range(1000):
            form = self.rng.choice(enumerate_even(self.rng.choice(dets)))
            n = 2 * self.rng.randint(1, 20)
            expected = any(
                form.value(x, y) == n
                for x in range(-7, 8)
                for y in range(-7, 8)
                if x or y
            )
            verdict = represents(form, n)
            self.assertEqual(bool(verdict), expected, (str(form), n))
            if verdict:
                self.assertEqual(form.value(*verdict.witness), n)

    def test_negative_forms_represent_negative_values(self):
        self.assertTrue(represents(BinaryEvenLattice(-1, -1, -12), -2))
        self.assertFalse(represents(BinaryEvenLattice(-1, -1, -12), 2))


class GenusServiceTest(SimpleTestCase):
    def test_det_47_is_one_genus(self):
        genera = genus_partition(47)
        self.assertEqual(len(genera), 1)
        self.assertEqual(len(genera[0].members), 5)
        lookup = genus_lookup(genera)
        self.assertEqual(set(lookup.values()), {1})

    def test_isometry_classes_merge_improper_classes(self):
        classes = GenusService(sign=1).isometry_classes(47)
        self.assertEqual(len(classes), 3)

    def test_no_pairs_below_31(self):
        self.assertEqual(mazur_search(range(1, 31)), [])

    def test_pair_at_47(self):
        pairs = mazur_search([47])
        self.assertEqual(len(pairs), 1)
        self.assertEqual((str(pairs[0].first), str(pairs[0].second)), MAZUR_PAIR)

    def test_invalid_sign(self):
        with self.assertRaises(ValueError):
            GenusService(sign=0)

    def test_stable_equivalence_ignores_the_basis(self):
        rng = random.Random(4711)
        for det in (39, 47, 71, 87, 119):
            forms = enumerate_even(det)
            for _ in range(40):
                first, second = rng.choice(forms), rng.choice(forms)
                expected = stable_equivalence_check(first.lattice, second.lattice).status
                moved_first = _transform(first, _random_unimodular(rng))
                moved_second = _transform(second, _random_unimodular(rng))
                verdict = stable_equivalence_check(moved_first.lattice, moved_second.lattice)
                self.assertEqual(verdict.status, expected, (str(first), str(second)))
                negated = stable_equivalence_check((-moved_first).lattice, (-moved_second).lattice)
                self.assertEqual(negated.status, expected)

    def test_isometry_is_an_equivalence_relation(self):
        rng = random.Random(1931)
        for det in (23, 47, 71):
            for form in enumerate_even(det):
                moved = _transform(form, _random_unimodular(rng))
                moved_again = _transform(moved, _random_unimodular(rng))
                for first, second in (
                    (form, form),
                    (form, moved),
                    (moved, form),
                    (moved, moved_again),
                    (form, moved_again),
                ):
                    verdict = is_isometric_definite(first.lattice, second.lattice)
                    self.assertEqual(
                        verdict.status, IsometryStatus.ISOMETRIC, (str(first), str(second))
                    )
                    w = verdict.witness
                    self.assertEqual(w.T * first.gram * w, second.gram)
            representatives = GenusService(sign=1).isometry_classes(det)
            for i, first in enumerate(representatives):
                for second in representatives[i + 1 :]:
                    for a, b in ((first, second), (second, first)):
                        verdict = is_isometric_definite(a.lattice, b.lattice)
                        self.assertEqual(verdict.status, IsometryStatus.NOT_ISOMETRIC)

    def test_exhausted_budget_is_raised(self):
        with self.assertRaises(SearchBudgetExceeded):
            GenusService(sign=1, budget=2).isometry_classes(47)
        with self.assertRaises(SearchBudgetExceeded):
            GenusService(sign=-1, budget=2).mazur_pairs([47])

    @override_settings(K3EQ_SEARCH_BUDGET=0)
    def test_budget_from_settings_is_validated(self):
        with self.assertRaises(ValueError):
            GenusService()


class FormsCommandTest(SimpleTestCase):
    def call(self, *args, **kwargs):
        out = io.StringIO()
        call_command("forms", *args, stdout=out, **kwargs)
        return out.getvalue()

    def test_enumerate_table(self):
        lines = self.call("enumerate", "--det", "47").splitlines()
        self.assertEqual(
            lines[0].split("\t"),
            ["a", "b", "c", "det", "reduced", "represents_2", "genus_id", "gram"],
        )
        self.assertEqual(len(lines), 6)
        self.assertEqual([line.split("\t")[5] for line in lines[1:]], ["yes", "no", "no", "no", "no"])
        self.assertEqual([line.split("\t")[7] for line in lines[1:]], DET_47)

    def test_enumerate_json(self):
        payload = json.loads(self.call("enumerate", "--det", "47", "--format", "json"))
        self.assertEqual(len(payload["forms"]), 5)
        self.assertEqual((payload["proper_classes"], payload["improper_classes"]), (5, 3))

    def test_enumerate_negative_sign(self):
        header = self.call("enumerate", "--det", "47", "--sign", "-1").splitlines()[0]
        self.assertIn("represents_-2", header.split("\t"))

    def test_reduce(self):
        payload = json.loads(self.call("reduce", '{"gram": [[4, 2], [2, 2]]}', "--format", "json"))
        self.assertEqual(payload["reduced"]["gram"], [[2, 0], [0, 2]])

    def test_genus(self):
        payload = json.loads(self.call("genus", "--det", "47", "--format", "json"))
        self.assertEqual(len(payload["genera"]), 1)

    def test_mazur(self):
        payload = json.loads(self.call("mazur", "--det-range", "40..47", "--format", "json"))
        self.assertEqual([pair["det"] for pair in payload["pairs"]], [47])
        self.assertEqual((payload["pairs"][0]["A"], payload["pairs"][0]["B"]), MAZUR_PAIR)

    def test_bad_range(self):
        with self.assertRaises(CommandError):
            self.call("mazur", "--det-range", "47..40")

    def test_represents_failure_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("represents", '{"gram": [[4, 1], [1, 12]]}', "--n", "2")
        self.assertEqual(ctx.exception.returncode, 1)

    def test_rank_three_is_invalid_for_reduce(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("reduce", '{"gram": [[2, 0, 0], [0, 2, 0], [0, 0, 2]]}')
        self.assertEqual(ctx.exception.returncode, 2)

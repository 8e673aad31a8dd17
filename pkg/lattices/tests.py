import io
import json
import math
import random
import tempfile
from fractions import Fraction
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import Matrix

from core.exceptions import (
    DegenerateLatticeError,
    IndefiniteLatticeError,
    NotAGlueVectorError,
    OrderLimitExceeded,
    PreconditionError,
    SearchBudgetExceeded,
    UnknownLatticeError,
)

from .discriminant import (
    ComparisonMode,
    FiniteAbelianGroup,
    discriminant_forms_isomorphic,
    discriminant_group,
    reduce_glue_vector,
)
from .forms import LatticeForm, SpanForm
from .genus import same_genus, stable_equivalence_check, stable_isometry_witness
from .isometry import IsometryStatus, is_isometric_definite, short_vectors
from .lattice import (
    IntegerLattice,
    complement_basis,
    direct_sum,
    eigenlattice,
    is_isometry,
    orthogonal_complement,
    orthogonal_sum,
    standard_lattice,
)
from .normal_forms import integer_kernel, invariant_factors, smith_normal_form_rows, solve_integer

PICARD = [[2, 5], [5, 2]]
GENERATORS = [[Fraction(1, 3), Fraction(-1, 3)], [Fraction(1, 7), Fraction(1, 7)]]
MAZUR_A = [[4, 1], [1, 12]]
MAZUR_B = [[6, 1], [1, 8]]


def _multiply(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _random_symmetric(rng, size, spread=5):
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            rows[i][j] = rows[j][i] = rng.randint(-spread, spread)
    return rows


def _random_even_lattice(rng):
    size = rng.randint(1, 2)
    rows = _random_symmetric(rng, size, spread=3)
    for i in range(size):
        rows[i][i] = 2 * rng.randint(-3, 3)
    det = Matrix(rows).det()
    if det == 0 or abs(det) > 30:
        return None
    return IntegerLattice.from_rows(rows)


class SmithNormalFormTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(20240521)

    def test_small_example(self):
        d, u, v = smith_normal_form_rows([[2, 4], [6, 8]])
        self.assertEqual(d, [[2, 0], [0, 4]])
        self.assertEqual(_multiply(_multiply(u, [[2, 4], [6, 8]]), v), d)

    def test_round_trip_on_random_matrices(self):
        for _ in range(1000):
            m, n = self.rng.randint(1, 4), self.rng.randint(1, 4)
            rows = [[self.rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
            d, u, v = smith_normal_form_rows(rows)
            self.assertEqual(_multiply(_multiply(u, rows), v), d)
            self.assertEqual(abs(Matrix(u).det()), 1)
            self.assertEqual(abs(Matrix(v).det()), 1)
            diagonal = [d[i][i] for i in range(min(m, n))]
            for i in range(m):
                for j in range(n):
                    if i != j:
                        self.assertEqual(d[i][j], 0)
            self.assertTrue(all(x >= 0 for x in diagonal))
            for first, second in zip(diagonal, diagonal[1:]):
                if first:
                    self.assertEqual(second % first, 0)
                else:
                    self.assertEqual(second, 0)
            if m == n:
                product = 1
                for x in diagonal:
                    product *= x
                self.assertEqual(product, abs(Matrix(rows).det()))

    def test_integer_kernel_is_saturated(self):
        basis = integer_kernel([[2, 4, 6]])
        self.assertEqual(len(basis), 2)
        for vector in basis:
            self.assertEqual(2 * vector[0] + 4 * vector[1] + 6 * vector[2], 0)
        # (1, 1, -1) lies in the kernel and must be an integral combination
        system = [[basis[0][i], basis[1][i]] for i in range(3)]
        self.assertIsNotNone(solve_integer(system, [1, 1, -1]))

    def test_solve_integer_detects_no_solution(self):
        self.assertIsNone(solve_integer([[2, 4]], [1]))
        self.assertEqual(solve_integer([[3]], [6]), [2])


class IntegerLatticeTest(SimpleTestCase):
    def test_standard_lattices(self):
        k3 = standard_lattice("K3")
        mukai = standard_lattice("Mukai")
        e8 = standard_lattice("E8")
        self.assertEqual((k3.rank, k3.det, k3.signature), (22, -1, (3, 19)))
        self.assertEqual((mukai.rank, mukai.det, mukai.signature), (24, 1, (4, 20)))
        self.assertTrue(e8.is_positive_definite)
        self.assertTrue(e8.is_even and e8.is_unimodular)
        self.assertTrue(standard_lattice("E8minus").is_negative_definite)

    def test_unknown_standard_lattice(self):
        with self.assertRaises(UnknownLatticeError):
            standard_lattice("E7")

    def test_degenerate_gram_is_rejected(self):
        with self.assertRaises(DegenerateLatticeError):
            IntegerLattice.from_rows([[2, 2], [2, 2]])

    def test_non_symmetric_gram_is_rejected(self):
        with self.assertRaises(ValueError):
            IntegerLattice.from_rows([[2, 1], [0, 2]])

    def test_signature_and_twist(self):
        picard = IntegerLattice.from_rows(PICARD)
        self.assertEqual(picard.det, -21)
        self.assertEqual(picard.signature, (1, 1))
        self.assertEqual(picard.twist(2).det, -84)
        self.assertEqual((-picard).signature, (1, 1))

    def test_orthogonal_sum(self):
        u = standard_lattice("U")
        total = orthogonal_sum(u, u, label="U+U")
        self.assertEqual((total.rank, total.det, total.label), (4, 1, "U+U"))

    def test_orthogonal_complement(self):
        u = standard_lattice("U")
        ambient = u + u
        complement = orthogonal_complement(ambient, [[1, 1, 0, 0]])
        self.assertEqual(complement.rank, 3)
        self.assertEqual(complement.det, 2)
        self.assertEqual(complement.signature, (1, 2))


    def test_double_complement_is_the_saturation(self):
        rng = random.Random(88)
        e8 = standard_lattice("E8")
        checked = 0
        while checked < 40:
            r = rng.randint(1, 4)
            span = [[rng.randint(-2, 2) for _ in range(8)] for _ in range(r)]
            if Matrix(span).rank() != r:
                continue
            double = complement_basis(e8, complement_basis(e8, span))
            self.assertEqual(len(double), r)
            self.assertEqual(invariant_factors(double), [1] * r)
            columns = [[double[j][i] for j in range(r)] for i in range(8)]
            for vector in span:
                self.assertIsNotNone(solve_integer(columns, vector), vector)
            checked += 1

    def test_eigenlattices_of_the_swap(self):
        u = standard_lattice("U")
        swap = [[0, 1], [1, 0]]
        self.assertTrue(is_isometry(u, swap))
        self.assertEqual(eigenlattice(u, swap, 1).rows, ((2,),))
        self.assertEqual(eigenlattice(u, swap, -1).rows, ((-2,),))

    def test_payload_round_trip(self):
        lattice = IntegerLattice.from_rows(PICARD, label="Pic")
        self.assertEqual(IntegerLattice.from_payload(lattice.to_payload()), lattice)


class DiscriminantFormTest(SimpleTestCase):
    def setUp(self):
        self.picard = IntegerLattice.from_rows(PICARD, label="Pic")
        self.form = discriminant_group(self.picard)
        self.rng = random.Random(47)

    def test_cyclic_of_order_21(self):
        self.assertEqual(self.form.group.invariant_factors, (21,))
        self.assertEqual(self.form.orders, (3, 7))
        self.assertEqual(self.form.quadratic_values[0], Fraction(4, 3))

    def test_chosen_generators(self):
        form = self.form.with_generators(GENERATORS)
        self.assertEqual(form.quadratic_values, (Fraction(4, 3), Fraction(2, 7)))
        self.assertEqual(form.reduce([Fraction(-5, 21), Fraction(2, 21)]), (1, 3))
        self.assertEqual(form.reduce([Fraction(2, 21), Fraction(-5, 21)]), (2, 3))
        self.assertEqual(
            reduce_glue_vector(self.picard, [Fraction(-5, 21), Fraction(2, 21)], GENERATORS),
            (1, 3),
        )

    def test_dependent_generators_are_rejected(self):
        with self.assertRaises(PreconditionError):
            self.form.with_generators([GENERATORS[0], GENERATORS[0]])

    def test_not_a_glue_vector(self):
        with self.assertRaises(NotAGlueVectorError):
            self.form.reduce([Fraction(1, 2), 0])

    def test_order_equals_determinant(self):
        checked = 0
        while checked < 1000:
            size = self.rng.randint(1, 3)
            rows = _random_symmetric(self.rng, size)
            if Matrix(rows).det() == 0:
                continue
            lattice = IntegerLattice.from_rows(rows)
            form = discriminant_group(lattice)
            self.assertEqual(form.order, abs(lattice.det))
            self.assertEqual(form.group.order, abs(lattice.det))
            checked += 1

    def test_reduce_inverts_vector(self):
        lattice = IntegerLattice.from_rows([[2, 1, 0], [1, 4, 1], [0, 1, 6]])
        form = discriminant_group(lattice)
        for _ in range(1000):
            c = [self.rng.randint(-30, 30) for _ in form.orders]
            self.assertEqual(form.reduce(form.vector(c).coordinates), form.normalize(c))

    def test_isometry_and_anti_isometry(self):
        self.assertTrue(discriminant_forms_isomorphic(self.form, self.form))
        anti = discriminant_forms_isomorphic(self.form, self.form, ComparisonMode.ANTI_ISOMETRY)
        self.assertFalse(anti)

    def test_order_limit(self):
        with self.assertRaises(OrderLimitExceeded):
            discriminant_forms_isomorphic(self.form, self.form, order_limit=5)

    def test_direct_sum_multiplies_discriminant_forms(self):
        checked = 0
        while checked < 200:
            first, second = _random_even_lattice(self.rng), _random_even_lattice(self.rng)
            if first is None or second is None:
                continue
            form1, form2 = discriminant_group(first), discriminant_group(second)
            total = discriminant_group(direct_sum(first, second))
            self.assertEqual(
                total.group, FiniteAbelianGroup.from_cyclic_orders(form1.orders + form2.orders)
            )
            expected = sorted(
                (math.lcm(o1, o2), (q1 + q2) % 2)
                for o1, q1 in form1.fingerprint()
                for o2, q2 in form2.fingerprint()
            )
            self.assertEqual(list(total.fingerprint()), expected)
            checked += 1


class IsometryTest(SimpleTestCase):
    def test_e8_roots(self):
        self.assertEqual(len(short_vectors(standard_lattice("E8"), 2)), 240)

    def test_isometric_with_witness(self):
        first = IntegerLattice.from_rows([[2, 1], [1, 2]])
        second = IntegerLattice.from_rows([[2, -1], [-1, 2]])
        verdict = is_isometric_definite(first, second)
        self.assertEqual(verdict.status, IsometryStatus.ISOMETRIC)
        w = verdict.witness
        self.assertEqual(w.T * first.gram * w, second.gram)

    def test_mazur_lattices_are_not_isometric(self):
        verdict = is_isometric_definite(
            IntegerLattice.from_rows(MAZUR_A), IntegerLattice.from_rows(MAZUR_B)
        )
        self.assertEqual(verdict.status, IsometryStatus.NOT_ISOMETRIC)

    def test_indefinite_is_rejected(self):
        u = standard_lattice("U")
        with self.assertRaises(IndefiniteLatticeError):
            is_isometric_definite(u, u)

    def test_budget_exceeded(self):
        first = IntegerLattice.from_rows([[2, 1], [1, 2]])
        second = IntegerLattice.from_rows([[2, -1], [-1, 2]])
        verdict = is_isometric_definite(first, second, search_budget=1)
        self.assertEqual(verdict.status, IsometryStatus.BUDGET_EXCEEDED)
        self.assertFalse(verdict)
        with self.assertRaises(SearchBudgetExceeded):
            verdict.require_decided()
        decided = is_isometric_definite(first, second)
        self.assertIs(decided.require_decided(), decided)


class GenusTest(SimpleTestCase):
    def setUp(self):
        self.a = -IntegerLattice.from_rows(MAZUR_A)
        self.b = -IntegerLattice.from_rows(MAZUR_B)

    def test_mazur_pair_shares_a_genus(self):
        self.assertTrue(same_genus(self.a, self.b))
        self.assertTrue(stable_equivalence_check(self.a, self.b))

    def test_different_determinants(self):
        verdict = same_genus(
            IntegerLattice.from_rows([[2, 1], [1, 2]]), IntegerLattice.from_rows([[2, 0], [0, 6]])
        )
        self.assertFalse(verdict)

    def test_odd_lattices_are_rejected(self):
        one = IntegerLattice.from_rows([[1]])
        with self.assertRaises(PreconditionError):
            same_genus(one, one)

    def test_stable_certificate_verifies(self):
        certificate = stable_isometry_witness(self.a, self.b)
        self.assertTrue(certificate.verify())
        self.assertEqual(certificate.source.rank, 4)


class LatticeFormTest(SimpleTestCase):
    def test_valid_lattice(self):
        form = LatticeForm(data={"label": " Pic ", "gram": PICARD})
        self.assertTrue(form.is_valid())
        self.assertEqual(form.cleaned_data["lattice"].det, -21)
        self.assertEqual(form.cleaned_data["label"], "Pic")

    def test_invalid_lattices(self):
        for gram in ([[2, 1], [0, 2]], [[2, 1.5], [1.5, 2]], [[1, 2, 3]], "x", [[0, 0], [0, 0]]):
            self.assertFalse(LatticeForm(data={"gram": gram}).is_valid(), gram)

    def test_span_must_be_integral(self):
        self.assertFalse(SpanForm(data={"vectors": [[1, "1/2"]]}).is_valid())


class LatticeCommandTest(SimpleTestCase):
    def setUp(self):
        self.source = json.dumps({"label": "Pic", "gram": PICARD})

    def call(self, *args, **kwargs):
        out = io.StringIO()
        call_command("lattice", *args, stdout=out, **kwargs)
        return out.getvalue()

    def test_disc_table(self):
        lines = self.call("disc", self.source).splitlines()
        self.assertEqual(lines[0].split("\t"), ["generator", "order", "q", "coordinates"])
        self.assertEqual(lines[1].split("\t")[1:3], ["3", "4/3"])

    def test_disc_json(self):
        payload = json.loads(self.call("disc", self.source, "--format", "json"))
        self.assertEqual(payload["invariant_factors"], [21])
        self.assertEqual(payload["group"], "Z/21")
        self.assertEqual(payload["q_values"][0], "4/3")

    def test_glue_with_chosen_generators(self):
        output = self.call(
            "glue",
            self.source,
            "--vector",
            '["-5/21", "2/21"]',
            "--generators",
            '[["1/3", "-1/3"], ["1/7", "1/7"]]',
            "--format",
            "json",
        )
        self.assertEqual(json.loads(output)["coefficients"], [[1, 3]])

    def test_stdin_and_file_match_inline(self):
        inline = self.call("disc", self.source, "--format", "json")
        piped = self.call("disc", "-", "--format", "json", stdin=io.StringIO(self.source))
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "pic.json"
            path.write_text(self.source)
            from_file = self.call("disc", str(path), "--format", "json")
        self.assertEqual(inline, piped)
        self.assertEqual(inline, from_file)

    def test_malformed_json(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("disc", '{"gram": [[2, 5],')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("line 1 column", str(ctx.exception))

    def test_degenerate_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("disc", '{"gram": [[2, 2], [2, 2]]}')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_complement(self):
        ambient = json.dumps({"gram": [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]})
        payload = json.loads(
            self.call("complement", ambient, "--span", "[[1, 1, 0, 0]]", "--format", "json")
        )
        self.assertEqual((payload["rank"], payload["det"]), (3, 2))

    def test_non_isometric_pair_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("isometric", json.dumps({"gram": MAZUR_A}), json.dumps({"gram": MAZUR_B}))
        self.assertEqual(ctx.exception.returncode, 1)

    def test_stable_equivalence(self):
        first = json.dumps({"gram": [[-4, -1], [-1, -12]]})
        second = json.dumps({"gram": [[-6, -1], [-1, -8]]})
        payload = json.loads(self.call("stable", first, second, "--format", "json"))
        self.assertEqual(payload["status"], "equivalent")
        self.assertTrue(payload["certificate_verified"])

    def test_anti_isometric_forms(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("forms", self.source, self.source, "--mode", "anti-isometry")
        self.assertEqual(ctx.exception.returncode, 1)

    def test_isometry_budget_exits_with_three(self):
        with self.assertRaises(CommandError) as ctx:
            self.call(
                "isometric",
                json.dumps({"gram": [[2, 1], [1, 2]]}),
                json.dumps({"gram": [[2, -1], [-1, 2]]}),
                "--budget",
                "1",
            )
        self.assertEqual(ctx.exception.returncode, 3)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("disc", "missing/pic.json")
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("no such file", str(ctx.exception))

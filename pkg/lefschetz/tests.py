import io
import json
import random
from fractions import Fraction

from django.core.exceptions import NON_FIELD_ERRORS
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import Poly, cyclotomic_poly

from core.exceptions import (
    InconsistentTraceError,
    InvalidConfigurationError,
    PoleError,
    PreconditionError,
    SearchBudgetExceeded,
)

from .contributions import (
    Guarantee,
    chi_equals_count,
    curve_contribution,
    curve_specialization_check,
    fixed_points_guaranteed,
    nonvanishing_table,
    point_contribution,
    topological_chi,
)
from .cyclotomic import CyclotomicNumber, degree, ramanujan_sum, x, zeta_pow
from .forms import FixedPointConfigForm
from .solver import (
    FixedCurve,
    FixedPointConfig,
    PointConfigSolver,
    admissible_weights,
    nikulin_power_consistency,
    search_point_configs,
    verify_config,
)
from .tables import NIKULIN_FIXED_POINTS, NIKULIN_STABILIZERS


def _random_element(rng, n):
    return CyclotomicNumber(
        n, tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(degree(n)))
    )


class CyclotomicNumberTest(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(314)

    def test_cyclotomic_polynomial_vanishes_at_zeta(self):
        for n in range(1, 67):
            coefficients = Poly(cyclotomic_poly(n, x), x).all_coeffs()[::-1]
            total = CyclotomicNumber.rational(n, 0)
            for k, c in enumerate(coefficients):
                total = total + zeta_pow(n, k) * int(c)
            self.assertTrue(total.is_zero(), n)

    def test_zeta_has_order_n(self):
        for n in (3, 4, 5, 7, 8, 9, 12, 15):
            self.assertEqual(zeta_pow(n, 1) ** n, 1)
            self.assertNotEqual(zeta_pow(n, 1) ** (n // 2), 1)
        self.assertEqual(zeta_pow(4, 1) ** 2, -1)
        self.assertEqual(zeta_pow(2, 1), -1)

    def test_field_axioms(self):
        for _ in range(1000):
            n = self.rng.choice((3, 4, 5, 7, 8, 12))
            a, b, c = (_random_element(self.rng, n) for _ in range(3))
            self.assertEqual((a * b) * c, a * (b * c))
            self.assertEqual(a * (b + c), a * b + a * c)
            self.assertEqual(a - a, 0)
            if not a.is_zero():
                self.assertEqual(a * a.inverse(), 1)
                self.assertEqual((b / a) * a, b)

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            CyclotomicNumber.rational(5, 0).inverse()
        with self.assertRaises(ZeroDivisionError):
            zeta_pow(5, 1) / 0

    def test_wrong_number_of_coefficients(self):
        with self.assertRaises(ValueError):
            CyclotomicNumber(5, (1, 0))

    def test_trace(self):
        self.assertEqual(CyclotomicNumber.rational(12, 1).trace(), 4)
        self.assertEqual(zeta_pow(5, 1).trace(), -1)
        self.assertEqual(zeta_pow(4, 1).trace(), 0)
        self.assertEqual(ramanujan_sum(12, 0), 4)
        self.assertEqual(ramanujan_sum(6, 3), -2)

    def test_galois_action(self):
        z = zeta_pow(7, 1)
        self.assertEqual(z.conjugate(3), zeta_pow(7, 3))
        self.assertEqual(z.complex_conjugate(), zeta_pow(7, 6))
        self.assertEqual(z.galois_sum(), -1)
        with self.assertRaises(ValueError):
            z.conjugate(7)

    def test_lift_and_descend(self):
        omega = zeta_pow(3, 1)
        self.assertEqual(omega.lift(2), zeta_pow(6, 2))
        self.assertEqual(omega, zeta_pow(6, 2))
        self.assertEqual(zeta_pow(6, 2).descend(3).coeffs, omega.coeffs)
        with self.assertRaises(ValueError):
            zeta_pow(8, 1).descend(4)

    def test_mixed_conductors_add_in_the_compositum(self):
        total = zeta_pow(3, 1) + zeta_pow(4, 1)
        self.assertEqual(total.N, 12)
        self.assertEqual(total - zeta_pow(4, 1), zeta_pow(3, 1))

    def test_equal_elements_hash_alike_across_conductors(self):
        self.assertEqual(hash(zeta_pow(3, 1)), hash(zeta_pow(6, 2)))
        self.assertEqual(hash(zeta_pow(5, 2)), hash(zeta_pow(10, 4)))
        self.assertEqual(hash(CyclotomicNumber.rational(7, Fraction(3, 2))), hash(Fraction(3, 2)))
        for _ in range(60):
            n = self.rng.choice((3, 4, 5, 8))
            a = _random_element(self.rng, n)
            lifted = a.lift(self.rng.choice((2, 3)))
            self.assertEqual(a, lifted)
            self.assertEqual(hash(a), hash(lifted))
            self.assertEqual(len({a, lifted}), 1)

    def test_canonical_uses_the_smallest_field(self):
        self.assertEqual(zeta_pow(12, 4).canonical().N, 3)
        self.assertEqual(zeta_pow(12, 3).canonical().N, 4)
        self.assertEqual(zeta_pow(10, 5).canonical().N, 1)
        self.assertEqual(zeta_pow(8, 1).canonical().N, 8)


class ContributionTest(SimpleTestCase):
    def test_involution_point_contribution(self):
        self.assertEqual(point_contribution(1, 1, 2), Fraction(1, 4))

    def test_zero_weight_is_a_pole(self):
        with self.assertRaises(PoleError):
            point_contribution(0, 3, 5)

    def test_nonvanishing_iff_m_is_two(self):
        for n, m, zero in nonvanishing_table(66):
            self.assertEqual(zero, m == 2, (n, m))

    def test_guarantee(self):
        self.assertEqual(fixed_points_guaranteed(5, 2).status, Guarantee.NOT_GUARANTEED)
        self.assertTrue(fixed_points_guaranteed(4, 3))
        with self.assertRaises(PreconditionError):
            fixed_points_guaranteed(0, 2)

    def test_curve_term_specializes_to_k3_term(self):
        for n in range(2, 9):
            for s in range(1, n):
                for g in range(4):
                    check = curve_specialization_check(g, s, n)
                    self.assertTrue(check.matches_at_minus_s, (g, s, n))
                    self.assertTrue(check.conjugate_at_s, (g, s, n))

    def test_topological_counts(self):
        self.assertEqual(topological_chi(6), 6)
        self.assertEqual(chi_equals_count(4, 2), 4)
        with self.assertRaises(PreconditionError):
            chi_equals_count(4, 1)
        with self.assertRaises(InconsistentTraceError):
            chi_equals_count(-2, 5, 2)

    def test_point_contribution_is_symmetric_in_the_weights(self):
        for n in range(2, 13):
            for i in range(1, n):
                for j in range(1, n):
                    self.assertEqual(point_contribution(i, j, n), point_contribution(j, i, n))

    def test_order_five_point_value(self):
        value = point_contribution(1, 4, 5)
        self.assertEqual(
            value, CyclotomicNumber(5, (Fraction(2, 5), 0, Fraction(-1, 5), Fraction(-1, 5)))
        )
        # (5 + sqrt 5) / 10 is a root of 5 t^2 - 5 t + 1
        self.assertEqual(value * value * 5 - value * 5 + 1, 0)

    def test_galois_sums_of_contributions_are_rational(self):
        for n in range(2, 11):
            for i in range(1, n):
                for j in range(i, n):
                    total = point_contribution(i, j, n).galois_sum()
                    self.assertTrue(total.is_rational(), (i, j, n))
                    self.assertEqual(total.rational_part(), point_contribution(i, j, n).trace())
            for s in range(1, n):
                for g in range(3):
                    total = curve_contribution(g, -s % n, 2 * g - 2, n).galois_sum()
                    self.assertTrue(total.is_rational(), (g, s, n))


class FixedPointConfigTest(SimpleTestCase):
    def test_eight_points_balance_an_involution(self):
        verdict = verify_config(FixedPointConfig(2, 0, ((1, 1, 8),)))
        self.assertTrue(verdict)
        self.assertTrue(verdict.residual.is_zero())

    def test_seven_points_leave_a_quarter(self):
        verdict = verify_config(FixedPointConfig(2, 0, ((1, 1, 7),)))
        self.assertFalse(verdict)
        self.assertEqual(verdict.residual, Fraction(1, 4))

    def test_curves_balance_a_non_symplectic_involution(self):
        config = FixedPointConfig(2, 1, curves=(FixedCurve(3, 1, 4),))
        self.assertTrue(verify_config(config))
        self.assertEqual(config.euler_characteristic, -4)

    def test_weights_are_merged_and_normalized(self):
        config = FixedPointConfig(5, 5, ((2, 3, 1), (3, 2, 1), (1, 4, 0)))
        self.assertEqual(config.s, 0)
        self.assertEqual(config.points, ((2, 3, 2),))
        self.assertEqual(FixedPointConfig.from_payload(config.to_payload()), config)

    def test_invalid_configurations(self):
        for kwargs in (
            {"N": 0, "s": 0},
            {"N": 2, "s": 0, "points": ((1, 2, 1),)},
            {"N": 5, "s": 0, "points": ((1, 2, 1),)},
            {"N": 5, "s": 0, "points": ((1, 4, -1),)},
            {"N": 5, "s": 0, "curves": (FixedCurve(0, 1, -2),)},
            {"N": 5, "s": 1, "curves": (FixedCurve(0, 5, -2),)},
            {"N": 5, "s": 1, "curves": (FixedCurve(-1, 1, -2),)},
        ):
            with self.assertRaises(InvalidConfigurationError):
                FixedPointConfig(**kwargs)

    def test_curves_must_fit_the_action(self):
        for n, s, curve in (
            (2, 1, FixedCurve(3, 1, 2)),
            (3, 1, FixedCurve(0, 1, -2)),
            (4, 1, FixedCurve(1, 1, 0)),
        ):
            with self.assertRaises(InvalidConfigurationError):
                FixedPointConfig(n, s, curves=(curve,))
        config = FixedPointConfig(3, 1, curves=(FixedCurve(0, 2, -2),))
        self.assertEqual(config.curves, (FixedCurve(0, 2, -2),))


class PointConfigSolverTest(SimpleTestCase):
    def test_admissible_weights(self):
        self.assertEqual(admissible_weights(5, 0), [(1, 4), (2, 3)])
        self.assertEqual(admissible_weights(4, 0), [(1, 3)])
        self.assertEqual(admissible_weights(4, 0, faithful_only=False), [(1, 3), (2, 2)])

    def test_order_five(self):
        configs = search_point_configs(5, 0)
        self.assertEqual([config.points for config in configs], [((1, 4, 2), (2, 3, 2))])
        self.assertEqual(configs[0].point_count, 4)

    def test_symplectic_orders_match_the_classification(self):
        for n, count in NIKULIN_FIXED_POINTS.items():
            configs = search_point_configs(n, 0)
            self.assertEqual([config.point_count for config in configs], [count], n)

    def test_solutions_balance(self):
        for n in range(2, 7):
            for s in range(n):
                for config in search_point_configs(n, s, max_points=8):
                    self.assertTrue(verify_config(config), str(config))
                    self.assertLessEqual(config.point_count, 8)

    def test_point_bound(self):
        self.assertEqual(search_point_configs(2, 0, max_points=7), [])

    def test_no_admissible_weights(self):
        self.assertEqual(search_point_configs(2, 1), [FixedPointConfig(2, 1)])

    def test_budget(self):
        with self.assertRaises(SearchBudgetExceeded):
            PointConfigSolver(5, 0, budget=1).solve()

    def test_negative_point_bound(self):
        with self.assertRaises(InvalidConfigurationError):
            PointConfigSolver(5, 0, max_points=-1)


class PowerConsistencyTest(SimpleTestCase):
    def test_every_table_entry_is_consistent(self):
        for n in NIKULIN_STABILIZERS:
            self.assertTrue(nikulin_power_consistency(n), n)

    def test_order_eight_rows(self):
        self.assertEqual(
            nikulin_power_consistency(8).rows, ((1, 8, 2), (2, 4, 4), (4, 2, 8))
        )


class FixedPointConfigFormTest(SimpleTestCase):
    def test_valid(self):
        form = FixedPointConfigForm(
            data={"N": 2, "s": 1, "curves": [{"g": 1, "r": 1, "c2": 0}]}
        )
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data["config"].curves, (FixedCurve(1, 1, 0),))

    def test_rejects_malformed_points(self):
        form = FixedPointConfigForm(data={"N": 2, "s": 0, "points": [[1, 1]]})
        self.assertFalse(form.is_valid())
        self.assertIn("points", form.errors)

    def test_rejects_unknown_curve_keys(self):
        form = FixedPointConfigForm(
            data={"N": 2, "s": 1, "curves": [{"g": 1, "r": 1, "c2": 0, "k": 2}]}
        )
        self.assertFalse(form.is_valid())
        self.assertIn("curves", form.errors)

    def test_rejects_curves_on_symplectic_actions(self):
        form = FixedPointConfigForm(
            data={"N": 3, "s": 0, "curves": [{"g": 0, "r": 1, "c2": -2}]}
        )
        self.assertFalse(form.is_valid())
        self.assertIn(NON_FIELD_ERRORS, form.errors)

    def test_rejects_curves_with_the_wrong_self_intersection(self):
        form = FixedPointConfigForm(
            data={"N": 2, "s": 1, "curves": [{"g": 1, "r": 1, "c2": 4}]}
        )
        self.assertFalse(form.is_valid())
        self.assertIn(NON_FIELD_ERRORS, form.errors)


class LefschetzCommandTest(SimpleTestCase):
    def call(self, *args, **kwargs):
        out = io.StringIO()
        call_command("lefschetz", *args, stdout=out, **kwargs)
        return out.getvalue()

    def test_verify(self):
        output = self.call("verify", '{"N": 2, "s": 0, "points": [[1, 1, 8]]}')
        self.assertEqual(output.strip(), "N=2 s=0: 8x(1,1): balanced")

    def test_verify_from_stdin(self):
        payload = json.loads(
            self.call(
                "verify",
                "-",
                "--format",
                "json",
                stdin=io.StringIO('{"N": 2, "s": 0, "points": [[1, 1, 8]]}'),
            )
        )
        self.assertEqual(payload["status"], "balanced")

    def test_unbalanced_exits_with_one(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", '{"N": 2, "s": 0, "points": [[1, 1, 7]]}')
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("residual 1/4", str(ctx.exception))

    def test_invalid_config_exits_with_two(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", '{"N": 5, "s": 0, "points": [[1, 2, 1]]}')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_search(self):
        payload = json.loads(self.call("search", "--N", "5", "--s", "0", "--format", "json"))
        self.assertEqual(len(payload["configs"]), 1)
        self.assertEqual(payload["configs"][0]["points"], [[1, 4, 2], [2, 3, 2]])

    def test_search_table(self):
        lines = self.call("search", "--N", "5", "--s", "0").splitlines()
        self.assertEqual(json.loads(lines[0])["points"], [[1, 4, 2], [2, 3, 2]])
        self.assertEqual(lines[1].split("\t"), ["config", "points", "summary"])
        self.assertEqual(lines[2].split("\t")[1], "4")

    def test_search_budget_exits_with_three(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("search", "--N", "5", "--s", "0", "--budget", "1")
        self.assertEqual(ctx.exception.returncode, 3)

    def test_guarantee(self):
        payload = json.loads(self.call("guarantee", "--n", "5", "--m", "2", "--format", "json"))
        self.assertEqual(payload["status"], "not guaranteed")

    def test_nonvanishing(self):
        rows = json.loads(self.call("nonvanishing", "--limit", "12", "--format", "json"))
        self.assertTrue(all(row["lhs_zero"] == (row["m"] == 2) for row in rows))

    def test_consistency(self):
        lines = self.call("consistency", "--n", "8").splitlines()
        self.assertEqual(lines, ["r\torder\tfixed_points", "1\t8\t2", "2\t4\t4", "4\t2\t8"])

    def test_consistency_rejects_unknown_orders(self):
        with self.assertRaises(CommandError):
            self.call("consistency", "--n", "9")

    def test_specialization(self):
        payload = json.loads(
            self.call("specialization", "--g", "2", "--s", "1", "--N", "5", "--format", "json")
        )
        self.assertTrue(payload["matches_at_minus_s"])
        self.assertTrue(payload["conjugate_at_s"])

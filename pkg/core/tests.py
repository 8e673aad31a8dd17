import io
import json
import os
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from unittest import mock

from django.conf import settings
from django.test import SimpleTestCase, override_settings
from sympy import ImmutableMatrix, Rational

from core.checks import check_search_limits
from core.cli import run
from core.exceptions import OrderLimitExceeded, SearchBudgetExceeded, UnknownLatticeError
from core.management.base import tsv
from core.serializers import dumps, format_rational, parse_rational
from core.settings.base import env_int
from lefschetz.contributions import Guarantee


class SerializerTest(SimpleTestCase):
    def test_format_rational(self):
        self.assertEqual(format_rational(Fraction(4, 3)), "4/3")
        self.assertEqual(format_rational(Rational(6, 3)), "2")
        self.assertEqual(format_rational(-5), "-5")

    def test_parse_rational(self):
        self.assertEqual(parse_rational("4/3"), Fraction(4, 3))
        self.assertEqual(parse_rational(" -2/6 "), Fraction(-1, 3))
        self.assertEqual(parse_rational(7), Fraction(7))
        for bad in (1.5, True, "1/0", "one"):
            with self.assertRaises(ValueError):
                parse_rational(bad)

    def test_dumps_is_exact(self):
        payload = json.loads(
            dumps(
                {
                    "q": Fraction(1, 2),
                    "gram": ImmutableMatrix([[2, 1], [1, 2]]),
                    "status": Guarantee.GUARANTEED,
                    "orders": {7, 3},
                }
            )
        )
        self.assertEqual(
            payload,
            {"q": "1/2", "gram": [[2, 1], [1, 2]], "status": "guaranteed", "orders": [3, 7]},
        )


class ExceptionTest(SimpleTestCase):
    def test_messages(self):
        self.assertEqual(
            str(OrderLimitExceeded(70000, 65536)),
            "discriminant group of order 70000 exceeds the limit 65536",
        )
        self.assertEqual(
            str(SearchBudgetExceeded(10, "isometry search")),
            "isometry search exhausted its budget of 10 nodes",
        )
        self.assertEqual(str(UnknownLatticeError("D4")), "unknown standard lattice: 'D4'")


class SearchLimitCheckTest(SimpleTestCase):
    def test_defaults_pass(self):
        self.assertEqual(check_search_limits(None), [])

    @override_settings(K3EQ_SEARCH_BUDGET=0, LEFSCHETZ_MAX_POINTS="24")
    def test_invalid_limits(self):
        errors = check_search_limits(None)
        self.assertEqual([error.id for error in errors], ["k3eq.E001", "k3eq.E003"])

    def test_environment_values_are_parsed(self):
        with mock.patch.dict(os.environ, {"K3EQ_SEARCH_BUDGET": "500"}):
            self.assertEqual(env_int("K3EQ_SEARCH_BUDGET", 7), 500)
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(env_int("K3EQ_SEARCH_BUDGET", 7), 7)

    def test_non_integer_environment_value_is_reported(self):
        with mock.patch.dict(os.environ, {"K3EQ_SEARCH_BUDGET": "lots"}):
            budget = env_int("K3EQ_SEARCH_BUDGET", 7)
        self.assertEqual(budget, "lots")
        with override_settings(K3EQ_SEARCH_BUDGET=budget):
            errors = check_search_limits(None)
        self.assertEqual([error.id for error in errors], ["k3eq.E001"])
        self.assertIn("'lots'", errors[0].msg)

    def test_search_limit_checks_are_not_silenced(self):
        self.assertEqual(settings.SILENCED_SYSTEM_CHECKS, [])


class TsvTest(SimpleTestCase):
    def test_cells(self):
        text = tsv([(True, None, [1, 2], Fraction(1, 3))], ("a", "b", "c", "d"))
        self.assertEqual(text, "a\tb\tc\td\nyes\t\t[1, 2]\t1/3\n")


class CliTest(SimpleTestCase):
    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_unknown_command(self):
        code, _, err = self.run_cli("bogus")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("usage: k3eq"))

    def test_missing_command(self):
        self.assertEqual(self.run_cli()[0], 2)

    def test_success(self):
        code, out, _ = self.run_cli("lattice", "standard", "U", "--format", "json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["gram"], [[0, 1], [1, 0]])

    def test_negative_verdict(self):
        code, _, _ = self.run_cli(
            "lattice",
            "isometric",
            '{"gram": [[-4, -1], [-1, -12]]}',
            '{"gram": [[-6, -1], [-1, -8]]}',
        )
        self.assertEqual(code, 1)

    def test_invalid_input(self):
        code, _, err = self.run_cli("lattice", "disc", '{"gram": [[1, 2], [2, 4]]}')
        self.assertEqual(code, 2)
        self.assertIn("degenerate", err)

import io
import json
import math
import random

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import ImmutableMatrix

from core.exceptions import InvalidConfigurationError, PreconditionError
from core.serializers import dumps
from lattices.discriminant import discriminant_group
from lattices.lattice import E8_CARTAN, IntegerLattice, is_isometry, standard_lattice

from .constructions import (
    E8_ROTATION_PAIR,
    block_involution,
    e8_isometry,
    order_eight_action,
    order_four_action,
    root_matrix,
    signed_permutation_matrix,
    twisted_cycle,
)
from .forms import ActionForm, TraceSequenceForm
from .k3action import (
    K3Action,
    TraceSequence,
    factor_order,
    power_gate,
    trace_sequence,
    validate_action,
)
from .reproductions import REPRODUCTIONS
from .services import (
    COMPATIBLE,
    EXAMPLE_INVOLUTION,
    EXAMPLE_PICARD,
    EXAMPLE_SWAP,
    INCOMPATIBLE,
    INCOMPATIBLE_VERDICT,
    ActionClass,
    derived_partner_check,
    discriminant_action,
    enriques_reference,
    enriques_signature,
    example_compatible_report,
    form_automorphisms,
    order_admissibility,
)


class ConstructionTest(SimpleTestCase):
    def setUp(self):
        self.e8 = IntegerLattice.from_rows(E8_CARTAN, "E8")

    def test_simple_roots_reproduce_the_cartan_matrix(self):
        roots = root_matrix()
        self.assertEqual(roots * roots.T, ImmutableMatrix(E8_CARTAN))
        self.assertEqual(abs(roots.det()), 1)

    def test_signed_permutations_preserve_e8(self):
        matrix = e8_isometry(E8_ROTATION_PAIR)
        self.assertTrue(is_isometry(self.e8, matrix))
        self.assertEqual(matrix**4, ImmutableMatrix.eye(8))

    def test_odd_sign_changes_are_rejected(self):
        with self.assertRaises(InvalidConfigurationError):
            e8_isometry(((-1, 0),) + tuple((1, i) for i in range(1, 8)))
        with self.assertRaises(InvalidConfigurationError):
            signed_permutation_matrix(((1, 0), (1, 0)))

    def test_twisted_cycle(self):
        cycle = twisted_cycle(2)
        self.assertEqual(cycle.trace(), 0)
        self.assertEqual(cycle**2, -ImmutableMatrix.eye(4))
        self.assertEqual(cycle**4, ImmutableMatrix.eye(4))
        with self.assertRaises(InvalidConfigurationError):
            twisted_cycle(0)

    def test_order_eight_traces(self):
        for fixed_points in (0, 2, 4):
            action = order_eight_action(fixed_points)
            self.assertTrue(validate_action(action), fixed_points)
            traces = trace_sequence(action)
            self.assertEqual(
                traces.values, {1: fixed_points, 2: 4, 4: 8, 8: 24}
            )
        with self.assertRaises(InvalidConfigurationError):
            order_eight_action(6)

    def test_order_four_and_involution(self):
        action = order_four_action(0)
        self.assertTrue(validate_action(action))
        self.assertEqual((action.trace(1), action.trace(2)), (20, 16))
        involution = block_involution(1)
        self.assertTrue(validate_action(involution))
        self.assertEqual(involution.trace(), -8)


class K3ActionTest(SimpleTestCase):
    def test_factor_order(self):
        self.assertEqual((factor_order(8, 4).n, factor_order(8, 4).m), (4, 2))
        self.assertEqual(factor_order(8, 4).kind, "mixed")
        self.assertEqual(factor_order(5, 0).kind, "symplectic")
        self.assertEqual(factor_order(7, 1).kind, "purely nonsymplectic")
        self.assertEqual(factor_order(1, 0).kind, "trivial")
        self.assertEqual(factor_order(12, 9).to_payload(), {"n": 3, "m": 4, "kind": "mixed"})

    def test_validate_reports_every_violation(self):
        matrix = order_four_action(0).mukai_matrix
        self.assertIn("M^2 = I", validate_action(K3Action(2, matrix, 0)).violations[0])
        self.assertIn("order is 4", validate_action(K3Action(8, matrix, 0)).violations[0])
        self.assertIn("outside", validate_action(K3Action(4, matrix, 7)).violations[0])
        self.assertIn("24x24", validate_action(K3Action(2, ImmutableMatrix.eye(2), 0)).violations[0])

    def test_non_isometry_is_rejected(self):
        matrix = ImmutableMatrix.diag(-1, *([1] * 23))
        verdict = validate_action(K3Action(2, matrix, 0))
        self.assertEqual(verdict.violations, ("matrix does not preserve the Mukai pairing",))

    def test_non_integral_matrix(self):
        with self.assertRaises(InvalidConfigurationError):
            K3Action(2, ImmutableMatrix.eye(24) / 2, 0)

    def test_powers(self):
        action = order_eight_action(2)
        square = action.power(2)
        self.assertEqual((square.N, square.s), (4, 0))
        self.assertEqual(square.trace(), 4)
        self.assertEqual(K3Action.from_payload(json.loads(dumps(action))), action)

    def test_powers_divide_the_nonsymplectic_order(self):
        rng = random.Random(360)
        for _ in range(1000):
            N = rng.randint(2, 60)
            s, r = rng.randrange(N), rng.randint(1, N - 1)
            m = factor_order(N, s).m
            g = math.gcd(N, r)
            power = factor_order(N // g, s * (r // g) % (N // g))
            self.assertEqual(power.m, m // math.gcd(m, r), (N, s, r))
        for action in (order_eight_action(2), order_eight_action(4), order_four_action(2)):
            m = action.factorization.m
            for r in range(1, action.N):
                self.assertEqual(action.power(r).factorization.m, m // math.gcd(m, r), r)


class TraceSequenceTest(SimpleTestCase):
    def test_rational_multiplicities(self):
        traces = trace_sequence(order_four_action(0))
        self.assertEqual(traces.rational_multiplicities(), {1: 20, 2: 0, 4: 2})
        self.assertEqual(traces.character_sum() % 4, 0)
        self.assertTrue(traces.consistency())

    def test_values_depend_on_the_gcd(self):
        traces = TraceSequence(8, {1: 2, 2: 4, 4: 8})
        self.assertEqual(traces.value(3), 2)
        self.assertEqual(traces.value(6), 4)
        self.assertEqual(traces.values[8], 24)

    def test_non_divisors_are_rejected(self):
        with self.assertRaises(InvalidConfigurationError):
            TraceSequence(8, {3: 0})

    def test_incomplete_sequence(self):
        traces = TraceSequence(10, {1: 0, 2: 4})
        self.assertFalse(traces.is_complete)
        self.assertFalse(traces.consistency())

    def test_non_integral_multiplicity(self):
        self.assertFalse(TraceSequence(2, {1: 3}).consistency())

    def test_power_gate_on_order_eight(self):
        for fixed_points in (0, 2, 4):
            self.assertTrue(power_gate(TraceSequence(8, {1: fixed_points, 2: 4, 4: 8}), 4, 2))
        for fixed_points in (1, 6):
            self.assertFalse(power_gate(TraceSequence(8, {1: fixed_points, 2: 4, 4: 8}), 4, 2))

    def test_power_gate_on_order_ten(self):
        gate = power_gate(TraceSequence(10, {1: 0, 2: 4}), 5, 2)
        self.assertTrue(gate)
        self.assertIn("sigma^2: symplectic of order 5, 4 fixed points", gate.notes)

    def test_power_gate_symplectic_counts(self):
        gate = power_gate(TraceSequence(8, {1: 0, 2: 6, 4: 8}), 4, 2)
        self.assertFalse(gate)
        self.assertIn("expected 4", gate.violations[0])

    def test_power_gate_requires_matching_factorization(self):
        with self.assertRaises(InvalidConfigurationError):
            power_gate(TraceSequence(8, {}), 3, 2)


class ServicesTest(SimpleTestCase):
    def setUp(self):
        self.pic = IntegerLattice.from_rows(EXAMPLE_PICARD, "Pic")

    def test_partner_check(self):
        first, second = order_eight_action(0), order_eight_action(2)
        self.assertEqual(derived_partner_check(first, first).verdict, COMPATIBLE)
        report = derived_partner_check(first, second)
        self.assertEqual(report.verdict, INCOMPATIBLE)
        self.assertEqual(report.first_mismatch.name, "traces")
        self.assertEqual(report.integral_obstruction, "not found")

    def test_partner_check_on_different_orders(self):
        report = derived_partner_check(order_eight_action(0), order_four_action(2))
        self.assertEqual(report.first_mismatch.name, "order")
        self.assertEqual(len(report.checks), 1)

    def test_partner_check_is_symmetric(self):
        actions = [
            order_eight_action(0),
            order_eight_action(2),
            order_eight_action(4),
            order_four_action(0),
            block_involution(1),
        ]
        for i, first in enumerate(actions):
            for second in actions[i + 1 :]:
                forward = derived_partner_check(first, second)
                backward = derived_partner_check(second, first)
                self.assertEqual(forward.verdict, backward.verdict)
                self.assertEqual(
                    [(check.name, check.matches) for check in forward.checks],
                    [(check.name, check.matches) for check in backward.checks],
                )

    def test_order_admissibility(self):
        self.assertFalse(order_admissibility(1, 23))
        self.assertFalse(order_admissibility(9, 1))
        self.assertFalse(order_admissibility(8, 2))
        self.assertTrue(order_admissibility(7, 2))
        self.assertTrue(order_admissibility(1, 66))
        self.assertEqual(order_admissibility(5, 1).notes, ("4 fixed points",))
        self.assertFalse(order_admissibility(0, 2))

    def test_enriques_reference(self):
        reference = enriques_reference()
        self.assertEqual((reference.rank, reference.signature, abs(reference.det)), (10, (1, 9), 1024))
        verdict = enriques_signature(reference, full_isometry=True)
        self.assertTrue(verdict)
        self.assertTrue(verdict.full_isometry)

    def test_enriques_mismatch(self):
        verdict = enriques_signature(standard_lattice("U"))
        self.assertFalse(verdict)
        self.assertEqual(len(verdict.checks), 4)

    def test_discriminant_action(self):
        self.assertEqual(
            discriminant_action(self.pic, EXAMPLE_INVOLUTION).classification, ActionClass.MINUS
        )
        self.assertEqual(discriminant_action(self.pic, EXAMPLE_SWAP).classification, ActionClass.OTHER)
        self.assertEqual(
            discriminant_action(self.pic, ImmutableMatrix.eye(2)).classification, ActionClass.PLUS
        )
        with self.assertRaises(PreconditionError):
            discriminant_action(self.pic, ((1, 1), (0, 1)))

    def test_form_automorphisms(self):
        self.assertEqual(len(form_automorphisms(discriminant_group(self.pic))), 4)

    def test_compatible_example(self):
        report = example_compatible_report()
        self.assertTrue(report.passed)
        self.assertEqual(report.verdict, INCOMPATIBLE_VERDICT)


class ReproductionTest(SimpleTestCase):
    def test_every_reproduction_passes(self):
        for name, build in REPRODUCTIONS.items():
            report = build()
            failed = [
                check.name for section in report.sections for check in section.checks if not check.matches
            ]
            self.assertEqual(failed, [], name)

    def test_reproduce_command(self):
        out = io.StringIO()
        call_command("reproduce", "compatible", stdout=out)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "== Picard lattice ==")
        self.assertEqual(lines[-1], INCOMPATIBLE_VERDICT)
        self.assertNotIn("[FAIL]", out.getvalue())

    def test_reproduce_json(self):
        out = io.StringIO()
        call_command("reproduce", "mixed", "--format", "json", stdout=out)
        self.assertTrue(json.loads(out.getvalue())["passed"])


class ActionFormTest(SimpleTestCase):
    def test_valid_action(self):
        payload = json.loads(dumps(block_involution(1)))
        form = ActionForm(data=payload)
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data["action"], block_involution(1))

    def test_rejects_wrong_size(self):
        form = ActionForm(data={"N": 2, "s": 0, "mukai_matrix": [[1, 0], [0, 1]]})
        self.assertFalse(form.is_valid())
        self.assertIn("mukai_matrix", form.errors)

    def test_picard_data(self):
        payload = json.loads(dumps(block_involution(1)))
        payload["pic"] = {"gram": [[2, 5], [5, 2]], "matrix": [[1, 5], [0, -1]]}
        form = ActionForm(data=payload)
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data["action"].pic.lattice.det, -21)

    def test_rejects_malformed_picard_data(self):
        payload = json.loads(dumps(block_involution(1)))
        payload["pic"] = {"gram": [[2, 5], [5, 2]]}
        form = ActionForm(data=payload)
        self.assertFalse(form.is_valid())
        self.assertIn("pic", form.errors)

    def test_trace_sequence_form(self):
        form = TraceSequenceForm(data={"N": 8, "values": {"1": 2, "2": 4}})
        self.assertTrue(form.is_valid(), form.errors)
        self.assertEqual(form.cleaned_data["traces"].values, {1: 2, 2: 4, 8: 24})
        form = TraceSequenceForm(data={"N": 8, "values": {"3": 2}})
        self.assertFalse(form.is_valid())


class ActionCommandTest(SimpleTestCase):
    def call(self, *args, **kwargs):
        out = io.StringIO()
        call_command("action", *args, stdout=out, **kwargs)
        return out.getvalue()

    def construct(self, *args):
        return self.call("construct", *args).strip()

    def test_construct_and_validate(self):
        action = self.construct("order8", "--chi", "2")
        self.assertEqual(json.loads(action)["N"], 8)
        self.assertEqual(self.call("validate", action).strip(), "valid")

    def test_construct_defaults(self):
        self.assertEqual(json.loads(self.construct("involution"))["s"], 1)
        self.assertEqual(json.loads(self.construct("order4"))["s"], 0)

    def test_trace(self):
        action = self.construct("order8", "--chi", "2")
        payload = json.loads(self.call("trace", action, "--format", "json"))
        self.assertEqual(payload["traces"]["values"], {"1": 2, "2": 4, "4": 8, "8": 24})
        self.assertTrue(payload["gate"]["accepted"])
        table = self.call("trace", action).splitlines()
        self.assertEqual(table[0], "kind\tindex\tvalue")
        self.assertIn("chi\t1\t2", table)

    def test_trace_of_invalid_action(self):
        action = json.loads(self.construct("order4"))
        action["N"] = 2
        with self.assertRaises(CommandError) as ctx:
            self.call("trace", json.dumps(action))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_factor(self):
        payload = json.loads(self.call("factor", "--N", "8", "--s", "4", "--format", "json"))
        self.assertEqual(payload, {"N": 8, "s": 4, "n": 4, "m": 2, "kind": "mixed"})
        with self.assertRaises(CommandError) as ctx:
            self.call("factor")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_gate(self):
        output = self.call("gate", "--N", "10", "--n", "5", "--m", "2", "--traces", '{"1": 0, "2": 4}')
        self.assertEqual(output.strip(), "accepted")
        with self.assertRaises(CommandError) as ctx:
            self.call("gate", "--N", "8", "--n", "4", "--m", "2", "--traces", '{"1": 1, "2": 4, "4": 8}')
        self.assertEqual(ctx.exception.returncode, 1)
        with self.assertRaises(CommandError) as ctx:
            self.call("gate", "--N", "8", "--n", "3", "--m", "2", "--traces", '{"1": 0}')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_compare(self):
        first = self.construct("order8", "--chi", "0")
        second = self.construct("order8", "--chi", "2")
        out = io.StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("action", "compare", first, second, stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn(f"verdict: {INCOMPATIBLE}", out.getvalue())

    def test_admissible(self):
        self.assertIn("admissible", self.call("admissible", "--n", "7", "--m", "2"))
        with self.assertRaises(CommandError) as ctx:
            self.call("admissible", "--n", "8", "--m", "2")
        self.assertEqual(ctx.exception.returncode, 1)

    def test_enriques(self):
        source = json.dumps({"gram": enriques_reference().rows_as_lists()})
        self.assertEqual(self.call("enriques", source).strip(), "matches U(2)+E8(-2)")

    def test_disc_action(self):
        payload = json.loads(
            self.call(
                "disc-action",
                '{"gram": [[2, 5], [5, 2]]}',
                "--matrix",
                "[[1, 5], [0, -1]]",
                "--format",
                "json",
            )
        )
        self.assertEqual(payload["orders"], [3, 7])
        self.assertEqual(payload["classification"], "-1")
